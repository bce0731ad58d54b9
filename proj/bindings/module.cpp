// Python surface for the core operations. Arguments and results are plain
// numpy arrays, lists, and dicts; the validated C++ types are constructed
// internally so every invariant check still runs. All indices are 0-based
// on this side, matching numpy, while the file formats stay 1-based.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otmix/cost.hpp"
#include "otmix/errors.hpp"
#include "otmix/exact_ot.hpp"
#include "otmix/losses.hpp"
#include "otmix/metrics.hpp"
#include "otmix/mixup.hpp"
#include "otmix/relaxed_ot.hpp"
#include "otmix/sequences.hpp"
#include "otmix/synthbench.hpp"

namespace py = pybind11;
using namespace otmix;

namespace {

WindowConfig window_from(std::optional<int> window) {
    return window ? WindowConfig{true, *window} : no_window();
}

ExactMethod method_from(const std::string& name) {
    if (name == "sinkhorn")
        return ExactMethod::kSinkhorn;
    if (name == "ipot")
        return ExactMethod::kIpot;
    throw Error("unknown exact method '" + name + "', expected sinkhorn or ipot");
}

std::vector<BenchMethod> bench_methods_from(const std::vector<std::string>& names,
                                            int window) {
    std::vector<BenchMethod> methods;
    for (const std::string& name : names) {
        if (name == "relaxed")
            methods.push_back({BenchMethodKind::kRelaxed, 0});
        else if (name == "relaxed_window")
            methods.push_back({BenchMethodKind::kRelaxedWindow, window});
        else if (name == "ipot")
            methods.push_back({BenchMethodKind::kIpot, 0});
        else if (name == "sinkhorn")
            methods.push_back({BenchMethodKind::kSinkhorn, 0});
        else
            throw Error("unknown bench method '" + name + "'");
    }
    return methods;
}

} // namespace

PYBIND11_MODULE(_otmix, m) {
    m.doc() = "Cross-modal sequence alignment via relaxed optimal transport";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def(
        "masses_from_norms",
        [](const Eigen::MatrixXd& a) {
            return masses_from_norms(EmbeddingSequence(a)).values();
        },
        py::arg("vectors"),
        "Row masses proportional to the L2 norms of the embedding rows.");

    m.def(
        "cost_matrix",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
            return cost_matrix(EmbeddingSequence(a), EmbeddingSequence(b)).values();
        },
        py::arg("a"), py::arg("b"),
        "Pairwise Euclidean distances between the rows of a and b.");

    m.def("window_bounds", &window_bounds, py::arg("i"), py::arg("n"), py::arg("m"),
          py::arg("width"),
          "Inclusive 0-based [lo, hi] of admissible target columns for source "
          "row i under a diagonal window of the given width.");

    m.def(
        "solve_relaxed",
        [](const Eigen::MatrixXd& cost, const Eigen::VectorXd& row_masses,
           std::optional<int> window) {
            RelaxedSolution sol = solve_relaxed(CostMatrix(cost), MassVector(row_masses),
                                                window_from(window));
            py::dict out;
            out["plan"] = sol.plan.values;
            out["targets"] = sol.plan.relaxed_targets;
            out["distance"] = sol.distance;
            return out;
        },
        py::arg("cost"), py::arg("row_masses"), py::arg("window") = std::nullopt,
        "Row-wise closed-form solution of the relaxed transport problem. "
        "window=None disables the diagonal band.");

    m.def(
        "extract_alignment",
        [](const Eigen::MatrixXd& plan) {
            TransportPlan wrapped;
            wrapped.values = plan;
            wrapped.row_marginal = plan.rowwise().sum();
            return extract_alignment(wrapped).targets;
        },
        py::arg("plan"),
        "Row-wise argmax alignment of a transport plan, 0-based targets.");

    m.def(
        "relaxed_grad",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
           std::optional<int> window) {
            RelaxedGradient grad = relaxed_grad(EmbeddingSequence(a),
                                                EmbeddingSequence(b),
                                                window_from(window));
            return py::make_tuple(grad.grad_a, grad.grad_b);
        },
        py::arg("a"), py::arg("b"), py::arg("window") = std::nullopt,
        "Analytic gradient of the relaxed distance with respect to both "
        "embedding matrices, masses taken from the norms of a.");

    m.def(
        "solve_exact",
        [](const Eigen::MatrixXd& cost, const Eigen::VectorXd& row_masses,
           const Eigen::VectorXd& col_masses, const std::string& method,
           std::optional<double> epsilon, double beta, int max_iters, double tol) {
            SolverConfig config;
            config.method = method_from(method);
            config.epsilon = epsilon;
            config.beta = beta;
            config.max_iters = max_iters;
            config.tol = tol;
            ExactSolution sol = solve_exact(CostMatrix(cost), MassVector(row_masses),
                                            MassVector(col_masses), config);
            py::dict out;
            out["plan"] = sol.plan.values;
            out["plan_cost"] = sol.plan_cost;
            out["iters_used"] = sol.iters_used;
            out["violation"] = sol.violation;
            out["converged"] = sol.converged;
            out["method"] = method_name(sol.method);
            return out;
        },
        py::arg("cost"), py::arg("row_masses"), py::arg("col_masses"),
        py::arg("method") = "sinkhorn", py::arg("epsilon") = std::nullopt,
        py::arg("beta") = 1.0, py::arg("max_iters") = 2000, py::arg("tol") = 1e-6,
        "Entropic (sinkhorn) or proximal (ipot) transport plan satisfying "
        "both marginals within tol.");

    m.def(
        "mixup",
        [](const Eigen::MatrixXd& speech, const Eigen::MatrixXd& text,
           const std::vector<int>& targets, double prob, std::uint64_t seed) {
            MixupSequence mixed = mixup(EmbeddingSequence(speech),
                                        EmbeddingSequence(text), Alignment{targets},
                                        MixupConfig{prob, seed});
            std::string origins;
            for (Origin origin : mixed.origin)
                origins.push_back(static_cast<char>(origin));
            return py::make_tuple(mixed.vectors, origins);
        },
        py::arg("speech"), py::arg("text"), py::arg("targets"), py::arg("prob") = 0.2,
        py::arg("seed") = 0,
        "Swap each speech row for its aligned text row with the given "
        "probability. Returns (vectors, origins) with origins as 'S'/'T'.");

    m.def(
        "a_score",
        [](const std::vector<int>& predicted, const std::vector<int>& reference) {
            return a_score(Alignment{predicted}, Alignment{reference});
        },
        py::arg("predicted"), py::arg("reference"),
        "Fraction of positions whose predicted target matches the reference.");

    m.def(
        "modality_gap",
        [](const Eigen::MatrixXd& speech, const Eigen::MatrixXd& text,
           const std::vector<int>& targets) {
            GapReport report = modality_gap(EmbeddingSequence(speech),
                                            EmbeddingSequence(text),
                                            Alignment{targets});
            py::dict out;
            out["sentence_gap"] = report.sentence_gap;
            out["word_gap"] = report.word_gap;
            return out;
        },
        py::arg("speech"), py::arg("text"), py::arg("targets"),
        "Sentence-level and word-level embedding distances across modalities.");

    m.def(
        "cross_entropy",
        [](const Eigen::MatrixXd& probs, const std::vector<int>& targets,
           double label_smoothing) {
            return cross_entropy(TokenDistributionSequence(probs), targets,
                                 label_smoothing);
        },
        py::arg("probs"), py::arg("targets"), py::arg("label_smoothing") = 0.0,
        "Label-smoothed cross entropy averaged over positions.");

    m.def(
        "symmetric_kl",
        [](const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
            return symmetric_kl(TokenDistributionSequence(p),
                                TokenDistributionSequence(q));
        },
        py::arg("p"), py::arg("q"),
        "Jeffreys divergence between two distribution sequences.");

    m.def(
        "symmetric_kl_grad",
        [](const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
            KlGradient grad = symmetric_kl_grad(TokenDistributionSequence(p),
                                                TokenDistributionSequence(q));
            return py::make_tuple(grad.grad_p, grad.grad_q);
        },
        py::arg("p"), py::arg("q"),
        "Analytic gradient of symmetric_kl with respect to both tables.");

    m.def(
        "total_objective",
        [](double st_ce, double mt_ce, double mixup_ce, double kl_ms, double kl_mt,
           double ot_distance, double kl_weight, double ot_weight, bool use_mixup_ce) {
            ObjectiveWeights weights;
            weights.kl_weight = kl_weight;
            weights.ot_weight = ot_weight;
            weights.use_mixup_ce = use_mixup_ce;
            return total_objective(st_ce, mt_ce, mixup_ce, kl_ms, kl_mt, ot_distance,
                                   weights);
        },
        py::arg("st_ce"), py::arg("mt_ce"), py::arg("mixup_ce"), py::arg("kl_ms"),
        py::arg("kl_mt"), py::arg("ot_distance"), py::arg("kl_weight") = 2.0,
        py::arg("ot_weight") = 0.0, py::arg("use_mixup_ce") = false,
        "Weighted training objective combining the loss terms.");

    m.def(
        "synth",
        [](int n_text, int dim, int max_repeats, double noise_sigma,
           std::uint64_t seed) {
            SynthConfig config{n_text, dim, max_repeats, noise_sigma, seed};
            SynthInstance inst = generate(config);
            py::dict out;
            out["text"] = inst.text.vectors();
            out["speech"] = inst.speech.vectors();
            out["truth"] = inst.truth.targets;
            out["text_rows_distinct"] = inst.text_rows_distinct;
            return out;
        },
        py::arg("n_text") = 20, py::arg("dim") = 16, py::arg("max_repeats") = 4,
        py::arg("noise_sigma") = 0.5, py::arg("seed") = 0,
        "Synthetic speech/text pair with known ground-truth alignment.");

    m.def(
        "run_bench",
        [](int trials, const std::vector<std::string>& methods, int window, int n_text,
           int dim, int max_repeats, double noise_sigma, std::uint64_t seed) {
            SynthConfig config{n_text, dim, max_repeats, noise_sigma, seed};
            std::vector<BenchMethod> parsed = bench_methods_from(methods, window);
            BenchReport report;
            {
                py::gil_scoped_release release;
                report = run_bench(config, trials, parsed);
            }
            py::list rows;
            for (const BenchRow& row : report.rows) {
                py::dict out;
                out["method"] = row.method;
                out["trials"] = row.trials;
                out["mean_ascore"] = row.mean_ascore;
                out["std_ascore"] = row.std_ascore;
                out["mean_distance"] = row.mean_distance;
                out["mean_wall_ms"] = row.mean_wall_ms;
                out["ascores"] = row.ascores;
                out["distances"] = row.distances;
                rows.append(out);
            }
            return rows;
        },
        py::arg("trials") = 200,
        py::arg("methods") =
            std::vector<std::string>{"relaxed", "relaxed_window", "ipot"},
        py::arg("window") = 10, py::arg("n_text") = 20, py::arg("dim") = 16,
        py::arg("max_repeats") = 4, py::arg("noise_sigma") = 0.5, py::arg("seed") = 0,
        "Alignment-accuracy benchmark over synthetic instances; one result "
        "dict per method.");
}
