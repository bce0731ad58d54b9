#include "otmix/synthbench.hpp"

#include <chrono>
#include <cmath>

#include "otmix/cost.hpp"
#include "otmix/exact_ot.hpp"
#include "otmix/metrics.hpp"
#include "otmix/rng.hpp"
#include "text_io.hpp"

namespace otmix {

SynthInstance generate(const SynthConfig& config) {
    if (config.n_text < 1 || config.dim < 1 || config.max_repeats < 1)
        throw Error("generate: n_text, dim and max_repeats must be positive");
    if (config.noise_sigma < 0.0 || !std::isfinite(config.noise_sigma))
        throw Error("generate: noise_sigma must be finite and nonnegative");

    SeededRng rng(config.seed);

    Eigen::MatrixXd text(config.n_text, config.dim);
    for (int i = 0; i < config.n_text; ++i) {
        for (int j = 0; j < config.dim; ++j)
            text(i, j) = rng.gaussian();
        double norm = text.row(i).norm();
        if (norm == 0.0)
            text(i, 0) = 1.0;
        else
            text.row(i) /= norm;
    }

    std::vector<int> repeats(config.n_text);
    int frames = 0;
    for (int i = 0; i < config.n_text; ++i) {
        repeats[i] = rng.uniform_int(config.max_repeats);
        frames += repeats[i];
    }

    Eigen::MatrixXd speech(frames, config.dim);
    Alignment truth;
    truth.targets.reserve(frames);
    int row = 0;
    for (int i = 0; i < config.n_text; ++i) {
        for (int r = 0; r < repeats[i]; ++r, ++row) {
            for (int j = 0; j < config.dim; ++j)
                speech(row, j) = text(i, j) + config.noise_sigma * rng.gaussian();
            truth.targets.push_back(i);
        }
    }

    SynthInstance inst{EmbeddingSequence(std::move(text)),
                       EmbeddingSequence(std::move(speech)), std::move(truth), true};
    for (int i = 0; i < config.n_text && inst.text_rows_distinct; ++i)
        for (int j = i + 1; j < config.n_text; ++j)
            if ((inst.text.row(i) - inst.text.row(j)).norm() <= 1e-9) {
                inst.text_rows_distinct = false;
                break;
            }
    return inst;
}

std::string BenchMethod::label() const {
    switch (kind) {
    case BenchMethodKind::kRelaxed:
        return "relaxed";
    case BenchMethodKind::kRelaxedWindow:
        return "relaxed_window";
    case BenchMethodKind::kIpot:
        return "ipot";
    case BenchMethodKind::kSinkhorn:
        return "sinkhorn";
    }
    throw Error("unknown bench method");
}

namespace {

double mean_of(const std::vector<double>& v) {
    double total = 0.0;
    for (double x : v)
        total += x;
    return total / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2)
        return 0.0;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

BenchReport run_bench(const SynthConfig& config, int trials,
                      const std::vector<BenchMethod>& methods) {
    if (trials < 1)
        throw Error("run_bench: trials must be at least 1");
    if (methods.empty())
        throw Error("run_bench: no methods given");

    BenchReport report;
    report.rows.resize(methods.size());
    for (std::size_t k = 0; k < methods.size(); ++k) {
        report.rows[k].method = methods[k].label();
        report.rows[k].trials = trials;
    }

    using clock = std::chrono::steady_clock;
    for (int t = 0; t < trials; ++t) {
        SynthConfig trial_config = config;
        trial_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
        SynthInstance inst = generate(trial_config);

        const CostMatrix cost = cost_matrix(inst.speech, inst.text);
        const MassVector speech_masses = masses_from_norms(inst.speech);
        const MassVector text_masses = masses_from_norms(inst.text);

        for (std::size_t k = 0; k < methods.size(); ++k) {
            const BenchMethod& method = methods[k];
            Alignment align;
            double distance = 0.0;
            auto start = clock::now();
            switch (method.kind) {
            case BenchMethodKind::kRelaxed: {
                RelaxedSolution sol = solve_relaxed(cost, speech_masses, no_window());
                align = extract_alignment(sol.plan);
                distance = sol.distance;
                break;
            }
            case BenchMethodKind::kRelaxedWindow: {
                RelaxedSolution sol =
                    solve_relaxed(cost, speech_masses, WindowConfig{true, method.window});
                align = extract_alignment(sol.plan);
                distance = sol.distance;
                break;
            }
            case BenchMethodKind::kIpot:
            case BenchMethodKind::kSinkhorn: {
                SolverConfig sc;
                sc.method = method.kind == BenchMethodKind::kIpot ? ExactMethod::kIpot
                                                                  : ExactMethod::kSinkhorn;
                ExactSolution sol = solve_exact(cost, speech_masses, text_masses, sc);
                align = extract_alignment(sol.plan);
                distance = sol.plan_cost;
                break;
            }
            }
            auto stop = clock::now();

            BenchRow& row = report.rows[k];
            row.ascores.push_back(a_score(align, inst.truth));
            row.distances.push_back(distance);
            row.wall_ms.push_back(
                std::chrono::duration<double, std::milli>(stop - start).count());
        }
    }

    for (BenchRow& row : report.rows) {
        row.mean_ascore = mean_of(row.ascores);
        row.std_ascore = sample_std(row.ascores, row.mean_ascore);
        row.mean_distance = mean_of(row.distances);
        row.mean_wall_ms = mean_of(row.wall_ms);
    }
    return report;
}

std::string BenchReport::to_csv() const {
    std::string out = "method,trials,mean_ascore,std_ascore,mean_distance,mean_wall_ms\n";
    for (const BenchRow& row : rows) {
        out += row.method;
        out += ',' + detail::format_int(row.trials);
        out += ',' + detail::format_double(row.mean_ascore);
        out += ',' + detail::format_double(row.std_ascore);
        out += ',' + detail::format_double(row.mean_distance);
        out += ',' + detail::format_double(row.mean_wall_ms);
        out += '\n';
    }
    return out;
}

} // namespace otmix
