// otmix: align, compare and mix speech/text embedding sequences from the
// command line. Thin adapter over the library; all formats are defined
// next to the operations that own them.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "otmix/cost.hpp"
#include "otmix/exact_ot.hpp"
#include "otmix/losses.hpp"
#include "otmix/metrics.hpp"
#include "otmix/mixup.hpp"
#include "otmix/relaxed_ot.hpp"
#include "otmix/sequences.hpp"
#include "otmix/synthbench.hpp"

namespace {

// %.17g-style text, same encoding the file writers use
std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw otmix::Error("cannot open " + path + " for writing");
    return out;
}

// write to the file when --out was given, otherwise to stdout
template <typename WriteFn>
void emit(const std::string& out_path, WriteFn&& write) {
    if (out_path.empty()) {
        write(std::cout);
    } else {
        std::ofstream out = open_out(out_path);
        write(out);
        if (!out)
            throw otmix::Error("write failed: " + out_path);
    }
}

otmix::WindowConfig window_from_flags(bool no_window, int width) {
    return no_window ? otmix::no_window() : otmix::WindowConfig{true, width};
}

std::vector<otmix::BenchMethod> parse_methods(const std::string& list, int width) {
    std::vector<otmix::BenchMethod> methods;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t pos = list.find(',', start);
        std::string name = list.substr(
            start, pos == std::string::npos ? std::string::npos : pos - start);
        if (name == "relaxed")
            methods.push_back({otmix::BenchMethodKind::kRelaxed, 0});
        else if (name == "relaxed_window")
            methods.push_back({otmix::BenchMethodKind::kRelaxedWindow, width});
        else if (name == "ipot")
            methods.push_back({otmix::BenchMethodKind::kIpot, 0});
        else if (name == "sinkhorn")
            methods.push_back({otmix::BenchMethodKind::kSinkhorn, 0});
        else
            throw CLI::ValidationError("--methods",
                                       "unknown method '" + name + "'");
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    return methods;
}

struct AlignArgs {
    std::string speech, text, out, heatmap;
    int width = 10;
    bool no_window = false;
};

struct DistanceArgs {
    std::string speech, text, method = "relaxed", plan;
    int width = 10;
    bool no_window = false;
    bool strict = false;
    std::optional<double> epsilon;
    double beta = 1.0;
    int max_iters = 2000;
    double tol = 1e-6;
};

struct MixupArgs {
    std::string speech, text, align, out;
    double prob = 0.2;
    std::uint64_t seed = 0;
};

struct SynthArgs {
    std::string out_prefix;
    int n_text = 20, dim = 16, dur_max = 4;
    double noise = 0.5;
    std::uint64_t seed = 0;
};

struct BenchArgs {
    std::string out, methods = "relaxed,relaxed_window,ipot";
    int trials = 200, n_text = 20, dim = 16, dur_max = 4, window = 10;
    double noise = 0.5;
    std::uint64_t seed = 0;
};

void run_align(const AlignArgs& args) {
    otmix::EmbeddingSequence speech = otmix::read_sequence(args.speech);
    otmix::EmbeddingSequence text = otmix::read_sequence(args.text);
    otmix::CostMatrix cost = otmix::cost_matrix(speech, text);
    otmix::RelaxedSolution sol =
        otmix::solve_relaxed(cost, otmix::masses_from_norms(speech),
                             window_from_flags(args.no_window, args.width));
    if (!args.heatmap.empty()) {
        std::ofstream out = open_out(args.heatmap);
        otmix::write_cost_csv(cost, out);
    }
    otmix::Alignment align = otmix::extract_alignment(sol.plan);
    emit(args.out, [&](std::ostream& out) { otmix::write_alignment(align, out); });
}

void run_distance(const DistanceArgs& args) {
    otmix::EmbeddingSequence speech = otmix::read_sequence(args.speech);
    otmix::EmbeddingSequence text = otmix::read_sequence(args.text);
    otmix::CostMatrix cost = otmix::cost_matrix(speech, text);
    otmix::MassVector speech_masses = otmix::masses_from_norms(speech);

    if (args.method == "relaxed") {
        if (!args.plan.empty())
            throw CLI::ValidationError("--plan", "only exact methods produce a plan");
        otmix::RelaxedSolution sol =
            otmix::solve_relaxed(cost, speech_masses,
                                 window_from_flags(args.no_window, args.width));
        std::cout << fmt(sol.distance) << "\n";
        return;
    }

    otmix::SolverConfig config;
    config.method = args.method == "ipot" ? otmix::ExactMethod::kIpot
                                          : otmix::ExactMethod::kSinkhorn;
    config.epsilon = args.epsilon;
    config.beta = args.beta;
    config.max_iters = args.max_iters;
    config.tol = args.tol;
    otmix::ExactSolution sol = otmix::solve_exact(
        cost, speech_masses, otmix::masses_from_norms(text), config);

    if (!sol.converged) {
        std::cerr << args.method << " did not converge: violation "
                  << fmt(sol.violation) << " after " << sol.iters_used
                  << " iterations\n";
        if (args.strict)
            throw otmix::NumericalError("solver did not converge within --max-iters");
    }
    if (!args.plan.empty()) {
        std::ofstream out = open_out(args.plan);
        otmix::write_plan_csv(sol.plan, out);
        std::ofstream sidecar = open_out(args.plan + ".json");
        sidecar << otmix::plan_sidecar_json(sol) << "\n";
    }
    std::cout << fmt(sol.plan_cost) << "\n";
}

void run_mixup(const MixupArgs& args) {
    otmix::EmbeddingSequence speech = otmix::read_sequence(args.speech);
    otmix::EmbeddingSequence text = otmix::read_sequence(args.text);
    otmix::Alignment align =
        otmix::read_alignment(args.align, static_cast<int>(text.length()));
    otmix::MixupSequence mixed =
        otmix::mixup(speech, text, align, otmix::MixupConfig{args.prob, args.seed});
    emit(args.out, [&](std::ostream& out) { otmix::write_mixup(mixed, out); });
}

void run_synth(const SynthArgs& args) {
    otmix::SynthConfig config;
    config.n_text = args.n_text;
    config.dim = args.dim;
    config.max_repeats = args.dur_max;
    config.noise_sigma = args.noise;
    config.seed = args.seed;
    otmix::SynthInstance inst = otmix::generate(config);
    otmix::write_sequence(inst.text, std::filesystem::path(args.out_prefix + ".text.tsv"));
    otmix::write_sequence(inst.speech,
                          std::filesystem::path(args.out_prefix + ".speech.tsv"));
    otmix::write_alignment(inst.truth,
                           std::filesystem::path(args.out_prefix + ".truth.tsv"));
}

void run_bench(const BenchArgs& args) {
    otmix::SynthConfig config;
    config.n_text = args.n_text;
    config.dim = args.dim;
    config.max_repeats = args.dur_max;
    config.noise_sigma = args.noise;
    config.seed = args.seed;
    otmix::BenchReport report =
        otmix::run_bench(config, args.trials, parse_methods(args.methods, args.window));
    emit(args.out, [&](std::ostream& out) { out << report.to_csv(); });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-modal sequence alignment via relaxed optimal transport"};
    app.require_subcommand(1);

    AlignArgs align_args;
    auto* align_cmd =
        app.add_subcommand("align", "Align source rows to target rows");
    align_cmd->add_option("--speech", align_args.speech, "source embedding TSV")
        ->required();
    align_cmd->add_option("--text", align_args.text, "target embedding TSV")->required();
    align_cmd->add_option("--out", align_args.out, "alignment TSV (default stdout)");
    align_cmd->add_option("--window", align_args.width, "diagonal band half-width");
    align_cmd->add_flag("--no-window", align_args.no_window, "search all target columns");
    align_cmd->add_option("--heatmap", align_args.heatmap, "also dump the cost CSV here");
    align_cmd->callback([&] { run_align(align_args); });

    DistanceArgs dist_args;
    auto* dist_cmd =
        app.add_subcommand("distance", "Print the transport distance between two files");
    dist_cmd->add_option("--speech", dist_args.speech, "source embedding TSV")->required();
    dist_cmd->add_option("--text", dist_args.text, "target embedding TSV")->required();
    dist_cmd->add_option("--method", dist_args.method, "relaxed, sinkhorn or ipot")
        ->check(CLI::IsMember({"relaxed", "sinkhorn", "ipot"}));
    dist_cmd->add_option("--window", dist_args.width, "diagonal band half-width (relaxed)");
    dist_cmd->add_flag("--no-window", dist_args.no_window, "search all target columns");
    dist_cmd->add_option("--epsilon", dist_args.epsilon,
                         "entropic weight (default 0.01 * mean cost)");
    dist_cmd->add_option("--beta", dist_args.beta, "ipot proximal weight");
    dist_cmd->add_option("--max-iters", dist_args.max_iters, "iteration budget");
    dist_cmd->add_option("--tol", dist_args.tol, "marginal violation tolerance");
    dist_cmd->add_option("--plan", dist_args.plan,
                         "write the plan CSV here plus a .json summary");
    dist_cmd->add_flag("--strict", dist_args.strict, "exit 3 if the solver did not converge");
    dist_cmd->callback([&] { run_distance(dist_args); });

    MixupArgs mixup_args;
    auto* mixup_cmd =
        app.add_subcommand("mixup", "Swap aligned target tokens into the source sequence");
    mixup_cmd->add_option("--speech", mixup_args.speech, "source embedding TSV")
        ->required();
    mixup_cmd->add_option("--text", mixup_args.text, "target embedding TSV")->required();
    mixup_cmd->add_option("--align", mixup_args.align, "alignment TSV")->required();
    mixup_cmd->add_option("--prob", mixup_args.prob, "swap probability");
    mixup_cmd->add_option("--seed", mixup_args.seed, "random seed");
    mixup_cmd->add_option("--out", mixup_args.out, "mixed TSV (default stdout)");
    mixup_cmd->callback([&] { run_mixup(mixup_args); });

    std::string pred_path, ref_path;
    auto* ascore_cmd =
        app.add_subcommand("ascore", "Fraction of positions agreeing with a reference");
    ascore_cmd->add_option("--pred", pred_path, "predicted alignment TSV")->required();
    ascore_cmd->add_option("--ref", ref_path, "reference alignment TSV")->required();
    ascore_cmd->callback([&] {
        double score = otmix::a_score(otmix::read_alignment(pred_path),
                                      otmix::read_alignment(ref_path));
        nlohmann::json j;
        j["a_score"] = score;
        std::cout << j.dump() << "\n";
    });

    std::string gap_speech, gap_text, gap_align;
    auto* gap_cmd =
        app.add_subcommand("gap", "Sentence- and word-level distance between modalities");
    gap_cmd->add_option("--speech", gap_speech, "source embedding TSV")->required();
    gap_cmd->add_option("--text", gap_text, "target embedding TSV")->required();
    gap_cmd->add_option("--align", gap_align, "alignment TSV")->required();
    gap_cmd->callback([&] {
        otmix::EmbeddingSequence speech = otmix::read_sequence(gap_speech);
        otmix::EmbeddingSequence text = otmix::read_sequence(gap_text);
        otmix::Alignment align =
            otmix::read_alignment(gap_align, static_cast<int>(text.length()));
        std::cout << otmix::gap_json(otmix::modality_gap(speech, text, align)) << "\n";
    });

    SynthArgs synth_args;
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate a synthetic speech/text pair with truth");
    synth_cmd->add_option("--out-prefix", synth_args.out_prefix,
                          "writes <prefix>.text.tsv, .speech.tsv, .truth.tsv")
        ->required();
    synth_cmd->add_option("--n-text", synth_args.n_text, "text length");
    synth_cmd->add_option("--dim", synth_args.dim, "embedding dimension");
    synth_cmd->add_option("--dur-max", synth_args.dur_max, "max repeats per token");
    synth_cmd->add_option("--noise", synth_args.noise, "speech noise level");
    synth_cmd->add_option("--seed", synth_args.seed, "random seed");
    synth_cmd->callback([&] { run_synth(synth_args); });

    BenchArgs bench_args;
    auto* bench_cmd =
        app.add_subcommand("bench", "Score alignment methods on synthetic instances");
    bench_cmd->add_option("--trials", bench_args.trials, "instances per method");
    bench_cmd->add_option("--methods", bench_args.methods,
                          "comma list: relaxed,relaxed_window,ipot,sinkhorn");
    bench_cmd->add_option("--window", bench_args.window,
                          "band half-width for relaxed_window");
    bench_cmd->add_option("--n-text", bench_args.n_text, "text length");
    bench_cmd->add_option("--dim", bench_args.dim, "embedding dimension");
    bench_cmd->add_option("--dur-max", bench_args.dur_max, "max repeats per token");
    bench_cmd->add_option("--noise", bench_args.noise, "speech noise level");
    bench_cmd->add_option("--seed", bench_args.seed, "random seed");
    bench_cmd->add_option("--out", bench_args.out, "report CSV (default stdout)");
    bench_cmd->callback([&] { run_bench(bench_args); });

    std::string heat_speech, heat_text, heat_out;
    auto* heat_cmd = app.add_subcommand("heatmap", "Export the pairwise cost CSV");
    heat_cmd->add_option("--speech", heat_speech, "source embedding TSV")->required();
    heat_cmd->add_option("--text", heat_text, "target embedding TSV")->required();
    heat_cmd->add_option("--out", heat_out, "cost CSV (default stdout)");
    heat_cmd->callback([&] {
        otmix::CostMatrix cost = otmix::cost_matrix(otmix::read_sequence(heat_speech),
                                                    otmix::read_sequence(heat_text));
        emit(heat_out, [&](std::ostream& out) { otmix::write_cost_csv(cost, out); });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const otmix::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const otmix::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
