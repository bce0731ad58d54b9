// End-to-end checks of the otmix binary. The test runner exports OTMIX_CLI
// with the path to the built executable; every case shells out and inspects
// exit codes, stdout and produced files.

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "otmix/cost.hpp"
#include "otmix/relaxed_ot.hpp"
#include "otmix/sequences.hpp"

namespace fs = std::filesystem;
using namespace otmix;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "otmix_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("OTMIX_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "OTMIX_CLI must point at the built binary");
    fs::path out_path = work_dir() / "stdout.txt";
    fs::path err_path = work_dir() / "stderr.txt";
    std::string cmd = std::string(bin) + " " + args + " > " + out_path.string() +
                      " 2> " + err_path.string();
    int raw = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    return res;
}

// a small deterministic pair of sequences used across the cases
struct Fixture {
    fs::path speech = work_dir() / "speech.tsv";
    fs::path text = work_dir() / "text.tsv";

    Fixture() {
        CliResult synth = run_cli("synth --out-prefix " +
                                  (work_dir() / "fix").string() +
                                  " --n-text 6 --dim 4 --dur-max 3 --noise 0.4 --seed 9");
        REQUIRE(synth.code == 0);
        fs::copy_file(work_dir() / "fix.speech.tsv", speech,
                      fs::copy_options::overwrite_existing);
        fs::copy_file(work_dir() / "fix.text.tsv", text,
                      fs::copy_options::overwrite_existing);
    }
};

} // namespace

TEST_CASE("align on identical files yields the identity alignment") {
    Fixture fix;
    CliResult res = run_cli("align --speech " + fix.text.string() + " --text " +
                            fix.text.string() + " --no-window");
    REQUIRE(res.code == 0);
    std::string expected = "n 6\n";
    for (int i = 1; i <= 6; ++i)
        expected += std::to_string(i) + "\t" + std::to_string(i) + "\n";
    CHECK(res.out == expected);
}

TEST_CASE("align reproduces the library result and honors --out") {
    Fixture fix;
    fs::path out = work_dir() / "align.tsv";
    CliResult res = run_cli("align --speech " + fix.speech.string() + " --text " +
                            fix.text.string() + " --window 2 --out " + out.string());
    REQUIRE(res.code == 0);
    CHECK(res.out.empty());

    EmbeddingSequence speech = read_sequence(fix.speech);
    EmbeddingSequence text = read_sequence(fix.text);
    RelaxedSolution sol = solve_relaxed(cost_matrix(speech, text),
                                        masses_from_norms(speech), WindowConfig{true, 2});
    Alignment expected = extract_alignment(sol.plan);
    Alignment actual = read_alignment(out, static_cast<int>(text.length()));
    CHECK(actual.targets == expected.targets);

    // stdout and --out carry identical bytes
    CliResult to_stdout = run_cli("align --speech " + fix.speech.string() + " --text " +
                                  fix.text.string() + " --window 2");
    CHECK(to_stdout.out == slurp(out));
}

TEST_CASE("distance prints one number and repeats byte for byte") {
    Fixture fix;
    std::string cmd = "distance --speech " + fix.speech.string() + " --text " +
                      fix.text.string() + " --method relaxed --window 3";
    CliResult first = run_cli(cmd);
    REQUIRE(first.code == 0);
    CHECK(first.out.back() == '\n');
    double printed = std::stod(first.out);

    EmbeddingSequence speech = read_sequence(fix.speech);
    EmbeddingSequence text = read_sequence(fix.text);
    double expected = solve_relaxed(cost_matrix(speech, text), masses_from_norms(speech),
                                    WindowConfig{true, 3})
                          .distance;
    CHECK(printed == expected);
    CHECK(run_cli(cmd).out == first.out);
}

TEST_CASE("exact distance writes a plan and a json summary") {
    Fixture fix;
    fs::path plan = work_dir() / "plan.csv";
    CliResult res = run_cli("distance --speech " + fix.speech.string() + " --text " +
                            fix.text.string() + " --method ipot --plan " + plan.string());
    REQUIRE(res.code == 0);
    CHECK(res.err.empty());

    std::string csv = slurp(plan);
    CHECK(csv.rfind("i\\j,1,", 0) == 0);
    auto sidecar = nlohmann::json::parse(slurp(plan.string() + ".json"));
    CHECK(sidecar["method"] == "ipot");
    CHECK(sidecar["plan_cost"].get<double>() == std::stod(res.out));
    CHECK(sidecar["violation"].get<double>() <= 1e-6);
}

TEST_CASE("non-convergence warns, and fails only under --strict") {
    Fixture fix;
    std::string base = "distance --speech " + fix.speech.string() + " --text " +
                       fix.text.string() + " --method sinkhorn --max-iters 1";
    CliResult soft = run_cli(base);
    CHECK(soft.code == 0);
    CHECK(soft.err.find("did not converge") != std::string::npos);
    CHECK_FALSE(soft.out.empty()); // still prints the distance it reached

    CliResult hard = run_cli(base + " --strict");
    CHECK(hard.code == 3);
}

TEST_CASE("mixup with probability zero copies the speech file plus origin column") {
    Fixture fix;
    fs::path align = work_dir() / "mix_align.tsv";
    CliResult align_res = run_cli("align --speech " + fix.speech.string() + " --text " +
                                  fix.text.string() + " --out " + align.string());
    REQUIRE(align_res.code == 0);

    CliResult res = run_cli("mixup --speech " + fix.speech.string() + " --text " +
                            fix.text.string() + " --align " + align.string() +
                            " --prob 0 --seed 4");
    REQUIRE(res.code == 0);

    std::istringstream speech_lines(slurp(fix.speech));
    std::istringstream mixed_lines(res.out);
    std::string sline, mline;
    std::getline(speech_lines, sline);
    std::getline(mixed_lines, mline);
    CHECK(mline == sline); // same header
    while (std::getline(speech_lines, sline)) {
        REQUIRE(std::getline(mixed_lines, mline));
        CHECK(mline == sline + "\tS");
    }
}

TEST_CASE("ascore and gap emit json reports") {
    Fixture fix;
    fs::path align = work_dir() / "self_align.tsv";
    REQUIRE(run_cli("align --speech " + fix.text.string() + " --text " +
                    fix.text.string() + " --no-window --out " + align.string())
                .code == 0);

    CliResult score = run_cli("ascore --pred " + align.string() + " --ref " +
                              align.string());
    REQUIRE(score.code == 0);
    CHECK(nlohmann::json::parse(score.out)["a_score"] == 1.0);

    CliResult gap = run_cli("gap --speech " + fix.text.string() + " --text " +
                            fix.text.string() + " --align " + align.string());
    REQUIRE(gap.code == 0);
    auto parsed = nlohmann::json::parse(gap.out);
    CHECK(parsed["sentence_gap"] == 0.0);
    CHECK(parsed["word_gap"] == 0.0);
}

TEST_CASE("synth output is reproducible and readable") {
    fs::path a = work_dir() / "synth_a";
    fs::path b = work_dir() / "synth_b";
    std::string flags = " --n-text 5 --dim 3 --dur-max 2 --noise 0.3 --seed 21";
    REQUIRE(run_cli("synth --out-prefix " + a.string() + flags).code == 0);
    REQUIRE(run_cli("synth --out-prefix " + b.string() + flags).code == 0);
    for (std::string suffix : {".text.tsv", ".speech.tsv", ".truth.tsv"})
        CHECK(slurp(a.string() + suffix) == slurp(b.string() + suffix));

    EmbeddingSequence text = read_sequence(a.string() + ".text.tsv");
    EmbeddingSequence speech = read_sequence(a.string() + ".speech.tsv");
    Alignment truth = read_alignment(a.string() + ".truth.tsv",
                                     static_cast<int>(text.length()));
    CHECK(truth.size() == speech.length());
}

TEST_CASE("bench emits a csv that repeats apart from the timing column") {
    std::string cmd = "bench --trials 3 --n-text 5 --dim 3 --dur-max 2 --noise 0.4"
                      " --seed 6 --window 2 --methods relaxed,relaxed_window,ipot";
    CliResult first = run_cli(cmd);
    REQUIRE(first.code == 0);
    CliResult second = run_cli(cmd);

    auto strip_timing = [](const std::string& csv) {
        std::istringstream lines(csv);
        std::string line, kept;
        while (std::getline(lines, line))
            kept += line.substr(0, line.rfind(',')) + "\n";
        return kept;
    };
    CHECK(first.out.rfind("method,trials,", 0) == 0);
    CHECK(std::count(first.out.begin(), first.out.end(), '\n') == 4);
    CHECK(strip_timing(first.out) == strip_timing(second.out));
}

TEST_CASE("heatmap matches the in-process csv writer") {
    Fixture fix;
    CliResult res = run_cli("heatmap --speech " + fix.speech.string() + " --text " +
                            fix.text.string());
    REQUIRE(res.code == 0);
    std::ostringstream expected;
    write_cost_csv(cost_matrix(read_sequence(fix.speech), read_sequence(fix.text)),
                   expected);
    CHECK(res.out == expected.str());
}

TEST_CASE("failure modes map to documented exit codes") {
    Fixture fix;
    CHECK(run_cli("align --speech missing.tsv --text " + fix.text.string()).code == 2);
    CHECK(run_cli("align --bogus-flag x").code == 1);
    CHECK(run_cli("distance --speech " + fix.speech.string() + " --text " +
                  fix.text.string() + " --method newton")
              .code == 1);
    CHECK(run_cli("").code == 1); // a subcommand is required
    CHECK(run_cli("distance --speech " + fix.speech.string() + " --text " +
                  fix.text.string() + " --method relaxed --plan p.csv")
              .code == 1);

    // alignment pointing past the end of the text is a data error
    fs::path bad = work_dir() / "bad_align.tsv";
    std::ofstream(bad) << "n 2\n1\t1\n2\t99\n";
    CHECK(run_cli("mixup --speech " + fix.speech.string() + " --text " +
                  fix.text.string() + " --align " + bad.string())
              .code == 2);

    // malformed embedding file
    fs::path garbled = work_dir() / "garbled.tsv";
    std::ofstream(garbled) << "n 2 d 2\n1\t2\n";
    CHECK(run_cli("align --speech " + garbled.string() + " --text " + fix.text.string())
              .code == 2);
}
