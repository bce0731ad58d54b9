#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otmix/errors.hpp"
#include "otmix/relaxed_ot.hpp"
#include "otmix/sequences.hpp"

namespace otmix {

struct SynthConfig {
    int n_text = 20;
    int dim = 16;
    // Each text token is repeated 1..max_repeats times on the speech side.
    int max_repeats = 4;
    double noise_sigma = 0.5;
    std::uint64_t seed = 0;
};

// One synthetic speech/text pair with known ground truth. Text rows are
// unit gaussian directions; speech repeats each text row a random number
// of times and adds isotropic gaussian noise. The truth alignment maps
// every speech frame back to its source token, so it is monotone and
// covers every text token.
struct SynthInstance {
    EmbeddingSequence text;
    EmbeddingSequence speech;
    Alignment truth;
    // Whether the text rows are pairwise more than 1e-9 apart. Random unit
    // directions essentially always are; callers that need distinctness
    // can check this instead of recomputing distances.
    bool text_rows_distinct = false;
};

// Draw order from SeededRng(config.seed): text gaussians row by row, then
// all repeat counts, then noise frame by frame. Changing noise_sigma alone
// therefore keeps text and truth identical.
SynthInstance generate(const SynthConfig& config);

enum class BenchMethodKind { kRelaxed, kRelaxedWindow, kIpot, kSinkhorn };

struct BenchMethod {
    BenchMethodKind kind = BenchMethodKind::kRelaxed;
    int window = 10;

    std::string label() const;
};

struct BenchRow {
    std::string method;
    int trials = 0;
    double mean_ascore = 0.0;
    double std_ascore = 0.0;
    double mean_distance = 0.0;
    double mean_wall_ms = 0.0;
    // Per-trial values, in trial order. Kept for paired comparisons; the
    // CSV carries only the aggregates above.
    std::vector<double> ascores;
    std::vector<double> distances;
    std::vector<double> wall_ms;
};

struct BenchReport {
    std::vector<BenchRow> rows;

    // "method,trials,mean_ascore,std_ascore,mean_distance,mean_wall_ms"
    std::string to_csv() const;
};

// Run every method on the same `trials` instances. Trial t uses the
// instance seeded with derive_seed(config.seed, t), so results do not
// depend on evaluation order and reruns reproduce everything except the
// wall times. Spread is the sample standard deviation. Timings cover the
// solve itself; building cost matrices and masses is shared work and
// excluded.
BenchReport run_bench(const SynthConfig& config, int trials,
                      const std::vector<BenchMethod>& methods);

} // namespace otmix
