#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "otmix/errors.hpp"
#include "otmix/relaxed_ot.hpp"
#include "otmix/sequences.hpp"

namespace otmix {

struct MixupConfig {
    // Probability that a position is replaced by its aligned text token.
    double text_prob = 0.2;
    std::uint64_t seed = 0;
};

enum class Origin : char { kSpeech = 'S', kText = 'T' };

// A speech sequence with some rows swapped for aligned text rows, plus a
// record of where each row came from.
struct MixupSequence {
    Eigen::MatrixXd vectors;
    std::vector<Origin> origin;

    Eigen::Index length() const { return vectors.rows(); }
    Eigen::Index dim() const { return vectors.cols(); }
};

// Hard token-level swap. One uniform draw per position, consumed in index
// order from a SeededRng(config.seed) stream; position i takes the text row
// when its draw is <= text_prob and keeps the speech row otherwise. Draws
// lie in (0, 1], so text_prob = 0 keeps every speech row and text_prob = 1
// swaps every row, exactly.
MixupSequence mixup(const EmbeddingSequence& speech, const EmbeddingSequence& text,
                    const Alignment& align, const MixupConfig& config);

// Embedding TSV with one extra tab-separated column holding S or T.
void write_mixup(const MixupSequence& mixed, std::ostream& out);
void write_mixup(const MixupSequence& mixed, const std::filesystem::path& path);

} // namespace otmix
