#pragma once

#include <string>

#include "otmix/errors.hpp"
#include "otmix/relaxed_ot.hpp"
#include "otmix/sequences.hpp"

namespace otmix {

// Fraction of positions where the predicted target matches the reference.
// 1.0 means identical alignments; a uniform random guess over m targets
// scores 1/m in expectation.
double a_score(const Alignment& predicted, const Alignment& reference);

struct GapReport {
    // Distance between the two sequence means.
    double sentence_gap = 0.0;
    // Mean distance between aligned embedding pairs.
    double word_gap = 0.0;
};

GapReport modality_gap(const EmbeddingSequence& speech, const EmbeddingSequence& text,
                       const Alignment& align);

// One-line JSON: {"sentence_gap":...,"word_gap":...}
std::string gap_json(const GapReport& report);

} // namespace otmix
