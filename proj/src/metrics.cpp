#include "otmix/metrics.hpp"

#include <json.hpp>

namespace otmix {

double a_score(const Alignment& predicted, const Alignment& reference) {
    if (predicted.size() != reference.size())
        throw LengthMismatch("a_score: alignments have " +
                             std::to_string(predicted.size()) + " and " +
                             std::to_string(reference.size()) + " entries");
    if (predicted.size() == 0)
        throw Error("a_score: empty alignments");
    int hits = 0;
    for (int i = 0; i < predicted.size(); ++i)
        if (predicted.targets[i] == reference.targets[i])
            ++hits;
    return static_cast<double>(hits) / predicted.size();
}

GapReport modality_gap(const EmbeddingSequence& speech, const EmbeddingSequence& text,
                       const Alignment& align) {
    if (speech.dim() != text.dim())
        throw DimensionMismatch("modality_gap: speech dim " + std::to_string(speech.dim()) +
                                " vs text dim " + std::to_string(text.dim()));
    if (align.size() != speech.length())
        throw ShapeMismatch("modality_gap: alignment has " + std::to_string(align.size()) +
                            " entries for " + std::to_string(speech.length()) +
                            " speech rows");
    for (int t : align.targets)
        if (t < 0 || t >= text.length())
            throw IndexOutOfRange("modality_gap: alignment target " + std::to_string(t + 1) +
                                  " outside 1.." + std::to_string(text.length()));

    GapReport report;
    Eigen::RowVectorXd speech_mean = speech.vectors().colwise().mean();
    Eigen::RowVectorXd text_mean = text.vectors().colwise().mean();
    report.sentence_gap = (speech_mean - text_mean).norm();

    double total = 0.0;
    for (Eigen::Index i = 0; i < speech.length(); ++i)
        total += (speech.row(i) - text.row(align.targets[i])).norm();
    report.word_gap = total / speech.length();
    return report;
}

std::string gap_json(const GapReport& report) {
    nlohmann::json j;
    j["sentence_gap"] = report.sentence_gap;
    j["word_gap"] = report.word_gap;
    return j.dump();
}

} // namespace otmix
