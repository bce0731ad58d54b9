#include "otmix/mixup.hpp"

#include <fstream>

#include "otmix/rng.hpp"
#include "text_io.hpp"

namespace otmix {

MixupSequence mixup(const EmbeddingSequence& speech, const EmbeddingSequence& text,
                    const Alignment& align, const MixupConfig& config) {
    if (speech.dim() != text.dim())
        throw DimensionMismatch("mixup: speech dim " + std::to_string(speech.dim()) +
                                " vs text dim " + std::to_string(text.dim()));
    if (align.size() != speech.length())
        throw ShapeMismatch("mixup: alignment has " + std::to_string(align.size()) +
                            " entries for " + std::to_string(speech.length()) +
                            " speech rows");
    if (config.text_prob < 0.0 || config.text_prob > 1.0)
        throw Error("mixup: text_prob must lie in [0, 1]");
    for (int t : align.targets)
        if (t < 0 || t >= text.length())
            throw IndexOutOfRange("mixup: alignment target " + std::to_string(t + 1) +
                                  " outside 1.." + std::to_string(text.length()));

    SeededRng rng(config.seed);
    MixupSequence mixed;
    mixed.vectors.resize(speech.length(), speech.dim());
    mixed.origin.resize(speech.length());
    for (Eigen::Index i = 0; i < speech.length(); ++i) {
        if (rng.uniform() <= config.text_prob) {
            mixed.vectors.row(i) = text.row(align.targets[i]);
            mixed.origin[i] = Origin::kText;
        } else {
            mixed.vectors.row(i) = speech.row(i);
            mixed.origin[i] = Origin::kSpeech;
        }
    }
    return mixed;
}

void write_mixup(const MixupSequence& mixed, std::ostream& out) {
    out << "n " << mixed.length() << " d " << mixed.dim() << "\n";
    for (Eigen::Index i = 0; i < mixed.length(); ++i) {
        for (Eigen::Index j = 0; j < mixed.dim(); ++j)
            out << detail::format_double(mixed.vectors(i, j)) << '\t';
        out << static_cast<char>(mixed.origin[i]) << '\n';
    }
}

void write_mixup(const MixupSequence& mixed, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    write_mixup(mixed, out);
    if (!out)
        throw Error("write failed: " + path.string());
}

} // namespace otmix
