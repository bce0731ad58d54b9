#include "otmix/sequences.hpp"

#include <fstream>
#include <string>

#include "text_io.hpp"

namespace otmix {

EmbeddingSequence::EmbeddingSequence(Eigen::MatrixXd vectors)
    : vectors_(std::move(vectors)) {
    if (vectors_.rows() < 1 || vectors_.cols() < 1)
        throw Error("embedding sequence needs at least one row and one column, got " +
                    std::to_string(vectors_.rows()) + "x" + std::to_string(vectors_.cols()));
    if (!vectors_.allFinite())
        throw Error("embedding sequence contains non-finite values");
}

MassVector::MassVector(Eigen::VectorXd masses) : masses_(std::move(masses)) {
    if (masses_.size() < 1)
        throw Error("mass vector is empty");
    if (!masses_.allFinite() || (masses_.array() < 0.0).any())
        throw Error("masses must be finite and nonnegative");
    double total = masses_.sum();
    if (std::abs(total - 1.0) > 1e-9)
        throw Error("masses must sum to one, got " + detail::format_double(total));
}

MassVector masses_from_norms(const EmbeddingSequence& seq) {
    Eigen::VectorXd norms = seq.vectors().rowwise().norm();
    double total = norms.sum();
    if (total == 0.0)
        throw AllZeroSequence("all rows have zero norm, masses undefined");
    return MassVector(norms / total);
}

EmbeddingSequence read_sequence(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    const std::string name = path.string();

    std::string line;
    if (!std::getline(in, line))
        detail::fail_format(name, 1, "missing header");
    detail::strip_cr(line);
    auto head = detail::split(line, ' ');
    long long n = 0, d = 0;
    if (head.size() != 4 || head[0] != "n" || head[2] != "d" ||
        !detail::parse_int(head[1], n) || !detail::parse_int(head[3], d))
        detail::fail_format(name, 1, "expected header 'n <length> d <dim>'");
    if (n < 1 || d < 1)
        detail::fail_format(name, 1, "length and dimension must be positive");

    Eigen::MatrixXd mat(n, d);
    for (long long i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            detail::fail_format(name, 2 + i, "unexpected end of file, expected " +
                                             std::to_string(n) + " rows");
        detail::strip_cr(line);
        auto toks = detail::split(line, '\t');
        if (static_cast<long long>(toks.size()) != d)
            throw DimensionMismatch(name + ":" + std::to_string(2 + i) + ": row has " +
                                    std::to_string(toks.size()) + " values, header says " +
                                    std::to_string(d));
        for (long long j = 0; j < d; ++j) {
            double v;
            if (!detail::parse_double(toks[j], v))
                detail::fail_format(name, 2 + i, "bad number '" + std::string(toks[j]) + "'");
            if (!std::isfinite(v))
                detail::fail_format(name, 2 + i, "non-finite value");
            mat(i, j) = v;
        }
    }
    while (std::getline(in, line)) {
        detail::strip_cr(line);
        if (!line.empty())
            detail::fail_format(name, 2 + n, "trailing content after " +
                                             std::to_string(n) + " rows");
    }
    return EmbeddingSequence(std::move(mat));
}

void write_sequence(const EmbeddingSequence& seq, std::ostream& out) {
    out << "n " << seq.length() << " d " << seq.dim() << "\n";
    for (Eigen::Index i = 0; i < seq.length(); ++i) {
        for (Eigen::Index j = 0; j < seq.dim(); ++j) {
            if (j > 0)
                out << '\t';
            out << detail::format_double(seq.vectors()(i, j));
        }
        out << '\n';
    }
}

void write_sequence(const EmbeddingSequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    write_sequence(seq, out);
    if (!out)
        throw Error("write failed: " + path.string());
}

} // namespace otmix
