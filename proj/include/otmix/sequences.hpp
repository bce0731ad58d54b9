#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <ostream>

#include "otmix/errors.hpp"

namespace otmix {

// A sequence of embedding vectors, one token per row. Rows are ordered;
// length n >= 1 and dimension d >= 1 are enforced on construction.
class EmbeddingSequence {
public:
    explicit EmbeddingSequence(Eigen::MatrixXd vectors);

    Eigen::Index length() const { return vectors_.rows(); }
    Eigen::Index dim() const { return vectors_.cols(); }
    const Eigen::MatrixXd& vectors() const { return vectors_; }
    auto row(Eigen::Index i) const { return vectors_.row(i); }

private:
    Eigen::MatrixXd vectors_;
};

// Nonnegative per-token masses summing to one (within 1e-9).
class MassVector {
public:
    explicit MassVector(Eigen::VectorXd masses);

    Eigen::Index size() const { return masses_.size(); }
    const Eigen::VectorXd& values() const { return masses_; }
    double operator[](Eigen::Index i) const { return masses_[i]; }

private:
    Eigen::VectorXd masses_;
};

// Mass of token i is its L2 norm divided by the sum of all row norms, so
// higher-energy tokens carry more transportable mass. Zero-norm rows get
// mass zero; throws AllZeroSequence if every row is zero.
MassVector masses_from_norms(const EmbeddingSequence& seq);

// Tab-separated text format:
//   line 1:        "n <length> d <dim>"
//   lines 2..n+1:  d tab-separated decimal reals
// Values are written with 17 significant digits, enough to round-trip
// doubles exactly.
EmbeddingSequence read_sequence(const std::filesystem::path& path);
void write_sequence(const EmbeddingSequence& seq, std::ostream& out);
void write_sequence(const EmbeddingSequence& seq, const std::filesystem::path& path);

} // namespace otmix
