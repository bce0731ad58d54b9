#pragma once

#include <Eigen/Dense>
#include <ostream>

#include "otmix/errors.hpp"
#include "otmix/sequences.hpp"

namespace otmix {

// Pairwise transport costs; entry (i, j) is what moving one unit of mass
// from source token i to target token j costs. Finite and nonnegative.
class CostMatrix {
public:
    explicit CostMatrix(Eigen::MatrixXd values);

    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index cols() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

private:
    Eigen::MatrixXd values_;
};

// Euclidean distance between every row of a and every row of b.
CostMatrix cost_matrix(const EmbeddingSequence& a, const EmbeddingSequence& b);

// CSV heatmap dump. Header row "i\j,1,2,...", then one row per source token
// labeled by its 1-based index.
void write_cost_csv(const CostMatrix& cost, std::ostream& out);

} // namespace otmix
