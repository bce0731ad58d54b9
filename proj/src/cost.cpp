#include "otmix/cost.hpp"

#include "text_io.hpp"

namespace otmix {

CostMatrix::CostMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw Error("cost matrix needs at least one row and one column");
    if (!values_.allFinite() || (values_.array() < 0.0).any())
        throw Error("cost matrix entries must be finite and nonnegative");
}

CostMatrix cost_matrix(const EmbeddingSequence& a, const EmbeddingSequence& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("cost_matrix: dimensions differ, " +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    Eigen::MatrixXd values(a.length(), b.length());
    for (Eigen::Index i = 0; i < a.length(); ++i)
        for (Eigen::Index j = 0; j < b.length(); ++j)
            values(i, j) = (a.row(i) - b.row(j)).norm();
    return CostMatrix(std::move(values));
}

void write_cost_csv(const CostMatrix& cost, std::ostream& out) {
    out << "i\\j";
    for (Eigen::Index j = 0; j < cost.cols(); ++j)
        out << ',' << (j + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < cost.rows(); ++i) {
        out << (i + 1);
        for (Eigen::Index j = 0; j < cost.cols(); ++j)
            out << ',' << detail::format_double(cost(i, j));
        out << '\n';
    }
}

} // namespace otmix
