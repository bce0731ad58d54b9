#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "otmix/cost.hpp"
#include "otmix/errors.hpp"
#include "otmix/sequences.hpp"

namespace otmix {

// Diagonal band restricting which target columns a source row may use.
// Width counts target positions on each side of the rescaled diagonal.
struct WindowConfig {
    bool enabled = true;
    int width = 10;
};

inline WindowConfig no_window() { return WindowConfig{false, 0}; }

// One target column per source row, 0-based.
struct Alignment {
    std::vector<int> targets;

    int size() const { return static_cast<int>(targets.size()); }
};

// A transport matrix together with the marginals it was solved against.
// Plans from the relaxed solver have no column marginal; they also record
// the chosen column of every row, which the matrix alone cannot recover
// for rows of zero mass.
struct TransportPlan {
    Eigen::MatrixXd values;
    Eigen::VectorXd row_marginal;
    std::optional<Eigen::VectorXd> col_marginal;
    std::vector<int> relaxed_targets;
};

struct RelaxedSolution {
    TransportPlan plan;
    double distance = 0.0;
};

// Admissible target columns for source row i (0-based), returned as an
// inclusive [lo, hi] pair, also 0-based. With source length n and target
// length m, row i may use columns j with
//   max(1, ceil(r*(i+1) - width)) <= j+1 <= min(m, floor(r*(i+1) + width))
// where r = m/n rescales the main diagonal. The interval is never empty
// for width >= 1 because the diagonal point itself is always in range.
std::pair<int, int> window_bounds(int i, int n, int m, int width);

// Transport with only the row-sum constraint kept. Each row independently
// sends its whole mass to the cheapest admissible column (lowest index on
// ties), so the optimum is exact and costs one scan of the window. The
// distance never exceeds the cost of any plan that also satisfies the
// column constraint.
RelaxedSolution solve_relaxed(const CostMatrix& cost, const MassVector& row_masses,
                              const WindowConfig& window);

// Alignment target of row i is the column holding its largest plan entry,
// lowest index on ties. Relaxed plans use their recorded columns instead,
// which matters for zero-mass rows.
Alignment extract_alignment(const TransportPlan& plan);

struct RelaxedGradient {
    Eigen::MatrixXd grad_a;
    Eigen::MatrixXd grad_b;
};

// Gradient of the relaxed transport distance with respect to both raw
// embedding matrices, with row masses taken as normalized L2 norms of a.
// The assignment is held fixed at the optimum (it is locally constant in
// the generic case), so only the distances and masses are differentiated.
// Throws DegenerateGradient when an aligned pair sits at distance <= 1e-12
// or a row norm is <= 1e-12, where the derivative does not exist.
RelaxedGradient relaxed_grad(const EmbeddingSequence& a, const EmbeddingSequence& b,
                             const WindowConfig& window);

// Tab-separated alignment format:
//   line 1:       "n <length>"
//   lines 2..n+1: "<i>\t<target>" with both indices 1-based
void write_alignment(const Alignment& align, std::ostream& out);
void write_alignment(const Alignment& align, const std::filesystem::path& path);

// Reading validates targets against `target_length` when it is positive.
Alignment read_alignment(const std::filesystem::path& path, int target_length = 0);

} // namespace otmix
