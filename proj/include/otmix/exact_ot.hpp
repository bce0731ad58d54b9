#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <string>

#include "otmix/cost.hpp"
#include "otmix/errors.hpp"
#include "otmix/relaxed_ot.hpp"
#include "otmix/sequences.hpp"

namespace otmix {

enum class ExactMethod { kSinkhorn, kIpot };

std::string method_name(ExactMethod method);

struct SolverConfig {
    ExactMethod method = ExactMethod::kSinkhorn;
    // Entropic regularization weight. Defaults to 0.01 times the mean cost
    // so the scale tracks the data.
    std::optional<double> epsilon;
    // Proximal step weight for the IPOT inner kernel exp(-cost / beta).
    double beta = 1.0;
    int max_iters = 2000;
    // Convergence threshold on the largest marginal violation.
    double tol = 1e-6;
};

// Result of an exact solve. `converged` reports whether the violation
// dropped to tol within the iteration budget; callers decide whether a
// non-converged plan is acceptable.
struct ExactSolution {
    TransportPlan plan;
    double plan_cost = 0.0;
    int iters_used = 0;
    double violation = 0.0;
    bool converged = false;
    ExactMethod method = ExactMethod::kSinkhorn;
};

// Transport satisfying both marginals, via log-domain Sinkhorn iteration
// or IPOT proximal steps. Zero-mass rows and columns are dropped before
// solving and restored as zero rows/columns of the plan. Both methods
// update the row scaling last, so row sums match the row masses to
// machine precision and `violation` is driven by the column sums.
ExactSolution solve_exact(const CostMatrix& cost, const MassVector& row_masses,
                          const MassVector& col_masses, const SolverConfig& config);

// Same CSV layout as the cost heatmap: "i\j" header, 1-based row labels.
void write_plan_csv(const TransportPlan& plan, std::ostream& out);

// One-line JSON with keys method, iters_used, violation, plan_cost.
std::string plan_sidecar_json(const ExactSolution& sol);

} // namespace otmix
