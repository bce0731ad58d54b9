#include "otmix/exact_ot.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <json.hpp>

#include "text_io.hpp"

namespace otmix {

namespace {

double log_sum_exp(const Eigen::ArrayXd& z) {
    double zmax = z.maxCoeff();
    return zmax + std::log((z - zmax).exp().sum());
}

double max_violation(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b) {
    double row_dev = (plan.rowwise().sum() - a).cwiseAbs().maxCoeff();
    double col_dev = (plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
    return std::max(row_dev, col_dev);
}

struct CoreResult {
    Eigen::MatrixXd plan;
    int iters_used = 0;
    double violation = 0.0;
    bool converged = false;
};

CoreResult sinkhorn_core(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b, double epsilon, int max_iters,
                         double tol) {
    const Eigen::Index n = cost.rows();
    const Eigen::Index m = cost.cols();
    const Eigen::ArrayXd log_a = a.array().log();
    const Eigen::ArrayXd log_b = b.array().log();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);

    CoreResult res;
    for (int it = 1; it <= max_iters; ++it) {
        // Column potentials first, row potentials second: the final plan
        // then satisfies the row constraint exactly and all residual error
        // sits in the columns.
        for (Eigen::Index j = 0; j < m; ++j)
            g[j] = epsilon * (log_b[j] -
                              log_sum_exp((f.array() - cost.col(j).array()) / epsilon));
        for (Eigen::Index i = 0; i < n; ++i)
            f[i] = epsilon * (log_a[i] -
                              log_sum_exp((g.array() - cost.row(i).transpose().array()) / epsilon));
        if (!f.allFinite() || !g.allFinite())
            throw NumericalUnderflow("sinkhorn: potentials left representable range, "
                                     "epsilon too small for this cost scale");
        res.plan = ((((-cost).colwise() + f).rowwise() + g.transpose()) / epsilon)
                       .array().exp().matrix();
        res.iters_used = it;
        res.violation = max_violation(res.plan, a, b);
        if (res.violation <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

CoreResult ipot_core(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b, double beta, int max_iters, double tol) {
    const Eigen::Index n = cost.rows();
    const Eigen::MatrixXd kernel = (-cost / beta).array().exp().matrix();
    // exp() clamps instead of flushing to zero, so a kernel whose largest
    // entry is subnormal carries no cost signal at all and the scaling
    // would quietly return the independent coupling.
    if (!(kernel.maxCoeff() >= std::numeric_limits<double>::min()))
        throw NumericalUnderflow("ipot: proximal kernel underflowed, "
                                 "beta too small for this cost scale");
    Eigen::MatrixXd plan = Eigen::MatrixXd::Ones(n, cost.cols());
    Eigen::VectorXd delta = Eigen::VectorXd::Constant(n, 1.0 / n);

    CoreResult res;
    for (int it = 1; it <= max_iters; ++it) {
        // One proximal step: Sinkhorn on kernel * plan with a single inner
        // sweep. Column scaling first, row scaling second, for the same
        // reason as above.
        Eigen::MatrixXd q = kernel.cwiseProduct(plan);
        Eigen::VectorXd sigma = (b.array() / (q.transpose() * delta).array()).matrix();
        delta = (a.array() / (q * sigma).array()).matrix();
        Eigen::MatrixXd next = delta.asDiagonal() * q * sigma.asDiagonal();
        if (!next.allFinite())
            throw NumericalUnderflow("ipot: plan left representable range, "
                                     "beta too small for this cost scale");
        double change = (next - plan).cwiseAbs().maxCoeff();
        plan = std::move(next);
        res.iters_used = it;
        res.violation = max_violation(plan, a, b);
        // Feasibility alone is reached long before the proximal iteration
        // is stationary; converged certifies both, otherwise the reported
        // plan cost can sit far above the optimum.
        if (res.violation <= tol && change <= tol) {
            res.converged = true;
            break;
        }
    }
    res.plan = std::move(plan);
    return res;
}

} // namespace

std::string method_name(ExactMethod method) {
    return method == ExactMethod::kSinkhorn ? "sinkhorn" : "ipot";
}

ExactSolution solve_exact(const CostMatrix& cost, const MassVector& row_masses,
                          const MassVector& col_masses, const SolverConfig& config) {
    const Eigen::Index n = cost.rows();
    const Eigen::Index m = cost.cols();
    if (row_masses.size() != n || col_masses.size() != m)
        throw ShapeMismatch("solve_exact: cost is " + std::to_string(n) + "x" +
                            std::to_string(m) + " but marginals have " +
                            std::to_string(row_masses.size()) + " and " +
                            std::to_string(col_masses.size()) + " entries");
    if (config.epsilon && *config.epsilon <= 0.0)
        throw Error("solve_exact: epsilon must be positive");
    if (config.beta <= 0.0)
        throw Error("solve_exact: beta must be positive");
    if (config.max_iters < 1)
        throw Error("solve_exact: max_iters must be at least 1");
    if (config.tol <= 0.0)
        throw Error("solve_exact: tol must be positive");

    // Zero-mass rows and columns receive no transport; drop them so the
    // log-domain updates never see log(0).
    std::vector<Eigen::Index> rows, cols;
    for (Eigen::Index i = 0; i < n; ++i)
        if (row_masses[i] > 0.0)
            rows.push_back(i);
    for (Eigen::Index j = 0; j < m; ++j)
        if (col_masses[j] > 0.0)
            cols.push_back(j);

    Eigen::MatrixXd reduced(rows.size(), cols.size());
    Eigen::VectorXd a(rows.size()), b(cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a[i] = row_masses[rows[i]];
        for (std::size_t j = 0; j < cols.size(); ++j)
            reduced(i, j) = cost(rows[i], cols[j]);
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
        b[j] = col_masses[cols[j]];

    CoreResult core;
    if (config.method == ExactMethod::kSinkhorn) {
        double epsilon = config.epsilon.value_or(0.01 * reduced.mean());
        if (epsilon <= 0.0)
            epsilon = 1.0; // all costs zero, any positive weight converges at once
        core = sinkhorn_core(reduced, a, b, epsilon, config.max_iters, config.tol);
    } else {
        core = ipot_core(reduced, a, b, config.beta, config.max_iters, config.tol);
    }

    ExactSolution sol;
    sol.plan.values = Eigen::MatrixXd::Zero(n, m);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            sol.plan.values(rows[i], cols[j]) = core.plan(i, j);
    sol.plan.row_marginal = row_masses.values();
    sol.plan.col_marginal = col_masses.values();
    sol.plan_cost = (core.plan.array() * reduced.array()).sum();
    sol.iters_used = core.iters_used;
    sol.violation = core.violation;
    sol.converged = core.converged;
    sol.method = config.method;
    return sol;
}

void write_plan_csv(const TransportPlan& plan, std::ostream& out) {
    out << "i\\j";
    for (Eigen::Index j = 0; j < plan.values.cols(); ++j)
        out << ',' << (j + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < plan.values.rows(); ++i) {
        out << (i + 1);
        for (Eigen::Index j = 0; j < plan.values.cols(); ++j)
            out << ',' << detail::format_double(plan.values(i, j));
        out << '\n';
    }
}

std::string plan_sidecar_json(const ExactSolution& sol) {
    nlohmann::json j;
    j["method"] = method_name(sol.method);
    j["iters_used"] = sol.iters_used;
    j["violation"] = sol.violation;
    j["plan_cost"] = sol.plan_cost;
    return j.dump();
}

} // namespace otmix
