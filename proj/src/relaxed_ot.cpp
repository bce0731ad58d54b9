#include "otmix/relaxed_ot.hpp"

#include <cmath>
#include <fstream>

#include "text_io.hpp"

namespace otmix {

std::pair<int, int> window_bounds(int i, int n, int m, int width) {
    if (n < 1 || m < 1)
        throw Error("window_bounds: sequence lengths must be positive");
    if (i < 0 || i >= n)
        throw IndexOutOfRange("window_bounds: row " + std::to_string(i) +
                              " outside [0, " + std::to_string(n) + ")");
    if (width < 1)
        throw Error("window width must be at least 1");
    double center = static_cast<double>(m) / n * (i + 1);
    int lo = std::max(1, static_cast<int>(std::ceil(center - width)));
    int hi = std::min(m, static_cast<int>(std::floor(center + width)));
    return {lo - 1, hi - 1};
}

RelaxedSolution solve_relaxed(const CostMatrix& cost, const MassVector& row_masses,
                              const WindowConfig& window) {
    const Eigen::Index n = cost.rows();
    const Eigen::Index m = cost.cols();
    if (row_masses.size() != n)
        throw ShapeMismatch("solve_relaxed: " + std::to_string(row_masses.size()) +
                            " masses for " + std::to_string(n) + " cost rows");

    RelaxedSolution sol;
    sol.plan.values = Eigen::MatrixXd::Zero(n, m);
    sol.plan.row_marginal = row_masses.values();
    sol.plan.relaxed_targets.resize(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        int lo = 0, hi = static_cast<int>(m) - 1;
        if (window.enabled)
            std::tie(lo, hi) = window_bounds(static_cast<int>(i), static_cast<int>(n),
                                             static_cast<int>(m), window.width);
        int best = lo;
        for (int j = lo + 1; j <= hi; ++j)
            if (cost(i, j) < cost(i, best))
                best = j;
        sol.plan.values(i, best) = row_masses[i];
        sol.plan.relaxed_targets[i] = best;
        sol.distance += row_masses[i] * cost(i, best);
    }
    return sol;
}

Alignment extract_alignment(const TransportPlan& plan) {
    if (!plan.relaxed_targets.empty())
        return Alignment{plan.relaxed_targets};
    const Eigen::Index n = plan.values.rows();
    Alignment align;
    align.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        for (Eigen::Index j = 1; j < plan.values.cols(); ++j)
            if (plan.values(i, j) > plan.values(i, best))
                best = static_cast<int>(j);
        align.targets[i] = best;
    }
    return align;
}

RelaxedGradient relaxed_grad(const EmbeddingSequence& a, const EmbeddingSequence& b,
                             const WindowConfig& window) {
    const CostMatrix cost = cost_matrix(a, b);
    const Eigen::VectorXd norms = a.vectors().rowwise().norm();
    const double total = norms.sum();
    if (total == 0.0)
        throw AllZeroSequence("relaxed_grad: all rows of a have zero norm");
    const MassVector masses(norms / total);
    const RelaxedSolution sol = solve_relaxed(cost, masses, window);

    // With r_i = |a_i|, s = sum_k r_k, m_i = r_i / s, t_i the chosen column
    // and d_i = |a_i - b_{t_i}|, the distance is D = sum_i m_i d_i. Holding
    // the argmin columns fixed,
    //   dD/da_j = m_j u_j + (a_j / r_j) (d_j - D) / s,   u_j = (a_j - b_{t_j}) / d_j
    //   dD/db_k = -sum_{i: t_i = k} m_i u_i
    // where the second term in dD/da_j comes from every mass depending on
    // every row norm through s.
    RelaxedGradient grad;
    grad.grad_a = Eigen::MatrixXd::Zero(a.length(), a.dim());
    grad.grad_b = Eigen::MatrixXd::Zero(b.length(), b.dim());
    for (Eigen::Index i = 0; i < a.length(); ++i) {
        int t = sol.plan.relaxed_targets[i];
        double dist = cost(i, t);
        if (dist <= 1e-12)
            throw DegenerateGradient("relaxed_grad: aligned pair (" + std::to_string(i) +
                                     ", " + std::to_string(t) + ") at distance " +
                                     detail::format_double(dist));
        if (norms[i] <= 1e-12)
            throw DegenerateGradient("relaxed_grad: row " + std::to_string(i) +
                                     " of a has near-zero norm");
        Eigen::RowVectorXd unit = (a.row(i) - b.row(t)) / dist;
        grad.grad_a.row(i) = masses[i] * unit +
                             (a.row(i) / norms[i]) * ((dist - sol.distance) / total);
        grad.grad_b.row(t) -= masses[i] * unit;
    }
    return grad;
}

void write_alignment(const Alignment& align, std::ostream& out) {
    out << "n " << align.size() << "\n";
    for (int i = 0; i < align.size(); ++i)
        out << (i + 1) << '\t' << (align.targets[i] + 1) << '\n';
}

void write_alignment(const Alignment& align, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    write_alignment(align, out);
    if (!out)
        throw Error("write failed: " + path.string());
}

Alignment read_alignment(const std::filesystem::path& path, int target_length) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    const std::string name = path.string();

    std::string line;
    if (!std::getline(in, line))
        detail::fail_format(name, 1, "missing header");
    detail::strip_cr(line);
    auto head = detail::split(line, ' ');
    long long n = 0;
    if (head.size() != 2 || head[0] != "n" || !detail::parse_int(head[1], n))
        detail::fail_format(name, 1, "expected header 'n <length>'");
    if (n < 1)
        detail::fail_format(name, 1, "length must be positive");

    Alignment align;
    align.targets.resize(n);
    for (long long i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            detail::fail_format(name, 2 + i, "unexpected end of file");
        detail::strip_cr(line);
        auto toks = detail::split(line, '\t');
        long long row = 0, tgt = 0;
        if (toks.size() != 2 || !detail::parse_int(toks[0], row) ||
            !detail::parse_int(toks[1], tgt))
            detail::fail_format(name, 2 + i, "expected '<row>\\t<target>'");
        if (row != i + 1)
            detail::fail_format(name, 2 + i, "rows must be 1.." + std::to_string(n) +
                                             " in order");
        if (tgt < 1 || (target_length > 0 && tgt > target_length))
            throw IndexOutOfRange(name + ":" + std::to_string(2 + i) + ": target " +
                                  std::to_string(tgt) + " out of range");
        align.targets[i] = static_cast<int>(tgt - 1);
    }
    while (std::getline(in, line)) {
        detail::strip_cr(line);
        if (!line.empty())
            detail::fail_format(name, 2 + n, "trailing content");
    }
    return align;
}

} // namespace otmix
