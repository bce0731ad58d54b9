#include "otmix/losses.hpp"

#include <cmath>

namespace otmix {

namespace {
constexpr double kProbFloor = 1e-12;
constexpr double kGradFloor = 1e-9;
} // namespace

TokenDistributionSequence::TokenDistributionSequence(Eigen::MatrixXd probs)
    : probs_(std::move(probs)) {
    if (probs_.rows() < 1 || probs_.cols() < 1)
        throw Error("distribution sequence needs at least one row and one column");
    if (!probs_.allFinite() || (probs_.array() < 0.0).any())
        throw Error("probabilities must be finite and nonnegative");
    for (Eigen::Index l = 0; l < probs_.rows(); ++l) {
        double sum = probs_.row(l).sum();
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error("row " + std::to_string(l) + " sums to " + std::to_string(sum) +
                        ", expected 1 within 1e-9");
    }
}

double cross_entropy(const TokenDistributionSequence& predicted,
                     const std::vector<int>& target_ids, double label_smoothing) {
    const Eigen::Index L = predicted.length();
    const Eigen::Index V = predicted.vocab();
    if (static_cast<Eigen::Index>(target_ids.size()) != L)
        throw LengthMismatch("cross_entropy: " + std::to_string(target_ids.size()) +
                             " targets for " + std::to_string(L) + " positions");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0)
        throw Error("cross_entropy: label_smoothing must lie in [0, 1)");
    for (int id : target_ids)
        if (id < 0 || id >= V)
            throw IndexOutOfRange("cross_entropy: target id " + std::to_string(id) +
                                  " outside [0, " + std::to_string(V) + ")");

    double total = 0.0;
    for (Eigen::Index l = 0; l < L; ++l) {
        double hit = -std::log(std::max(predicted.probs()(l, target_ids[l]), kProbFloor));
        double smooth = 0.0;
        if (label_smoothing > 0.0) {
            for (Eigen::Index v = 0; v < V; ++v)
                smooth -= std::log(std::max(predicted.probs()(l, v), kProbFloor));
            smooth /= static_cast<double>(V);
        }
        total += (1.0 - label_smoothing) * hit + label_smoothing * smooth;
    }
    return total / static_cast<double>(L);
}

double symmetric_kl(const TokenDistributionSequence& p, const TokenDistributionSequence& q) {
    if (p.length() != q.length() || p.vocab() != q.vocab())
        throw ShapeMismatch("symmetric_kl: shapes " + std::to_string(p.length()) + "x" +
                            std::to_string(p.vocab()) + " vs " + std::to_string(q.length()) +
                            "x" + std::to_string(q.vocab()));
    const Eigen::Index L = p.length();
    double total = 0.0;
    for (Eigen::Index l = 0; l < L; ++l) {
        Eigen::ArrayXd pr = p.probs().row(l).transpose().array().max(kProbFloor);
        Eigen::ArrayXd qr = q.probs().row(l).transpose().array().max(kProbFloor);
        pr /= pr.sum();
        qr /= qr.sum();
        Eigen::ArrayXd log_ratio = (pr / qr).log();
        total += 0.5 * ((pr * log_ratio).sum() - (qr * log_ratio).sum());
    }
    return total / static_cast<double>(L);
}

KlGradient symmetric_kl_grad(const TokenDistributionSequence& p,
                             const TokenDistributionSequence& q) {
    if (p.length() != q.length() || p.vocab() != q.vocab())
        throw ShapeMismatch("symmetric_kl_grad: shape mismatch");
    if ((p.probs().array() < kGradFloor).any() || (q.probs().array() < kGradFloor).any())
        throw DegenerateGradient("symmetric_kl_grad: entries below 1e-9 hit the "
                                 "probability clamp, loss not differentiable there");

    const Eigen::Index L = p.length();
    KlGradient grad;
    grad.grad_p.resize(L, p.vocab());
    grad.grad_q.resize(L, q.vocab());
    for (Eigen::Index l = 0; l < L; ++l) {
        double sp = p.probs().row(l).sum();
        double sq = q.probs().row(l).sum();
        Eigen::ArrayXd pt = p.probs().row(l).transpose().array() / sp;
        Eigen::ArrayXd qt = q.probs().row(l).transpose().array() / sq;
        Eigen::ArrayXd log_ratio = (pt / qt).log();
        // Derivative of the per-position value against the normalized rows,
        // then through the normalization itself: for f(x) = g(x / sum(x)),
        // df/dx_v = (g'_v - <g', xn>) / sum(x).
        Eigen::ArrayXd dp = 0.5 * (log_ratio + 1.0 - qt / pt);
        Eigen::ArrayXd dq = 0.5 * (-log_ratio + 1.0 - pt / qt);
        grad.grad_p.row(l) = ((dp - (dp * pt).sum()) / (sp * L)).matrix().transpose();
        grad.grad_q.row(l) = ((dq - (dq * qt).sum()) / (sq * L)).matrix().transpose();
    }
    return grad;
}

double total_objective(double st_ce, double mt_ce, double mixup_ce, double kl_ms,
                       double kl_mt, double ot_distance, const ObjectiveWeights& weights) {
    for (double v : {st_ce, mt_ce, mixup_ce, kl_ms, kl_mt, ot_distance,
                     weights.kl_weight, weights.ot_weight})
        if (!std::isfinite(v))
            throw Error("total_objective: non-finite component");
    if (weights.kl_weight < 0.0 || weights.ot_weight < 0.0)
        throw Error("total_objective: weights must be nonnegative");
    double total = st_ce + mt_ce;
    if (weights.use_mixup_ce)
        total += mixup_ce;
    total += weights.kl_weight * (kl_ms + kl_mt);
    total += weights.ot_weight * ot_distance;
    return total;
}

} // namespace otmix
