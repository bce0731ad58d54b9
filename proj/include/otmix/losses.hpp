#pragma once

#include <Eigen/Dense>
#include <vector>

#include "otmix/errors.hpp"

namespace otmix {

// Per-position probability distributions over a shared vocabulary, one row
// per sequence position. Rows must be nonnegative and sum to one within
// 1e-9.
class TokenDistributionSequence {
public:
    explicit TokenDistributionSequence(Eigen::MatrixXd probs);

    Eigen::Index length() const { return probs_.rows(); }
    Eigen::Index vocab() const { return probs_.cols(); }
    const Eigen::MatrixXd& probs() const { return probs_; }

private:
    Eigen::MatrixXd probs_;
};

// Label-smoothed cross entropy, averaged over positions. Probabilities are
// clamped to 1e-12 before the log so empty model support costs a large but
// finite penalty.
double cross_entropy(const TokenDistributionSequence& predicted,
                     const std::vector<int>& target_ids, double label_smoothing);

// Jeffreys divergence: the two KL directions averaged, then averaged over
// positions. Rows are clamped to 1e-12 and renormalized first, so the value
// is finite for any valid input and exactly zero when the inputs match.
double symmetric_kl(const TokenDistributionSequence& p, const TokenDistributionSequence& q);

struct KlGradient {
    Eigen::MatrixXd grad_p;
    Eigen::MatrixXd grad_q;
};

// Gradient of symmetric_kl with respect to both raw probability tables,
// including the renormalization term. Requires every entry >= 1e-9 so the
// clamp inside symmetric_kl is inactive; throws DegenerateGradient below
// that, where the clamp makes the loss non-differentiable.
KlGradient symmetric_kl_grad(const TokenDistributionSequence& p,
                             const TokenDistributionSequence& q);

struct ObjectiveWeights {
    double kl_weight = 2.0;
    double ot_weight = 0.0;
    bool use_mixup_ce = false;
};

// Training objective: speech and text cross entropies, optionally the
// mixup cross entropy, both KL consistency terms scaled by kl_weight, and
// the transport distance scaled by ot_weight.
double total_objective(double st_ce, double mt_ce, double mixup_ce, double kl_ms,
                       double kl_mt, double ot_distance, const ObjectiveWeights& weights);

} // namespace otmix
