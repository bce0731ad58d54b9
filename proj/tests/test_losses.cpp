#include <doctest.h>

#include <cmath>

#include "otmix/losses.hpp"
#include "otmix/rng.hpp"
#include "testutil.hpp"

using namespace otmix;

namespace {

Eigen::MatrixXd random_distributions(SeededRng& rng, int length, int vocab,
                                     double floor = 0.0) {
    Eigen::MatrixXd probs(length, vocab);
    for (int l = 0; l < length; ++l) {
        double sum = 0.0;
        for (int v = 0; v < vocab; ++v) {
            probs(l, v) = floor + rng.uniform();
            sum += probs(l, v);
        }
        probs.row(l) /= sum;
    }
    return probs;
}

// plain scalar versions of the losses, kept independent of the library code
double oracle_ce(const Eigen::MatrixXd& probs, const std::vector<int>& targets,
                 double alpha) {
    double total = 0.0;
    for (int l = 0; l < probs.rows(); ++l) {
        double hit = -std::log(std::max(probs(l, targets[l]), 1e-12));
        double smooth = 0.0;
        for (int v = 0; v < probs.cols(); ++v)
            smooth += -std::log(std::max(probs(l, v), 1e-12));
        total += (1 - alpha) * hit + alpha * smooth / probs.cols();
    }
    return total / probs.rows();
}

double oracle_skl(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
    double total = 0.0;
    for (int l = 0; l < p.rows(); ++l) {
        double sp = 0.0, sq = 0.0;
        for (int v = 0; v < p.cols(); ++v) {
            sp += std::max(p(l, v), 1e-12);
            sq += std::max(q(l, v), 1e-12);
        }
        for (int v = 0; v < p.cols(); ++v) {
            double pv = std::max(p(l, v), 1e-12) / sp;
            double qv = std::max(q(l, v), 1e-12) / sq;
            total += 0.5 * (pv * std::log(pv / qv) + qv * std::log(qv / pv));
        }
    }
    return total / p.rows();
}

} // namespace

TEST_CASE("distribution rows must be normalized") {
    Eigen::MatrixXd good(1, 3);
    good << 0.2, 0.3, 0.5;
    CHECK_NOTHROW(TokenDistributionSequence{good});

    Eigen::MatrixXd off(1, 3);
    off << 0.2, 0.3, 0.6;
    CHECK_THROWS_AS(TokenDistributionSequence{off}, Error);

    Eigen::MatrixXd negative(1, 2);
    negative << 1.5, -0.5;
    CHECK_THROWS_AS(TokenDistributionSequence{negative}, Error);
}

TEST_CASE("cross entropy matches hand results") {
    Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(4, 5, 0.2);
    TokenDistributionSequence pred(uniform);
    // uniform prediction scores log(V) whatever the target or smoothing
    CHECK(cross_entropy(pred, {0, 1, 2, 3}, 0.0) ==
          doctest::Approx(std::log(5.0)).epsilon(1e-14));
    CHECK(cross_entropy(pred, {0, 1, 2, 3}, 0.1) ==
          doctest::Approx(std::log(5.0)).epsilon(1e-14));

    Eigen::MatrixXd peaked(1, 2);
    peaked << 0.9, 0.1;
    TokenDistributionSequence sharp(peaked);
    CHECK(cross_entropy(sharp, {0}, 0.0) == doctest::Approx(-std::log(0.9)));
    // smoothing spreads 0.1 of the weight uniformly over the vocabulary
    double expected = 0.9 * -std::log(0.9) + 0.1 * (-std::log(0.9) - std::log(0.1)) / 2;
    CHECK(cross_entropy(sharp, {0}, 0.1) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("cross entropy agrees with the scalar oracle") {
    SeededRng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        int L = 1 + static_cast<int>(rng.raw() % 6);
        int V = 2 + static_cast<int>(rng.raw() % 8);
        Eigen::MatrixXd probs = random_distributions(rng, L, V);
        std::vector<int> targets;
        for (int l = 0; l < L; ++l)
            targets.push_back(static_cast<int>(rng.raw() % V));
        double alpha = trial % 2 == 0 ? 0.0 : 0.1;
        CHECK(cross_entropy(TokenDistributionSequence(probs), targets, alpha) ==
              doctest::Approx(oracle_ce(probs, targets, alpha)).epsilon(1e-13));
    }
}

TEST_CASE("probability floor keeps empty support finite") {
    Eigen::MatrixXd probs(1, 2);
    probs << 1.0, 0.0;
    TokenDistributionSequence pred(probs);
    double loss = cross_entropy(pred, {1}, 0.0);
    CHECK(loss == doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
    CHECK(std::isfinite(loss));
}

TEST_CASE("cross entropy validates targets and smoothing") {
    Eigen::MatrixXd probs = Eigen::MatrixXd::Constant(2, 3, 1.0 / 3);
    TokenDistributionSequence pred(probs);
    CHECK_THROWS_AS(cross_entropy(pred, {0}, 0.0), LengthMismatch);
    CHECK_THROWS_AS(cross_entropy(pred, {0, 3}, 0.0), IndexOutOfRange);
    CHECK_THROWS_AS(cross_entropy(pred, {0, -1}, 0.0), IndexOutOfRange);
    CHECK_THROWS_AS(cross_entropy(pred, {0, 1}, 1.0), Error);
}

TEST_CASE("symmetric kl is zero at equality, positive and symmetric elsewhere") {
    SeededRng rng(72);
    Eigen::MatrixXd probs = random_distributions(rng, 5, 7);
    TokenDistributionSequence p(probs);
    CHECK(symmetric_kl(p, p) == 0.0);

    Eigen::MatrixXd other = random_distributions(rng, 5, 7);
    TokenDistributionSequence q(other);
    double pq = symmetric_kl(p, q);
    double qp = symmetric_kl(q, p);
    CHECK(pq > 0.0);
    CHECK(pq == doctest::Approx(qp).epsilon(1e-12));
    CHECK(pq == doctest::Approx(oracle_skl(probs, other)).epsilon(1e-12));
}

TEST_CASE("symmetric kl handles zero entries through the floor") {
    Eigen::MatrixXd p(1, 3), q(1, 3);
    p << 1.0, 0.0, 0.0;
    q << 0.0, 1.0, 0.0;
    double v = symmetric_kl(TokenDistributionSequence(p), TokenDistributionSequence(q));
    CHECK(std::isfinite(v));
    CHECK(v > 10.0); // disjoint support is expensive but finite
}

TEST_CASE("kl gradient matches central differences") {
    SeededRng rng(73);
    const double step = 1e-5;
    for (int trial = 0; trial < 5; ++trial) {
        int L = 1 + static_cast<int>(rng.raw() % 4);
        int V = 2 + static_cast<int>(rng.raw() % 5);
        // keep entries well above the clamp so the loss is smooth here
        Eigen::MatrixXd pm = random_distributions(rng, L, V, 0.2);
        Eigen::MatrixXd qm = random_distributions(rng, L, V, 0.2);
        KlGradient grad = symmetric_kl_grad(TokenDistributionSequence(pm),
                                            TokenDistributionSequence(qm));

        auto value = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
            return symmetric_kl(TokenDistributionSequence(x),
                                TokenDistributionSequence(y));
        };
        // perturb along simplex tangent directions e_v - e_w so each row
        // stays a valid distribution; compare against the gradient gap
        for (int l = 0; l < L; ++l)
            for (int v = 0; v < V; ++v)
                for (int w = v + 1; w < V; ++w) {
                    Eigen::MatrixXd hi = pm, lo = pm;
                    hi(l, v) += step;
                    hi(l, w) -= step;
                    lo(l, v) -= step;
                    lo(l, w) += step;
                    double fd = (value(hi, qm) - value(lo, qm)) / (2 * step);
                    CHECK(grad.grad_p(l, v) - grad.grad_p(l, w) ==
                          doctest::Approx(fd).epsilon(1e-5));

                    hi = qm;
                    lo = qm;
                    hi(l, v) += step;
                    hi(l, w) -= step;
                    lo(l, v) -= step;
                    lo(l, w) += step;
                    fd = (value(pm, hi) - value(pm, lo)) / (2 * step);
                    CHECK(grad.grad_q(l, v) - grad.grad_q(l, w) ==
                          doctest::Approx(fd).epsilon(1e-5));
                }
    }
}

TEST_CASE("kl gradient refuses entries at the clamp") {
    Eigen::MatrixXd p(1, 2), q(1, 2);
    p << 1.0, 0.0;
    q << 0.5, 0.5;
    CHECK_THROWS_AS(symmetric_kl_grad(TokenDistributionSequence(p),
                                      TokenDistributionSequence(q)),
                    DegenerateGradient);
}

TEST_CASE("objective combines components with the configured weights") {
    ObjectiveWeights weights;
    weights.kl_weight = 2.0;
    weights.ot_weight = 0.1;
    weights.use_mixup_ce = true;
    CHECK(total_objective(1.0, 0.5, 0.25, 0.1, 0.2, 3.0, weights) ==
          doctest::Approx(1.0 + 0.5 + 0.25 + 2.0 * 0.3 + 0.3).epsilon(1e-14));

    ObjectiveWeights no_extras;
    no_extras.kl_weight = 0.0;
    no_extras.ot_weight = 0.0;
    no_extras.use_mixup_ce = false;
    // mixup and ot values must be ignored when switched off
    CHECK(total_objective(1.0, 0.5, 99.0, 88.0, 77.0, 66.0, no_extras) == 1.5);

    CHECK_THROWS_AS(total_objective(std::nan(""), 0, 0, 0, 0, 0, ObjectiveWeights{}),
                    Error);
}
