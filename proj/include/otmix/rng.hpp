#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace otmix {

// splitmix64 finalizer, used to decorrelate derived seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed for the k-th instance of a batch keyed by `base`. Instances drawn
// from derived seeds are independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) + index);
}

// Deterministic random stream. Everything downstream of a seed goes through
// this class so that results are reproducible bit for bit: mt19937_64 has a
// fixed specification and the mappings below avoid std::distributions, whose
// output is implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform on (0, 1]. The +1 keeps 0 out of the range, so log(u) is safe
    // and a threshold test u <= p is exact at both p = 0 and p = 1.
    double uniform() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform integer in [1, hi].
    int uniform_int(int hi) {
        return 1 + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi));
    }

    // Standard normal via Box-Muller on the uniform() stream.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace otmix
