#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mmfuse {

// Seedable random source with a draw counter. normal() is a fixed Box-Muller
// transform over two uniforms rather than std::normal_distribution, so the
// stream does not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        ++draws_;
        return std::generate_canonical<double, 53>(engine_);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller; consumes exactly two uniforms
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        // u1 == 0 would take log(0); nudge to the smallest representable draw
        if (u1 <= 0.0) u1 = 1e-300;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // uniform integer in [0, n)
    std::uint64_t index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // derive an independent stream, e.g. one per sweep cell
    Rng fork(std::uint64_t salt) {
        std::uint64_t s = engine_();
        ++draws_;
        return Rng(s ^ (salt * 0x9e3779b97f4a7c15ULL));
    }

    std::uint64_t draw_count() const { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

}  // namespace mmfuse
