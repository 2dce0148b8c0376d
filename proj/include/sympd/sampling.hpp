#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "sympd/polynomial.hpp"

namespace sympd {

// Deterministic sampling utilities. All doubles are derived from
// mt19937_64 (a standardized sequence) by an explicit 53-bit construction,
// so identical seeds give identical samples on every platform; the
// implementation-defined std::uniform_real_distribution is avoided on
// purpose.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    // uniform in [0, 1)
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    // uniform in [-r, r]
    double symmetric(double r) { return (2.0 * unit() - 1.0) * r; }

    // uniform on the open disc |z| < radius (rejection from the square)
    Complex disc(double radius) {
        if (radius <= 0) throw std::invalid_argument("sampler: radius must be positive");
        while (true) {
            Complex z(symmetric(radius), symmetric(radius));
            if (std::abs(z) < radius) return z;
        }
    }

    // n disc points with pairwise separation >= sep (rejection over tuples)
    ComplexPoint separated_tuple(std::size_t n, double radius, double sep) {
        while (true) {
            ComplexPoint p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = disc(radius);
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i)
                for (std::size_t j = i + 1; j < n && ok; ++j)
                    if (std::abs(p[i] - p[j]) < sep) ok = false;
            if (ok) return p;
        }
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace sympd
