#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sympd/polynomial.hpp"

namespace sympd {

// Holomorphic polynomial curve D -> C^m or D -> G_n, one univariate
// component per target coordinate, coefficients stored low degree first.
struct CurveSpec {
    enum class Target { Euclidean, Symmetrized };

    std::vector<std::vector<Complex>> components;
    Target target = Target::Euclidean;

    static CurveSpec euclidean(std::vector<std::vector<Complex>> comps) {
        return {std::move(comps), Target::Euclidean};
    }
    static CurveSpec symmetrized(std::vector<std::vector<Complex>> comps) {
        return {std::move(comps), Target::Symmetrized};
    }

    std::size_t dimension() const { return components.size(); }

    bool is_constant() const {
        for (const auto& c : components)
            for (std::size_t d = 1; d < c.size(); ++d)
                if (c[d] != Complex(0)) return false;
        return true;
    }

    Complex eval_component(std::size_t i, Complex z) const {
        const auto& c = components.at(i);
        Complex v(0);
        for (std::size_t d = c.size(); d-- > 0;) v = v * z + c[d];
        return v;
    }

    ComplexPoint eval(Complex z) const {
        ComplexPoint out(components.size());
        for (std::size_t i = 0; i < components.size(); ++i) out[i] = eval_component(i, z);
        return out;
    }

    // d-th derivative of component i at z (d = 0 is the value itself)
    Complex derivative_component(std::size_t i, Complex z, unsigned d) const {
        const auto& c = components.at(i);
        Complex v(0);
        for (std::size_t k = c.size(); k-- > d;) {
            double fall = 1;
            for (unsigned t = 0; t < d; ++t) fall *= static_cast<double>(k - t);
            v = v * z + fall * c[k];
        }
        return v;
    }
};

}  // namespace sympd
