#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sympd/polynomial.hpp"

namespace sympd {

// Quotient of two polynomials with an optional symbolic pi^k scale, kept
// unreduced: canonicalization is by scalar only (the numerator's first
// coefficient in monomial order is made positive), never by multivariate
// gcd. Correctness checks downstream are by evaluation.
class RationalFunction {
public:
    RationalFunction(Polynomial numerator, Polynomial denominator, int pi_power = 0)
        : num_(std::move(numerator)), den_(std::move(denominator)), pi_power_(pi_power) {
        require_same_arena(num_.arena(), den_.arena(), "rational function");
        if (den_.is_zero()) throw std::invalid_argument("rational function: zero denominator");
        if (!num_.is_zero() && num_.leading_term().coeff < 0) {
            num_ = -num_;
            den_ = -den_;
        }
    }

    explicit RationalFunction(Polynomial numerator, int pi_power = 0)
        : num_(std::move(numerator)),
          den_(Polynomial::constant(num_.arena(), Rational(1))),
          pi_power_(pi_power) {
        if (!num_.is_zero() && num_.leading_term().coeff < 0) {
            num_ = -num_;
            den_ = -den_;
        }
    }

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    int pi_power() const { return pi_power_; }
    const VariableArena& arena() const { return num_.arena(); }

    // Quotient-rule derivative (num' den - num den') / den^2; no reduction.
    RationalFunction partial(std::size_t var) const {
        Polynomial n = num_.partial(var) * den_ - num_ * den_.partial(var);
        return RationalFunction(std::move(n), den_ * den_, pi_power_);
    }

    // pi^k is applied numerically here, never folded into the polynomials.
    Complex eval(const ComplexPoint& point) const {
        Complex d = den_.eval(point);
        if (d == Complex(0)) throw std::domain_error("rational function eval: denominator vanishes");
        Complex v = num_.eval(point) / d;
        for (int k = 0; k < pi_power_; ++k) v /= kPi;
        for (int k = 0; k > pi_power_; --k) v *= kPi;
        return v;
    }

private:
    Polynomial num_;
    Polynomial den_;
    int pi_power_;
};

inline RationalFunction ratfn_partial(const RationalFunction& r, std::size_t var) { return r.partial(var); }

}  // namespace sympd
