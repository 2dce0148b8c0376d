#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace sympd {

// Exact rational coefficient type. GMP keeps values canonical
// (gcd(num,den)=1, den>0) through arithmetic; anything built by hand
// must go through make_rational / parse_rational below.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p" or "p/q" in base 10, optional leading '-'. Lowest terms are
// not required on input; the result is canonical.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("rational: empty string");
    for (char c : text) {
        if (!(c == '-' || c == '/' || (c >= '0' && c <= '9')))
            throw std::invalid_argument("rational: bad character in '" + text + "'");
    }
    Rational r;
    if (r.set_str(text, 10) != 0)
        throw std::invalid_argument("rational: cannot parse '" + text + "'");
    if (r.get_den() == 0) throw std::invalid_argument("rational: zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
}

// "p" when the denominator is 1, otherwise "p/q" in lowest terms.
inline std::string to_string(const Rational& r) {
    return r.get_str();
}

inline double to_double(const Rational& r) {
    return r.get_d();
}

// Two-term conversion: exact when the value is a double (the usual case
// of small integer coefficients), and accurate to ~32 digits otherwise,
// which more than covers the 64-bit long double mantissa.
inline long double to_long_double(const Rational& r) {
    const double hi = r.get_d();
    Rational rest = r - Rational(hi);
    rest.canonicalize();
    return static_cast<long double>(hi) + static_cast<long double>(rest.get_d());
}

}  // namespace sympd
