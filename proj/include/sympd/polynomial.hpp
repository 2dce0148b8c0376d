#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sympd/arena.hpp"
#include "sympd/monomial.hpp"
#include "sympd/rational.hpp"

namespace sympd {

using Complex = std::complex<double>;
using ComplexPoint = std::vector<Complex>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr long double kPiL = 3.141592653589793238462643383279502884L;

class DivisionRemainderError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Sparse multivariate polynomial over exact rationals. Terms are kept in
// descending graded-lex order with no zero coefficients; that form is
// canonical for a given arena. Values are immutable after construction.
class Polynomial {
public:
    struct Term {
        Monomial mono;
        Rational coeff;
    };

    Polynomial() = default;

    explicit Polynomial(VariableArena arena) : arena_(std::move(arena)) {}

    static Polynomial zero(const VariableArena& arena) { return Polynomial(arena); }

    static Polynomial constant(const VariableArena& arena, Rational c) {
        c.canonicalize();
        Polynomial p(arena);
        if (c != 0) p.terms_.push_back({Monomial(arena.size()), std::move(c)});
        return p;
    }

    static Polynomial variable(const VariableArena& arena, std::size_t index, unsigned power = 1) {
        if (index >= arena.size()) throw std::out_of_range("polynomial: variable index");
        Polynomial p(arena);
        if (power == 0) return constant(arena, 1);
        Monomial m(arena.size());
        m.set(index, power);
        p.terms_.push_back({m, Rational(1)});
        return p;
    }

    // Terms may arrive in any order, with duplicates; they are merged and
    // canonicalized here.
    static Polynomial from_terms(const VariableArena& arena, std::vector<Term> terms) {
        for (const auto& t : terms)
            if (t.mono.size() != arena.size())
                throw std::invalid_argument("polynomial: monomial width does not match arena");
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return grlex_less(b.mono, a.mono); });
        Polynomial p(arena);
        p.terms_.reserve(terms.size());
        for (auto& t : terms) {
            t.coeff.canonicalize();
            if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
                p.terms_.back().coeff += t.coeff;
                if (p.terms_.back().coeff == 0) p.terms_.pop_back();
            } else if (t.coeff != 0) {
                p.terms_.push_back(std::move(t));
            }
        }
        return p;
    }

    const VariableArena& arena() const { return arena_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    // Leading term under grlex (terms are stored leading-first).
    const Term& leading_term() const {
        if (terms_.empty()) throw std::logic_error("polynomial: leading term of zero");
        return terms_.front();
    }

    unsigned total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.degree(); }

    unsigned degree_in(std::size_t var) const {
        unsigned d = 0;
        for (const auto& t : terms_) d = std::max(d, t.mono[var]);
        return d;
    }

    Rational coefficient(const Monomial& m) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Monomial& k) { return grlex_less(k, t.mono); });
        if (it != terms_.end() && it->mono == m) return it->coeff;
        return Rational(0);
    }

    bool operator==(const Polynomial& o) const {
        if (arena_ != o.arena_ || terms_.size() != o.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].mono != o.terms_[i].mono || terms_[i].coeff != o.terms_[i].coeff) return false;
        return true;
    }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    Polynomial operator-() const {
        Polynomial r(arena_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.push_back({t.mono, -t.coeff});
        return r;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) { return merged(a, b, false); }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return merged(a, b, true); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        require_same_arena(a.arena_, b.arena_, "poly mul");
        if (a.is_zero() || b.is_zero()) return Polynomial(a.arena_);
        const Polynomial& outer = a.terms_.size() >= b.terms_.size() ? a : b;
        const Polynomial& inner = a.terms_.size() >= b.terms_.size() ? b : a;
        std::unordered_map<Monomial, Rational, MonomialHash> acc;
        acc.reserve(outer.terms_.size() * 2);
        for (const auto& ti : inner.terms_) {
            for (const auto& to : outer.terms_) {
                acc[ti.mono * to.mono] += ti.coeff * to.coeff;
            }
        }
        return from_accumulator(outer.arena_, std::move(acc));
    }

    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend Polynomial operator*(const Polynomial& p, const Rational& k) {
        if (k == 0) return Polynomial(p.arena_);
        Rational kc = k;
        kc.canonicalize();
        Polynomial r(p.arena_);
        r.terms_.reserve(p.terms_.size());
        for (const auto& t : p.terms_) r.terms_.push_back({t.mono, t.coeff * kc});
        return r;
    }
    friend Polynomial operator*(const Rational& k, const Polynomial& p) { return p * k; }

    // d/dx_v. Term order survives differentiation by a single variable, so
    // this is a straight map-and-filter.
    Polynomial partial(std::size_t var) const {
        if (var >= arena_.size()) throw std::out_of_range("polynomial: variable index");
        Polynomial r(arena_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            unsigned e = t.mono[var];
            if (e == 0) continue;
            Monomial m = t.mono;
            m.set(var, e - 1);
            r.terms_.push_back({m, t.coeff * static_cast<long>(e)});
        }
        return r;
    }

    // Evaluation at a complex point, one coordinate per arena variable.
    // Powers are tabulated per variable; terms are summed in canonical
    // order, so the result is deterministic. CT = std::complex<double> by
    // default; pass std::complex<long double> for the higher-precision mode.
    template <typename CT = Complex>
    CT eval(std::span<const CT> point) const {
        if (point.size() != arena_.size())
            throw std::invalid_argument("polynomial eval: point size does not match arena");
        const std::size_t nv = arena_.size();
        std::vector<std::vector<CT>> powers(nv);
        for (std::size_t v = 0; v < nv; ++v) {
            unsigned d = degree_in(v);
            auto& tab = powers[v];
            tab.resize(d + 1);
            tab[0] = CT(1);
            for (unsigned e = 1; e <= d; ++e) tab[e] = tab[e - 1] * point[v];
        }
        CT sum(0);
        for (const auto& t : terms_) {
            CT prod;
            if constexpr (std::is_same_v<typename CT::value_type, long double>)
                prod = CT(to_long_double(t.coeff));
            else
                prod = CT(static_cast<typename CT::value_type>(to_double(t.coeff)));
            for (std::size_t v = 0; v < nv; ++v) {
                unsigned e = t.mono[v];
                if (e) prod *= powers[v][e];
            }
            sum += prod;
        }
        return sum;
    }

    Complex eval(const ComplexPoint& point) const { return eval<Complex>(std::span<const Complex>(point)); }

    // Exact division by (x_i - x_j). While a remainder-free division is
    // possible the running remainder's leading term is divisible by the
    // grlex-larger of the two variables; a leading term without it proves a
    // nonzero remainder. (x_i - x_j) = -(x_j - x_i), so i > j reduces to the
    // i < j case with the quotient negated.
    Polynomial exact_div_linear(std::size_t i, std::size_t j) const {
        if (i >= arena_.size() || j >= arena_.size()) throw std::out_of_range("exact_div_linear: variable index");
        if (i == j) throw std::invalid_argument("exact_div_linear: i == j");
        if (i > j) return -exact_div_linear(j, i);
        std::map<Monomial, Rational, GrlexGreater> rem;
        for (const auto& t : terms_) rem.emplace(t.mono, t.coeff);
        std::vector<Term> quot;
        while (!rem.empty()) {
            auto lead = rem.begin();
            const Monomial m = lead->first;
            const Rational c = std::move(lead->second);
            rem.erase(lead);
            if (m[i] == 0)
                throw DivisionRemainderError("exact_div_linear: nonzero remainder (dividend not divisible by " +
                                             arena_.name(i) + " - " + arena_.name(j) + ")");
            Monomial q = m;
            q.set(i, m[i] - 1);
            quot.push_back({q, c});
            Monomial carry = q;
            carry.set(j, q[j] + 1);
            auto [it, inserted] = rem.try_emplace(carry, c);
            if (!inserted) {
                it->second += c;
                if (it->second == 0) rem.erase(it);
            }
        }
        // Quotient terms were produced in strictly descending order.
        Polynomial r(arena_);
        r.terms_ = std::move(quot);
        return r;
    }

private:
    static Polynomial merged(const Polynomial& a, const Polynomial& b, bool subtract) {
        require_same_arena(a.arena_, b.arena_, subtract ? "poly sub" : "poly add");
        Polynomial r(a.arena_);
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t ia = 0, ib = 0;
        while (ia < a.terms_.size() && ib < b.terms_.size()) {
            const auto& ta = a.terms_[ia];
            const auto& tb = b.terms_[ib];
            if (ta.mono == tb.mono) {
                Rational c = subtract ? Rational(ta.coeff - tb.coeff) : Rational(ta.coeff + tb.coeff);
                if (c != 0) r.terms_.push_back({ta.mono, std::move(c)});
                ++ia, ++ib;
            } else if (grlex_less(tb.mono, ta.mono)) {
                r.terms_.push_back(ta);
                ++ia;
            } else {
                r.terms_.push_back({tb.mono, subtract ? -tb.coeff : tb.coeff});
                ++ib;
            }
        }
        for (; ia < a.terms_.size(); ++ia) r.terms_.push_back(a.terms_[ia]);
        for (; ib < b.terms_.size(); ++ib)
            r.terms_.push_back({b.terms_[ib].mono, subtract ? -b.terms_[ib].coeff : b.terms_[ib].coeff});
        return r;
    }

    static Polynomial from_accumulator(const VariableArena& arena,
                                       std::unordered_map<Monomial, Rational, MonomialHash> acc) {
        Polynomial p(arena);
        p.terms_.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (c != 0) p.terms_.push_back({m, std::move(c)});
        std::sort(p.terms_.begin(), p.terms_.end(),
                  [](const Term& a, const Term& b) { return grlex_less(b.mono, a.mono); });
        return p;
    }

    VariableArena arena_;
    std::vector<Term> terms_;
};

}  // namespace sympd
