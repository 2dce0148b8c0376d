#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sympd/curve.hpp"
#include "sympd/polynomial.hpp"
#include "sympd/serialization.hpp"
#include "sympd/symmetric.hpp"

namespace sympd {

class SingularPointError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class OutsideDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Variables of the rationalized kernel: xi1..xin then etab1..etabn. The
// etab variables are independent formal symbols standing for conj(eta).
inline VariableArena kernel_arena(std::size_t n) { return VariableArena::indexed("xi", "etab", n); }

// The kernel of G_n as an explicit rational function: H1/(pi^pi_power * H2)
// with H1, H2 exact polynomials in (xi, etab).
struct KernelFormula {
    std::size_t n;
    long pi_power;
    Polynomial H1;
    Polynomial H2;
};

// ---------------------------------------------------------------------------
// Direct evaluation from the polydisc side
// ---------------------------------------------------------------------------

namespace detail {

// Leibniz determinant of a complex matrix given as row-major vector; n is
// tiny here, and the fully expanded sum keeps evaluation order fixed.
template <typename CT>
inline CT leibniz_det(const std::vector<CT>& m, std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    CT det(0);
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        CT prod = (inversions % 2 == 0) ? CT(1) : CT(-1);
        for (std::size_t j = 0; j < n; ++j) prod *= m[j * n + perm[j]];
        det += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

inline void require_in_polydisc(const ComplexPoint& p, const char* what) {
    for (const Complex& c : p)
        if (std::abs(c) >= 1.0) throw OutsideDomainError(std::string(what) + ": coordinate outside the unit disc");
}

}  // namespace detail

// K_{G_n}(pi(lambda), pi(mu)) = det[1/(1-lambda_j conj(mu_k))^2] /
// (pi^n * V(lambda) * conj(V(mu))). Breaks down (0/0) on the critical set,
// where only the rationalized formula applies. The determinant cancels
// catastrophically when either tuple clusters, so everything runs in
// 80-bit arithmetic to keep the verify-loop agreement below 1e-9.
inline Complex kernel_direct_eval(const ComplexPoint& lambda, const ComplexPoint& mu) {
    if (lambda.size() != mu.size() || lambda.empty())
        throw std::invalid_argument("kernel_direct_eval: lambda and mu must have equal positive length");
    detail::require_in_polydisc(lambda, "lambda");
    detail::require_in_polydisc(mu, "mu");
    if (is_critical(lambda, 1e-12) || is_critical(mu, 1e-12))
        throw SingularPointError("singular: use kernel_formula_eval");
    using CL = std::complex<long double>;
    const std::size_t n = lambda.size();
    std::vector<CL> l(n), mb(n);
    for (std::size_t i = 0; i < n; ++i) {
        l[i] = CL(lambda[i]);
        mb[i] = CL(std::conj(mu[i]));
    }
    std::vector<CL> m(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const CL d = CL(1) - l[j] * mb[k];
            m[j * n + k] = CL(1) / (d * d);
        }
    const CL det = detail::leibniz_det(m, n);
    CL denom(1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) denom *= (l[i] - l[j]) * (mb[i] - mb[j]);
    for (std::size_t k = 0; k < n; ++k) denom *= kPiL;
    const CL r = det / denom;
    return Complex(static_cast<double>(r.real()), static_cast<double>(r.imag()));
}

// The printed n=2 closed form, evaluated verbatim; conjugation applies to
// the second point (s2, p2).
inline Complex kernel_closed_form_n2(Complex s1, Complex p1, Complex s2, Complex p2) {
    const Complex sb = std::conj(s2), pb = std::conj(p2);
    const Complex bracket =
        Complex(1) - s1 * sb + (s1 * s1 - 2.0 * p1) * pb - p1 * s1 * sb * pb + p1 * sb * sb + p1 * p1 * pb * pb;
    const Complex den = kPi * kPi * bracket * bracket;
    if (den == Complex(0)) throw OutsideDomainError("kernel_closed_form_n2: denominator vanished (outside G2 x G2)");
    return (Complex(2) - s1 * sb + 2.0 * p1 * pb) / den;
}

// ---------------------------------------------------------------------------
// Rationalization pipeline
// ---------------------------------------------------------------------------

// Constructs the kernel as H1(xi, etab) / (pi^n * H2(xi, etab)) by exact
// polynomial algebra:
//   (a) P1 = det[M_jk], M_jk = prod_{k' != k} (1 - l_j mb_{k'})^2
//       (the kernel's determinant with row denominators cleared);
//   (b) P2 = prod_{i,j} (1 - l_i mb_j)^2;
//   (c) P1~ = P1 / prod_{i<j} (l_i - l_j) / prod_{r<s} (mb_r - mb_s),
//       each factor dividing exactly;
//   (d,e) P1~ and P2 are symmetric in the l-block and mb-block separately,
//       so each decomposes into elementary symmetric polynomials of both
//       blocks, giving H1 and H2 in (xi, etab);
//   (f) the pi^n factor stays symbolic in pi_power.
// Exact failures in (c) or (d) indicate an implementation bug, not bad
// input, and surface as exceptions with diagnostics.
inline KernelFormula rationalize_kernel(std::size_t n) {
    if (n < 1 || n > 4) throw std::out_of_range("rationalize_kernel: n out of supported range [1,4]");
    const VariableArena lm = VariableArena::indexed("l", "mb", n);
    const VariableArena sigma = kernel_arena(n);
    const Block lblock{0, n}, mblock{n, n};

    // squared factors f_{ij} = (1 - l_i mb_j)^2, row-major
    std::vector<Polynomial> sq;
    sq.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Polynomial f = Polynomial::constant(lm, Rational(1)) -
                           Polynomial::variable(lm, i) * Polynomial::variable(lm, n + j);
            sq.push_back(f * f);
        }

    Polynomial p2 = Polynomial::constant(lm, Rational(1));
    for (const Polynomial& f : sq) p2 *= f;

    // Leibniz over permutations; row products prod_j M_{j, perm(j)} with
    // M_jk = prod_{k' != k} sq[j][k']
    std::vector<Polynomial> entries;  // M_jk, row-major
    entries.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            Polynomial m = Polynomial::constant(lm, Rational(1));
            for (std::size_t kp = 0; kp < n; ++kp)
                if (kp != k) m *= sq[j * n + kp];
            entries.push_back(m);
        }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Polynomial p1(lm);
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Polynomial prod = entries[perm[0]];
        for (std::size_t j = 1; j < n; ++j) prod *= entries[j * n + perm[j]];
        if (inversions % 2 == 0)
            p1 += prod;
        else
            p1 -= prod;
    } while (std::next_permutation(perm.begin(), perm.end()));

    // exact Vandermonde division in both blocks
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) p1 = p1.exact_div_linear(i, j);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = r + 1; s < n; ++s) p1 = p1.exact_div_linear(n + r, n + s);

    const std::array<Block, 2> blocks{lblock, mblock};
    Polynomial h1 = decompose_symmetric(p1, std::span<const Block>(blocks.data(), 2), sigma);
    Polynomial h2 = decompose_symmetric(p2, std::span<const Block>(blocks.data(), 2), sigma);
    return KernelFormula{n, static_cast<long>(n), std::move(h1), std::move(h2)};
}

// ---------------------------------------------------------------------------
// Evaluation of the rationalized formula
// ---------------------------------------------------------------------------

namespace detail {

inline ComplexPoint formula_point(const KernelFormula& f, const ComplexPoint& xi, const ComplexPoint& eta) {
    if (xi.size() != f.n || eta.size() != f.n)
        throw std::invalid_argument("kernel formula: point length must equal n");
    ComplexPoint p(2 * f.n);
    for (std::size_t i = 0; i < f.n; ++i) {
        p[i] = xi[i];
        p[f.n + i] = std::conj(eta[i]);
    }
    return p;
}

inline double pi_scale(long pi_power) {
    double s = 1;
    for (long k = 0; k < pi_power; ++k) s *= kPi;
    for (long k = 0; k > pi_power; --k) s /= kPi;
    return s;
}

inline long double pi_scale_ld(long pi_power) {
    long double s = 1;
    for (long k = 0; k < pi_power; ++k) s *= kPiL;
    for (long k = 0; k > pi_power; --k) s /= kPiL;
    return s;
}

// Evaluates h at (xi, etab) in 80-bit arithmetic, summing Hermitian-mirror
// term pairs (alpha,beta)/(beta,alpha) together. For the coefficient-
// symmetric H1/H2 this makes conj(eval(eta,xi)) bitwise equal to
// eval(xi,eta) and the diagonal exactly real: each term's value is built
// as coeff * (xi-block product * etab-block product), and every floating
// operation then has an exact conjugate counterpart in the mirrored call.
// Polynomials without the symmetry just lose the pairing, not correctness.
inline std::complex<long double> eval_paired(const Polynomial& h, std::span<const std::complex<long double>> point,
                                             std::size_t n) {
    using CL = std::complex<long double>;
    if (point.size() != 2 * n || h.arena().size() != 2 * n)
        throw std::invalid_argument("kernel formula eval: arity mismatch");
    std::vector<std::vector<CL>> powers(2 * n);
    for (std::size_t v = 0; v < 2 * n; ++v) {
        const unsigned d = h.degree_in(v);
        auto& tab = powers[v];
        tab.resize(d + 1);
        tab[0] = CL(1);
        for (unsigned e = 1; e <= d; ++e) tab[e] = tab[e - 1] * point[v];
    }
    const auto& terms = h.terms();
    const auto value_of = [&](const Polynomial::Term& t) {
        CL a(1), b(1);
        for (std::size_t v = 0; v < n; ++v)
            if (unsigned e = t.mono[v]) a *= powers[v][e];
        for (std::size_t v = n; v < 2 * n; ++v)
            if (unsigned e = t.mono[v]) b *= powers[v][e];
        return (a * b) * to_long_double(t.coeff);
    };
    // Terms are stored descending grlex, so the mirror of a term is found
    // by binary search.
    const auto find_mirror = [&](const Monomial& mm) -> const Polynomial::Term* {
        auto it = std::lower_bound(terms.begin(), terms.end(), mm,
                                   [](const Polynomial::Term& t, const Monomial& m) { return grlex_less(m, t.mono); });
        if (it != terms.end() && it->mono == mm) return &*it;
        return nullptr;
    };
    CL sum(0);
    Monomial mirror(2 * n);
    for (const auto& t : terms) {
        for (std::size_t i = 0; i < n; ++i) {
            mirror.set(i, t.mono[n + i]);
            mirror.set(n + i, t.mono[i]);
        }
        if (mirror == t.mono) {
            sum += value_of(t);
            continue;
        }
        const Polynomial::Term* partner = find_mirror(mirror);
        if (!partner || partner->coeff != t.coeff) {
            sum += value_of(t);  // unpaired: plain term-order summation
            continue;
        }
        if (grlex_less(t.mono, partner->mono)) continue;  // pair was handled at its leading member
        sum += (value_of(t) + value_of(*partner));
    }
    return sum;
}

}  // namespace detail

// H1/(pi^n H2) with eta conjugated into the etab slots. Defined on all of
// G_n x G_n, including the image of the critical set where the direct
// formula is 0/0. Strict mode asserts membership of both points first.
inline Complex kernel_formula_eval(const KernelFormula& f, const ComplexPoint& xi, const ComplexPoint& eta,
                                   bool strict = false, double membership_tol = 1e-9) {
    if (strict) {
        for (const ComplexPoint* pt : {&xi, &eta}) {
            double m = max_root_modulus(*pt);
            if (m >= 1.0 - membership_tol)
                throw OutsideDomainError("kernel_formula_eval: point outside G_n (root modulus " +
                                         std::to_string(m) + ")");
        }
    }
    const ComplexPoint p = detail::formula_point(f, xi, eta);
    using CL = std::complex<long double>;
    std::vector<CL> pl(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pl[i] = CL(p[i]);
    const CL h2 = detail::eval_paired(f.H2, pl, f.n);
    if (h2 == CL(0))
        throw OutsideDomainError("kernel_formula_eval: H2 vanished (input outside G_n x G_n)");
    const CL r = detail::eval_paired(f.H1, pl, f.n) / (detail::pi_scale_ld(f.pi_power) * h2);
    return Complex(static_cast<double>(r.real()), static_cast<double>(r.imag()));
}

// ---------------------------------------------------------------------------
// Log-kernel jets along a curve
// ---------------------------------------------------------------------------

namespace detail {

// Derivatives d^d/dwbar^d of wbar -> P(xi0, etab(wbar)) at wbar = 0, d <= 3,
// by the chain rule over the etab variables. etab_jets[k][d] holds the d-th
// derivative of conj(g_k) as a function of wbar, at 0.
class PolyJet {
public:
    PolyJet(const Polynomial& p, std::size_t n) : n_(n), base_(p) {}

    std::array<Complex, 4> derivatives(const ComplexPoint& at, const std::vector<std::array<Complex, 4>>& etab_jets,
                                       unsigned order) {
        std::array<Complex, 4> d{};
        d[0] = base_.eval(at);
        if (order >= 1) {
            for (std::size_t k = 0; k < n_; ++k) d[1] += p1(k).eval(at) * etab_jets[k][1];
        }
        if (order >= 2) {
            for (std::size_t k = 0; k < n_; ++k) {
                for (std::size_t l = 0; l < n_; ++l) d[2] += p2(k, l).eval(at) * etab_jets[k][1] * etab_jets[l][1];
                d[2] += p1(k).eval(at) * etab_jets[k][2];
            }
        }
        if (order >= 3) {
            for (std::size_t k = 0; k < n_; ++k) {
                for (std::size_t l = 0; l < n_; ++l) {
                    for (std::size_t m = 0; m < n_; ++m)
                        d[3] += p3(k, l, m).eval(at) * etab_jets[k][1] * etab_jets[l][1] * etab_jets[m][1];
                    d[3] += 3.0 * p2(k, l).eval(at) * etab_jets[k][2] * etab_jets[l][1];
                }
                d[3] += p1(k).eval(at) * etab_jets[k][3];
            }
        }
        return d;
    }

private:
    std::size_t var(std::size_t k) const { return n_ + k; }

    const Polynomial& p1(std::size_t k) {
        auto it = d1_.find(k);
        if (it == d1_.end()) it = d1_.emplace(k, base_.partial(var(k))).first;
        return it->second;
    }
    const Polynomial& p2(std::size_t k, std::size_t l) {
        auto key = std::minmax(k, l);
        auto it = d2_.find(key);
        if (it == d2_.end()) it = d2_.emplace(key, p1(key.first).partial(var(key.second))).first;
        return it->second;
    }
    const Polynomial& p3(std::size_t k, std::size_t l, std::size_t m) {
        std::array<std::size_t, 3> key{k, l, m};
        std::sort(key.begin(), key.end());
        auto it = d3_.find(key);
        if (it == d3_.end()) it = d3_.emplace(key, p2(key[0], key[1]).partial(var(key[2]))).first;
        return it->second;
    }

    std::size_t n_;
    const Polynomial& base_;
    std::map<std::size_t, Polynomial> d1_;
    std::map<std::pair<std::size_t, std::size_t>, Polynomial> d2_;
    std::map<std::array<std::size_t, 3>, Polynomial> d3_;
};

// log-derivatives from plain derivatives: (log phi)', (log phi)'', (log phi)'''
inline Complex log_derivative(const std::array<Complex, 4>& d, unsigned delta) {
    const Complex r1 = d[1] / d[0];
    if (delta == 1) return r1;
    const Complex r2 = d[2] / d[0];
    if (delta == 2) return r2 - r1 * r1;
    const Complex r3 = d[3] / d[0];
    return r3 - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1;
}

}  // namespace detail

// (d^delta / d wbar^delta) log K(G(z), G(w)) at w = 0, for delta in 1..3.
// The kernel argument splits as log H1 - n log pi - log H2; the constant
// drops and each log term differentiates by Faa di Bruno through the jets
// of conj(G) at 0.
inline Complex log_kernel_jet(const KernelFormula& f, const CurveSpec& G, Complex z, unsigned delta) {
    if (delta < 1 || delta > 3) throw std::out_of_range("log_kernel_jet: delta supported in 1..3");
    if (G.target != CurveSpec::Target::Symmetrized || G.dimension() != f.n)
        throw std::invalid_argument("log_kernel_jet: G must target the symmetrized domain of dimension n");
    const ComplexPoint xi0 = G.eval(z);
    const ComplexPoint eta0 = G.eval(Complex(0));
    for (const ComplexPoint* pt : {&xi0, &eta0})
        if (max_root_modulus(*pt) >= 1.0)
            throw OutsideDomainError("log_kernel_jet: curve leaves G_n at a base point");

    // jets of conj(g_k) in wbar at 0: conj of the holomorphic jets at 0
    std::vector<std::array<Complex, 4>> etab_jets(f.n);
    for (std::size_t k = 0; k < f.n; ++k)
        for (unsigned d = 0; d <= 3; ++d) etab_jets[k][d] = std::conj(G.derivative_component(k, Complex(0), d));

    const ComplexPoint at = detail::formula_point(f, xi0, eta0);
    detail::PolyJet j1(f.H1, f.n), j2(f.H2, f.n);
    const auto d1 = j1.derivatives(at, etab_jets, delta);
    const auto d2 = j2.derivatives(at, etab_jets, delta);
    if (d1[0] == Complex(0) || d2[0] == Complex(0))
        throw OutsideDomainError("log_kernel_jet: H1 or H2 vanishes at the base point (outside the validity "
                                 "neighborhood)");
    return detail::log_derivative(d1, delta) - detail::log_derivative(d2, delta);
}

// ---------------------------------------------------------------------------
// Formula file format
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json kernel_formula_to_json(const KernelFormula& f) {
    nlohmann::ordered_json j;
    j["n"] = f.n;
    j["pi_power"] = f.pi_power;
    j["vars"] = f.H1.arena().names();
    j["H1"] = terms_to_json(f.H1);
    j["H2"] = terms_to_json(f.H2);
    return j;
}

inline KernelFormula kernel_formula_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("pi_power") || !j.contains("vars") || !j.contains("H1") ||
        !j.contains("H2"))
        throw std::invalid_argument("kernel formula JSON: missing required keys");
    const std::size_t n = j.at("n").get<std::size_t>();
    if (n < 1 || n > VariableArena::kMaxVars / 2) throw std::invalid_argument("kernel formula JSON: n out of range");
    const VariableArena arena = kernel_arena(n);
    const auto vars = j.at("vars").get<std::vector<std::string>>();
    if (vars != arena.names()) throw std::invalid_argument("kernel formula JSON: unexpected variable names");
    return KernelFormula{n, j.at("pi_power").get<long>(), terms_from_json(j.at("H1"), arena),
                         terms_from_json(j.at("H2"), arena)};
}

inline std::string kernel_formula_to_string(const KernelFormula& f) { return kernel_formula_to_json(f).dump() + "\n"; }

inline void save_kernel_formula(const KernelFormula& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << kernel_formula_to_string(f);
}

inline KernelFormula load_kernel_formula(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    return kernel_formula_from_json(j);
}

}  // namespace sympd
