#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sympd/polynomial.hpp"

namespace sympd {

class NotSymmetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Symmetrization map and Vandermonde
// ---------------------------------------------------------------------------

// (lambda_1..lambda_n) -> (e_1(lambda), ..., e_n(lambda)), the coefficients
// (up to sign) of the monic polynomial with the lambda_i as roots. Exactly
// permutation invariant: it sums the same products in the same order of
// accumulation per elementary degree.
inline ComplexPoint symmetrize_point(const ComplexPoint& lambda) {
    if (lambda.empty()) throw std::invalid_argument("symmetrize_point: empty input");
    // Accumulate in a canonical input order so the result is bitwise
    // identical under permutation of the tuple.
    ComplexPoint sorted = lambda;
    std::sort(sorted.begin(), sorted.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    const std::size_t n = sorted.size();
    ComplexPoint e(n + 1, Complex(0));
    e[0] = Complex(1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = std::min(i + 1, n); k >= 1; --k) e[k] += sorted[i] * e[k - 1];
    return ComplexPoint(e.begin() + 1, e.end());
}

// Consecutive run of variables inside an arena.
struct Block {
    std::size_t offset = 0;
    std::size_t size = 0;
};

// sigma_k in the block's variables: C(size,k) square-free terms, all
// coefficients 1, embedded in the full arena.
inline Polynomial elementary_symmetric_poly(const VariableArena& arena, Block block, std::size_t k) {
    if (block.offset + block.size > arena.size())
        throw std::out_of_range("elementary_symmetric_poly: block exceeds arena");
    if (k < 1 || k > block.size) throw std::out_of_range("elementary_symmetric_poly: k out of range");
    std::vector<Polynomial::Term> terms;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
        Monomial m(arena.size());
        for (std::size_t i : pick) m.set(block.offset + i, 1);
        terms.push_back({m, Rational(1)});
        // next k-combination of {0..size-1}
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == block.size - k + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return Polynomial::from_terms(arena, std::move(terms));
}

// prod_{i<j} (x_i - x_j) over a block; the empty product (size 1) is 1.
inline Polynomial vandermonde(const VariableArena& arena, Block block) {
    if (block.offset + block.size > arena.size()) throw std::out_of_range("vandermonde: block exceeds arena");
    if (block.size == 0) throw std::invalid_argument("vandermonde: empty block");
    Polynomial v = Polynomial::constant(arena, Rational(1));
    for (std::size_t i = 0; i < block.size; ++i)
        for (std::size_t j = i + 1; j < block.size; ++j)
            v *= Polynomial::variable(arena, block.offset + i) - Polynomial::variable(arena, block.offset + j);
    return v;
}

inline Complex vandermonde_eval(std::span<const Complex> lambda) {
    Complex v(1);
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j < lambda.size(); ++j) v *= lambda[i] - lambda[j];
    return v;
}

inline Complex vandermonde_eval(const ComplexPoint& lambda) {
    return vandermonde_eval(std::span<const Complex>(lambda));
}

// lambda lies on (or within tol of) the critical set where the
// symmetrization map fails to be a local biholomorphism.
inline bool is_critical(const ComplexPoint& lambda, double tol = 0.0) {
    return std::abs(vandermonde_eval(lambda)) <= tol;
}

// ---------------------------------------------------------------------------
// Fiber inversion: roots of t^n - xi_1 t^{n-1} + ... + (-1)^n xi_n
// ---------------------------------------------------------------------------

namespace detail {

// Parlett-Reinsch balancing by powers of 2; cheap and keeps eigenvalues
// bit-reproducible.
inline void balance_matrix(Eigen::MatrixXcd& a) {
    const auto n = a.rows();
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double row = 0, col = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                row += std::abs(a(i, j));
                col += std::abs(a(j, i));
            }
            if (row == 0 || col == 0) continue;
            double f = 1;
            const double s = row + col;
            while (col < row / 2) {
                f *= 2;
                col *= 2;
                row /= 2;
            }
            while (col >= row * 2) {
                f /= 2;
                col /= 2;
                row *= 2;
            }
            if (row + col < 0.95 * s) {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

}  // namespace detail

// The n roots (with multiplicity) of the fiber polynomial of xi, via
// balanced companion-matrix eigenvalues. symmetrize_point(roots) recovers
// xi up to eigensolver accuracy.
inline ComplexPoint fiber_roots(const ComplexPoint& xi) {
    const std::size_t n = xi.size();
    if (n == 0) throw std::invalid_argument("fiber_roots: empty input");
    // monic coefficients c_k of t^k: c_{n-k} = (-1)^k xi_k
    std::vector<Complex> c(n);
    double sign = -1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        c[n - k] = sign * xi[k - 1];
        sign = -sign;
    }
    if (n == 1) return {-c[0]};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -c[i];
    detail::balance_matrix(comp);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("fiber_roots: eigensolver failed");
    ComplexPoint roots(n);
    for (std::size_t i = 0; i < n; ++i) roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    // canonical order for reproducible output; the value is a multiset
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

inline double max_root_modulus(const ComplexPoint& xi) {
    double m = 0;
    for (const Complex& r : fiber_roots(xi)) m = std::max(m, std::abs(r));
    return m;
}

// Greedy minimal-distance matching between two root multisets; returns the
// largest matched distance (infinity on size mismatch).
inline double greedy_multiset_distance(ComplexPoint a, ComplexPoint b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0;
    while (!a.empty()) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return worst;
}

// Domain point tagged with its role; admissibility is role dependent.
struct SymPoint {
    enum class Role { Polydisc, Symmetrized };

    ComplexPoint coords;
    Role role = Role::Polydisc;

    bool admissible(double tol = 1e-9) const {
        if (role == Role::Polydisc) {
            for (const Complex& c : coords)
                if (std::abs(c) >= 1.0) return false;
            return true;
        }
        return max_root_modulus(coords) < 1.0 - tol;
    }
};

// ---------------------------------------------------------------------------
// Fundamental theorem of symmetric polynomials, as an algorithm
// ---------------------------------------------------------------------------

namespace detail {

inline void require_blocks_valid(const VariableArena& arena, std::span<const Block> blocks) {
    if (blocks.empty() || blocks.size() > 2)
        throw std::invalid_argument("decompose: one or two blocks supported");
    std::size_t end = 0;
    for (const Block& b : blocks) {
        if (b.size == 0) throw std::invalid_argument("decompose: empty block");
        if (b.offset < end) throw std::invalid_argument("decompose: blocks must be disjoint and ordered");
        end = b.offset + b.size;
        if (end > arena.size()) throw std::out_of_range("decompose: block exceeds arena");
    }
}

inline bool block_sorted_desc(const Monomial& m, const Block& b) {
    for (std::size_t i = 1; i < b.size; ++i)
        if (m[b.offset + i - 1] < m[b.offset + i]) return false;
    return true;
}

// Verifies invariance under the adjacent-transposition generators of the
// block's symmetric group; sufficient for full S_n invariance.
inline void require_block_symmetric(const Polynomial& p, const Block& b,
                                    const std::unordered_map<Monomial, const Rational*, MonomialHash>& index) {
    for (std::size_t g = 0; g + 1 < b.size; ++g) {
        const std::size_t va = b.offset + g, vb = b.offset + g + 1;
        for (const auto& t : p.terms()) {
            if (t.mono[va] == t.mono[vb]) continue;
            Monomial swapped = t.mono;
            unsigned ea = swapped[va], eb = swapped[vb];
            swapped.set(va, eb);
            swapped.set(vb, ea);
            auto it = index.find(swapped);
            if (it == index.end() || *it->second != t.coeff)
                throw NotSymmetricError("decompose: input not symmetric under swap of " + p.arena().name(va) +
                                        " and " + p.arena().name(vb));
        }
    }
}

// Orbit-compressed polynomial: only the representative monomial of each
// S_{n1} x S_{n2} orbit (block parts sorted descending) is stored, with the
// coefficient every orbit member shares. The reduction below runs entirely
// in this space; it is the classical leading-term algorithm, just without
// materializing full orbits.
using CompressedTerms = std::vector<std::pair<Monomial, Rational>>;

// Multiply a compressed symmetric polynomial by sigma_k of one block,
// staying compressed: for each representative, every distinct arrangement w
// of its block part and every k-subset S contribute w + 1_S, and exactly
// the arrangements that land on a sorted vector are the representatives of
// the product.
inline CompressedTerms compressed_mul_elem(const CompressedTerms& c, const Block& b, std::size_t k,
                                           std::size_t /*arena_size*/) {
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    acc.reserve(c.size() * 2);
    std::vector<unsigned> vals(b.size);
    std::vector<std::size_t> pick(k);
    for (const auto& [mono, coeff] : c) {
        for (std::size_t i = 0; i < b.size; ++i) vals[i] = mono[b.offset + i];
        std::sort(vals.begin(), vals.end());  // ascending start for next_permutation
        do {
            for (std::size_t i = 0; i < k; ++i) pick[i] = i;
            while (true) {
                // candidate = vals + 1 on the picked slots; keep it only if
                // it is the (descending-sorted) representative
                bool sorted = true;
                unsigned prev = 256;
                for (std::size_t i = 0; i < b.size && sorted; ++i) {
                    unsigned e = vals[i];
                    for (std::size_t s = 0; s < k; ++s)
                        if (pick[s] == i) ++e;
                    if (e > prev) sorted = false;
                    prev = e;
                }
                if (sorted) {
                    Monomial m = mono;  // exponents outside the block carry over
                    for (std::size_t i = 0; i < b.size; ++i) {
                        unsigned e = vals[i];
                        for (std::size_t s = 0; s < k; ++s)
                            if (pick[s] == i) ++e;
                        m.set(b.offset + i, e);
                    }
                    acc[m] += coeff;
                }
                std::size_t i = k;
                while (i > 0 && pick[i - 1] == b.size - k + (i - 1)) --i;
                if (i == 0) break;
                ++pick[i - 1];
                for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
            }
        } while (std::next_permutation(vals.begin(), vals.end()));
    }
    CompressedTerms out;
    out.reserve(acc.size());
    for (auto& [m, co] : acc)
        if (co != 0) out.emplace_back(m, std::move(co));
    return out;
}

// Cache of expansions of sigma-power products of one block, in compressed
// form, built incrementally by peeling one sigma factor at a time.
class ElemPowerCache {
public:
    ElemPowerCache(const VariableArena& arena, Block block) : arena_size_(arena.size()), block_(block) {}

    const CompressedTerms& expansion(const Monomial& sigma_exps, std::size_t sigma_offset) {
        auto it = cache_.find(sigma_exps);
        if (it != cache_.end()) return it->second;
        CompressedTerms result;
        bool all_zero = true;
        for (std::size_t i = 0; i < block_.size && all_zero; ++i)
            if (sigma_exps[sigma_offset + i] != 0) all_zero = false;
        if (all_zero) {
            result.emplace_back(Monomial(arena_size_), Rational(1));
        } else {
            std::size_t peel = 0;
            for (std::size_t i = 0; i < block_.size; ++i)
                if (sigma_exps[sigma_offset + i] != 0) peel = i;
            Monomial base = sigma_exps;
            base.set(sigma_offset + peel, base[sigma_offset + peel] - 1);
            const CompressedTerms& prev = expansion(base, sigma_offset);
            result = compressed_mul_elem(prev, block_, peel + 1, arena_size_);
        }
        return cache_.emplace(sigma_exps, std::move(result)).first->second;
    }

private:
    std::size_t arena_size_;
    Block block_;
    std::unordered_map<Monomial, CompressedTerms, MonomialHash> cache_;
};

}  // namespace detail

// Rewrites a block-symmetric polynomial in the elementary symmetric
// polynomials of its block(s). The target arena supplies the sigma variable
// names (one variable per block variable, blocks concatenated in order).
//
// Algorithm: repeated leading-term reduction. The leading term c*x^a of a
// symmetric polynomial has weakly decreasing exponents within each block
// under grlex, and c*sigma_1^{a1-a2}...sigma_n^{an} has exactly that
// leading term, so subtracting it strictly decreases the leading monomial
// until nothing is left. Substituting sigma_k -> elementary_symmetric_poly
// in the result recovers the input exactly.
inline Polynomial decompose_symmetric(const Polynomial& p, std::span<const Block> blocks,
                                      const VariableArena& sigma_arena,
                                      std::size_t max_steps = 10'000'000) {
    detail::require_blocks_valid(p.arena(), blocks);
    std::size_t covered = 0;
    for (const Block& b : blocks) covered += b.size;
    if (sigma_arena.size() != covered)
        throw std::invalid_argument("decompose: sigma arena size must match total block size");
    for (const auto& t : p.terms())
        for (std::size_t v = 0; v < p.arena().size(); ++v)
            if (t.mono[v] != 0) {
                bool inside = false;
                for (const Block& b : blocks) inside |= (v >= b.offset && v < b.offset + b.size);
                if (!inside)
                    throw std::invalid_argument("decompose: variable " + p.arena().name(v) +
                                                " outside the designated blocks");
            }

    std::unordered_map<Monomial, const Rational*, MonomialHash> index;
    index.reserve(p.term_count() * 2);
    for (const auto& t : p.terms()) index.emplace(t.mono, &t.coeff);
    for (const Block& b : blocks) detail::require_block_symmetric(p, b, index);

    // orbit representatives only, from here on
    std::map<Monomial, Rational, GrlexGreater> work;
    for (const auto& t : p.terms()) {
        bool rep = true;
        for (const Block& b : blocks) rep &= detail::block_sorted_desc(t.mono, b);
        if (rep) work.emplace(t.mono, t.coeff);
    }

    std::vector<detail::ElemPowerCache> caches;
    std::vector<std::size_t> sigma_offsets;
    std::size_t off = 0;
    for (const Block& b : blocks) {
        caches.emplace_back(p.arena(), b);
        sigma_offsets.push_back(off);
        off += b.size;
    }

    std::vector<Polynomial::Term> out;
    std::size_t steps = 0;
    while (!work.empty()) {
        if (++steps > max_steps)
            throw std::runtime_error("decompose: step limit exceeded; input is not a symmetric polynomial "
                                     "this reduction can terminate on");
        const Monomial lead = work.begin()->first;
        const Rational coeff = work.begin()->second;

        Monomial sigma(sigma_arena.size());
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const Block& b = blocks[bi];
            for (std::size_t i = 0; i + 1 < b.size; ++i)
                sigma.set(sigma_offsets[bi] + i, lead[b.offset + i] - lead[b.offset + i + 1]);
            sigma.set(sigma_offsets[bi] + b.size - 1, lead[b.offset + b.size - 1]);
        }
        out.push_back({sigma, coeff});

        // work -= coeff * prod_b expansion_b, expansions combined over the
        // (disjoint) blocks on the fly; cache keys carry only their own
        // block's sigma exponents so expansions are shared across strata
        std::vector<Monomial> keys;
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            Monomial key(sigma_arena.size());
            for (std::size_t i = 0; i < blocks[bi].size; ++i)
                key.set(sigma_offsets[bi] + i, sigma[sigma_offsets[bi] + i]);
            keys.push_back(key);
        }
        const detail::CompressedTerms* e0 = &caches[0].expansion(keys[0], sigma_offsets[0]);
        const detail::CompressedTerms* e1 = nullptr;
        if (blocks.size() == 2) e1 = &caches[1].expansion(keys[1], sigma_offsets[1]);
        for (const auto& [m0, c0] : *e0) {
            if (e1) {
                for (const auto& [m1, c1] : *e1) {
                    Monomial m = m0 * m1;
                    Rational delta = coeff * c0 * c1;
                    auto [it, inserted] = work.try_emplace(m, -delta);
                    if (!inserted) {
                        it->second -= delta;
                        if (it->second == 0) work.erase(it);
                    }
                }
            } else {
                Rational delta = coeff * c0;
                auto [it, inserted] = work.try_emplace(m0, -delta);
                if (!inserted) {
                    it->second -= delta;
                    if (it->second == 0) work.erase(it);
                }
            }
        }
    }
    return Polynomial::from_terms(sigma_arena, std::move(out));
}

inline Polynomial decompose_symmetric(const Polynomial& p, Block block, const VariableArena& sigma_arena) {
    return decompose_symmetric(p, std::span<const Block>(&block, 1), sigma_arena);
}

// Substitutes sigma_k -> elementary_symmetric_poly(source block) into a
// decomposition result, mapping it back to the source arena. Inverse of
// decompose_symmetric; used to verify round trips.
inline Polynomial expand_elementary(const Polynomial& q, std::span<const Block> blocks,
                                    const VariableArena& source_arena) {
    detail::require_blocks_valid(source_arena, blocks);
    std::size_t covered = 0;
    for (const Block& b : blocks) covered += b.size;
    if (q.arena().size() != covered) throw std::invalid_argument("expand: sigma arena size mismatch");

    std::vector<Polynomial> sigma;  // flattened per block
    for (const Block& b : blocks)
        for (std::size_t k = 1; k <= b.size; ++k) sigma.push_back(elementary_symmetric_poly(source_arena, b, k));

    Polynomial result(source_arena);
    for (const auto& t : q.terms()) {
        Polynomial prod = Polynomial::constant(source_arena, t.coeff);
        for (std::size_t v = 0; v < q.arena().size(); ++v)
            for (unsigned e = 0; e < t.mono[v]; ++e) prod *= sigma[v];
        result += prod;
    }
    return result;
}

inline Polynomial expand_elementary(const Polynomial& q, Block block, const VariableArena& source_arena) {
    return expand_elementary(q, std::span<const Block>(&block, 1), source_arena);
}

}  // namespace sympd
