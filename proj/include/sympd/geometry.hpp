#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sympd/curve.hpp"
#include "sympd/kernel.hpp"
#include "sympd/polynomial.hpp"
#include "sympd/symmetric.hpp"

namespace sympd {

// xi lies in G_n iff its fiber lies in the open polydisc; boundary points
// count as outside (the kernel blows up there).
inline bool gn_membership(const ComplexPoint& xi, double tol = 1e-9) {
    return max_root_modulus(xi) < 1.0 - tol;
}

// ---------------------------------------------------------------------------
// Hermitian metric matrices
// ---------------------------------------------------------------------------

class HermitianMatrix {
public:
    explicit HermitianMatrix(std::size_t n) : n_(n), entries_(n * n, Complex(0)) {}

    std::size_t size() const { return n_; }
    Complex& at(std::size_t j, std::size_t k) { return entries_.at(j * n_ + k); }
    const Complex& at(std::size_t j, std::size_t k) const { return entries_.at(j * n_ + k); }

    bool is_hermitian(double tol = 1e-10) const {
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k <= j; ++k)
                if (std::abs(at(j, k) - std::conj(at(k, j))) > tol) return false;
        return true;
    }

    // smallest eigenvalue of the Hermitian part (A + A^H)/2
    double min_eigenvalue() const {
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k)
                m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                    0.5 * (at(j, k) + std::conj(at(k, j)));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
        return solver.eigenvalues().minCoeff();
    }

private:
    std::size_t n_;
    std::vector<Complex> entries_;
};

// ---------------------------------------------------------------------------
// Bergman metric
// ---------------------------------------------------------------------------

// g_{j kbar}(xi) = d^2/(d xi_j d etab_k) log[H1/(pi^n H2)] at etab = conj(xi).
// The partial derivatives of H1, H2 are exact symbolic polynomials computed
// once; each entry is the quotient-rule expression
// (H_{jk} H - H_j H_k)/H^2 for H1 minus the same for H2, assembled
// numerically from those exact partials (identical to evaluating
// ratfn_partial chains, without materializing H^2, whose term count is
// prohibitive at n=4).
class BergmanMetric {
public:
    explicit BergmanMetric(const KernelFormula& f)
        : n_(f.n), h1_(f.H1), h2_(f.H2) {
        build(h1_, d1_, dd1_);
        build(h2_, d2_, dd2_);
    }

    // Entries combine exact symbolic partials through the quotient rule,
    // in 80-bit arithmetic: the H2 factors nearly cancel towards the
    // boundary and plain doubles lose the 1e-6 finite-difference match.
    HermitianMatrix at(const ComplexPoint& xi, double membership_tol = 1e-6) const {
        if (xi.size() != n_) throw std::invalid_argument("bergman metric: point length must equal n");
        if (!gn_membership(xi, membership_tol))
            throw OutsideDomainError("bergman metric: point not interior to G_n");
        using CL = std::complex<long double>;
        std::vector<CL> p(2 * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            p[i] = CL(xi[i]);
            p[n_ + i] = std::conj(p[i]);
        }
        const std::span<const CL> pt(p);
        const CL h1 = h1_.eval(pt);
        const CL h2 = h2_.eval(pt);
        if (h1 == CL(0)) throw OutsideDomainError("bergman metric: H1 vanished on the diagonal (bad input)");
        if (h2 == CL(0)) throw OutsideDomainError("bergman metric: H2 vanished (input outside G_n)");
        HermitianMatrix g(n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k) {
                const CL a = (dd1_[j * n_ + k].eval(pt) * h1 - d1_[j].first.eval(pt) * d1_[k].second.eval(pt)) /
                             (h1 * h1);
                const CL b = (dd2_[j * n_ + k].eval(pt) * h2 - d2_[j].first.eval(pt) * d2_[k].second.eval(pt)) /
                             (h2 * h2);
                const CL e = a - b;
                g.at(j, k) = Complex(static_cast<double>(e.real()), static_cast<double>(e.imag()));
            }
        return g;
    }

    std::size_t dimension() const { return n_; }

private:
    // first partials (d/dxi_j, d/detab_j) and mixed seconds d^2/dxi_j detab_k
    void build(const Polynomial& h, std::vector<std::pair<Polynomial, Polynomial>>& d,
               std::vector<Polynomial>& dd) {
        d.reserve(n_);
        for (std::size_t j = 0; j < n_; ++j) d.emplace_back(h.partial(j), h.partial(n_ + j));
        dd.reserve(n_ * n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k) dd.push_back(d[j].first.partial(n_ + k));
    }

    std::size_t n_;
    Polynomial h1_, h2_;
    std::vector<std::pair<Polynomial, Polynomial>> d1_, d2_;
    std::vector<Polynomial> dd1_, dd2_;
};

inline HermitianMatrix bergman_metric_at(const KernelFormula& f, const ComplexPoint& xi,
                                         double membership_tol = 1e-6) {
    return BergmanMetric(f).at(xi, membership_tol);
}

// ---------------------------------------------------------------------------
// Finite-difference stencils (cross-checks for the symbolic derivatives)
// ---------------------------------------------------------------------------

namespace fd {

inline constexpr double kDefaultStep = 1e-4;

// five-point first derivative along real steps
template <typename F>
Complex first(F&& f, double h = kDefaultStep) {
    return (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12 * h);
}

// five-point second derivative along real steps
template <typename F>
Complex second(F&& f, double h = kDefaultStep) {
    return (-f(2 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2 * h)) / (12 * h * h);
}

// mixed second derivative d^2/(da db) of f(a, b), five-point per axis
template <typename F>
Complex mixed(F&& f, double h = kDefaultStep) {
    auto da = [&](double b) {
        return (-f(2 * h, b) + 8.0 * f(h, b) - 8.0 * f(-h, b) + f(-2 * h, b)) / (12 * h);
    };
    return (-da(2 * h) + 8.0 * da(h) - 8.0 * da(-h) + da(-2 * h)) / (12 * h);
}

}  // namespace fd

// Finite-difference metric entry, for validating BergmanMetric: moves xi_j
// and the conjugated slot k by real steps and differentiates
// log K(xi + a e_j, xi + b e_k) (the log normalized at the center to stay
// on one branch).
inline Complex bergman_metric_fd(const KernelFormula& f, const ComplexPoint& xi, std::size_t j, std::size_t k,
                                 double h = fd::kDefaultStep) {
    const Complex center = kernel_formula_eval(f, xi, xi);
    auto phi = [&](double a, double b) {
        ComplexPoint x = xi, y = xi;
        x[j] += a;
        y[k] += b;
        return std::log(kernel_formula_eval(f, x, y) / center);
    };
    return fd::mixed(phi, h);
}

// ---------------------------------------------------------------------------
// Diastasis and pullback potential
// ---------------------------------------------------------------------------

// D(xi, eta) = log K(xi,xi) + log K(eta,eta) - log K(xi,eta) - log K(eta,xi).
// The cross terms are conjugates, so the combination is real; it is
// computed from log moduli, which is that real value exactly.
inline double diastasis_eval(const KernelFormula& f, const ComplexPoint& xi, const ComplexPoint& eta,
                             double membership_tol = 1e-9) {
    if (!gn_membership(xi, membership_tol) || !gn_membership(eta, membership_tol))
        throw OutsideDomainError("diastasis: point not in G_n");
    const double dxx = std::log(std::abs(kernel_formula_eval(f, xi, xi)));
    const double dyy = std::log(std::abs(kernel_formula_eval(f, eta, eta)));
    const double dxy = std::log(std::abs(kernel_formula_eval(f, xi, eta)));
    const double dyx = std::log(std::abs(kernel_formula_eval(f, eta, xi)));
    return dxx + dyy - dxy - dyx;
}

class BranchTrackingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// log K(G(z), G(w)) with the branch fixed by continuity along the segment
// from w0 = z (where K is positive real) to w. The log is accumulated from
// stepwise principal-branch ratios; a step too large to trust (or a zero of
// K on the path) is reported, never silently unwound.
inline Complex potential_eval(const KernelFormula& f, const CurveSpec& G, Complex z, Complex w,
                              std::size_t steps = 256) {
    if (G.target != CurveSpec::Target::Symmetrized || G.dimension() != f.n)
        throw std::invalid_argument("potential_eval: G must target the symmetrized domain of dimension n");
    const ComplexPoint xi = G.eval(z);
    if (!gn_membership(xi, 1e-9) || !gn_membership(G.eval(w), 1e-9))
        throw OutsideDomainError("potential_eval: curve point outside G_n");
    Complex prev = kernel_formula_eval(f, xi, xi);
    // diagonal value is positive real up to roundoff
    Complex acc = std::log(prev);
    for (std::size_t s = 1; s <= steps; ++s) {
        const Complex t = z + (w - z) * (static_cast<double>(s) / static_cast<double>(steps));
        const Complex cur = kernel_formula_eval(f, xi, G.eval(t));
        if (std::abs(cur) == 0.0)
            throw BranchTrackingError("potential_eval: K vanished along the continuation path");
        const Complex ratio = cur / prev;
        const Complex step = std::log(ratio);
        if (std::abs(step.imag()) > 1.5)
            throw BranchTrackingError("potential_eval: branch tracking failed (phase step too large; "
                                      "K nearly vanishes on the path)");
        acc += step;
        prev = cur;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Isometry residual
// ---------------------------------------------------------------------------

struct ResidualSample {
    Complex z;
    double residual;
};

struct ResidualField {
    std::vector<ResidualSample> samples;  // row-major over the lattice
    double sup_norm = 0;
    double mean = 0;
    std::size_t excluded = 0;

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(15);
        out << "re(z),im(z),residual\n";
        for (const ResidualSample& s : samples)
            out << s.z.real() << "," << s.z.imag() << "," << s.residual << "\n";
        return out.str();
    }

    nlohmann::ordered_json summary() const {
        nlohmann::ordered_json j;
        j["sup_norm"] = sup_norm;
        j["mean"] = mean;
        j["evaluated"] = samples.size();
        j["excluded"] = excluded;
        return j;
    }
};

// r(z) = d^2/dz dzbar [ sum_i |f_i(z)|^2 - log K(G(z), G(z)) ] over a square
// lattice covering the disc of the given radius. Both pieces are exact
// symbolic derivatives evaluated numerically: the Euclidean part is
// sum_i |f_i'(z)|^2, the kernel part is the Bergman metric pulled back
// through the holomorphic G, sum_{jk} g_{j kbar}(G(z)) g_j'(z) conj(g_k'(z)).
// Lattice points where G leaves G_n are excluded and counted.
inline ResidualField pullback_residual(const CurveSpec& F, const CurveSpec& G, const KernelFormula& f, double radius,
                                       std::size_t points_per_axis = 21, double membership_tol = 1e-9) {
    if (F.target != CurveSpec::Target::Euclidean) throw std::invalid_argument("residual: F must target C^m");
    if (G.target != CurveSpec::Target::Symmetrized || G.dimension() != f.n)
        throw std::invalid_argument("residual: G must target the symmetrized domain of dimension n");
    if (radius <= 0 || points_per_axis < 2) throw std::invalid_argument("residual: degenerate grid");

    const BergmanMetric metric(f);
    ResidualField field;
    double sum = 0;
    for (std::size_t iy = 0; iy < points_per_axis; ++iy)
        for (std::size_t ix = 0; ix < points_per_axis; ++ix) {
            const double x = -radius + 2 * radius * static_cast<double>(ix) / static_cast<double>(points_per_axis - 1);
            const double y = -radius + 2 * radius * static_cast<double>(iy) / static_cast<double>(points_per_axis - 1);
            const Complex z(x, y);
            if (std::abs(z) > radius) continue;  // lattice clipped to the disc
            const ComplexPoint xi = G.eval(z);
            if (!gn_membership(xi, membership_tol)) {
                ++field.excluded;
                continue;
            }
            double euclid = 0;
            for (std::size_t i = 0; i < F.dimension(); ++i) euclid += std::norm(F.derivative_component(i, z, 1));
            const HermitianMatrix g = metric.at(xi, membership_tol);
            Complex pulled(0);
            for (std::size_t j = 0; j < G.dimension(); ++j)
                for (std::size_t k = 0; k < G.dimension(); ++k)
                    pulled += g.at(j, k) * G.derivative_component(j, z, 1) *
                              std::conj(G.derivative_component(k, z, 1));
            const double r = euclid - pulled.real();
            field.samples.push_back({z, r});
            field.sup_norm = std::max(field.sup_norm, std::abs(r));
            sum += r;
        }
    if (!field.samples.empty()) field.mean = sum / static_cast<double>(field.samples.size());
    return field;
}

inline void write_residual_csv(const ResidualField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << field.to_csv();
}

}  // namespace sympd
