// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Tolerances and runtime budgets are pinned here.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "sympd/geometry.hpp"
#include "sympd/kernel.hpp"
#include "sympd/sampling.hpp"
#include "sympd/symmetric.hpp"
#include "test_support.hpp"

using namespace sympd;
using namespace sympd::testing;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt_err(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

// ---------------------------------------------------------------------- 1
void criterion_golden_n2() {
    const auto t0 = clock_type::now();
    const KernelFormula f = rationalize_kernel(2);
    const double dt = elapsed_s(t0);

    const VariableArena a = kernel_arena(2);
    const Polynomial one = Polynomial::constant(a, Rational(1));
    const Polynomial xi1 = Polynomial::variable(a, 0), xi2 = Polynomial::variable(a, 1);
    const Polynomial eb1 = Polynomial::variable(a, 2), eb2 = Polynomial::variable(a, 3);
    const Polynomial h1 = 2 * one - xi1 * eb1 + 2 * xi2 * eb2;
    const Polynomial bracket = one - xi1 * eb1 + (xi1 * xi1 - 2 * xi2) * eb2 - xi2 * xi1 * eb1 * eb2 +
                               xi2 * eb1 * eb1 + xi2 * xi2 * eb2 * eb2;
    const bool exact = (f.H1 == h1) && (f.H2 == bracket * bracket) && f.pi_power == 2;
    const bool in_time = dt < 1.0;
    std::ostringstream d;
    d << "exact=" << (exact ? "yes" : "no") << " build=" << fmt_err(dt) << "s (budget 1s)";
    report(1, "golden n=2 formula, exact coefficients", exact && in_time, d.str());
}

// ---------------------------------------------------------------------- 2
std::vector<KernelFormula> criterion_cross_representation() {
    std::vector<KernelFormula> formulas;  // index 0 unused; 1..4 by n
    formulas.push_back(KernelFormula{0, 0, Polynomial(kernel_arena(1)), Polynomial(kernel_arena(1))});
    formulas.push_back(rationalize_kernel(1));
    const double budgets[] = {0, 0, 5.0, 60.0, 600.0};
    bool all = true;
    std::ostringstream d;
    for (std::size_t n = 2; n <= 4; ++n) {
        const auto t0 = clock_type::now();
        formulas.push_back(rationalize_kernel(n));
        const KernelFormula& f = formulas.back();
        Sampler s(7);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const ComplexPoint lambda = s.separated_tuple(n, 0.8, 0.05);
            const ComplexPoint mu = s.separated_tuple(n, 0.8, 0.05);
            const Complex direct = kernel_direct_eval(lambda, mu);
            const Complex formula = kernel_formula_eval(f, symmetrize_point(lambda), symmetrize_point(mu));
            worst = std::max(worst, std::abs(formula - direct) / std::abs(direct));
        }
        const double dt = elapsed_s(t0);
        const bool ok = worst <= 1e-9 && dt < budgets[n];
        all = all && ok;
        d << "n=" << n << ": err=" << fmt_err(worst) << " t=" << fmt_err(dt) << "s/" << budgets[n] << "s  ";
    }
    report(2, "formula vs direct on 1000 pairs, n=2..4", all, d.str());
    return formulas;
}

// ---------------------------------------------------------------------- 3
void criterion_singular_extension(const KernelFormula& f2) {
    bool direct_singular = false;
    try {
        kernel_direct_eval({Complex(0.3), Complex(0.3)}, {Complex(0.3), Complex(0.3)});
    } catch (const SingularPointError&) {
        direct_singular = true;
    }
    const ComplexPoint xi = symmetrize_point({Complex(0.3), Complex(0.3)});
    const Complex at_image = kernel_formula_eval(f2, xi, xi);

    // Richardson (Neville) extrapolation of the diagonal direct values
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::vector<Complex> val;
    for (double e : eps) {
        const ComplexPoint le{Complex(0.3), Complex(0.3 + e)};
        val.push_back(kernel_direct_eval(le, le));
    }
    for (std::size_t m = 1; m < val.size(); ++m)
        for (std::size_t i = 0; i + m < val.size(); ++i)
            val[i] = ((0.0 - eps[i + m]) * val[i] - (0.0 - eps[i]) * val[i + 1]) / (eps[i] - eps[i + m]);
    const double rel = std::abs(val[0] - at_image) / std::abs(at_image);
    const bool ok = direct_singular && std::isfinite(at_image.real()) && rel <= 1e-6;
    std::ostringstream d;
    d << "direct=singular formula=" << at_image.real() << " extrapolation rel err=" << fmt_err(rel);
    report(3, "smooth extension across the critical image", ok, d.str());
}

// ---------------------------------------------------------------------- 4
void criterion_decompose_round_trip() {
    Sampler s(4001);
    bool all = true;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const VariableArena arena = VariableArena::indexed("x", n);
        const VariableArena sig = VariableArena::indexed("s", n);
        const Block block{0, n};
        const Polynomial p = symmetrize_polynomial(random_poly(s, arena, 2, 4), block);
        if (p.term_count() == 0) {
            all = all && decompose_symmetric(p, block, sig).term_count() == 0;
            continue;
        }
        const Polynomial q = decompose_symmetric(p, block, sig);
        all = all && (expand_elementary(q, block, arena) == p);
    }
    bool vandermonde_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const VariableArena arena = VariableArena::indexed("x", n);
        const Block block{0, n};
        const Polynomial q = symmetrize_polynomial(random_poly(s, arena, 2, 3), block);
        if (q.term_count() == 0) continue;
        Polynomial alt = q * vandermonde(arena, block);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) alt = alt.exact_div_linear(i, j);
        vandermonde_ok = vandermonde_ok && (alt == q);
    }
    report(4, "200 decompose and 200 Vandermonde round trips, exact", all && vandermonde_ok,
           all ? (vandermonde_ok ? "all exact" : "division round trip failed") : "decomposition round trip failed");
}

// ---------------------------------------------------------------------- 5
void criterion_kernel_structure(const std::vector<KernelFormula>& formulas) {
    bool all = true;
    std::ostringstream d;
    for (std::size_t n = 2; n <= 4; ++n) {
        const KernelFormula& f = formulas[n];
        Sampler s(5000 + n);
        double worst_herm = 0, worst_imag = 0;
        bool positive = true;
        for (int i = 0; i < 1000; ++i) {
            const ComplexPoint xi = symmetrize_point(s.separated_tuple(n, 0.8, 0.0));
            const ComplexPoint eta = symmetrize_point(s.separated_tuple(n, 0.8, 0.0));
            const Complex a = kernel_formula_eval(f, xi, eta);
            const Complex b = kernel_formula_eval(f, eta, xi);
            worst_herm = std::max(worst_herm, std::abs(a - std::conj(b)) / std::abs(a));
            const Complex diag = kernel_formula_eval(f, xi, xi);
            positive = positive && diag.real() > 0;
            worst_imag = std::max(worst_imag, std::abs(diag.imag()) / diag.real());
        }
        bool coeff_sym = true;
        for (const Polynomial* h : {&f.H1, &f.H2})
            for (const auto& t : h->terms()) {
                Monomial swapped(2 * n);
                for (std::size_t i = 0; i < n; ++i) {
                    swapped.set(i, t.mono[n + i]);
                    swapped.set(n + i, t.mono[i]);
                }
                coeff_sym = coeff_sym && (h->coefficient(swapped) == t.coeff);
            }
        const bool ok = worst_herm <= 1e-12 && worst_imag <= 1e-12 && positive && coeff_sym;
        all = all && ok;
        d << "n=" << n << ": herm=" << fmt_err(worst_herm) << " imag=" << fmt_err(worst_imag)
          << (positive ? "" : " NOT-POSITIVE") << (coeff_sym ? "" : " COEFF-ASYM") << "  ";
    }
    report(5, "Hermitian symmetry, positivity, coefficient symmetry", all, d.str());
}

// ---------------------------------------------------------------------- 6
void criterion_metric(const std::vector<KernelFormula>& formulas) {
    bool disc_ok = true;
    double disc_worst = 0;
    Sampler s1(6001);
    for (int i = 0; i < 50; ++i) {
        const Complex z = s1.disc(0.8);
        const double want = 2.0 / ((1 - std::norm(z)) * (1 - std::norm(z)));
        const HermitianMatrix g = bergman_metric_at(formulas[1], {z});
        const double rel = std::abs(g.at(0, 0) - Complex(want)) / want;
        disc_worst = std::max(disc_worst, rel);
        disc_ok = disc_ok && rel <= 1e-9;
    }
    bool fd_ok = true, pd_ok = true;
    double fd_worst = 0;
    for (std::size_t n = 2; n <= 3; ++n) {
        const BergmanMetric metric(formulas[n]);
        Sampler s(6100 + n);
        for (int i = 0; i < 200; ++i) {
            const ComplexPoint xi = symmetrize_point(s.separated_tuple(n, 0.7, 0.0));
            const HermitianMatrix g = metric.at(xi);
            pd_ok = pd_ok && g.is_hermitian(1e-10) && g.min_eigenvalue() > 0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex fd = bergman_metric_fd(formulas[n], xi, j, k);
                    const double err = std::abs(g.at(j, k) - fd) / (1.0 + std::abs(fd));
                    fd_worst = std::max(fd_worst, err);
                    fd_ok = fd_ok && err <= 1e-6;
                }
        }
    }
    std::ostringstream d;
    d << "disc err=" << fmt_err(disc_worst) << " fd err=" << fmt_err(fd_worst)
      << (pd_ok ? " positive-definite" : " NOT-PD");
    report(6, "metric: disc closed form, FD agreement, positivity", disc_ok && fd_ok && pd_ok, d.str());
}

// ---------------------------------------------------------------------- 7
void criterion_jets(const KernelFormula& f2) {
    Sampler s(7001);
    bool ok = true;
    double worst = 0;
    for (int inst = 0; inst < 20; ++inst) {
        std::vector<std::vector<Complex>> comps(2);
        for (auto& c : comps)
            for (int d = 0; d < 3; ++d) c.push_back(s.disc(0.12));
        const CurveSpec G = CurveSpec::symmetrized(comps);
        const Complex z = s.disc(0.4);
        const Complex center = kernel_formula_eval(f2, G.eval(z), G.eval(Complex(0)));
        auto u = [&](double t) {
            return std::log(kernel_formula_eval(f2, G.eval(z), G.eval(Complex(t))) / center);
        };
        const Complex fd1 = fd::first(u);
        const Complex fd2 = fd::second(u);
        const Complex j1 = log_kernel_jet(f2, G, z, 1);
        const Complex j2 = log_kernel_jet(f2, G, z, 2);
        const double e1 = std::abs(j1 - fd1) / (1.0 + std::abs(fd1));
        const double e2 = std::abs(j2 - fd2) / (1.0 + std::abs(fd2));
        worst = std::max({worst, e1, e2});
        ok = ok && e1 <= 1e-6 && e2 <= 1e-6;
    }
    report(7, "log-kernel jets vs finite differences, 20 instances", ok, "worst=" + fmt_err(worst));
}

// ---------------------------------------------------------------------- 8
void criterion_residual(const KernelFormula& f2) {
    const CurveSpec f_const = CurveSpec::euclidean({{Complex(0.7)}});
    const CurveSpec g_const = CurveSpec::symmetrized({{Complex(0.2)}, {Complex(0.05)}});
    const ResidualField trivial = pullback_residual(f_const, g_const, f2, 0.4, 11);

    const CurveSpec F = CurveSpec::euclidean({{Complex(0), Complex(1)}});
    const CurveSpec G = CurveSpec::symmetrized({{Complex(0), Complex(1)}, {Complex(0)}});
    const ResidualField pinned = pullback_residual(F, G, f2, 0.4, 21);

    const bool ok = trivial.sup_norm <= 1e-12 && pinned.sup_norm > 1e-3;
    std::ostringstream d;
    d << "const pair sup=" << fmt_err(trivial.sup_norm) << " pinned pair sup=" << fmt_err(pinned.sup_norm)
      << " (floor 1e-3)";
    report(8, "isometry residual: trivial pair vanishes, pinned pair does not", ok, d.str());
}

// ---------------------------------------------------------------------- 9
struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const char* cli = std::getenv("SYMPD_CLI");
    if (!cli) return {};
    const std::string cmd = std::string(cli) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    std::string out;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    if (!std::getenv("SYMPD_CLI")) {
        report(9, "determinism of formula files and verify reports", false, "SYMPD_CLI not set");
        return;
    }
    const RunResult f1 = run_cli("formula --n 2 --out acceptance_run1.json");
    const RunResult f2 = run_cli("formula --n 2 --out acceptance_run2.json");
    const bool files_ok = f1.exit_code == 0 && f2.exit_code == 0 &&
                          slurp("acceptance_run1.json") == slurp("acceptance_run2.json") &&
                          !slurp("acceptance_run1.json").empty();
    std::remove("acceptance_run1.json");
    std::remove("acceptance_run2.json");

    const std::string verify_args = "verify --n 2 --samples 300 --seed 7 --tol 1e-9";
    const RunResult v1 = run_cli(verify_args);
    const RunResult v2 = run_cli(verify_args);
    const bool verify_ok = v1.exit_code == 0 && v1.output == v2.output && !v1.output.empty();

    report(9, "determinism of formula files and verify reports", files_ok && verify_ok,
           std::string("files ") + (files_ok ? "identical" : "DIFFER") + ", reports " +
               (verify_ok ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
    criterion_golden_n2();
    const std::vector<KernelFormula> formulas = criterion_cross_representation();
    criterion_singular_extension(formulas[2]);
    criterion_decompose_round_trip();
    criterion_kernel_structure(formulas);
    criterion_metric(formulas);
    criterion_jets(formulas[2]);
    criterion_residual(formulas[2]);
    criterion_determinism();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
