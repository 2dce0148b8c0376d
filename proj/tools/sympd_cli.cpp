// Command-line front end: formula generation, verification, evaluation,
// metric/jet/residual experiments. Exit codes: 0 success, 1 verification
// failure, 2 invalid input.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sympd/geometry.hpp"
#include "sympd/kernel.hpp"
#include "sympd/sampling.hpp"
#include "sympd/serialization.hpp"
#include "sympd/symmetric.hpp"

namespace {

using namespace sympd;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadInput = 2;

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(15);
    out << x;
    return out.str();
}

std::string fmt(Complex c) {
    std::string s = fmt(c.real());
    s += (c.imag() < 0 ? "-" : "+");
    s += fmt(std::abs(c.imag()));
    s += "i";
    return s;
}

// complex literal `a+bi` (also plain `a`, pure `bi`, `i`, `-i`)
Complex parse_complex(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("malformed complex number: empty");
    auto parse_real = [&](const std::string& t) -> double {
        if (t == "" || t == "+") return 1.0;
        if (t == "-") return -1.0;
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(t, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed complex number: " + raw);
        }
        if (pos != t.size()) throw std::invalid_argument("malformed complex number: " + raw);
        return v;
    };
    if (s.back() != 'i') return Complex(parse_real(s), 0.0);
    const std::string body = s.substr(0, s.size() - 1);
    // split at the last sign that starts the imaginary part
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E')
            return Complex(parse_real(body.substr(0, i)), parse_real(body.substr(i)));
    }
    return Complex(0.0, parse_real(body));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

ComplexPoint parse_point(const std::string& s) {
    ComplexPoint p;
    for (const std::string& part : split(s, ',')) p.push_back(parse_complex(part));
    return p;
}

// `;`-separated components, each a comma-separated coefficient list, low
// degree first
std::vector<std::vector<Complex>> parse_components(const std::string& s) {
    std::vector<std::vector<Complex>> comps;
    for (const std::string& part : split(s, ';')) comps.push_back(parse_point(part));
    return comps;
}

struct FormulaSource {
    std::size_t n = 0;
    std::string path;  // load instead of building when nonempty

    KernelFormula get() const {
        if (!path.empty()) {
            KernelFormula f = load_kernel_formula(path);
            if (n != 0 && f.n != n)
                throw std::invalid_argument("formula file is for n=" + std::to_string(f.n) +
                                            ", requested n=" + std::to_string(n));
            return f;
        }
        if (n == 0) throw std::invalid_argument("one of --n or --formula is required");
        return rationalize_kernel(n);
    }
};

void add_formula_source(CLI::App* cmd, FormulaSource& src, bool require_n = false) {
    auto* nopt = cmd->add_option("--n", src.n, "dimension n (builds the formula in-process)");
    cmd->add_option("--formula", src.path, "path to a previously generated formula JSON");
    if (require_n) nopt->required();
}

int cmd_formula(std::size_t n, const std::string& out_path) {
    KernelFormula f = rationalize_kernel(n);
    save_kernel_formula(f, out_path);
    std::cout << "n = " << f.n << "\n";
    std::cout << "pi_power = " << f.pi_power << "\n";
    std::cout << "H1: " << f.H1.term_count() << " terms, max degree " << f.H1.total_degree() << "\n";
    std::cout << "H2: " << f.H2.term_count() << " terms, max degree " << f.H2.total_degree() << "\n";
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_verify(const FormulaSource& src, std::uint64_t seed, std::size_t samples, double radius, double separation,
               double tol) {
    if (radius <= 0 || radius >= 1 || samples < 1 || tol <= 0)
        throw std::invalid_argument("invalid config: need 0 < radius < 1, samples >= 1, tol > 0");
    KernelFormula f = src.get();
    std::cout << "verify n=" << f.n << " samples=" << samples << " seed=" << seed << " radius=" << fmt(radius)
              << " separation=" << fmt(separation) << " tol=" << fmt(tol) << "\n";
    Sampler sampler(seed);
    double max_rel = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const ComplexPoint lambda = sampler.separated_tuple(f.n, radius, separation);
        const ComplexPoint mu = sampler.separated_tuple(f.n, radius, separation);
        const Complex direct = kernel_direct_eval(lambda, mu);
        const Complex formula = kernel_formula_eval(f, symmetrize_point(lambda), symmetrize_point(mu));
        max_rel = std::max(max_rel, std::abs(formula - direct) / std::abs(direct));
    }
    std::cout << "max_rel_err = " << fmt(max_rel) << "\n";
    if (max_rel <= tol) {
        std::cout << "PASS\n";
        return kExitOk;
    }
    std::cout << "FAIL (tolerance " << fmt(tol) << ")\n";
    return kExitVerifyFailed;
}

int cmd_eval(const FormulaSource& src, const std::string& xi_s, const std::string& eta_s, bool strict) {
    KernelFormula f = src.get();
    const ComplexPoint xi = parse_point(xi_s);
    const ComplexPoint eta = eta_s.empty() ? xi : parse_point(eta_s);
    for (const auto* p : {&xi, &eta}) {
        const double m = max_root_modulus(*p);
        if (m >= 1.0)
            throw std::invalid_argument("point outside G_n: max fiber root modulus " + fmt(m));
    }
    std::cout << "K = " << fmt(kernel_formula_eval(f, xi, eta, strict)) << "\n";
    return kExitOk;
}

int cmd_metric(const FormulaSource& src, const std::string& xi_s) {
    KernelFormula f = src.get();
    const ComplexPoint xi = parse_point(xi_s);
    const double m = max_root_modulus(xi);
    if (m >= 1.0) throw std::invalid_argument("point outside G_n: max fiber root modulus " + fmt(m));
    const HermitianMatrix g = bergman_metric_at(f, xi);
    for (std::size_t j = 0; j < g.size(); ++j) {
        std::cout << (j == 0 ? "[" : " ");
        for (std::size_t k = 0; k < g.size(); ++k) std::cout << (k ? "  " : "") << fmt(g.at(j, k));
        std::cout << (j + 1 == g.size() ? "]" : "") << "\n";
    }
    std::cout << "min_eigenvalue = " << fmt(g.min_eigenvalue()) << "\n";
    return kExitOk;
}

int cmd_residual(const FormulaSource& src, const std::string& f_s, const std::string& g_s, double radius,
                 std::size_t grid, const std::string& csv_path) {
    KernelFormula formula = src.get();
    const CurveSpec F = CurveSpec::euclidean(parse_components(f_s));
    const CurveSpec G = CurveSpec::symmetrized(parse_components(g_s));
    const ResidualField field = pullback_residual(F, G, formula, radius, grid);
    if (!csv_path.empty()) {
        write_residual_csv(field, csv_path);
        std::cout << "wrote " << csv_path << "\n";
    }
    std::cout << "sup_norm = " << fmt(field.sup_norm) << "\n";
    std::cout << field.summary().dump() << "\n";
    return kExitOk;
}

int cmd_membership(std::size_t n, const std::string& xi_s, double tol) {
    const ComplexPoint xi = parse_point(xi_s);
    if (xi.size() != n)
        throw std::invalid_argument("expected " + std::to_string(n) + " coordinates, got " +
                                    std::to_string(xi.size()));
    const double m = max_root_modulus(xi);
    std::cout << "max_root_modulus = " << fmt(m) << "\n";
    std::cout << "inside = " << (gn_membership(xi, tol) ? "true" : "false") << "\n";
    return kExitOk;
}

int cmd_jet(const FormulaSource& src, const std::string& g_s, const std::string& z_s, unsigned delta) {
    KernelFormula f = src.get();
    const CurveSpec G = CurveSpec::symmetrized(parse_components(g_s));
    const Complex z = parse_complex(z_s);
    std::cout << "jet = " << fmt(log_kernel_jet(f, G, z, delta)) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bergman kernel of the symmetrized polydisc: exact formulas and numerical geometry"};
    app.require_subcommand(1);

    // formula
    auto* formula = app.add_subcommand("formula", "construct H1/(pi^n H2) and write it as JSON");
    std::size_t formula_n = 2;
    std::string formula_out = "kernel.json";
    formula->add_option("--n", formula_n, "dimension n in [1,4]")->required();
    formula->add_option("--out", formula_out, "output path");

    // verify
    auto* verify = app.add_subcommand("verify", "cross-validate the formula against direct evaluation");
    FormulaSource verify_src;
    std::uint64_t verify_seed = 7;
    std::size_t verify_samples = 1000;
    double verify_radius = 0.8, verify_sep = 0.05, verify_tol = 1e-9;
    add_formula_source(verify, verify_src);
    verify->add_option("--seed", verify_seed, "PRNG seed");
    verify->add_option("--samples", verify_samples, "number of (lambda, mu) pairs");
    verify->add_option("--radius", verify_radius, "sampling disc radius");
    verify->add_option("--separation", verify_sep, "minimum pairwise coordinate separation");
    verify->add_option("--tol", verify_tol, "max relative error to pass");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate K(xi, eta)");
    FormulaSource eval_src;
    std::string eval_xi, eval_eta;
    bool eval_strict = false;
    add_formula_source(eval, eval_src);
    eval->add_option("--xi", eval_xi, "point in G_n, comma-separated complex coords")->required();
    eval->add_option("--eta", eval_eta, "second point (defaults to xi)");
    eval->add_flag("--strict", eval_strict, "re-check membership inside the evaluator");

    // metric
    auto* metric = app.add_subcommand("metric", "Bergman metric matrix at a point");
    FormulaSource metric_src;
    std::string metric_xi;
    add_formula_source(metric, metric_src);
    metric->add_option("--xi", metric_xi, "point in G_n")->required();

    // residual
    auto* residual = app.add_subcommand("residual", "isometry residual of curves F (to C^m) and G (to G_n)");
    FormulaSource residual_src;
    std::string residual_f, residual_g, residual_csv;
    double residual_radius = 0.4;
    std::size_t residual_grid = 21;
    add_formula_source(residual, residual_src);
    residual->add_option("--F", residual_f, "components of F, `;`-separated coefficient lists (low degree first)")
        ->required();
    residual->add_option("--G", residual_g, "components of G, same syntax")->required();
    residual->add_option("--radius", residual_radius, "grid disc radius");
    residual->add_option("--grid", residual_grid, "lattice points per axis");
    residual->add_option("--csv", residual_csv, "write the residual field as CSV here");

    // membership
    auto* membership = app.add_subcommand("membership", "test whether a point lies in G_n");
    std::size_t membership_n = 0;
    std::string membership_xi;
    double membership_tol = 1e-9;
    membership->add_option("--n", membership_n, "dimension")->required();
    membership->add_option("--xi", membership_xi, "candidate point")->required();
    membership->add_option("--tol", membership_tol, "root-modulus margin");

    // jet
    auto* jet = app.add_subcommand("jet", "log-kernel jet along a curve at w=0");
    FormulaSource jet_src;
    std::string jet_g, jet_z = "0";
    unsigned jet_delta = 1;
    add_formula_source(jet, jet_src);
    jet->add_option("--G", jet_g, "curve into G_n, `;`-separated coefficient lists")->required();
    jet->add_option("--z", jet_z, "first-argument base point");
    jet->add_option("--delta", jet_delta, "jet order, 1..3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (formula->parsed()) return cmd_formula(formula_n, formula_out);
        if (verify->parsed())
            return cmd_verify(verify_src, verify_seed, verify_samples, verify_radius, verify_sep, verify_tol);
        if (eval->parsed()) return cmd_eval(eval_src, eval_xi, eval_eta, eval_strict);
        if (metric->parsed()) return cmd_metric(metric_src, metric_xi);
        if (residual->parsed())
            return cmd_residual(residual_src, residual_f, residual_g, residual_radius, residual_grid, residual_csv);
        if (membership->parsed()) return cmd_membership(membership_n, membership_xi, membership_tol);
        if (jet->parsed()) return cmd_jet(jet_src, jet_g, jet_z, jet_delta);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    std::cerr << "error: no subcommand\n";
    return kExitBadInput;
}
