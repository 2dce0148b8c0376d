#include <catch2/catch_amalgamated.hpp>

#include "sympd/polynomial.hpp"
#include "sympd/rational_function.hpp"
#include "test_support.hpp"

using namespace sympd;
using namespace sympd::testing;

namespace {

VariableArena lambda_arena() { return VariableArena::indexed("l", 2); }

Polynomial var(const VariableArena& a, std::size_t i) { return Polynomial::variable(a, i); }

}  // namespace

TEST_CASE("product examples") {
    const VariableArena a = lambda_arena();
    const Polynomial l1 = var(a, 0), l2 = var(a, 1);

    CHECK((l1 - l2) * (l1 + l2) == l1 * l1 - l2 * l2);

    const Polynomial p = l1 * l1 + Polynomial::constant(a, Rational(3)) * l2;
    CHECK(p * Polynomial::constant(a, Rational(1)) == p);

    const VariableArena lm = VariableArena::indexed("l", "mb", 1);
    const Polynomial f = Polynomial::constant(lm, Rational(1)) - var(lm, 0) * var(lm, 1);
    const Polynomial sq = f * f;
    // 1 - 2 l1 mb1 + l1^2 mb1^2
    CHECK(sq.term_count() == 3);
    CHECK(sq.coefficient(Monomial(2)) == Rational(1));
    Monomial mid(2);
    mid.set(0, 1);
    mid.set(1, 1);
    CHECK(sq.coefficient(mid) == Rational(-2));
    Monomial top(2);
    top.set(0, 2);
    top.set(1, 2);
    CHECK(sq.coefficient(top) == Rational(1));
}

TEST_CASE("ring axioms on random polynomials") {
    const VariableArena a = VariableArena::indexed("x", 3);
    Sampler s(101);
    for (int trial = 0; trial < 25; ++trial) {
        const Polynomial p = random_poly(s, a, 3, 4);
        const Polynomial q = random_poly(s, a, 3, 4);
        const Polynomial r = random_poly(s, a, 3, 4);
        CHECK(p * (q + r) == p * q + p * r);
        CHECK(p * q == q * p);
        CHECK((p * q) * r == p * (q * r));
        CHECK(p + (q + r) == (p + q) + r);
        CHECK(p - p == Polynomial(a));
    }
}

TEST_CASE("arena mismatch is rejected") {
    const Polynomial p = var(lambda_arena(), 0);
    const Polynomial q = var(VariableArena::indexed("y", 2), 0);
    CHECK_THROWS_AS(p * q, ArenaMismatchError);
    CHECK_THROWS_AS(p + q, ArenaMismatchError);
}

TEST_CASE("exact division by linear factors") {
    const VariableArena a = lambda_arena();
    const Polynomial l1 = var(a, 0), l2 = var(a, 1);

    CHECK((l1 * l1 - l2 * l2).exact_div_linear(0, 1) == l1 + l2);
    CHECK((l1 - l2).exact_div_linear(0, 1) == Polynomial::constant(a, Rational(1)));
    CHECK_THROWS_AS((l1 * l1 + l2 * l2).exact_div_linear(0, 1), DivisionRemainderError);
}

TEST_CASE("division round trip on random polynomials") {
    const VariableArena a = VariableArena::indexed("x", 4);
    Sampler s(202);
    for (int trial = 0; trial < 40; ++trial) {
        const Polynomial p = random_poly(s, a, 3, 5);
        const std::size_t i = static_cast<std::size_t>(random_int(s, 0, 3));
        std::size_t j = static_cast<std::size_t>(random_int(s, 0, 3));
        if (i == j) j = (j + 1) % 4;
        const Polynomial factor = var(a, i) - var(a, j);
        CHECK((p * factor).exact_div_linear(i, j) == p);
    }
}

TEST_CASE("evaluation examples") {
    const VariableArena a = lambda_arena();
    const Polynomial l1 = var(a, 0), l2 = var(a, 1);

    CHECK((l1 * l1 - l2 * l2).eval({Complex(2), Complex(1)}) == Complex(3));
    CHECK(Polynomial::constant(a, Rational(5, 2)).eval({Complex(0), Complex(0)}) == Complex(2.5));

    const VariableArena lm = VariableArena::indexed("l", "mb", 1);
    const Polynomial lm11 = var(lm, 0) * var(lm, 1);
    CHECK(lm11.eval({Complex(0.5), Complex(0.5)}) == Complex(0.25));

    CHECK_THROWS_AS(l1.eval({Complex(1)}), std::invalid_argument);
}

TEST_CASE("evaluation is a ring homomorphism within tolerance") {
    const VariableArena a = VariableArena::indexed("x", 3);
    Sampler s(303);
    for (int trial = 0; trial < 30; ++trial) {
        const Polynomial p = random_poly(s, a, 3, 5);
        const Polynomial q = random_poly(s, a, 3, 5);
        ComplexPoint at(3);
        for (auto& c : at) c = s.disc(1.0);
        const Complex lhs = (p * q).eval(at);
        const Complex rhs = p.eval(at) * q.eval(at);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("polynomial partial derivatives") {
    const VariableArena k = VariableArena::indexed("xi", "etab", 2);
    const Polynomial xi1 = var(k, 0), xi2 = var(k, 1), eb1 = var(k, 2), eb2 = var(k, 3);

    CHECK((xi1 * eb1).partial(2) == xi1);
    CHECK(Polynomial::constant(k, Rational(7)).partial(0) == Polynomial(k));

    const Polynomial h1 = Polynomial::constant(k, Rational(2)) - xi1 * eb1 +
                          Polynomial::constant(k, Rational(2)) * xi2 * eb2;
    CHECK(h1.partial(3) == Polynomial::constant(k, Rational(2)) * xi2);
}

TEST_CASE("rational function partial uses the quotient rule") {
    const VariableArena k = VariableArena::indexed("xi", "etab", 2);
    const Polynomial xi1 = var(k, 0), xi2 = var(k, 1), eb1 = var(k, 2), eb2 = var(k, 3);
    const Polynomial one = Polynomial::constant(k, Rational(1));

    const Polynomial h1 = Polynomial::constant(k, Rational(2)) - xi1 * eb1 +
                          Polynomial::constant(k, Rational(2)) * xi2 * eb2;
    const RationalFunction r(h1, one);
    const RationalFunction dr = ratfn_partial(r, 3);
    CHECK(dr.numerator() == Polynomial::constant(k, Rational(2)) * xi2);
    CHECK(dr.denominator() == one);

    // quotient rule on a genuine quotient: d/dxi1 of xi1/(1 - xi1 eb1)
    const RationalFunction q(xi1, one - xi1 * eb1);
    const RationalFunction dq = ratfn_partial(q, 0);
    // (1*(1 - xi1 eb1) - xi1*(-eb1)) / (1 - xi1 eb1)^2 = 1 / (...)^2
    const ComplexPoint at{Complex(0.3), Complex(0.1), Complex(0.2), Complex(0.4)};
    const Complex d = Complex(1) - Complex(0.3) * Complex(0.2);
    CHECK(rel_err(dq.eval(at), Complex(1) / (d * d)) < 1e-14);
}

TEST_CASE("rational function canonicalization and errors") {
    const VariableArena a = lambda_arena();
    const Polynomial l1 = var(a, 0);
    const Polynomial neg = Polynomial::constant(a, Rational(-2)) * l1;

    const RationalFunction r(neg, Polynomial::constant(a, Rational(-4)));
    // sign flipped so the numerator's leading coefficient is positive
    CHECK(r.numerator().leading_term().coeff > 0);
    CHECK(rel_err(r.eval({Complex(1), Complex(0)}), Complex(0.5)) < 1e-15);

    CHECK_THROWS_AS(RationalFunction(l1, Polynomial(a)), std::invalid_argument);
}

TEST_CASE("monomial exponent overflow is rejected") {
    const VariableArena a = lambda_arena();
    const Polynomial l1 = var(a, 0);
    Polynomial p = l1;
    // l1^256 would overflow the packed exponent; squaring up to 2^8 must throw
    CHECK_THROWS(([&] {
        for (int i = 0; i < 8; ++i) p = p * p;
        return p;
    })());
}
