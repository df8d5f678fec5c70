#include <doctest.h>

#include <cmath>

#include "jetflow/expr.hpp"
#include "jetflow/parser.hpp"
#include "jetflow/sampling.hpp"
#include "test_support.hpp"

using namespace jetflow;
using jetflow::testing::FieldGen;
using jetflow::testing::fd_partial;

TEST_CASE("coordinate projections evaluate directly") {
    const JetPoint p{0.0, {2.0}, {3.0}};
    CHECK(ScalarField::velocity(1, 1).eval(p) == 3.0);
    CHECK(parse_field("sin(t) + q1*v1", 1).eval(p) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("division by zero raises DomainError") {
    const ScalarField f = parse_field("1/q1", 1);
    CHECK_THROWS_AS(f.eval(JetPoint{0.0, {0.0}, {0.0}}), DomainError);
    CHECK(f.eval(JetPoint{0.0, {2.0}, {0.0}}) == doctest::Approx(0.5));
}

TEST_CASE("log and sqrt domain checks") {
    CHECK_THROWS_AS(parse_field("log(q1)", 1).eval(JetPoint{0.0, {-1.0}, {0.0}}), DomainError);
    CHECK_THROWS_AS(parse_field("sqrt(q1)", 1).eval(JetPoint{0.0, {-4.0}, {0.0}}), DomainError);
    CHECK(parse_field("sqrt(q1)", 1).eval(JetPoint{0.0, {4.0}, {0.0}}) == doctest::Approx(2.0));
}

TEST_CASE("simple exact partials") {
    const JetPoint p{0.7, {2.0}, {3.0}};
    CHECK(parse_field("q1*v1", 1).partial(sym_v(1)).eval(p) == doctest::Approx(2.0));
    CHECK(parse_field("sin(t)", 1).partial(sym_t()).eval(JetPoint{0.0, {0.0}, {0.0}}) ==
          doctest::Approx(1.0));
}

TEST_CASE("derivative of a general power") {
    // d/dq (q^v) = v q^(v-1); d/dv (q^v) = q^v log q
    const ScalarField f = parse_field("q1^v1", 1);
    const JetPoint p{0.0, {2.0}, {1.5}};
    CHECK(f.partial(sym_q(1)).eval(p) == doctest::Approx(1.5 * std::pow(2.0, 0.5)));
    CHECK(f.partial(sym_v(1)).eval(p) ==
          doctest::Approx(std::pow(2.0, 1.5) * std::log(2.0)));
}

TEST_CASE("exact derivatives agree with central finite differences") {
    FieldGen gen(2024);
    Sampler sampler(99);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 1 + trial % 3;
        const ScalarField f = gen.full(m);
        for (int rep = 0; rep < 10; ++rep) {
            const Point p = sampler.next_point(m);
            for (Sym s : {sym_t(), sym_q(1 + rep % m), sym_v(1 + (rep / 2) % m)}) {
                double exact, approx;
                try {
                    exact = f.partial(s).eval(p);
                    approx = fd_partial(f, p, s);
                } catch (const DomainError&) {
                    continue;
                }
                const double tol = 1e-6 * std::max(1.0, std::abs(exact));
                CHECK(std::abs(exact - approx) <= tol);
                ++checked;
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("mixed partials commute") {
    FieldGen gen(77);
    Sampler sampler(5);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 1 + trial % 3;
        const ScalarField f = gen.full(m);
        const Sym a = trial % 2 ? sym_t() : sym_q(1 + trial % m);
        const Sym b = sym_v(1 + (trial / 2) % m);
        const ScalarField commutator = f.partial(a).partial(b) - f.partial(b).partial(a);
        double worst = 0.0;
        try {
            worst = max_value(commutator, sampler, 50);
        } catch (const DomainError&) {
            continue;
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("substitution composes simultaneously") {
    // swap q1 and v1 in one pass
    const ScalarField f = parse_field("q1 - 2*v1", 1);
    SubstitutionMap subs;
    subs[sym_q(1)] = variable(sym_v(1));
    subs[sym_v(1)] = variable(sym_q(1));
    CHECK(f.substitute(subs).eval(JetPoint{0.0, {10.0}, {1.0}}) ==
          doctest::Approx(1.0 - 20.0));
}

TEST_CASE("field dimension checks") {
    CHECK_THROWS_AS(ScalarField(2, variable(sym_q(3))), UnknownSymbol);
    CHECK_THROWS_AS(ScalarField(0, constant(1.0)), DimensionMismatch);
    const ScalarField f = parse_field("q1 + q2", 2);
    CHECK_THROWS_AS(f.eval(JetPoint{0.0, {1.0}, {1.0}}), DimensionMismatch);
}

TEST_CASE("total time derivative rejects velocity dependence") {
    CHECK_THROWS_AS(total_time_derivative(parse_field("v1", 1)), DimensionMismatch);
    const ScalarField g = total_time_derivative(parse_field("t*q1", 1));
    CHECK(g.eval(JetPoint{2.0, {3.0}, {5.0}}) == doctest::Approx(3.0 + 2.0 * 5.0));
}

TEST_CASE("printer emits re-parseable text") {
    FieldGen gen(4242);
    Sampler sampler(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 1 + trial % 3;
        const ScalarField f = gen.full(m);
        const ScalarField back = parse_field(f.str(), m);
        CHECK(max_difference(f, back, sampler, 40) < 1e-14);
    }
}

TEST_CASE("sampler is deterministic per seed") {
    Sampler a(123), b(123), c(124);
    const Point pa = a.next_point(2);
    const Point pb = b.next_point(2);
    const Point pc = c.next_point(2);
    CHECK(pa.t == pb.t);
    CHECK(pa.q == pb.q);
    CHECK(pa.t != pc.t);
}
