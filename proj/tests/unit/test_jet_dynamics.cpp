#include <doctest.h>

#include <cmath>

#include "jetflow/jet_dynamics.hpp"
#include "jetflow/parser.hpp"
#include "test_support.hpp"

using namespace jetflow;
namespace jt = jetflow::testing;
using jt::FieldGen;

TEST_CASE("connection to equation: xi = gamma0 + v gamma") {
    Sampler sampler(1);
    SUBCASE("zero maps to zero") {
        const DynamicEquation eq = sode_from_connection(DynamicConnection::zero(2));
        CHECK(max_difference(eq, DynamicEquation::zero(2), sampler, 50) == 0.0);
    }
    SUBCASE("oscillator connection") {
        DynamicConnection g = DynamicConnection::zero(1);
        g.gamma0[0] = parse_field("-q1", 1);
        const DynamicEquation eq = sode_from_connection(g);
        CHECK(max_difference(eq, DynamicEquation({parse_field("-q1", 1)}), sampler, 50) <
              1e-15);
    }
    SUBCASE("damped oscillator connection") {
        DynamicConnection g = DynamicConnection::zero(1);
        g.gamma0[0] = parse_field("-q1 - 0.1*v1", 1);
        g.gamma[0][0] = parse_field("-0.1", 1);
        const DynamicEquation expected({parse_field("-q1 - 0.2*v1", 1)});
        CHECK(max_difference(sode_from_connection(g), expected, sampler, 100) < 1e-14);
    }
}

TEST_CASE("equation to connection: the symmetric representative") {
    Sampler sampler(2);
    SUBCASE("oscillator") {
        const DynamicConnection g = connection_from_sode(jt::oscillator());
        CHECK(max_difference(g.gamma0[0], parse_field("-q1", 1), sampler, 50) < 1e-15);
        CHECK(max_value(g.gamma[0][0], sampler, 50) == 0.0);
    }
    SUBCASE("damped oscillator against the finite-difference vertical derivative") {
        const DynamicEquation eq({parse_field("-q1 - 0.2*v1", 1)});
        const DynamicConnection g = connection_from_sode(eq);
        CHECK(max_difference(g.gamma[0][0], parse_field("-0.1", 1), sampler, 50) < 1e-14);
        CHECK(max_difference(g.gamma0[0], parse_field("-q1 - 0.1*v1", 1), sampler, 50) < 1e-14);
        // oracle: gamma^1_1 = (1/2) dv xi computed by central differences
        Sampler points(3);
        for (int i = 0; i < 20; ++i) {
            const Point p = points.next_point(1);
            const double fd = jt::fd_partial(eq.xi[0], p, sym_v(1));
            CHECK(g.gamma[0][0].eval(p) == doctest::Approx(0.5 * fd).epsilon(1e-6));
        }
    }
    SUBCASE("output is always vertically symmetric") {
        FieldGen gen(11);
        for (int trial = 0; trial < 10; ++trial) {
            const int m = 1 + trial % 3;
            Sampler s(100 + trial);
            const SymmetryCheck check =
                check_symmetry(connection_from_sode(gen.equation(m)), s, 60);
            CHECK(check.symmetric);
        }
    }
}

TEST_CASE("round trip equation -> connection -> equation is the identity") {
    FieldGen gen(21);
    for (int trial = 0; trial < 15; ++trial) {
        const int m = 1 + trial % 3;
        Sampler sampler(trial);
        const DynamicEquation eq = gen.equation(m);
        const DynamicEquation back = sode_from_connection(connection_from_sode(eq));
        CHECK(max_difference(eq, back, sampler, 200) < 1e-12);
    }
}

TEST_CASE("resymmetrize") {
    Sampler sampler(31);
    SUBCASE("zero is fixed") {
        const DynamicConnection r = resymmetrize(DynamicConnection::zero(2));
        CHECK(max_difference(r, DynamicConnection::zero(2), sampler, 50) == 0.0);
    }
    SUBCASE("symmetric connections are fixed points") {
        FieldGen gen(5);
        for (int trial = 0; trial < 8; ++trial) {
            const int m = 1 + trial % 3;
            Sampler s(trial);
            const DynamicConnection g = connection_from_sode(gen.equation(m));
            CHECK(max_difference(resymmetrize(g), g, s, 150) < 1e-10);
        }
    }
    SUBCASE("asymmetric input changes but keeps its equation") {
        DynamicConnection g = DynamicConnection::zero(2);
        g.gamma[0][1] = parse_field("v1^2", 2);  // breaks vertical symmetry
        Sampler s(8);
        CHECK_FALSE(check_symmetry(g, s, 100).symmetric);
        const DynamicConnection r = resymmetrize(g);
        CHECK(max_difference(r, g, s, 100) > 1e-3);
        CHECK(max_difference(sode_from_connection(r), sode_from_connection(g), s, 150) < 1e-10);
        CHECK(check_symmetry(r, s, 100).symmetric);
    }
    SUBCASE("matches connection_from_sode of the induced equation, and is idempotent") {
        FieldGen gen(9);
        const int m = 2;
        DynamicConnection g = connection_from_sode(gen.equation(m));
        g.gamma[1][0] = g.gamma[1][0] + parse_field("0.5*v2^2", 2);
        Sampler s(77);
        const DynamicConnection r = resymmetrize(g);
        CHECK(max_difference(r, connection_from_sode(sode_from_connection(g)), s, 150) < 1e-10);
        CHECK(max_difference(resymmetrize(r), r, s, 150) < 1e-10);
    }
}

TEST_CASE("transform_sode") {
    Sampler sampler(41);
    SUBCASE("identity chart") {
        FieldGen gen(3);
        const DynamicEquation eq = gen.equation(2);
        CHECK(max_difference(transform_sode(eq, ChartTransform::identity(2)), eq, sampler,
                             150) < 1e-12);
    }
    SUBCASE("free motion is free in boosted coordinates") {
        const DynamicEquation out =
            transform_sode(DynamicEquation::zero(1), jt::boost_chart(1, {2.0}, 0.5));
        CHECK(max_value(out.xi[0], sampler, 100) < 1e-14);
    }
    SUBCASE("straight lines pushed through a rotation solve the transformed equation") {
        const ChartTransform rot = jt::rotation_chart();
        const DynamicEquation xi_rot = transform_sode(DynamicEquation::zero(2), rot);
        const double h = 1e-4;  // second differences: balance truncation and roundoff
        for (double t0 : {-0.8, 0.2, 1.3}) {
            auto line = [&](double t) {
                const JetPoint p{t, {1.0 + 0.5 * t, 2.0 - t}, {0.5, -1.0}};
                return pushforward_jet(rot, p);
            };
            const JetPoint c = line(t0), cp = line(t0 + h), cm = line(t0 - h);
            for (int i = 0; i < 2; ++i) {
                const double acc = (cp.q[i] - 2.0 * c.q[i] + cm.q[i]) / (h * h);
                CHECK(std::abs(acc - xi_rot.xi[i].eval(c)) < 1e-6);
            }
        }
    }
}

TEST_CASE("transform_connection and the commuting square") {
    SUBCASE("identity and affine images of zero") {
        Sampler sampler(51);
        const DynamicConnection zero = DynamicConnection::zero(1);
        CHECK(max_difference(transform_connection(zero, jt::boost_chart(1, {1.5})), zero,
                             sampler, 100) < 1e-14);
    }
    SUBCASE("square commutes for oscillator-like equations under rotations") {
        Sampler sampler(52);
        const DynamicEquation eq({parse_field("-q1 - 0.2*v1 + sin(q2)", 2),
                                  parse_field("-q2 + 0.1*v1*v2", 2)});
        const ChartTransform rot = jt::rotation_chart();
        const DynamicConnection a = transform_connection(connection_from_sode(eq), rot);
        const DynamicConnection b = connection_from_sode(transform_sode(eq, rot));
        CHECK(max_difference(a, b, sampler, 200) < 1e-8);
    }
    SUBCASE("square commutes for a spatially non-linear chart") {
        Sampler sampler(53);
        const ChartTransform chart = jt::parabolic_chart(1, 0.2);
        const DynamicEquation eq({parse_field("-q1 + 0.3*v1^2", 1)});
        SampleBox primed;
        primed.q_min = -0.7;
        primed.q_max = 1.0;
        const DynamicConnection a = transform_connection(connection_from_sode(eq), chart);
        const DynamicConnection b = connection_from_sode(transform_sode(eq, chart));
        CHECK(max_difference(a, b, sampler, 200, primed) < 1e-8);
    }
}

TEST_CASE("projector-route oracle equals the direct construction") {
    Sampler sampler(61);
    SUBCASE("zero") {
        const DynamicConnection g = vhat_oracle(DynamicEquation::zero(2));
        CHECK(max_difference(g, DynamicConnection::zero(2), sampler, 50) < 1e-15);
    }
    SUBCASE("oscillator") {
        CHECK(max_difference(vhat_oracle(jt::oscillator()),
                             connection_from_sode(jt::oscillator()), sampler, 100) < 1e-12);
    }
    SUBCASE("cubic-in-velocity equation") {
        const DynamicEquation eq({parse_field("0.2*v1^2*v2 + q1", 2),
                                  parse_field("-0.3*v2^3 + sin(q1)*v1", 2)});
        CHECK(max_difference(vhat_oracle(eq), connection_from_sode(eq), sampler, 200) < 1e-9);
    }
    SUBCASE("generated suite") {
        FieldGen gen(13);
        for (int trial = 0; trial < 8; ++trial) {
            const int m = 1 + trial % 3;
            Sampler s(trial + 500);
            const DynamicEquation eq = gen.equation(m);
            CHECK(max_difference(vhat_oracle(eq), connection_from_sode(eq), s, 150) < 1e-9);
        }
    }
}

TEST_CASE("quadratic extraction") {
    SUBCASE("velocity-free equation") {
        Sampler s(71);
        const QuadraticExtraction ex = as_quadratic(jt::oscillator(), s);
        REQUIRE(ex.quadratic);
        CHECK(max_value(ex.value->b[0][0], s, 50) == 0.0);
        CHECK(max_difference(ex.value->f[0], parse_field("-q1", 1), s, 50) < 1e-15);
    }
    SUBCASE("rational quadratic coefficient") {
        Sampler s(72);
        SampleBox box;
        box.q_min = 0.5;  // keep away from the q1 = 0 pole
        box.q_max = 3.0;
        const DynamicEquation eq({parse_field("v1^2/q1", 1)});
        const QuadraticExtraction ex = as_quadratic(eq, s, 200, box);
        REQUIRE(ex.quadratic);
        CHECK(max_difference(ex.value->a[0][0][0], parse_field("1/q1", 1), s, 100, box) < 1e-12);
        CHECK(max_value(ex.value->b[0][0], s, 50, box) < 1e-12);
        CHECK(max_value(ex.value->f[0], s, 50, box) < 1e-12);
        CHECK(max_difference(ex.value->to_equation(), eq, s, 150, box) < 1e-12);
    }
    SUBCASE("sin(v) is not quadratic") {
        Sampler s(73);
        const QuadraticExtraction ex =
            as_quadratic(DynamicEquation({parse_field("sin(v1)", 1)}), s);
        CHECK_FALSE(ex.quadratic);
        CHECK(ex.max_third_vertical_derivative > 0.1);
    }
}

TEST_CASE("affine extraction feeds the linear lift") {
    Sampler s(81);
    DynamicConnection g = DynamicConnection::zero(1);
    g.gamma0[0] = parse_field("-q1 - 0.1*v1", 1);
    g.gamma[0][0] = parse_field("-0.1", 1);
    const auto affine = as_affine(g, s);
    REQUIRE(affine.has_value());
    CHECK(max_difference(affine->to_connection(), g, s, 150) < 1e-12);
    DynamicConnection bad = DynamicConnection::zero(1);
    bad.gamma0[0] = parse_field("v1^2", 1);
    CHECK_FALSE(as_affine(bad, s).has_value());
}

TEST_CASE("degenerate dimension is rejected at construction") {
    CHECK_THROWS_AS(DynamicEquation(std::vector<ScalarField>{}), DimensionMismatch);
    CHECK_THROWS_AS(DynamicConnection({}, {}), DimensionMismatch);
}

TEST_CASE("jet fields may not use the tangent-only velocity slot") {
    CHECK_THROWS_AS(DynamicEquation({ScalarField::velocity_time(1)}), DimensionMismatch);
}

TEST_CASE("affine connection symmetry includes the time slot") {
    Sampler sampler(91);
    const int m = 1;
    auto zero = ScalarField::constant(m, 0.0);
    std::vector<std::vector<std::vector<ScalarField>>> coeffs(
        m, std::vector<std::vector<ScalarField>>(m + 1,
                                                 std::vector<ScalarField>(m + 1, zero)));
    coeffs[0][0][1] = parse_field("q1", 1);
    coeffs[0][1][0] = parse_field("q1", 1);
    CHECK(check_symmetry(AffineDynamicConnection(m, coeffs), sampler, 100).symmetric);
    coeffs[0][1][0] = parse_field("q1 + 1", 1);
    CHECK_FALSE(check_symmetry(AffineDynamicConnection(m, coeffs), sampler, 100).symmetric);
}

TEST_CASE("trivial cases of the dictionary and transformation laws") {
    Sampler sampler(101);
    const DynamicConnection g0 = connection_from_sode(DynamicEquation::zero(2));
    CHECK(max_difference(g0, DynamicConnection::zero(2), sampler, 50) == 0.0);
    jt::FieldGen gen(55);
    const DynamicConnection g = connection_from_sode(gen.equation(2));
    CHECK(max_difference(transform_connection(g, ChartTransform::identity(2)), g, sampler,
                         150) < 1e-12);
}
