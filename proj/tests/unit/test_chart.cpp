#include <doctest.h>

#include <cmath>

#include "jetflow/chart.hpp"
#include "jetflow/parser.hpp"
#include "test_support.hpp"

using namespace jetflow;
namespace jt = jetflow::testing;

TEST_CASE("identity chart leaves jet points unchanged") {
    const ChartTransform id = ChartTransform::identity(2);
    const JetPoint p{0.4, {1.0, -2.0}, {0.5, 3.0}};
    const JetPoint out = pushforward_jet(id, p);
    CHECK(out.t == p.t);
    CHECK(out.q == p.q);
    CHECK(out.v == p.v);
}

TEST_CASE("Galilean boost shifts velocities by the boost rate") {
    const ChartTransform boost = jt::boost_chart(1, {1.0});
    const JetPoint out = pushforward_jet(boost, JetPoint{0.0, {1.0}, {2.0}});
    CHECK(out.q[0] == doctest::Approx(1.0));
    CHECK(out.v[0] == doctest::Approx(1.0));  // d_t(q - t) = v - 1
}

TEST_CASE("rotation by angle t round-trips") {
    const ChartTransform rot = jt::rotation_chart();
    Sampler sampler(31);
    const ChartTransform inv = inverse_chart(rot);
    for (int i = 0; i < 100; ++i) {
        const JetPoint p = sampler.next_jet(2);
        const JetPoint back = pushforward_jet(inv, pushforward_jet(rot, p));
        CHECK(std::abs(back.t - p.t) < 1e-10);
        for (int k = 0; k < 2; ++k) {
            CHECK(std::abs(back.q[k] - p.q[k]) < 1e-10);
            CHECK(std::abs(back.v[k] - p.v[k]) < 1e-10);
        }
    }
}

TEST_CASE("chart validation reports round trip and Jacobian bounds") {
    Sampler sampler(7);
    const ChartValidation v = validate_chart(jt::parabolic_chart(1, 0.2), sampler, 100,
                                             jt::parabolic_box());
    CHECK(v.max_round_trip_error < 1e-10);
    CHECK(v.min_abs_jacobian_det > 1e-12);
}

TEST_CASE("time shift moves the time coordinate only") {
    std::vector<ScalarField> fwd = {ScalarField::coord(1, 1)};
    std::vector<ScalarField> inv = {ScalarField::coord(1, 1)};
    const ChartTransform shift(fwd, inv, 2.5);
    const JetPoint out = pushforward_jet(shift, JetPoint{1.0, {4.0}, {5.0}});
    CHECK(out.t == doctest::Approx(3.5));
    CHECK(out.q[0] == doctest::Approx(4.0));
    CHECK(out.v[0] == doctest::Approx(5.0));
}

TEST_CASE("singular Jacobian is detected") {
    // q' = q^2 is singular at q = 0.
    std::vector<ScalarField> fwd = {parse_field("q1^2", 1)};
    std::vector<ScalarField> inv = {parse_field("sqrt(q1)", 1)};
    const ChartTransform chart(fwd, inv, 0.0);
    CHECK_THROWS_AS(pushforward_jet(chart, JetPoint{0.0, {0.0}, {1.0}}), SingularJacobian);
}

TEST_CASE("velocity-dependent transition functions are rejected") {
    CHECK_THROWS_AS(ChartTransform({parse_field("q1 + v1", 1)}, {parse_field("q1", 1)}, 0.0),
                    DimensionMismatch);
}

TEST_CASE("pullback re-expresses fields in the primed chart") {
    // Under the boost q' = q - t, the unprimed field v re-expresses as v' + 1.
    const ChartTransform boost = jt::boost_chart(1, {1.0});
    const ScalarField pulled = pullback_jet_field(boost, ScalarField::velocity(1, 1));
    CHECK(pulled.eval(JetPoint{0.3, {2.0}, {5.0}}) == doctest::Approx(6.0));
}

TEST_CASE("tangent pullback respects the extra velocity slot") {
    const ChartTransform boost = jt::boost_chart(1, {1.0});
    // v = v' + xdot0 under the boost when xdot0 is free.
    const ScalarField pulled = pullback_tangent_field(boost, ScalarField::velocity(1, 1));
    Point p;
    p.t = 0.0;
    p.q = {1.0};
    p.v = {5.0};
    p.vt = 2.0;
    CHECK(pulled.eval(p) == doctest::Approx(7.0));
}

TEST_CASE("tangent pushforward keeps xdot0 and is linear in velocities") {
    const ChartTransform rot = jt::rotation_chart();
    const TangentPoint p{{0.5, 1.0, 2.0}, {1.5, -1.0, 0.5}};
    const TangentPoint out = pushforward_tangent(rot, p);
    CHECK(out.xdot[0] == doctest::Approx(1.5));
    // doubling xdot doubles the pushed xdot
    TangentPoint p2 = p;
    for (auto& x : p2.xdot) x *= 2.0;
    const TangentPoint out2 = pushforward_tangent(rot, p2);
    for (int i = 0; i <= 2; ++i) CHECK(out2.xdot[i] == doctest::Approx(2.0 * out.xdot[i]));
}
