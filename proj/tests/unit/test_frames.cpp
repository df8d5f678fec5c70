#include <doctest.h>

#include <cmath>

#include "jetflow/frames.hpp"
#include "jetflow/parser.hpp"
#include "test_support.hpp"

using namespace jetflow;
namespace jt = jetflow::testing;

namespace {

// Geodesic frame for the oscillator on |t| < pi/2: Gamma = -q tan(t).
ReferenceFrame oscillator_geodesic_frame() {
    return ReferenceFrame({parse_field("-q1*sin(t)/cos(t)", 1)});
}

SampleBox narrow_time_box() {
    SampleBox box;
    box.t_min = -1.2;
    box.t_max = 1.2;
    return box;
}

}  // namespace

TEST_CASE("relative velocity") {
    const ReferenceFrame rest = ReferenceFrame::rest(1);
    CHECK(relative_velocity(rest, JetPoint{0.0, {1.0}, {7.0}})[0] == doctest::Approx(7.0));
    const ReferenceFrame drift({parse_field("t", 1)});
    CHECK(relative_velocity(drift, JetPoint{1.0, {0.0}, {3.0}})[0] == doctest::Approx(2.0));
    CHECK(relative_velocity(drift, JetPoint{1.0, {0.0}, {1.0}})[0] == doctest::Approx(0.0));
}

TEST_CASE("frames must be velocity independent") {
    CHECK_THROWS_AS(ReferenceFrame({parse_field("v1", 1)}), DimensionMismatch);
}

TEST_CASE("frame connection") {
    Sampler sampler(3);
    SUBCASE("rest frame with a velocity-free connection vanishes") {
        DynamicConnection g = DynamicConnection::zero(2);
        g.gamma[0][0] = parse_field("sin(q2)", 2);
        g.gamma[1][1] = parse_field("t*q1", 2);
        g.gamma0[0] = parse_field("q1", 2);
        const FrameConnection fc = frame_connection(g, ReferenceFrame::rest(2));
        CHECK(max_difference(fc.connection, DynamicConnection::zero(2), sampler, 100) < 1e-14);
    }
    SUBCASE("zero connection leaves the frame derivative terms") {
        const ReferenceFrame fr({parse_field("sin(q2)", 2), parse_field("t*q1", 2)});
        const FrameConnection fc = frame_connection(DynamicConnection::zero(2), fr);
        // gamma_Gamma^i_k = d_k Gamma^i
        CHECK(jetflow::max_difference(fc.connection.gamma[0][1], parse_field("cos(q2)", 2),
                                      sampler, 100) < 1e-13);
        CHECK(jetflow::max_difference(fc.connection.gamma[1][0], parse_field("t", 2), sampler,
                                      100) < 1e-13);
        // gamma_Gamma^i_0 = d_t Gamma^i (free velocity) - Gamma^k d_k Gamma^i
        const ScalarField expected0 =
            parse_field("v2*cos(q2) - t*q1*cos(q2)", 2);
        CHECK(jetflow::max_difference(fc.connection.gamma0[0], expected0, sampler, 100) <
              1e-13);
        const ScalarField expected1 =
            parse_field("q1 + v1*t - sin(q2)*t", 2);
        CHECK(jetflow::max_difference(fc.connection.gamma0[1], expected1, sampler, 100) <
              1e-13);
    }
    SUBCASE("oscillator in the rest frame keeps its spatial block") {
        const DynamicConnection g = connection_from_sode(jt::oscillator());
        const FrameConnection fc = frame_connection(g, ReferenceFrame::rest(1));
        CHECK(max_value(fc.connection.gamma[0][0], sampler, 50) == 0.0);
        CHECK(max_value(fc.connection.gamma0[0], sampler, 50) == 0.0);
    }
}

TEST_CASE("frame lift") {
    Sampler sampler(5);
    SUBCASE("rest frame with velocity-free connection lifts to zero") {
        DynamicConnection g = DynamicConnection::zero(1);
        g.gamma[0][0] = parse_field("q1", 1);
        g.gamma0[0] = parse_field("sin(t)", 1);
        const DynamicEquation lift = frame_lift(g, ReferenceFrame::rest(1));
        CHECK(max_value(lift.xi[0], sampler, 100) < 1e-14);
    }
    SUBCASE("zero connection lift matches the direct formula") {
        const ReferenceFrame fr({parse_field("q1*t", 1)});
        const DynamicEquation lift = frame_lift(DynamicConnection::zero(1), fr);
        const ScalarField expected = parse_field("q1 + v1*t + t*(v1 - q1*t)", 1);
        CHECK(jetflow::max_difference(lift.xi[0], expected, sampler, 150) < 1e-12);
    }
    SUBCASE("on the frame section the lift is the frame's total derivative") {
        jt::FieldGen gen(7);
        const DynamicEquation eq = gen.equation(2);
        const ReferenceFrame fr({parse_field("sin(t)*q2", 2), parse_field("q1", 2)});
        const DynamicEquation lift = frame_lift(connection_from_sode(eq), fr);
        for (int i = 0; i < 2; ++i) {
            ScalarField dt_gamma = fr.Gamma[i].partial(sym_t());
            for (int j = 1; j <= 2; ++j)
                dt_gamma = dt_gamma + ScalarField::velocity(2, j) * fr.Gamma[i].partial(sym_q(j));
            const ScalarField residual = compose_with_frame(lift.xi[i] - dt_gamma, fr);
            CHECK(max_value(residual, sampler, 150) < 1e-12);
        }
    }
}

TEST_CASE("relative acceleration") {
    Sampler sampler(11);
    SUBCASE("free motion in its proper frame has none") {
        const auto a = relative_acceleration(DynamicEquation::zero(2), ReferenceFrame::rest(2));
        for (const auto& comp : a) CHECK(max_value(comp, sampler, 50) == 0.0);
    }
    SUBCASE("oscillator in the rest frame keeps its force") {
        const auto a = relative_acceleration(jt::oscillator(), ReferenceFrame::rest(1));
        CHECK(jetflow::max_difference(a[0], parse_field("-q1", 1), sampler, 100) < 1e-14);
    }
    SUBCASE("proper-coordinate shortcut equals the general route") {
        jt::FieldGen gen(13);
        for (int trial = 0; trial < 6; ++trial) {
            const int m = 1 + trial % 3;
            const DynamicEquation eq = gen.equation(m);
            const auto proper = relative_acceleration_proper(eq);
            const DynamicEquation lift =
                frame_lift(connection_from_sode(eq), ReferenceFrame::rest(m));
            Sampler s(trial + 60);
            for (int i = 0; i < m; ++i)
                CHECK(jetflow::max_difference(eq.xi[i] - lift.xi[i], proper[i], s, 150) <
                      1e-12);
        }
    }
    SUBCASE("geodesic frames see no acceleration along their sections") {
        const auto a = relative_acceleration(jt::oscillator(), oscillator_geodesic_frame());
        const ScalarField on_frame = compose_with_frame(a[0], oscillator_geodesic_frame());
        Sampler s(14);
        CHECK(max_value(on_frame, s, 150, narrow_time_box()) < 1e-10);
    }
    SUBCASE("integral sections of a geodesic frame solve the equation") {
        // q' = Gamma(t, q) for Gamma = -q tan t has solutions q = C cos t,
        // which are oscillator motions.
        IntegratorConfig cfg;
        cfg.window = 1.2;
        const Trajectory traj = integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg);
        const ReferenceFrame fr = oscillator_geodesic_frame();
        for (const auto& sample : traj.samples) {
            const JetPoint p{sample.t, {sample.state[0]}, {sample.state[1]}};
            const auto rel = relative_velocity(fr, p);
            CHECK(std::abs(rel[0]) < 1e-8);
        }
    }
}

TEST_CASE("relative acceleration transforms as a vertical vector") {
    Sampler sampler(17);
    const DynamicEquation eq({parse_field("-q1 + 0.3*v2", 2), parse_field("sin(q1)", 2)});
    const ReferenceFrame fr({parse_field("0.2*q2", 2), parse_field("sin(t)", 2)});
    const std::vector<ChartTransform> charts = {jt::rotation_chart(),
                                                jt::boost_chart(2, {0.5, -1.0}, 0.3)};
    for (const auto& chart : charts) {
        const auto a = relative_acceleration(eq, fr);
        const auto pushed = pushforward_vertical(a, chart);
        const auto native =
            relative_acceleration(transform_sode(eq, chart), transform_frame(fr, chart));
        for (int i = 0; i < 2; ++i)
            CHECK(jetflow::max_difference(pushed[i], native[i], sampler, 150) < 1e-7);
    }
}

TEST_CASE("free motion in general coordinates keeps zero relative acceleration") {
    // a_Gamma of the rotated free motion, with the frame carried along, stays
    // the zero vector field.
    Sampler sampler(19);
    const ChartTransform rot = jt::rotation_chart();
    const DynamicEquation rotated = transform_sode(DynamicEquation::zero(2), rot);
    const ReferenceFrame carried = transform_frame(ReferenceFrame::rest(2), rot);
    const auto a = relative_acceleration(rotated, carried);
    for (const auto& comp : a) CHECK(max_value(comp, sampler, 150) < 1e-10);
}

TEST_CASE("inertial-force formula matches the chart transform of free motion") {
    // The general-coordinate free motion equation assembled from the frame
    // and the chart's second derivatives, compared against transform_sode.
    // The chart q' = q + 0.2 q^2 - t is spatially non-linear and
    // time-dependent, so every term of the formula is exercised.
    Sampler sampler(23);
    const int m = 1;
    const ChartTransform chart(
        {parse_field("q1 + 0.2*q1^2 - t", 1)},
        {parse_field("(sqrt(1 + 0.8*(q1 + t)) - 1)/0.4", 1)}, 0.0);
    SampleBox primed;
    primed.t_min = -0.5;
    primed.t_max = 0.5;
    primed.q_min = -0.3;
    primed.q_max = 0.6;

    const DynamicEquation via_transform = transform_sode(DynamicEquation::zero(m), chart);
    const ReferenceFrame gamma = transform_frame(ReferenceFrame::rest(m), chart);

    std::vector<ScalarField> assembled;
    for (int i = 0; i < m; ++i) {
        ScalarField e = gamma.Gamma[i].partial(sym_t());
        for (int j = 1; j <= m; ++j) {
            e = e + ScalarField::velocity(m, j) * gamma.Gamma[i].partial(sym_q(j));
            e = e + gamma.Gamma[i].partial(sym_q(j)) *
                        (ScalarField::velocity(m, j) - gamma.Gamma[j - 1]);
        }
        // second-derivative term: - dq^i/dqbar^m * d2 qbar^m/dq^j dq^k (v-G)(v-G)
        for (int mm = 1; mm <= m; ++mm) {
            const ScalarField jac =
                pullback_jet_field(chart, chart.forward[i].partial(sym_q(mm)));
            for (int j = 1; j <= m; ++j)
                for (int k = 1; k <= m; ++k) {
                    const ScalarField second =
                        chart.inverse[mm - 1].partial(sym_q(j)).partial(sym_q(k));
                    e = e - jac * second * (ScalarField::velocity(m, j) - gamma.Gamma[j - 1]) *
                                (ScalarField::velocity(m, k) - gamma.Gamma[k - 1]);
                }
        }
        assembled.push_back(e);
    }
    CHECK(max_difference(DynamicEquation(assembled), via_transform, sampler, 200, primed) <
          1e-9);
}

TEST_CASE("covariant residual along integrated motions") {
    IntegratorConfig cfg;
    cfg.window = 1.5;
    SUBCASE("free motion, proper frame") {
        const Trajectory traj =
            integrate_sode(DynamicEquation::zero(1), JetPoint{0.0, {1.0}, {2.0}}, cfg);
        CHECK(vertical_covariant_residual(DynamicEquation::zero(1), ReferenceFrame::rest(1),
                                          traj) < 1e-8);
    }
    SUBCASE("oscillator, rest frame, quarter period") {
        IntegratorConfig quarter = cfg;
        quarter.window = 3.14159265358979312 / 2.0;
        const Trajectory traj = integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}},
                                               quarter);
        CHECK(vertical_covariant_residual(jt::oscillator(), ReferenceFrame::rest(1), traj) <
              1e-6);
    }
    SUBCASE("the covariant form survives a chart change") {
        // Push the oscillator's motion into a rotating-like chart and check
        // the residual against the transformed equation and frame.
        const ChartTransform chart = jt::exp_scale_chart(1, 0.3);
        const DynamicEquation eq = jt::oscillator();
        const Trajectory traj = integrate_sode(eq, JetPoint{0.0, {1.0}, {0.0}}, cfg);
        const Trajectory pushed = pushforward_trajectory(chart, traj, eq);
        const DynamicEquation eq_p = transform_sode(eq, chart);
        const ReferenceFrame fr_p = transform_frame(ReferenceFrame::rest(1), chart);
        CHECK(vertical_covariant_residual(eq_p, fr_p, pushed) < 1e-5);
    }
    SUBCASE("the covariant form survives a rotating chart") {
        const ChartTransform rot = jt::rotation_chart();
        const DynamicEquation eq({parse_field("-q1", 2), parse_field("-q2", 2)});
        // dense sampling keeps the interpolation error of the pushed motion
        // below the finite-difference tolerance
        IntegratorConfig dense = cfg;
        dense.max_step = 0.02;
        const Trajectory traj =
            integrate_sode(eq, JetPoint{0.0, {1.0, 0.0}, {0.0, 0.5}}, dense);
        const Trajectory pushed = pushforward_trajectory(rot, traj, eq);
        const DynamicEquation eq_p = transform_sode(eq, rot);
        const ReferenceFrame fr_p = transform_frame(ReferenceFrame::rest(2), rot);
        CHECK(vertical_covariant_residual(eq_p, fr_p, pushed) < 1e-5);
    }
    SUBCASE("dimension mismatches are reported") {
        const Trajectory traj =
            integrate_sode(DynamicEquation::zero(1), JetPoint{0.0, {1.0}, {2.0}}, cfg);
        CHECK_THROWS_AS(vertical_covariant_residual(DynamicEquation::zero(2),
                                                    ReferenceFrame::rest(2), traj),
                        TrajectoryMismatch);
    }
}

TEST_CASE("a motion extends to a frame with zero relative velocity along it") {
    IntegratorConfig cfg;
    cfg.window = 2.0;
    const DynamicEquation eq({parse_field("-q1 - 0.1*v1", 1)});
    const Trajectory traj = integrate_sode(eq, JetPoint{0.0, {1.0}, {0.5}}, cfg);
    const ReferenceFrame fr = frame_from_motion(traj, 1);
    for (double t = 0.1; t < 2.0; t += 0.23) {
        const std::vector<double> s = traj.state_at(t);
        const JetPoint p{t, {s[0]}, {s[1]}};
        CHECK(std::abs(relative_velocity(fr, p)[0]) < 1e-6);
    }
}
