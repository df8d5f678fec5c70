#include <doctest.h>

#include <cmath>

#include "jetflow/integrate.hpp"
#include "jetflow/parser.hpp"
#include "test_support.hpp"

using namespace jetflow;
namespace jt = jetflow::testing;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("free motion integrates to a straight line") {
    IntegratorConfig cfg;
    cfg.window = 1.0;
    const Trajectory traj =
        integrate_sode(DynamicEquation::zero(1), JetPoint{0.0, {1.0}, {2.0}}, cfg);
    CHECK(traj.status == TrajectoryStatus::Complete);
    CHECK(std::abs(traj.samples.back().state[0] - 3.0) < 1e-10);
    CHECK(std::abs(traj.samples.back().state[1] - 2.0) < 1e-12);
}

TEST_CASE("oscillator hits the quarter-period zero") {
    IntegratorConfig cfg;
    cfg.window = kPi / 2.0;
    const Trajectory traj = integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg);
    CHECK(traj.status == TrajectoryStatus::Complete);
    CHECK(std::abs(traj.samples.back().state[0]) < 1e-8);
}

TEST_CASE("dense output tracks the closed form between nodes") {
    IntegratorConfig cfg;
    cfg.window = 3.0;
    const Trajectory traj = integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg);
    for (double t = 0.05; t < 3.0; t += 0.173) {
        const std::vector<double> s = traj.state_at(t);
        CHECK(std::abs(s[0] - std::cos(t)) < 1e-7);
        CHECK(std::abs(s[1] + std::sin(t)) < 1e-7);
    }
}

TEST_CASE("velocity-squared blow-up ends in StepFailure before the pole") {
    // v' = v^2 with v(0) = 1 blows up at t = 1.
    IntegratorConfig cfg;
    cfg.window = 2.0;
    const Trajectory traj =
        integrate_sode(DynamicEquation({parse_field("v1^2", 1)}), JetPoint{0.0, {0.0}, {1.0}},
                       cfg);
    CHECK(traj.status == TrajectoryStatus::StepFailure);
    CHECK(traj.t_back() < 1.0);
    CHECK(traj.t_back() > 0.9);  // partial data reaches near the pole
    // closed form v = 1/(1-t) along the partial trajectory
    const std::vector<double> mid = traj.state_at(0.5);
    CHECK(std::abs(mid[1] - 2.0) < 1e-7);
}

TEST_CASE("energy drift over one hundred oscillator periods stays below 1e-6") {
    IntegratorConfig cfg;
    cfg.window = 200.0 * kPi;
    cfg.max_step = 0.5;
    const Trajectory traj = integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg);
    REQUIRE(traj.status == TrajectoryStatus::Complete);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        const double energy = 0.5 * s.state[1] * s.state[1] + 0.5 * s.state[0] * s.state[0];
        worst = std::max(worst, std::abs(energy - 0.5));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("fixed-step RK4 is deterministic and lands on the window end") {
    IntegratorConfig cfg;
    cfg.method = IntegratorMethod::RK4Fixed;
    cfg.max_step = 0.01;
    cfg.window = 1.0;
    const Trajectory a = integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg);
    const Trajectory b = integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].t == b.samples[i].t);
        CHECK(a.samples[i].state == b.samples[i].state);
    }
    CHECK(a.t_back() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(a.samples.back().state[0] - std::cos(1.0)) < 1e-9);
}

TEST_CASE("geodesic flow of the zero connection is straight in all components") {
    IntegratorConfig cfg;
    cfg.window = 2.0;
    const TangentPoint p0{{0.0, 1.0}, {1.0, -0.5}};
    const Trajectory traj = integrate_geodesic(TangentConnection::zero(1), p0, cfg);
    REQUIRE(traj.status == TrajectoryStatus::Complete);
    const auto& last = traj.samples.back().state;
    CHECK(std::abs(last[0] - 2.0) < 1e-10);   // x0
    CHECK(std::abs(last[1] - 0.0) < 1e-10);   // x1 = 1 - 0.5 * 2
    CHECK(std::abs(last[2] - 1.0) < 1e-14);   // xdot0
    CHECK(std::abs(last[3] + 0.5) < 1e-14);   // xdot1
}

TEST_CASE("temporally trivial lifts keep xdot0 pinned to one") {
    Sampler sampler(5);
    const DynamicEquation eq({parse_field("-q1 - 0.1*v1", 1)});
    const TangentConnection k =
        lift_to_tangent(connection_from_sode(eq), LiftMode::Substitution, sampler);
    IntegratorConfig cfg;
    cfg.window = 5.0;
    const Trajectory traj = integrate_geodesic(k, lift_point(JetPoint{0.0, {1.0}, {0.0}}), cfg);
    REQUIRE(traj.status == TrajectoryStatus::Complete);
    for (const auto& s : traj.samples) CHECK(std::abs(s.state[2] - 1.0) < 1e-10);
}

TEST_CASE("geodesic lift reproduces the dynamic flow") {
    Sampler sampler(7);
    jt::FieldGen gen(23);
    for (int trial = 0; trial < 4; ++trial) {
        const int m = 1 + trial % 2;
        const DynamicEquation eq = gen.tame_equation(m);
        const TangentConnection k =
            lift_to_tangent(connection_from_sode(eq), LiftMode::Substitution, sampler);
        IntegratorConfig cfg;
        cfg.window = 5.0;
        JetPoint p0{0.0, std::vector<double>(m, 0.4), std::vector<double>(m, -0.2)};
        const Trajectory sode = integrate_sode(eq, p0, cfg);
        const Trajectory geo = integrate_geodesic(k, lift_point(p0), cfg);
        REQUIRE(sode.status == TrajectoryStatus::Complete);
        REQUIRE(geo.status == TrajectoryStatus::Complete);
        CHECK(compare_trajectories(sode, sode_projection(m), geo, geodesic_jet_projection(m)) <
              1e-9);
    }
}

TEST_CASE("trajectory comparison") {
    IntegratorConfig cfg;
    cfg.window = 1.0;
    const JetPoint p0{0.0, {1.0}, {0.0}};
    const Trajectory osc = integrate_sode(jt::oscillator(), p0, cfg);
    SUBCASE("a trajectory matches itself") {
        CHECK(compare_trajectories(osc, sode_projection(1), osc, sode_projection(1)) == 0.0);
    }
    SUBCASE("oscillator vs free particle peaks at |1 - cos 1|") {
        const Trajectory line = integrate_sode(DynamicEquation::zero(1), p0, cfg);
        const double dev = compare_trajectories(osc, sode_position_projection(1), line,
                                                sode_position_projection(1));
        CHECK(dev == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-6));
    }
    SUBCASE("disjoint windows raise NoOverlap") {
        const Trajectory late =
            integrate_sode(jt::oscillator(), JetPoint{5.0, {1.0}, {0.0}}, cfg);
        CHECK_THROWS_AS(
            compare_trajectories(osc, sode_projection(1), late, sode_projection(1)), NoOverlap);
    }
}

TEST_CASE("invalid configurations are rejected") {
    IntegratorConfig cfg;
    cfg.abs_tol = 0.0;
    CHECK_THROWS_AS(
        integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg), DimensionMismatch);
    IntegratorConfig cfg2;
    cfg2.window = -1.0;
    CHECK_THROWS_AS(
        integrate_sode(jt::oscillator(), JetPoint{0.0, {1.0}, {0.0}}, cfg2), DimensionMismatch);
}

TEST_CASE("domain failure at the initial point propagates") {
    IntegratorConfig cfg;
    const DynamicEquation eq({parse_field("1/q1", 1)});
    CHECK_THROWS_AS(integrate_sode(eq, JetPoint{0.0, {0.0}, {0.0}}, cfg), DomainError);
}
