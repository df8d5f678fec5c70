import math

import pytest

import jetflow


def test_parse_eval_and_partial():
    f = jetflow.ScalarField("sin(t) + q1*v1", dim=1)
    assert f.eval(0.0, [2.0], [3.0]) == pytest.approx(6.0)
    df = f.partial("v1")
    assert df.eval(0.0, [2.0], [3.0]) == pytest.approx(2.0)


def test_domain_error():
    f = jetflow.ScalarField("1/q1", dim=1)
    with pytest.raises(jetflow.DomainError):
        f.eval(0.0, [0.0], [0.0])


def test_roundtrip_equation_connection():
    eq = jetflow.DynamicEquation(["-q1 - 0.2*v1"], dim=1)
    g = jetflow.connection_from_sode(eq)
    back = jetflow.sode_from_connection(g)
    assert jetflow.equation_difference(eq, back, seed=1) < 1e-12
    oracle = jetflow.vhat_oracle(eq)
    assert jetflow.connection_difference(oracle, g, seed=1) < 1e-9


def test_oscillator_integration():
    eq = jetflow.DynamicEquation(["-q1"], dim=1)
    traj = jetflow.integrate_sode(eq, t=0.0, q=[1.0], v=[0.0], window=math.pi / 2)
    assert traj["status"] == "complete"
    assert abs(traj["states"][-1][0]) < 1e-8


def test_geodesic_lift_equivalence():
    eq = jetflow.DynamicEquation(["-q1 - 0.1*v1"], dim=1)
    assert jetflow.geodesic_deviation(eq, 0.0, [1.0], [0.0], window=3.0) < 1e-9


def test_flatness_verdicts():
    free = jetflow.DynamicEquation(["0", "0"], dim=2)
    report = jetflow.is_free_motion_candidate(free, seed=3)
    assert report["candidate"]
    osc = jetflow.DynamicEquation(["-q1"], dim=1)
    report = jetflow.is_free_motion_candidate(osc, seed=3)
    assert report["quadratic"] and not report["flat"]
    assert report["max_curvature"] == pytest.approx(1.0, abs=1e-9)


def test_transform_covariance():
    chart = jetflow.ChartTransform(forward=["q1 - t"], inverse=["q1 + t"])
    eq = jetflow.DynamicEquation(["-q1"], dim=1)
    a = jetflow.transform_connection(jetflow.connection_from_sode(eq), chart)
    b = jetflow.connection_from_sode(jetflow.transform_sode(eq, chart))
    assert jetflow.connection_difference(a, b, seed=5) < 1e-8


def test_relativize_verdicts():
    minkowski = [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "-1"]]
    magnetic = jetflow.DynamicEquation(["0.5*v2", "-0.5*v1"], dim=2)
    assert jetflow.relativize(magnetic, minkowski, seed=9)["verdict"] == "lorentz_type"
    friction = jetflow.DynamicEquation(["-0.2*v1", "0"], dim=2)
    assert jetflow.relativize(friction, minkowski, seed=9)["verdict"] == "not_lorentz_type"


def test_lagrange_sode_recovers_oscillator():
    eq = jetflow.lagrange_sode(mass=[["1"]], k=["0"], f="-(1 + 0.5*q1^2)", seed=2)
    expected = jetflow.DynamicEquation(["-q1"], dim=1)
    assert jetflow.equation_difference(eq, expected, seed=2) < 1e-9


def test_relative_acceleration_proper_frame():
    eq = jetflow.DynamicEquation(["-q1"], dim=1)
    rest = jetflow.ReferenceFrame(["0"], dim=1)
    (a,) = jetflow.relative_acceleration(eq, rest)
    f = jetflow.ScalarField(a, dim=1)
    assert f.eval(0.0, [2.0], [1.5]) == pytest.approx(-2.0)


def test_run_scenario_reports():
    scenario = '{"dim": 1, "xi": ["-q1"], "seed": 4}'
    out = jetflow.run_scenario("flatness", scenario, out_dir=".", seed=4)
    assert out["exit_code"] == 0
    assert '"maxR": 1' in out["report_json"]
