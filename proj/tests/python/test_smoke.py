import numpy as np
import pytest

import oddac


def test_version():
    assert oddac.__version__ == "0.1.0"


def test_benchmark_lipschitz():
    sc = oddac.load_scenario("paper-ltv")
    assert 0.0025 <= oddac.estimate_lipschitz(sc) <= 0.0055
    assert sc.A(0).shape == (5, 5)
    assert sc.B(0).shape == (5, 2)


def test_lti_run_is_certified():
    sc = oddac.load_scenario("paper-lti")
    res = oddac.run(sc)
    assert res.states.shape == (sc.horizon + 1, 5)
    assert res.inputs.shape == (sc.horizon + 1, 2)
    assert [u["status"] for u in res.updates] == ["feasible"] * 10
    assert oddac.analyze(sc, res)["passed"]
    assert res.norm_x[-1] < 1e-6


def test_static_mode_and_csv():
    sc = oddac.load_scenario("paper-ltv")
    res = oddac.run(sc, mode="static", seed=3)
    assert set(res.modes) == {"static"}
    text = res.csv()
    assert "\r" not in text
    assert "t,x1,x2,x3,x4,x5,u1,u2,norm_x,mode,gain_index,solver_status\n" in text
    assert "# seed 3\n" in text


def test_solve_window_exact_data():
    sc = oddac.load_scenario("paper-lti")
    rng = np.random.default_rng(0)
    A, B = sc.A(0), sc.B(0)
    X = rng.standard_normal((5, 10))
    U = rng.standard_normal((2, 10))
    cert = oddac.solve_window(sc, X, U, A @ X + B @ U)
    assert cert["status"] == "feasible"
    Acl = A + B @ cert["K"]
    P = cert["P"]
    assert np.linalg.eigvalsh(0.9 * P - Acl.T @ P @ Acl).min() >= -1e-7


def test_errors_and_dwell():
    assert oddac.check_dwell(2.0, 0.9, 7)
    assert not oddac.check_dwell(2.0, 0.9, 6)
    with pytest.raises(oddac.OddacError):
        oddac.load_scenario("/nonexistent/scenario.json")
    with pytest.raises(ValueError):
        oddac.scenario_from_json("{")
