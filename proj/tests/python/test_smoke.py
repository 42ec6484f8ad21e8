import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import rssa_lab as core

SCENARIO_DIR = Path(os.environ.get("RSSA_SCENARIO_DIR", Path(__file__).parents[2] / "scenarios"))


def test_xi_from_nominal_masses():
    xi = core.xi_from_masses(27.75, 13.80)
    assert xi == pytest.approx((1.775965, 0.33534, 0.46575), abs=1e-12)
    lo, hi = core.xi_interval()
    assert all(a <= b for a, b in zip(lo, hi))
    assert all(a <= x <= b for a, x, b in zip(lo, xi, hi))


def test_mass_matrix_and_closest_point():
    m = core.mass_matrix((2.0, 0.5, 0.3), 0.0)
    assert np.allclose(m, [[2.6, 0.8], [0.8, 0.5]])
    cp = core.closest_point((0.0, 0.0), (0.1, 0.1))
    assert cp["link"] == 1
    assert cp["d"] == pytest.approx(0.1)


def test_phi_values():
    assert core.phi(0.1, 0.0) == pytest.approx(0.0125)
    assert core.phi(0.3, 1.0) == pytest.approx(-0.0775)


def test_robust_control_toy():
    lie = [(0.0, (1.0, 0.0)), (0.0, (2.0, 0.0))]
    alpha, beta, feasible = core.feasibility(lie)
    assert feasible and alpha == pytest.approx(1.0) and beta == pytest.approx(1.0)
    assert core.solve_g_star(lie) == (0, pytest.approx(1.0))
    assert np.allclose(core.rssa_control(lie, 1.0), [-1.0, 0.0])
    with pytest.raises(core.InfeasibleError):
        core.rssa_control([(1.0, (1.0, 0.0)), (1.0, (-1.0, 0.0))], 1.0)


def test_baseline_projection():
    u = core.baseline_safe_control((0.0, 0.0), 0.0, (1.0, 1.0), 1.0, np.diag([4.0, 1.0]))
    assert np.allclose(u, [-0.2, -0.8])


def test_run_trial_metrics_and_determinism():
    text = (SCENARIO_DIR / "trial1.json").read_text()
    a = core.run_trial(text, "M4")
    b = core.run_trial(text, "M4")
    assert a["ticks"] == 1000 and not a["aborted"]
    assert a["VIOL"] == 0
    assert a["DIST"] == min(a["d"])
    assert a["AVG_DIST"] == pytest.approx(sum(a["d"]) / len(a["d"]), rel=1e-12)
    assert a == b


def test_batch_csv_shape():
    texts = [p.read_text() for p in sorted(SCENARIO_DIR.glob("*.json"))]
    csv = core.batch_csv(texts, core.methods())
    lines = csv.strip().split("\n")
    assert lines[0] == "trial,method,GOAL,VIOL,DIST,AVG_DIST,clipped_ticks,infeasible_ticks"
    assert len(lines) == 1 + len(texts) * 6
    assert csv == core.batch_csv(texts, core.methods())


def test_default_scenario_json_parses():
    sc = json.loads(core.default_scenario_json())
    assert sc["max_steps"] == 1000
    assert math.isclose(sc["safety"]["d_min_m"], 0.15)


def test_bad_input_raises():
    with pytest.raises(ValueError):
        core.run_trial("{", "M4")
    with pytest.raises(ValueError):
        core.run_trial(core.default_scenario_json(), "M7")
