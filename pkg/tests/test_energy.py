import csv
import io

import numpy as np
import pytest

from bihenon.energy import (
    TYPESET_FORM,
    blow_down,
    bulk_energy_slope,
    derivative_bound,
    energy_radial,
    energy_rate,
    expected_bulk_slope,
    hat_energy,
    monotonicity_check,
)
from bihenon.errors import InvalidParameters
from bihenon.params import ProblemParams
from bihenon.shooting import HOMOGENEOUS_CORE, from_state_function
from bihenon.singular import build_singular

from conftest import shoot


def test_monotone_on_shots(shot_10_0_4, shot_13_0_3, log_radii):
    for sol in (shot_10_0_4, shot_13_0_3):
        trace, verdict = monotonicity_check(sol, log_radii)
        assert verdict.passed, verdict
        assert np.all(np.diff(trace.E) > 0)


def test_rate_matches_central_difference(shot_10_0_4):
    sol = shot_10_0_4
    r = np.array([0.3, 1.0, 2.5, 4.0])
    h = 1e-3
    fd = (energy_radial(sol, r + h) - energy_radial(sol, r - h)) / (2 * h)
    assert np.allclose(fd, energy_rate(sol, r), rtol=1e-5)
    assert np.all(energy_rate(sol, r) >= derivative_bound(sol, r))


def test_typeset_form_is_not_monotone(shot_10_0_4, log_radii):
    _, verdict = monotonicity_check(shot_10_0_4, log_radii, form=TYPESET_FORM)
    assert not verdict.passed


def test_unknown_form(shot_10_0_4):
    with pytest.raises(ValueError):
        energy_radial(shot_10_0_4, 1.0, form="other")


def test_subcritical_rejected():
    sol = shoot(10, 0, 2.0, -1.0, r_max=2.0)
    with pytest.raises(InvalidParameters):
        monotonicity_check(sol, [0.5, 1.0])


@pytest.mark.parametrize("tau", [0.5, 2.0, 4.0])
def test_blow_down_scale_invariance(shot_13_0_3, tau):
    sol = shot_13_0_3
    scaled = blow_down(sol, tau)
    r = np.array([0.05, 0.2, 1.0, 2.0])
    r = r[(tau * r >= sol.r_start) & (tau * r <= sol.r_end)]
    assert np.allclose(energy_radial(scaled, r), energy_radial(sol, tau * r), rtol=1e-9)
    assert np.allclose(hat_energy(scaled, r), hat_energy(sol, tau * r), rtol=1e-9)


def test_singular_energy_constant(singular_10_0_4):
    r = np.linspace(0.5, 2.0, 16)
    E = energy_radial(singular_10_0_4, r)
    assert np.max(np.abs(E / E[0] - 1)) < 1e-6
    assert np.allclose(derivative_bound(singular_10_0_4, r), 0, atol=1e-9 * abs(E[0]))


def test_exact_singular_energy_constant():
    params = ProblemParams(13, 0, 3)
    sing = build_singular(params)
    sol = from_state_function(params, sing.state, np.geomspace(0.1, 10, 60), HOMOGENEOUS_CORE)
    E = energy_radial(sol, np.geomspace(0.2, 8, 12))
    assert np.max(np.abs(E / E[0] - 1)) < 1e-10


def test_trace_csv(shot_10_0_4, log_radii):
    trace, _ = monotonicity_check(shot_10_0_4, log_radii[:5])
    rows = list(csv.reader(io.StringIO(trace.to_csv())))
    assert rows[0] == ["r", "E", "dE_bound", "dE_estimate"]
    assert len(rows) == 6
    assert float(rows[1][0]) == log_radii[0]


def test_bulk_slope_on_singular(singular_10_0_4):
    params = singular_10_0_4.params
    slope = bulk_energy_slope(singular_10_0_4)
    assert slope == pytest.approx(expected_bulk_slope(params), rel=0.02)


def test_bulk_slope_zero_solution():
    params = ProblemParams(10, 0, 4)
    sol = from_state_function(params, lambda r: np.zeros((4,) + np.shape(r)),
                              np.linspace(0.1, 5, 20))
    assert np.isnan(bulk_energy_slope(sol))
