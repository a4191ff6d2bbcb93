import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import triods
from heistriod.curves import TriodState
from heistriod.diagnostics import (
    ENERGY_COLUMNS,
    curvature_sum_test,
    energy_series,
    junction_angle_defect,
    lambda_from_system,
    lambda_to_multiplier,
    lift_triod,
    multiplier_to_lambda,
    stationarity_report,
)
from heistriod.exceptions import StabilityViolation
from heistriod.flow import FlowOutcome, FlowStatus, StepReport, run_flow, solve_step
from heistriod.geometry import horizontality_residual
from test_flow import type_two_triod


def _spokes(ends, J=4):
    u = np.linspace(0.0, 1.0, J + 1)[:, None]
    curves = np.stack([u * np.asarray(e, dtype=float) for e in ends])
    curves[:, -1] = ends
    return TriodState.from_curves(curves)


def test_angle_defect_examples(steiner_state):
    assert junction_angle_defect(steiner_state) == pytest.approx(0.0, abs=1e-15)
    exp2 = _spokes([[-0.5, 0.0], [1.0, -3.0], [1.0, 3.0]])
    assert junction_angle_defect(exp2) == pytest.approx(1 - 2 / math.sqrt(10), abs=1e-14)
    assert junction_angle_defect(exp2) == pytest.approx(0.3675, abs=1e-4)


def test_angle_defect_of_parallel_tangents():
    curves = np.zeros((3, 3, 2))
    for a, r in enumerate((1.0, 2.0, 3.0)):
        curves[a, 1] = [r / 2, 0.0]
        curves[a, 2] = [r, 0.01 * a]
    state = TriodState(curves[0, 0], curves[:, 1:-1], curves[:, -1])
    assert junction_angle_defect(state) == pytest.approx(3.0)


@given(triods(), st.floats(0, 2 * math.pi), st.floats(-3, 3))
def test_angle_defect_range_and_invariance(state, theta, shift):
    d = junction_angle_defect(state)
    assert 0.0 <= d <= 3.0
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    assert junction_angle_defect(state.transformed(R, (shift, -shift))) == pytest.approx(d, abs=1e-12)


def test_multiplier_examples():
    assert multiplier_to_lambda([0.0, 0.0, 0.0]) == (0.0, 0.0)
    assert multiplier_to_lambda([-1.0, -1.0, 2.0]) == (1.0, 2.0)
    with pytest.raises(ValueError):
        multiplier_to_lambda([1.0, 1.0, 1.0])


@given(st.floats(-100, 100), st.floats(-100, 100))
def test_multiplier_roundtrip(l1, l2):
    mu = lambda_to_multiplier(l1, l2)
    assert mu.sum() == pytest.approx(0.0, abs=1e-12)
    back = multiplier_to_lambda(mu)
    assert back == pytest.approx((l1, l2), abs=1e-12)


@given(triods())
def test_lambda_system_matches_step(state):
    _, sol = solve_step(state, 1e-3)
    lam = multiplier_to_lambda(sol.mu, tol=1e-8)
    assert lambda_from_system(state, sol.kappa) == pytest.approx(lam, rel=1e-7, abs=1e-9)


def test_curvature_sums_at_steiner(steiner_state):
    _, sol = solve_step(steiner_state, 1e-4)
    means, stds, total = curvature_sum_test(sol, steiner_state)
    np.testing.assert_allclose(means, 0.0, atol=1e-10)
    np.testing.assert_allclose(stds, 0.0, atol=1e-10)
    assert total == pytest.approx(0.0, abs=1e-10)


def test_curvature_sums_type_two():
    stds = []
    for J in (50, 100, 200):
        state = type_two_triod(J)
        _, sol = solve_step(state, 1e-4)
        means, s, total = curvature_sum_test(sol, state)
        assert abs(means[0]) < 1e-2
        assert abs(abs(means[1]) - math.pi) < 2e-2 and abs(abs(means[2]) - math.pi) < 2e-2
        assert means[1] * means[2] < 0
        assert abs(total) < 1e-2
        stds.append(s.max())
    h = np.array([1 / 50, 1 / 100, 1 / 200])
    assert np.all(np.array(stds) <= 20.0 * h)
    assert stds[0] > stds[1] > stds[2]


@given(triods())
def test_lift_triod_anchors(state):
    lifts, spread = lift_triod(state)
    for a in range(3):
        assert np.abs(horizontality_residual(lifts[a])).max() <= 1e-12 * (1 + np.abs(lifts[a]).max() ** 2)
        assert lifts[a, -1, 2] == state.endpoint_z[a]
        np.testing.assert_array_equal(lifts[a, :, :2], state.curves[a])
    assert spread >= 0.0


def test_stationarity_report(steiner_state):
    _, sol = solve_step(steiner_state, 1e-4)
    rep = stationarity_report(steiner_state, sol)
    assert rep.angle_defect < 1e-14
    assert rep.junction_z_spread <= 1e-10
    assert rep.lam == pytest.approx((0.0, 0.0), abs=1e-10)


def test_energy_series_layout(steiner_state):
    out = run_flow(steiner_state, 1e-2, 0.03, eps_steady=0.0)
    table = energy_series(out)
    assert tuple(table) == ENERGY_COLUMNS
    assert len(table["t"]) == 4
    assert np.isnan(table["mu1"][0])
    np.testing.assert_allclose(table["L_total"], 6.0, atol=1e-12)
    np.testing.assert_allclose(table["t"], [0.0, 0.01, 0.02, 0.03], atol=1e-15)


def test_energy_series_rejects_increase(steiner_state):
    def report(t, L):
        lengths = np.array([L, 0.0, 0.0])
        return StepReport(t, L, L, 0.0, 0.0, 0.0, (True,) * 3, lengths, np.zeros(3), 0.0)

    out = FlowOutcome(FlowStatus.REACHED_T, steiner_state, [report(0.1, 6.0), report(0.2, 6.5)])
    with pytest.raises(StabilityViolation):
        energy_series(out)
