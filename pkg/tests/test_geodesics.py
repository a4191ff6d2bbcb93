import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from heistriod.exceptions import DegenerateInputError
from heistriod.geodesics import (
    GeodesicKind,
    arc_endpoint,
    arc_height_ratio,
    example_family_curve,
    example_family_parameters,
    geodesic_between,
    geodesic_length,
    polygon_height_ratio,
    solve_turning_angle,
)
from heistriod.geometry import discrete_G, is_horizontal
from heistriod.verify import _circle_deviation

coord = st.floats(-2, 2, allow_nan=False)


def test_spot_height():
    q = arc_endpoint(math.pi, 1.0, 2 * math.pi / 3)
    assert q[2] == pytest.approx(-1 / (2 * math.pi), abs=1e-12)
    assert q[2] == pytest.approx(-0.159155, abs=1e-6)


def test_line_case():
    gamma, spec = geodesic_between(np.zeros(3), [1.0, 0.0, 0.0])
    assert spec.kind is GeodesicKind.LINE
    assert spec.lam == 0.0 and spec.s_f == pytest.approx(1.0)
    np.testing.assert_allclose(gamma[:, 1:], 0.0, atol=1e-15)
    assert geodesic_length(np.zeros(3), [1.0, 0.0, 0.0]) == pytest.approx(1.0)


def test_vertical_case():
    gamma, spec = geodesic_between(np.zeros(3), [0.0, 0.0, 1.0])
    assert spec.kind is GeodesicKind.VERTICAL
    assert abs(spec.lam) == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    assert spec.radius == pytest.approx(0.564190, abs=1e-6)
    assert spec.s_f == pytest.approx(2 * math.sqrt(math.pi), abs=1e-12)
    assert abs(spec.k_cover) == 1
    assert geodesic_length(np.zeros(3), [0, 0, 1]) == pytest.approx(3.544908, abs=1e-6)
    assert discrete_G(gamma[:, :2]) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(gamma[-1], [0.0, 0.0, 1.0])


def test_vertical_family_is_rotation_invariant():
    Q = [0.0, 0.0, -0.7]
    g0, s0 = geodesic_between(np.zeros(3), Q, alpha0=0.0)
    g1, s1 = geodesic_between(np.zeros(3), Q, alpha0=math.pi / 2)
    assert s0.s_f == pytest.approx(s1.s_f, rel=1e-14)
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    np.testing.assert_allclose(g0[:, :2] @ R.T, g1[:, :2], atol=1e-12)
    np.testing.assert_allclose(g0[:, 2], g1[:, 2], atol=1e-12)


def test_coincident_points_rejected():
    with pytest.raises(DegenerateInputError):
        geodesic_between(np.ones(3), np.ones(3))
    with pytest.raises(ValueError):
        geodesic_between(np.zeros(3), [1, 0, 0], samples=2)


def test_family_straight_segment():
    a, alpha, beta = example_family_parameters(np.zeros(3), [1.0, 0.0, 0.0], 0.0)
    assert (a, alpha, beta) == (1.0, 0.0, 0.0)
    gamma = example_family_curve(np.zeros(3), [1.0, 0.0, 0.0], 0.0, 10)
    np.testing.assert_allclose(gamma[:, 1:], 0.0)


def test_family_singular_parameter():
    with pytest.raises(DegenerateInputError):
        example_family_parameters(np.zeros(3), [1.0, 0.0, 0.0], -5.0)


@given(st.tuples(coord, coord, coord), st.tuples(coord, coord, coord), st.floats(-1, 1))
def test_family_endpoints_fixed(P, Q, b):
    P, Q = np.array(P), np.array(Q)
    M1 = Q[0] - P[0]
    assume(abs(5 * M1 + b) > 1e-3)
    gamma = example_family_curve(P, Q, b, 50)
    np.testing.assert_array_equal(gamma[0], P)
    np.testing.assert_array_equal(gamma[-1], Q)


@given(coord, coord, coord)
def test_oracle_closure(x, y, z):
    assume(math.hypot(x, y) > 1e-3)
    q = np.array([x, y, z])
    gamma, spec = geodesic_between(np.zeros(3), q, 100)
    assert is_horizontal(gamma)
    assert discrete_G(gamma[:, :2]) == pytest.approx(z, abs=1e-8)
    assert _circle_deviation(gamma[:, :2]) <= 1e-8
    np.testing.assert_array_equal(gamma[-1], q)


@given(coord, coord, coord, st.floats(0, 2 * math.pi))
def test_spec_independent_of_alpha0_off_axis(x, y, z, a0):
    assume(math.hypot(x, y) > 1e-3)
    q = np.array([x, y, z])
    g0, s0 = geodesic_between(np.zeros(3), q, 20, alpha0=0.0)
    g1, s1 = geodesic_between(np.zeros(3), q, 20, alpha0=a0)
    np.testing.assert_array_equal(g0, g1)
    assert s0.lam == s1.lam and s0.alpha0 == s1.alpha0


@given(st.tuples(coord, coord, coord), coord, coord, coord)
def test_closure_from_general_start(P, x, y, z):
    P = np.array(P)
    Q = P + [x, y, 0.0]
    Q[2] = z
    assume(math.hypot(x, y) > 1e-3)
    gamma, _ = geodesic_between(P, Q, 60)
    np.testing.assert_array_equal(gamma[0], P)
    np.testing.assert_array_equal(gamma[-1], Q)
    assert is_horizontal(gamma)


def test_turning_angle_bracketing_sweep():
    rng = np.random.default_rng(11)
    r = 10 ** rng.uniform(-2, 1, 10_000)
    h = rng.normal(size=10_000) * 10 ** rng.uniform(-3, 2, 10_000)
    for ri, hi in zip(r, h):
        theta = solve_turning_angle(hi / ri**2)
        assert -2 * math.pi < theta < 2 * math.pi
        assert float(arc_height_ratio(theta)) == pytest.approx(hi / ri**2, rel=1e-9, abs=1e-12)


def test_ratio_is_decreasing():
    t = np.linspace(-2 * math.pi + 1e-3, 2 * math.pi - 1e-3, 20001)
    t = t[t != 0.0]
    assert np.all(np.diff(arc_height_ratio(t)) < 0)
    assert np.all(np.diff(polygon_height_ratio(t, 100)) < 0)


@pytest.mark.parametrize("b", [-0.5, 0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("Q", [(1.0, 0.5, 0.2), (-0.5, 1.0, -0.3), (0.3, -0.2, 0.05)])
def test_minimality_against_family(Q, b):
    gamma = example_family_curve(np.zeros(3), Q, b, 4000)
    family_len = float(np.hypot(*np.diff(gamma[:, :2], axis=0).T).sum())
    assert geodesic_length(np.zeros(3), Q) <= family_len + 1e-9
