import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polylines, triods, unit_polygon
from heistriod.curves import (
    TriodState,
    discrete_length,
    lumped_masses,
    lumped_normals,
    mass_lumped_integral,
    segment_frames,
    validate_curves,
    validate_triod,
)
from heistriod.exceptions import RegularityError


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_quadrature_constants_and_affine():
    J = 10
    ones = np.ones(J + 1)
    assert mass_lumped_integral(ones, ones) == pytest.approx(1.0)
    u = np.linspace(0, 1, J + 1)
    assert mass_lumped_integral(u, u) == pytest.approx(0.5)


def test_quadrature_piecewise_constant_is_midsum():
    vals = np.array([3.0, -1.0, 2.0, 5.0])
    J = len(vals)
    left = np.concatenate([[np.nan], vals])
    right = np.concatenate([vals, [np.nan]])
    left[0] = 0.0
    right[-1] = 0.0
    assert mass_lumped_integral(left, right) == pytest.approx(vals.sum() / J)


def test_quadrature_shape_mismatch():
    with pytest.raises(ValueError):
        mass_lumped_integral(np.ones(3), np.ones(4))


@given(
    st.lists(st.floats(-10, 10), min_size=3, max_size=20),
    st.floats(-3, 3),
    st.floats(0, 3),
)
def test_quadrature_linear_and_monotone(vals, a, b):
    v = np.array(vals)
    w = v[::-1].copy()
    lhs = mass_lumped_integral(a * v + w, a * v + w)
    rhs = a * mass_lumped_integral(v, v) + mass_lumped_integral(w, w)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    assert mass_lumped_integral(b * np.abs(v), np.abs(v)) >= 0.0


def test_lengths_examples(steiner_state):
    assert discrete_length(np.array([[0.0, 0.0], [0.5, 0.5], [3.0, 4.0]])) == pytest.approx(
        math.hypot(0.5, 0.5) + math.hypot(2.5, 3.5)
    )
    assert discrete_length(np.linspace([0, 0], [3, 4], 17)) == pytest.approx(5.0)
    assert steiner_state.energy() == pytest.approx(6.0, abs=1e-14)
    assert discrete_length(unit_polygon(100)) == pytest.approx(6.282152, abs=1e-6)


def test_frames_of_horizontal_segment():
    f = segment_frames(np.array([[0.0, 0.0], [1.0, 0.0]]))
    np.testing.assert_array_equal(f.tangent, [[1.0, 0.0]])
    np.testing.assert_array_equal(f.normal, [[0.0, 1.0]])
    assert len(f) == 1
    with pytest.raises(RegularityError):
        segment_frames(np.array([[0.0, 0.0], [0.0, 0.0]]))


@given(polylines(min_nodes=2))
def test_frames_are_orthonormal(c):
    ell = np.hypot(*np.diff(c, axis=0).T)
    if np.any(ell < 1e-6):
        return
    f = segment_frames(c)
    np.testing.assert_allclose(np.hypot(*f.tangent.T), 1.0, atol=1e-12)
    np.testing.assert_allclose((f.tangent * f.normal).sum(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(f.normal[:, 0], -f.tangent[:, 1])


@given(polylines(min_nodes=2), st.floats(0, 2 * math.pi), st.floats(-5, 5), st.floats(-5, 5))
def test_length_invariant_under_rigid_motion_and_reversal(c, theta, sx, sy):
    L = discrete_length(c)
    moved = c @ _rotation(theta).T + [sx, sy]
    assert discrete_length(moved) == pytest.approx(L, rel=1e-12, abs=1e-12)
    assert discrete_length(c[::-1]) == pytest.approx(L, rel=1e-12, abs=1e-12)


@given(polylines(min_nodes=3))
def test_lumped_masses_and_normals(c):
    m = lumped_masses(c)
    assert m.sum() == pytest.approx(discrete_length(c), rel=1e-12, abs=1e-12)
    w = lumped_normals(c)
    # interior normals are half the rotated neighbour chord
    chord = c[2:] - c[:-2]
    np.testing.assert_allclose(w[1:-1], 0.5 * np.column_stack([-chord[:, 1], chord[:, 0]]), atol=1e-12)


def test_validation_examples(steiner_state):
    assert validate_triod(steiner_state) == []
    curves = steiner_state.curves
    bad = curves.copy()
    bad[1, 0] += [1e-3, 0.0]
    assert any("junction" in p for p in validate_curves(bad))
    bad = curves.copy()
    bad[2, 5] = bad[2, 4]
    assert any("regularity" in p for p in validate_curves(bad))
    assert validate_curves(np.zeros((2, 4, 2)))
    assert any("pinned" in p for p in validate_curves(curves, curves[:, -1] + 1.0))
    with pytest.raises(RegularityError):
        TriodState.from_curves(bad)


@given(triods())
def test_state_roundtrip_and_transform(state):
    again = TriodState.from_curves(state.curves, state.endpoint_z, state.time)
    np.testing.assert_array_equal(again.curves, state.curves)
    R = _rotation(0.7)
    moved = state.transformed(R, (0.3, -1.0))
    np.testing.assert_allclose(moved.curves, state.curves @ R.T + [0.3, -1.0], atol=1e-14)
    np.testing.assert_allclose(moved.lengths(), state.lengths(), rtol=1e-12)
    assert not state.interior.flags.writeable
