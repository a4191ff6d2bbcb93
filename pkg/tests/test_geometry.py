import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import points, polylines, unit_polygon
from heistriod.geometry import (
    as_point,
    curve_length_g,
    discrete_G,
    group_compose,
    group_inverse,
    horizontal_lift,
    horizontality_residual,
    is_horizontal,
    left_translate,
)


def test_group_law_example():
    np.testing.assert_array_equal(group_compose([1, 0, 0], [0, 1, 0]), [1.0, 1.0, 0.5])


@given(points)
def test_identity_and_inverse(p):
    np.testing.assert_array_equal(group_compose(p, np.zeros(3)), p)
    np.testing.assert_array_equal(group_compose(p, group_inverse(p)), np.zeros(3))


@given(points, points, points)
def test_associativity(p, q, r):
    lhs = group_compose(group_compose(p, q), r)
    rhs = group_compose(p, group_compose(q, r))
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * (1 + np.abs([p, q, r]).max() ** 2))


def test_as_point_rejects_bad_input():
    with pytest.raises(ValueError):
        as_point([1, 2])
    with pytest.raises(ValueError):
        as_point([1, np.nan, 0])


def test_translation_to_origin_and_vertical_shift():
    gamma = horizontal_lift(np.array([[1.0, 2.0], [2.0, 2.5], [3.0, 1.0]]), z_start=0.7)
    moved = left_translate(group_inverse(gamma[0]), gamma)
    np.testing.assert_allclose(moved[0], 0.0, atol=1e-15)
    shifted = left_translate([0, 0, 1.25], gamma)
    np.testing.assert_allclose(shifted, gamma + [0, 0, 1.25], atol=1e-15)
    np.testing.assert_array_equal(left_translate(np.zeros(3), gamma), gamma)


def test_segment_through_origin_is_horizontal():
    c = np.outer(np.linspace(-1, 2, 7), [0.3, -0.8])
    gamma = np.column_stack([c, np.zeros(len(c))])
    np.testing.assert_allclose(horizontality_residual(gamma), 0.0, atol=1e-16)
    assert is_horizontal(gamma)


def test_flat_semicircle_is_not_horizontal():
    R, n = 0.8, 4000
    t = np.linspace(math.pi, 2 * math.pi, n + 1)
    c = np.column_stack([R + R * np.cos(t), R * np.sin(t)])
    gamma = np.column_stack([c, np.zeros(n + 1)])
    res = horizontality_residual(gamma)
    assert res.sum() == pytest.approx(-0.5 * math.pi * R * R, rel=1e-6)
    assert not is_horizontal(gamma)


def test_discrete_G_polygon():
    assert discrete_G(np.array([[0.0, 0.0], [1.0, 0.0]])) == 0.0
    c = unit_polygon(100)
    assert discrete_G(c) == pytest.approx(50 * math.sin(2 * math.pi / 100), abs=1e-13)
    assert discrete_G(c) == pytest.approx(3.139526, abs=1e-6)
    assert discrete_G(c[::-1]) == pytest.approx(-discrete_G(c), abs=1e-13)


def test_lift_of_polygon_both_anchors():
    c = unit_polygon(100)
    fwd = horizontal_lift(c, z_start=0.0)
    assert fwd[-1, 2] == pytest.approx(3.139526, abs=1e-6)
    bwd = horizontal_lift(c, z_end=discrete_G(c))
    assert bwd[0, 2] == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(bwd, fwd, atol=1e-14)


def test_lift_requires_one_anchor():
    c = np.array([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        horizontal_lift(c)
    with pytest.raises(ValueError):
        horizontal_lift(c, z_start=0.0, z_end=1.0)
    with pytest.raises(ValueError):
        horizontal_lift(c[:1], z_start=0.0)


def test_lengths():
    seg = horizontal_lift(np.array([[0.0, 0.0], [3.0, 4.0]]), z_start=0.0)
    assert curve_length_g(seg) == 5.0
    circ = horizontal_lift(unit_polygon(100), z_start=0.0)
    assert curve_length_g(circ) == pytest.approx(200 * math.sin(math.pi / 100), abs=1e-12)
    assert curve_length_g(circ) == pytest.approx(6.282152, abs=1e-6)


def test_length_warns_on_vertical_jump():
    gamma = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 1.0]])
    with pytest.warns(UserWarning):
        curve_length_g(gamma)


@given(polylines(), st.floats(-3, 3), st.booleans())
def test_lift_is_horizontal(c, z, at_start):
    gamma = horizontal_lift(c, **({"z_start": z} if at_start else {"z_end": z}))
    scale = 1.0 + np.abs(gamma).max() ** 2
    assert np.abs(horizontality_residual(gamma)).max() <= 1e-12 * scale
    np.testing.assert_array_equal(gamma[:, :2], c)


@given(polylines(), st.floats(-3, 3))
def test_lift_height_gain_is_G(c, z):
    gamma = horizontal_lift(c, z_start=z)
    assert gamma[-1, 2] - gamma[0, 2] == pytest.approx(discrete_G(c), abs=1e-11 * (1 + np.abs(c).max() ** 2))


@given(polylines(), points)
def test_lift_commutes_with_translation(c, a):
    gamma = horizontal_lift(c, z_start=0.0)
    moved = left_translate(a, gamma)
    relifted = horizontal_lift(moved[:, :2], z_start=moved[0, 2])
    np.testing.assert_allclose(moved, relifted, atol=1e-12 * (1 + np.abs(moved).max() ** 2))


@given(polylines(min_nodes=3))
def test_G_unchanged_by_collinear_refinement(c):
    mid = 0.5 * (c[:-1] + c[1:])
    fine = np.empty((2 * len(c) - 1, 2))
    fine[0::2] = c
    fine[1::2] = mid
    assert discrete_G(fine) == pytest.approx(discrete_G(c), abs=1e-11 * (1 + np.abs(c).max() ** 2))
