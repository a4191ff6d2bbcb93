"""Generators of initial triods: straight lines, junction-compatible Bézier curves,
the polynomial horizontal family and sampled geodesics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .curves import TriodState, validate_curves
from .exceptions import DegenerateInputError, RegularityError
from .geodesics import example_family_curve, geodesic_between
from .geometry import as_point, cross2, horizontal_lift, horizontality_residual

__all__ = [
    "BezierHandle",
    "make_initial_planar_line",
    "make_initial_line3d",
    "bezier_curve",
    "make_initial_bezier_compatible",
    "calibrate_handle",
    "make_initial_example_family",
    "make_initial_geodesic",
    "lifted_endpoint_z",
]


@dataclass(frozen=True)
class BezierHandle:
    """Shape of one cubic Bézier curve leaving the junction.

    The control points are ``Σ``, ``Σ + d1 * e(angle)``, ``P - d2 * e(end_angle)``
    and ``P``, with ``e(φ) = (cos φ, sin φ)`` and angles in degrees.
    """

    angle: float
    d1: float
    end_angle: float
    d2: float


def _unit(deg):
    r = math.radians(deg)
    return np.array([math.cos(r), math.sin(r)])


def _line_nodes(a, b, J):
    u = np.linspace(0.0, 1.0, J + 1)[:, None]
    nodes = (1.0 - u) * a + u * b
    nodes[0] = a
    nodes[-1] = b
    return nodes


def lifted_endpoint_z(c, z_start):
    """Height reached at the last node when lifting ``c`` from ``z_start``."""
    return float(horizontal_lift(c, z_start=z_start)[-1, 2])


def _build(curves, endpoint_z):
    problems = validate_curves(curves)
    if problems:
        raise RegularityError("invalid initial triod: " + "; ".join(problems))
    return TriodState.from_curves(curves, endpoint_z=endpoint_z)


def make_initial_planar_line(junction, endpoints, J):
    """Straight planar segments from the junction, with end heights from the lift.

    ``junction`` may carry a height (default 0); only the planar parts of the
    ``endpoints`` are used.
    """
    j = np.asarray(junction, dtype=float)
    z0 = float(j[2]) if j.shape == (3,) else 0.0
    curves = np.stack([_line_nodes(j[:2], np.asarray(p, dtype=float)[:2], J) for p in endpoints])
    zs = [lifted_endpoint_z(c, z0) for c in curves]
    return _build(curves, zs)


def make_initial_line3d(junction, endpoints, J, tol=1e-10):
    """Straight segments in space; each must be horizontal.

    Raises
    ------
    DegenerateInputError
        If a segment from the junction to some end point is not horizontal.
    """
    S = as_point(junction)
    Ps = [as_point(p) for p in endpoints]
    for a, P in enumerate(Ps):
        gap = P[2] - S[2] - 0.5 * float(cross2(S[:2], P[:2]))
        if abs(gap) > tol * (1.0 + abs(P[2]) + abs(S[2])):
            raise DegenerateInputError(
                f"curve {a + 1}: straight segment to {P.tolist()} is not horizontal "
                f"(height mismatch {gap:.3e})"
            )
    curves = np.stack([_line_nodes(S[:2], P[:2], J) for P in Ps])
    return _build(curves, [P[2] for P in Ps])


def bezier_curve(start, end, handle, J):
    """Sample the cubic Bézier curve of ``handle`` at ``J + 1`` equal parameter steps.

    The first interior node is moved onto the junction ray (keeping its
    distance) so that the discrete junction tangent is exactly ``e(angle)``.
    """
    start = np.asarray(start, dtype=float)[:2]
    end = np.asarray(end, dtype=float)[:2]
    t0 = _unit(handle.angle)
    ctrl = np.array([start, start + handle.d1 * t0, end - handle.d2 * _unit(handle.end_angle), end])
    u = np.linspace(0.0, 1.0, J + 1)[:, None]
    basis = [(1 - u) ** 3, 3 * u * (1 - u) ** 2, 3 * u**2 * (1 - u), u**3]
    nodes = sum(b * p for b, p in zip(basis, ctrl))
    nodes[0] = start
    nodes[-1] = end
    nodes[1] = start + float(np.hypot(*(nodes[1] - start))) * t0
    return nodes


def _check_directions(handles, tol=1e-8):
    angles = sorted(h.angle % 360.0 for h in handles)
    gaps = np.diff(angles + [angles[0] + 360.0])
    if np.max(np.abs(gaps - 120.0)) > tol:
        raise DegenerateInputError(f"junction directions {[h.angle for h in handles]} are not mutually 120 degrees")


def make_initial_bezier_compatible(junction, endpoints, handles, J):
    """Bézier triod meeting at 120 degrees; end heights from the lift out of the junction."""
    if len(handles) != 3:
        raise ValueError("need one handle per curve")
    _check_directions(handles)
    j = np.asarray(junction, dtype=float)
    z0 = float(j[2]) if j.shape == (3,) else 0.0
    curves = np.stack([bezier_curve(j, p, h, J) for p, h in zip(endpoints, handles)])
    zs = [lifted_endpoint_z(c, z0) for c in curves]
    return _build(curves, zs)


def calibrate_handle(junction, endpoint, handle, target_z, J, bracket=(1e-3, 20.0)):
    """Choose ``d1`` so that the lifted end height equals ``target_z``.

    Returns a new :class:`BezierHandle`; raises ``ValueError`` when the target is
    not bracketed by the scan of ``d1`` over ``bracket``.
    """
    j = np.asarray(junction, dtype=float)
    z0 = float(j[2]) if j.shape == (3,) else 0.0

    def gap(d1):
        h = BezierHandle(handle.angle, d1, handle.end_angle, handle.d2)
        return lifted_endpoint_z(bezier_curve(j, endpoint, h, J), z0) - target_z

    grid = np.geomspace(bracket[0], bracket[1], 200)
    vals = [gap(d) for d in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            return BezierHandle(handle.angle, float(a), handle.end_angle, handle.d2)
        if fa * fb < 0:
            d1 = brentq(gap, a, b, xtol=1e-14)
            return BezierHandle(handle.angle, float(d1), handle.end_angle, handle.d2)
    raise ValueError(f"target height {target_z} not reachable with d1 in {bracket}")


def make_initial_example_family(junction, endpoints, b, J, origin="endpoint"):
    """Projections of the polynomial horizontal family joining the junction and each end point.

    ``b`` is a scalar or one value per curve.  With ``origin="endpoint"`` each
    family curve is built from the end point towards the junction and then
    reversed; with ``origin="junction"`` it is built from the junction.  The
    two choices give different curves.  The sampled polylines are only
    horizontal to second order, so the end heights are taken from ``endpoints``.
    """
    if origin not in ("endpoint", "junction"):
        raise ValueError(f"origin must be 'endpoint' or 'junction', got {origin!r}")
    bs = np.broadcast_to(np.asarray(b, dtype=float), (3,))
    S = as_point(junction)
    Ps = [as_point(p) for p in endpoints]
    curves = []
    for P, bb in zip(Ps, bs):
        if origin == "junction":
            curves.append(example_family_curve(S, P, bb, J)[:, :2])
        else:
            curves.append(example_family_curve(P, S, bb, J)[::-1, :2])
    return _build(np.stack(curves), [P[2] for P in Ps])


def make_initial_geodesic(junction, endpoints, J, alpha0=(0.0, 0.0, 0.0)):
    """Sampled minimisers from the junction to each end point.

    ``alpha0`` fixes the initial direction of curves whose end point lies on
    the vertical line through the junction.
    """
    S = as_point(junction)
    curves = []
    zs = []
    for P, a0 in zip(endpoints, alpha0):
        gamma, _ = geodesic_between(S, P, samples=J, alpha0=a0)
        if np.abs(horizontality_residual(gamma)).max() > 1e-10 * (1 + np.abs(gamma).max()):
            raise RegularityError("sampled geodesic is not horizontal")
        curves.append(gamma[:, :2])
        zs.append(float(as_point(P)[2]))
    return _build(np.stack(curves), zs)
