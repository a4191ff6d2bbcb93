"""Length-minimising horizontal curves between two points of the Heisenberg group.

After left translation to the origin the target ``(d, h)`` decides the shape
of the planar projection:

* ``h == 0``: a straight segment (``λ = 0``);
* ``d != 0``: a circular arc with total turning ``θ = λ s_f`` in ``(-2π, 2π)``
  fixed by ``h / |d|^2 = (sin θ - θ) / (8 sin^2(θ/2))``;
* ``d == 0``: a full circle of enclosed area ``|h|``, free in its initial
  direction.

The closed-form arc is ``c(s) = A + (sin(λs - α0), cos(λs - α0)) / λ`` with
signed curvature ``-λ``.  Sampled polylines are inscribed regular polygons of
a slightly adjusted circle, chosen so that the polygon's exact lift reaches
the target height; node spacing is uniform in arc length.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import DegenerateInputError, GeodesicSolveError
from .geometry import as_point, group_compose, group_inverse, horizontal_lift, left_translate

__all__ = [
    "GeodesicKind",
    "GeodesicSpec",
    "arc_height_ratio",
    "polygon_height_ratio",
    "solve_turning_angle",
    "arc_endpoint",
    "arc_point",
    "geodesic_between",
    "geodesic_length",
    "example_family_parameters",
    "example_family_curve",
]

TWO_PI = 2.0 * math.pi


class GeodesicKind(str, enum.Enum):
    LINE = "Line"
    ARC = "Arc"
    VERTICAL = "VerticalFamily"


@dataclass(frozen=True)
class GeodesicSpec:
    """Parameters of the continuous minimiser in coordinates translated to the origin.

    ``A`` is the arc centre parameter and ``B`` the unit initial tangent
    ``(cos α0, sin α0)``.  ``k_cover`` counts windings of the vertical family
    (zero otherwise).
    """

    kind: GeodesicKind
    lam: float
    s_f: float
    alpha0: float
    A: np.ndarray
    B: np.ndarray
    k_cover: int = 0

    @property
    def curvature(self):
        """Signed curvature ``-λ`` of the projected curve (counter-clockwise positive)."""
        return -self.lam

    @property
    def radius(self):
        return math.inf if self.lam == 0 else 1.0 / abs(self.lam)


def _sin_minus_id(x):
    """``sin(x) - x`` without cancellation for small ``|x|``."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    return np.where(np.abs(x) < 0.1, series, np.sin(x) - x)


def arc_height_ratio(theta):
    """``(sin θ - θ) / (8 sin^2(θ/2))``: translated height over squared chord of an arc."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(0.5 * theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = _sin_minus_id(theta) / (8.0 * s * s)
    return np.where(theta == 0.0, 0.0, out)


def polygon_height_ratio(theta, n):
    """Height over squared chord for the inscribed ``n``-gon of the arc with turning ``θ``."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(0.5 * theta)
    num = _sin_minus_id(theta) - n * _sin_minus_id(theta / n)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / (8.0 * s * s)
    return np.where(theta == 0.0, 0.0, out)


def solve_turning_angle(ratio, n=None, xtol=1e-15):
    """Invert the height ratio for the turning angle in ``(-2π, 2π)``.

    Uses the continuous ratio when ``n`` is None, else the ``n``-gon ratio.
    Both are strictly decreasing from ``+∞`` to ``-∞`` on that interval.
    """
    if ratio == 0.0:
        return 0.0
    f = (lambda t: arc_height_ratio(t) - ratio) if n is None else (lambda t: polygon_height_ratio(t, n) - ratio)
    sign = -1.0 if ratio > 0 else 1.0
    lo = 0.0
    gap = 1.0
    hi = sign * (TWO_PI - gap)
    while sign * float(f(hi)) > 0.0:
        lo = hi
        gap *= 0.5
        if gap < 1e-300:
            raise GeodesicSolveError(f"no bracket for height ratio {ratio!r}", bracket=(lo, hi))
        hi = sign * (TWO_PI - gap)
    a, b = sorted((lo, hi))
    try:
        root = brentq(lambda t: float(f(t)), a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise GeodesicSolveError(f"turning-angle solve failed for ratio {ratio!r}: {exc}", bracket=(a, b)) from exc
    return float(root)


def _circle_nodes(tangent, curvature, s):
    """Points ``c(s)`` of the circle through the origin with unit initial ``tangent``."""
    s = np.asarray(s, dtype=float)
    x = 0.5 * curvature * s
    sinc = np.sinc(x / math.pi)
    along = s * np.cos(x) * sinc
    across = s * np.sin(x) * sinc
    normal = np.array([-tangent[1], tangent[0]])
    return along[:, None] * tangent + across[:, None] * normal


def _rotate(v, angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def arc_point(lam, s, alpha0):
    """Planar point ``c(s)`` of the arc through the origin with parameters ``(λ, α0)``."""
    tangent = np.array([math.cos(alpha0), math.sin(alpha0)])
    return _circle_nodes(tangent, -lam, np.atleast_1d(float(s)))[0]


def arc_endpoint(lam, s_f, alpha0, P=(0.0, 0.0, 0.0)):
    """End point of the horizontal arc leaving ``P`` with parameters ``(λ, s_f, α0)``.

    The translated height is ``(sin θ - θ) / (2 λ^2)`` with ``θ = λ s_f``.
    """
    P = as_point(P)
    end = arc_point(lam, s_f, alpha0)
    if lam == 0:
        z = 0.0
    else:
        z = float(_sin_minus_id(lam * s_f)) / (2.0 * lam * lam)
    return group_compose(P, np.array([end[0], end[1], z]))


def _translated_target(P, Q):
    P = as_point(P)
    Q = as_point(Q)
    q = group_compose(group_inverse(P), Q)
    return P, Q, q[:2], float(q[2])


def _continuous_spec(d, h, alpha0):
    r = float(np.hypot(*d))
    if r == 0.0:
        k_cover = 1 if h > 0 else -1
        lam = -k_cover * math.sqrt(math.pi / abs(h))
        B = np.array([math.cos(alpha0), math.sin(alpha0)])
        A = -np.array([-B[1], B[0]]) / lam
        return GeodesicSpec(GeodesicKind.VERTICAL, lam, TWO_PI / abs(lam), alpha0 % TWO_PI, A, B, k_cover)
    if abs(h) <= 1e-14 * r * r:
        B = d / r
        a0 = math.atan2(B[1], B[0]) % TWO_PI
        return GeodesicSpec(GeodesicKind.LINE, 0.0, r, a0, np.full(2, np.nan), B, 0)
    theta = solve_turning_angle(h / (r * r))
    lam = math.copysign(2.0 * abs(math.sin(0.5 * theta)) / r, theta)
    B = _rotate(d / r, 0.5 * theta)
    A = -np.array([-B[1], B[0]]) / lam
    a0 = math.atan2(B[1], B[0]) % TWO_PI
    return GeodesicSpec(GeodesicKind.ARC, lam, theta / lam, a0, A, B, 0)


def geodesic_between(P, Q, samples=100, alpha0=0.0):
    """Sampled length minimiser from ``P`` to ``Q``.

    Parameters
    ----------
    P, Q : array_like, shape (3,)
    samples : int
        Number of segments, at least 3.
    alpha0 : float
        Initial tangent angle; only used when ``Q`` lies on the vertical line
        through ``P``, where the minimiser is not unique.

    Returns
    -------
    (ndarray of shape (samples+1, 3), GeodesicSpec)
        A horizontal polyline with end nodes ``P`` and ``Q``, and the
        parameters of the continuous minimiser.
    """
    n = int(samples)
    if n < 3:
        raise ValueError(f"need at least 3 segments, got {samples}")
    P, Q, d, h = _translated_target(P, Q)
    r = float(np.hypot(*d))
    if r == 0.0 and h == 0.0:
        raise DegenerateInputError("end points coincide")
    spec = _continuous_spec(d, h, float(alpha0))

    if spec.kind is GeodesicKind.VERTICAL:
        # regular n-gon of area |h|
        R = math.sqrt(2.0 * abs(h) / (n * math.sin(TWO_PI / n)))
        s = np.linspace(0.0, TWO_PI * R, n + 1)
        nodes = _circle_nodes(spec.B, spec.k_cover / R, s)
        nodes[-1] = 0.0
    elif spec.kind is GeodesicKind.LINE:
        nodes = np.outer(np.linspace(0.0, 1.0, n + 1), d)
    else:
        theta = solve_turning_angle(h / (r * r), n=n)
        tangent = _rotate(d / r, 0.5 * theta)
        if theta == 0.0:
            nodes = np.outer(np.linspace(0.0, 1.0, n + 1), d)
        else:
            R = r / (2.0 * abs(math.sin(0.5 * theta)))
            s = np.linspace(0.0, abs(theta) * R, n + 1)
            nodes = _circle_nodes(tangent, -math.copysign(1.0 / R, theta), s)
    nodes[0] = 0.0
    nodes[-1] = d
    gamma = left_translate(P, horizontal_lift(nodes, z_start=0.0))
    gamma[0] = P
    gamma[-1] = Q
    return gamma, spec


def geodesic_length(P, Q):
    """Sub-Riemannian distance between ``P`` and ``Q``."""
    P, Q, d, h = _translated_target(P, Q)
    if not np.any(d) and h == 0.0:
        raise DegenerateInputError("end points coincide")
    return _continuous_spec(d, h, 0.0).s_f


def example_family_parameters(P, Q, b):
    """Coefficients ``(a, α, β)`` of the polynomial horizontal family joining ``P`` to ``Q``."""
    P, Q, M, M3 = _translated_target(P, Q)
    M1, M2 = M
    denom = 5.0 * M1 + b
    if denom == 0.0:
        raise DegenerateInputError(f"family parameter b={b!r} is singular for this target (5*M1 + b = 0)")
    beta = (60.0 * M3 - 10.0 * M1 * M2 + 10.0 * b * M2) / denom
    return M1 - b, M2 - beta, beta


def example_family_curve(P, Q, b, samples=100):
    """Polyline sampling ``u -> P ∘ (a u + b u^2, α u^2 + β u^3, ...)`` at ``samples + 1`` equal steps.

    The underlying polynomial curve is exactly horizontal and joins ``P`` to
    ``Q`` for every admissible ``b``; the polyline's horizontality residual is
    of second order in the step.
    """
    a, alpha, beta = example_family_parameters(P, Q, b)
    u = np.linspace(0.0, 1.0, int(samples) + 1)
    x = a * u + b * u**2
    y = alpha * u**2 + beta * u**3
    z = alpha * a * u**3 / 6.0 + a * beta * u**4 / 4.0 + b * beta * u**5 / 10.0
    gamma = left_translate(P, np.column_stack([x, y, z]))
    gamma[0] = as_point(P)
    gamma[-1] = as_point(Q)
    return gamma
