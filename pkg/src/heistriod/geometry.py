"""Heisenberg group primitives and horizontal lifts of planar polylines.

Points of the group are arrays of shape ``(3,)`` (or ``(..., 3)`` where
broadcasting makes sense); planar polylines are arrays of shape ``(n, 2)``
and lifted polylines arrays of shape ``(n, 3)``.

The discrete horizontality rule used throughout is the exact integral of the
contact form along each affine segment: between consecutive nodes ``a`` and
``b`` a horizontal polyline gains ``0.5 * cross(a, b)`` in height. Lifting,
the residual and :func:`discrete_G` therefore agree to round-off.
"""

from __future__ import annotations

import warnings

import numpy as np

__all__ = [
    "as_point",
    "cross2",
    "group_compose",
    "group_inverse",
    "left_translate",
    "horizontality_residual",
    "is_horizontal",
    "horizontal_tolerance",
    "discrete_G",
    "lift_increments",
    "horizontal_lift",
    "curve_length_g",
]


def as_point(p, dim=3):
    """Return ``p`` as a finite float array of shape ``(dim,)``."""
    arr = np.asarray(p, dtype=float)
    if arr.shape != (dim,):
        raise ValueError(f"expected a point with {dim} coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point has non-finite coordinates: {arr}")
    return arr


def cross2(a, b):
    """Planar cross product ``a[0]*b[1] - a[1]*b[0]`` (vectorised over leading axes)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def group_compose(p, q):
    """Group law ``p ∘ q`` of the first Heisenberg group.

    >>> group_compose([1, 0, 0], [0, 1, 0])
    array([1. , 1. , 0.5])
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = p + q
    out[..., 2] += 0.5 * cross2(p[..., :2], q[..., :2])
    return out


def group_inverse(p):
    """Inverse element; the cross term vanishes so this is ``-p``."""
    return -np.asarray(p, dtype=float)


def left_translate(a, gamma):
    """Apply the left translation ``x -> a ∘ x`` to every node of ``gamma``."""
    a = as_point(a)
    gamma = np.asarray(gamma, dtype=float)
    return group_compose(np.broadcast_to(a, gamma.shape), gamma)


def lift_increments(c):
    """Per-segment height gain ``0.5 * cross(c[j-1], c[j])`` of a horizontal lift."""
    c = np.asarray(c, dtype=float)
    return 0.5 * cross2(c[:-1], c[1:])


def horizontality_residual(gamma):
    """Per-segment defect ``dz - 0.5 * cross(c[j-1], c[j])``; zero for horizontal polylines."""
    gamma = np.asarray(gamma, dtype=float)
    return np.diff(gamma[:, 2]) - lift_increments(gamma[:, :2])


def horizontal_tolerance(gamma):
    """Round-off scale ``1e-10 * (1 + max |node|)`` used to flag a polyline as horizontal."""
    gamma = np.asarray(gamma, dtype=float)
    return 1e-10 * (1.0 + float(np.max(np.abs(gamma)))) if gamma.size else 1e-10


def is_horizontal(gamma, tol=None):
    """True if every segment residual is within ``tol`` (default :func:`horizontal_tolerance`)."""
    if tol is None:
        tol = horizontal_tolerance(gamma)
    res = horizontality_residual(gamma)
    return bool(np.all(np.abs(res) <= tol))


def discrete_G(c):
    """Oriented-area functional of the piecewise-affine curve through the nodes ``c``.

    This is the shoelace sum ``sum_j 0.5 * cross(c[j-1], c[j])``, i.e. the exact
    value of the area functional on the interpolant.
    """
    return float(np.sum(lift_increments(c)))


def horizontal_lift(c, *, z_start=None, z_end=None):
    """Horizontal lift of the planar polyline ``c``.

    Exactly one of ``z_start`` / ``z_end`` anchors the height of the first or
    last node; the remaining heights accumulate the segment increments forward
    or backward from the anchor.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(n, 3)`` whose first two columns equal ``c``.
    """
    if (z_start is None) == (z_end is None):
        raise ValueError("give exactly one of z_start or z_end")
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[1] != 2 or len(c) < 2:
        raise ValueError(f"expected a planar polyline of shape (n>=2, 2), got {c.shape}")
    inc = lift_increments(c)
    z = np.empty(len(c))
    if z_start is not None:
        z[0] = z_start
        z[1:] = z_start + np.cumsum(inc)
    else:
        z[-1] = z_end
        # Backward accumulation keeps the anchored node exact.
        z[:-1] = z_end - np.cumsum(inc[::-1])[::-1]
    return np.column_stack([c, z])


def curve_length_g(gamma, *, check=True):
    """Sub-Riemannian length of a horizontal polyline (planar Euclidean length).

    Emits a :class:`UserWarning` if ``check`` is set and the polyline is not
    horizontal to round-off.
    """
    gamma = np.asarray(gamma, dtype=float)
    if check and not is_horizontal(gamma):
        worst = float(np.max(np.abs(horizontality_residual(gamma))))
        warnings.warn(f"polyline is not horizontal (max residual {worst:.3e})", stacklevel=2)
    return float(np.sum(np.linalg.norm(np.diff(gamma[:, :2], axis=0), axis=1)))
