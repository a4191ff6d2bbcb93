"""Piecewise-affine curves on the uniform grid ``u_j = j / J`` and the triod container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import RegularityError

__all__ = [
    "SegmentFrames",
    "TriodState",
    "mass_lumped_integral",
    "segment_vectors",
    "segment_lengths",
    "discrete_length",
    "segment_frames",
    "lumped_masses",
    "lumped_normals",
    "validate_curves",
    "validate_triod",
]


def mass_lumped_integral(values_left, values_right):
    """Mass-lumped quadrature on the uniform grid with one-sided nodal limits.

    Parameters
    ----------
    values_left : array_like, shape (J+1,)
        ``values_left[j]`` is the limit from the left at ``u_j``; entry 0 is unused.
    values_right : array_like, shape (J+1,)
        ``values_right[j]`` is the limit from the right at ``u_j``; entry J is unused.

    Returns
    -------
    float
        ``(h/2) * sum_{j=1..J} [values_left[j] + values_right[j-1]]`` with ``h = 1/J``.
    """
    left = np.asarray(values_left, dtype=float)
    right = np.asarray(values_right, dtype=float)
    if left.shape != right.shape or left.ndim != 1 or len(left) < 2:
        raise ValueError(f"one-sided value arrays must both have shape (J+1,), got {left.shape} and {right.shape}")
    h = 1.0 / (len(left) - 1)
    return float(0.5 * h * (left[1:].sum() + right[:-1].sum()))


def segment_vectors(c):
    return np.diff(np.asarray(c, dtype=float), axis=0)


def segment_lengths(c):
    return np.hypot(*segment_vectors(c).T)


def discrete_length(c):
    """Euclidean length of the polyline through ``c``."""
    return float(segment_lengths(c).sum())


@dataclass(frozen=True)
class SegmentFrames:
    """Unit tangents, unit normals (tangent rotated by +90 degrees) and lengths per segment."""

    tangent: np.ndarray
    normal: np.ndarray
    length: np.ndarray

    def __len__(self):
        return len(self.length)


def segment_frames(c):
    """Per-segment frames of a regular polyline.

    Raises
    ------
    RegularityError
        If some segment has zero length.
    """
    d = segment_vectors(c)
    ell = np.hypot(d[:, 0], d[:, 1])
    bad = np.flatnonzero(ell <= 0.0)
    if bad.size:
        raise RegularityError(f"segment {int(bad[0]) + 1} has zero length")
    tangent = d / ell[:, None]
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    return SegmentFrames(tangent, normal, ell)


def lumped_masses(c):
    """Nodal weights ``∫^h φ_i |∂_u c| du = (ℓ_i + ℓ_{i+1}) / 2`` (missing segments dropped)."""
    ell = segment_lengths(c)
    m = np.zeros(len(ell) + 1)
    m[:-1] += 0.5 * ell
    m[1:] += 0.5 * ell
    return m


def lumped_normals(c):
    """Nodal vectors ``∫^h φ_i n |∂_u c| du``, i.e. half the rotated neighbour chords."""
    d = segment_vectors(c)
    dperp = np.column_stack([-d[:, 1], d[:, 0]])
    w = np.zeros((len(d) + 1, 2))
    w[:-1] += 0.5 * dperp
    w[1:] += 0.5 * dperp
    return w


def validate_curves(curves, endpoints=None):
    """List the violated triod invariants of a raw ``(3, J+1, 2)`` curve array.

    Checks the shared junction node, the pinned far ends (when ``endpoints`` is
    given), equal node counts and positive segment lengths. An empty list means
    the data form a valid triod.
    """
    problems = []
    try:
        arr = np.asarray(curves, dtype=float)
    except ValueError:
        return ["curves do not share a common node count"]
    if arr.ndim != 3 or arr.shape[0] != 3 or arr.shape[2] != 2:
        return [f"expected three planar curves of shape (3, J+1, 2), got {arr.shape}"]
    if arr.shape[1] < 2:
        return ["each curve needs at least two nodes"]
    if not np.all(np.isfinite(arr)):
        problems.append("non-finite node coordinates")
    j0 = arr[:, 0]
    if not (np.array_equal(j0[0], j0[1]) and np.array_equal(j0[0], j0[2])):
        problems.append("junction mismatch: node 0 differs between curves")
    if endpoints is not None:
        ends = np.asarray(endpoints, dtype=float)
        for a in range(3):
            if not np.array_equal(arr[a, -1], ends[a]):
                problems.append(f"curve {a + 1}: far end {arr[a, -1]} is not pinned at {ends[a]}")
    for a in range(3):
        ell = segment_lengths(arr[a])
        bad = np.flatnonzero(~(ell > 0.0))
        if bad.size:
            problems.append(f"curve {a + 1}: regularity violated, segment {int(bad[0]) + 1} has zero length")
    return problems


@dataclass(frozen=True, eq=False)
class TriodState:
    """Three planar polylines sharing their first node, with pinned last nodes.

    The junction is stored once and the far ends are the ``endpoints`` array,
    so junction coincidence and pinning hold by construction; only the
    ``J - 1`` interior nodes of each curve are stored separately.

    Attributes
    ----------
    junction : ndarray, shape (2,)
    interior : ndarray, shape (3, J-1, 2)
    endpoints : ndarray, shape (3, 2)
        Projections of the fixed points ``P_alpha``.
    endpoint_z : ndarray, shape (3,)
        Heights of the fixed points, used for lifting.
    time : float
    """

    junction: np.ndarray
    interior: np.ndarray
    endpoints: np.ndarray
    endpoint_z: np.ndarray = field(default_factory=lambda: np.zeros(3))
    time: float = 0.0

    def __post_init__(self):
        junction = np.array(self.junction, dtype=float).reshape(2)
        interior = np.array(self.interior, dtype=float)
        endpoints = np.array(self.endpoints, dtype=float).reshape(3, 2)
        endpoint_z = np.array(self.endpoint_z, dtype=float).reshape(3)
        if interior.ndim != 3 or interior.shape[0] != 3 or interior.shape[2] != 2:
            raise ValueError(f"interior nodes must have shape (3, J-1, 2), got {interior.shape}")
        for arr in (junction, interior, endpoints, endpoint_z):
            arr.flags.writeable = False
        object.__setattr__(self, "junction", junction)
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "endpoints", endpoints)
        object.__setattr__(self, "endpoint_z", endpoint_z)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def from_curves(cls, curves, endpoint_z=None, time=0.0):
        """Build a state from a ``(3, J+1, 2)`` array, rejecting invalid triods."""
        arr = np.asarray(curves, dtype=float)
        problems = validate_curves(arr)
        if problems:
            raise RegularityError("invalid triod: " + "; ".join(problems))
        if endpoint_z is None:
            endpoint_z = np.zeros(3)
        return cls(arr[0, 0], arr[:, 1:-1], arr[:, -1], endpoint_z, time)

    @property
    def J(self):
        return self.interior.shape[1] + 1

    @property
    def curves(self):
        """Full node array of shape ``(3, J+1, 2)``."""
        out = np.empty((3, self.J + 1, 2))
        out[:, 0] = self.junction
        out[:, 1:-1] = self.interior
        out[:, -1] = self.endpoints
        return out

    def curve(self, alpha):
        """Nodes of curve ``alpha`` (0-based)."""
        return self.curves[alpha]

    def lengths(self):
        return np.array([discrete_length(c) for c in self.curves])

    def energy(self):
        """Total Euclidean length ``L_E`` of the projected triod."""
        return float(self.lengths().sum())

    def replace(self, *, junction=None, interior=None, time=None):
        return TriodState(
            self.junction if junction is None else junction,
            self.interior if interior is None else interior,
            self.endpoints,
            self.endpoint_z,
            self.time if time is None else time,
        )

    def transformed(self, rotation=None, shift=(0.0, 0.0)):
        """Apply the planar rigid motion ``x -> R x + shift`` to every node."""
        R = np.eye(2) if rotation is None else np.asarray(rotation, dtype=float)
        s = np.asarray(shift, dtype=float)
        return TriodState(
            R @ self.junction + s,
            self.interior @ R.T + s,
            self.endpoints @ R.T + s,
            self.endpoint_z,
            self.time,
        )


def validate_triod(state):
    """Violation list for a :class:`TriodState` (empty when valid)."""
    return validate_curves(state.curves, state.endpoints)
