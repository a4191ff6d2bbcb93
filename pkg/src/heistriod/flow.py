"""Fully discrete parametric finite element scheme for the horizontal flow of triods.

Each time step solves one sparse linear system in the node displacements
``δc`` (junction shared, far ends fixed), the nodal curvatures ``κ`` and the
multipliers ``μ`` (with ``μ_3 = -μ_1 - μ_2`` eliminated).  Writing, per curve
and node ``i``, ``m_i = (ℓ_i + ℓ_{i+1})/2`` for the lumped mass and
``ω_i = ((c_{i+1} - c_{i-1})^⊥)/2`` for the lumped normal of the current
polyline ``c^m`` (segment lengths ``ℓ``), the equations are

* ``ω_i · δc_i / Δt - m_i (κ_i - μ_α) = 0`` for every node of every curve,
* ``Σ_α κ_{α,i} ω_{α,i} + (A c^{m+1})_i = 0`` for every free node, where
  ``A`` is the stiffness matrix with segment weights ``1/ℓ_j``,
* ``Σ_i m_{α,i} (κ_{α,i} - μ_α)`` equal for the three curves.

Testing with ``κ`` and ``δc`` gives the energy inequality that every step
checks: ``L(c^{m+1}) + Δt Σ m (κ - μ)^2 <= L(c^m)``.
"""

from __future__ import annotations

import enum
import functools
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .curves import TriodState, lumped_masses, lumped_normals, segment_lengths, validate_triod
from .diagnostics import junction_angle_defect, lift_triod
from .exceptions import RegularityError, SingularSystemError, StabilityViolation

__all__ = [
    "FlowStatus",
    "StepReport",
    "StepSolution",
    "StepSystem",
    "FlowOutcome",
    "check_assumption_A",
    "assemble_step",
    "solve_step",
    "run_flow",
    "SingleCurveReport",
    "single_curve_step",
    "run_single_curve_flow",
    "STABILITY_RTOL",
]

log = logging.getLogger(__name__)

STABILITY_RTOL = 1e-10


class FlowStatus(str, enum.Enum):
    REACHED_T = "ReachedT"
    STEADY_STATE = "SteadyState"
    SINGULARITY = "Singularity"
    NUMERIC_FAILURE = "NumericFailure"


@dataclass
class StepReport:
    """Energy bookkeeping and residuals of one time step."""

    t: float
    energy_before: float
    energy_after: float
    dissipation: float
    residual_fdc: float
    linear_residual: float
    assumption_A_ok: tuple
    lengths: np.ndarray
    mu: np.ndarray
    max_displacement: float
    angle_defect: float = float("nan")
    z_spread: float = float("nan")

    @property
    def stability_margin(self):
        """``energy_before - energy_after - dissipation``; non-negative up to round-off."""
        return self.energy_before - self.energy_after - self.dissipation


@dataclass
class StepSolution:
    """Solved unknowns of one step, expanded to full nodal arrays.

    ``delta_c`` has shape ``(3, J+1, 2)`` (the three node-0 rows are the one
    junction displacement, the node-J rows are zero), ``kappa`` has shape
    ``(3, J+1)`` and ``mu`` shape ``(3,)`` with zero sum.
    """

    delta_c: np.ndarray
    kappa: np.ndarray
    mu: np.ndarray
    report: StepReport


@dataclass
class StepSystem:
    """Assembled square system ``matrix @ x = rhs`` for one step.

    Unknowns are interleaved node by node so the matrix is banded apart from
    the two multiplier rows and columns: the junction displacement and the
    three junction curvatures come first, then for each curve the triples
    ``(δx, δy, κ)`` of its interior nodes followed by ``κ`` at its far end, and
    finally ``μ_1, μ_2``.  ``pos_index[α, j]`` is the index of ``δx`` at node
    ``j`` of curve ``α`` (``-1`` at far ends) and ``kappa_index[α, j]`` that of
    ``κ``.
    """

    matrix: sp.csc_matrix
    rhs: np.ndarray
    J: int
    pos_index: np.ndarray
    kappa_index: np.ndarray
    mu_offset: int
    masses: np.ndarray
    normals: np.ndarray
    dt: float

    @property
    def n_unknowns(self):
        return self.matrix.shape[0]


@dataclass
class FlowOutcome:
    status: FlowStatus
    final_state: TriodState
    series: list = field(default_factory=list)
    vanished_curve: int | None = None
    message: str = ""
    last_solution: StepSolution | None = None
    initial_state: TriodState | None = None

    @property
    def steps(self):
        return len(self.series)


def check_assumption_A(state):
    """Per-curve flag: some interior node has a non-zero lumped normal.

    This is the solvability condition of the step system; it only fails for
    folded configurations such as ``J = 2`` with coinciding end points.
    """
    flags = []
    for c in state.curves:
        w = lumped_normals(c)[1:-1]
        scale = max(float(segment_lengths(c).max()), 1e-300)
        flags.append(bool(np.any(np.hypot(w[:, 0], w[:, 1]) > 1e-12 * scale)))
    return np.array(flags)


def _curve_entries(c, base, kidx, dt):
    """COO entries and right-hand side contributions of one curve.

    ``base[i]`` is the index of the x-displacement of node ``i`` (``-1`` if the
    node is fixed); ``kidx[i]`` is the index of ``κ_i``, which also numbers the
    row of the first equation family at that node.
    """
    c = np.asarray(c, dtype=float)
    J = len(c) - 1
    d = np.diff(c, axis=0)
    ell = np.hypot(d[:, 0], d[:, 1])
    if np.any(ell <= 0.0):
        raise RegularityError(f"zero-length segment at index {int(np.argmin(ell)) + 1}")
    w = lumped_normals(c)
    m = lumped_masses(c)
    nodes = np.arange(J + 1)
    free = base >= 0
    fn = nodes[free]
    fb = base[free]
    krows = kidx

    rows = [krows]
    cols = [krows]
    vals = [-m]
    for k in (0, 1):
        # δc · ω / Δt in the κ rows, and κ ω in the position rows
        rows += [kidx[fn], fb + k]
        cols += [fb + k, kidx[fn]]
        vals += [w[fn, k] / dt, w[fn, k]]

    a = 1.0 / ell
    p, q = nodes[:-1], nodes[1:]
    bp, bq = base[p], base[q]
    for k in (0, 1):
        for br, bc, sign in ((bq, bq, 1.0), (bq, bp, -1.0), (bp, bp, 1.0), (bp, bq, -1.0)):
            sel = (br >= 0) & (bc >= 0)
            rows.append(br[sel] + k)
            cols.append(bc[sel] + k)
            vals.append(sign * a[sel])

    rhs_idx = []
    rhs_val = []
    flux = a[:, None] * d
    for k in (0, 1):
        sel = bq >= 0
        rhs_idx.append(bq[sel] + k)
        rhs_val.append(-flux[sel, k])
        sel = bp >= 0
        rhs_idx.append(bp[sel] + k)
        rhs_val.append(flux[sel, k])
    return rows, cols, vals, rhs_idx, rhs_val, m, w


@functools.lru_cache(maxsize=32)
def _triod_layout(J):
    stride = 3 * (J - 1) + 1
    pos = np.full((3, J + 1), -1, dtype=np.int64)
    kap = np.empty((3, J + 1), dtype=np.int64)
    for a in range(3):
        start = 5 + a * stride
        pos[a, 0] = 0
        kap[a, 0] = 2 + a
        pos[a, 1:J] = start + 3 * np.arange(J - 1)
        kap[a, 1:J] = pos[a, 1:J] + 2
        kap[a, J] = start + 3 * (J - 1)
    pos.flags.writeable = False
    kap.flags.writeable = False
    return pos, kap, 5 + 3 * stride


def assemble_step(state, dt):
    """Assemble the linear system of one step from the current triod.

    Returns
    -------
    StepSystem
        Square sparse system with ``(6J - 4) + 3(J + 1) + 2`` unknowns.
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    problems = validate_triod(state)
    if problems:
        raise RegularityError("; ".join(problems))
    J = state.J
    curves = state.curves
    pos_index, kappa_index, mu0 = _triod_layout(J)
    n = mu0 + 2
    rows, cols, vals, ridx, rval = [], [], [], [], []
    masses = np.empty((3, J + 1))
    normals = np.empty((3, J + 1, 2))
    for a in range(3):
        krows = kappa_index[a]
        r, c_, v, ri, rv, m, w = _curve_entries(curves[a], pos_index[a], krows, dt)
        rows += r
        cols += c_
        vals += v
        ridx += ri
        rval += rv
        masses[a] = m
        normals[a] = w
        # +m μ_α in the κ rows, with μ_3 = -μ_1 - μ_2
        if a < 2:
            rows.append(krows)
            cols.append(np.full(J + 1, mu0 + a))
            vals.append(m)
        else:
            rows += [krows, krows]
            cols += [np.full(J + 1, mu0), np.full(J + 1, mu0 + 1)]
            vals += [-m, -m]

    L = masses.sum(axis=1)
    k0, k1, k2 = kappa_index
    # Σ m_1 κ_1 - L_1 μ_1 = Σ m_2 κ_2 - L_2 μ_2
    rows += [np.full(J + 1, mu0), np.full(J + 1, mu0), np.array([mu0, mu0])]
    cols += [k0, k1, np.array([mu0, mu0 + 1])]
    vals += [masses[0], -masses[1], np.array([-L[0], L[1]])]
    # Σ m_2 κ_2 - L_2 μ_2 = Σ m_3 κ_3 - L_3 μ_3
    rows += [np.full(J + 1, mu0 + 1), np.full(J + 1, mu0 + 1), np.array([mu0 + 1, mu0 + 1])]
    cols += [k1, k2, np.array([mu0, mu0 + 1])]
    vals += [masses[1], -masses[2], np.array([-L[2], -(L[1] + L[2])])]

    matrix = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    rhs = np.zeros(n)
    np.add.at(rhs, np.concatenate(ridx), np.concatenate(rval))
    return StepSystem(matrix, rhs, J, pos_index, kappa_index, mu0, masses, normals, float(dt))


def _solve_sparse(matrix, rhs, on_singular):
    try:
        # The unknowns are already ordered for low fill-in.
        lu = spla.splu(matrix, permc_spec="NATURAL")
    except RuntimeError as exc:
        on_singular(exc)
    x = lu.solve(rhs)
    r = matrix @ x - rhs
    scale = max(float(np.abs(rhs).max()), 1.0)
    if np.abs(r).max() > 1e-12 * scale:
        x = x - lu.solve(r)
        r = matrix @ x - rhs
    if not np.all(np.isfinite(x)):
        on_singular(None)
    return x, float(np.abs(r).max())


def solve_step(state, dt, *, check_stability=True):
    """Advance the triod by one time step.

    Returns
    -------
    (TriodState, StepSolution)

    Raises
    ------
    SingularSystemError
        If the system is singular; ``curve`` names the first curve failing
        :func:`check_assumption_A` when one does.
    StabilityViolation
        If the energy inequality fails beyond a relative ``1e-10``.
    """
    system = assemble_step(state, dt)
    flags = check_assumption_A(state)

    def singular(exc):
        bad = [i + 1 for i, ok in enumerate(flags) if not ok]
        curve = bad[0] if bad else None
        msg = "step system is singular"
        if curve is not None:
            msg += f"; Assumption A fails for curve {curve}"
        raise SingularSystemError(msg, curve=curve) from exc

    x, lin_res = _solve_sparse(system.matrix, system.rhs, singular)
    J = state.J
    dc_j = x[0:2]
    inner = system.pos_index[:, 1:J]
    dc_int = np.stack([x[inner], x[inner + 1]], axis=-1)
    kappa = x[system.kappa_index]
    mu12 = x[system.mu_offset : system.mu_offset + 2]
    mu = np.array([mu12[0], mu12[1], -mu12[0] - mu12[1]])

    delta_c = np.zeros((3, J + 1, 2))
    delta_c[:, 0] = dc_j
    delta_c[:, 1:-1] = dc_int

    new_state = TriodState(
        state.junction + dc_j,
        state.interior + dc_int,
        state.endpoints,
        state.endpoint_z,
        state.time + dt,
    )

    m = system.masses
    excess = kappa - mu[:, None]
    fdc = (m * excess).sum(axis=1)
    dissipation = float(dt * (m * excess**2).sum())
    e_before = float(m.sum())
    lengths_after = new_state.lengths()
    e_after = float(lengths_after.sum())
    disp = float(np.hypot(delta_c[..., 0], delta_c[..., 1]).max())

    report = StepReport(
        t=new_state.time,
        energy_before=e_before,
        energy_after=e_after,
        dissipation=dissipation,
        residual_fdc=float(fdc.max() - fdc.min()),
        linear_residual=lin_res,
        assumption_A_ok=tuple(bool(f) for f in flags),
        lengths=lengths_after,
        mu=mu,
        max_displacement=disp,
    )
    if check_stability and e_after + dissipation > e_before + STABILITY_RTOL * (1.0 + e_before):
        raise StabilityViolation(
            f"energy inequality violated at t={new_state.time:.6g}: "
            f"{e_after!r} + {dissipation!r} > {e_before!r}"
        )
    report.angle_defect = junction_angle_defect(new_state)
    report.z_spread = lift_triod(new_state)[1]
    return new_state, StepSolution(delta_c, kappa, mu, report)


def _mesh_degenerate(state):
    J = state.J
    for a, c in enumerate(state.curves):
        ell = segment_lengths(c)
        if ell.min() < 1e-3 * ell.sum() / J:
            return a + 1
    return None


def run_flow(
    state,
    dt,
    T,
    eps_sing=None,
    eps_steady=1e-6,
    *,
    on_step=None,
    snapshot_times=(),
    on_snapshot=None,
    record=True,
):
    """Integrate the flow from ``state`` up to time ``T``.

    Parameters
    ----------
    state : TriodState
    dt, T : float
        Step size and final time; ``round((T - state.time) / dt)`` steps are taken.
    eps_sing : float, optional
        Stop with ``Singularity`` once the shortest curve is shorter than this.
        Defaults to 1% of the initial shortest curve length.
    eps_steady : float
        Stop with ``SteadyState`` once the largest node displacement of a step is
        below ``eps_steady * dt``. ``0`` disables the test.
    on_step : callable, optional
        Called as ``on_step(new_state, solution)`` after every step.
    snapshot_times : sequence of float
        Times at which ``on_snapshot(state)`` is called with the state of the
        nearest completed step (the initial state for times ``<= 0``).
    record : bool
        Keep every :class:`StepReport` in ``FlowOutcome.series``.

    Returns
    -------
    FlowOutcome
    """
    if not (eps_steady >= 0):
        raise ValueError("eps_steady must be non-negative")
    if eps_sing is None:
        eps_sing = 1e-2 * float(state.lengths().min())
    if not eps_sing > 0:
        raise ValueError("eps_sing must be positive")
    t0 = state.time
    n_steps = int(round((T - t0) / dt))
    snap_steps = sorted({max(0, int(round((t - t0) / dt))) for t in snapshot_times})
    pending = list(snap_steps)

    def emit(step, st, force=False):
        due = False
        while pending and (pending[0] <= step or force):
            pending.pop(0)
            due = True
        if due and on_snapshot is not None:
            on_snapshot(st)

    series = []
    emit(0, state)
    current = state
    solution = None
    status = FlowStatus.REACHED_T
    vanished = None
    message = ""
    for k in range(1, n_steps + 1):
        try:
            nxt, solution = solve_step(current, dt)
        except (SingularSystemError, StabilityViolation, RegularityError) as exc:
            status = FlowStatus.NUMERIC_FAILURE
            message = f"t={current.time + dt:.6g}: {exc}"
            log.warning("flow stopped: %s", message)
            break
        # Label times by step count so restarts reproduce the same clock.
        nxt = nxt.replace(time=t0 + k * dt)
        solution.report.t = nxt.time
        current = nxt
        if record:
            series.append(solution.report)
        if on_step is not None:
            on_step(current, solution)
        emit(k, current)
        lengths = solution.report.lengths
        if lengths.min() < eps_sing:
            status = FlowStatus.SINGULARITY
            vanished = int(np.argmin(lengths)) + 1
            message = f"curve {vanished} shorter than {eps_sing:.3g} at t={current.time:.6g}"
            break
        bad = _mesh_degenerate(current)
        if bad is not None:
            status = FlowStatus.NUMERIC_FAILURE
            message = f"mesh of curve {bad} degenerated at t={current.time:.6g}"
            break
        if solution.report.max_displacement < eps_steady * dt:
            status = FlowStatus.STEADY_STATE
            message = f"steady state at t={current.time:.6g}"
            break
    emit(n_steps, current, force=True)
    return FlowOutcome(status, current, series, vanished, message, solution, state)


@dataclass
class SingleCurveReport:
    energy_before: float
    energy_after: float
    dissipation: float
    constraint_residual: float
    linear_residual: float
    max_displacement: float


def single_curve_step(c, dt, *, check_stability=True):
    """One step of the scheme for a single curve with both ends fixed.

    The multiplier is a single scalar fixed by ``Σ_i m_i (κ_i - μ) = 0``, so
    the discrete curvature integral equals ``μ`` times the length.

    Returns
    -------
    (ndarray, ndarray, float, SingleCurveReport)
        New nodes, nodal curvature, multiplier and report.
    """
    c = np.asarray(c, dtype=float)
    J = len(c) - 1
    if J < 2:
        raise ValueError("need at least one interior node")
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    # κ_0, then (δx, δy, κ) per interior node, κ_J, μ
    base = np.full(J + 1, -1, dtype=np.int64)
    base[1:J] = 1 + 3 * np.arange(J - 1)
    krows = np.empty(J + 1, dtype=np.int64)
    krows[0] = 0
    krows[1:J] = base[1:J] + 2
    krows[J] = 3 * J - 2
    mu_col = 3 * J - 1
    n = 3 * J
    rows, cols, vals, ridx, rval, m, w = _curve_entries(c, base, krows, dt)
    rows += [krows, np.full(J + 1, mu_col), np.array([mu_col])]
    cols += [np.full(J + 1, mu_col), krows, np.array([mu_col])]
    L = float(m.sum())
    vals += [m, m, np.array([-L])]
    matrix = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    rhs = np.zeros(n)
    np.add.at(rhs, np.concatenate(ridx), np.concatenate(rval))

    def singular(exc):
        raise SingularSystemError("single-curve step system is singular", curve=1) from exc

    x, lin_res = _solve_sparse(matrix, rhs, singular)
    delta = np.zeros_like(c)
    delta[1:J, 0] = x[base[1:J]]
    delta[1:J, 1] = x[base[1:J] + 1]
    kappa = x[krows]
    mu = float(x[mu_col])
    new = c + delta
    excess = kappa - mu
    dissipation = float(dt * (m * excess**2).sum())
    e_after = float(segment_lengths(new).sum())
    report = SingleCurveReport(
        energy_before=L,
        energy_after=e_after,
        dissipation=dissipation,
        constraint_residual=float(abs((m * excess).sum())),
        linear_residual=lin_res,
        max_displacement=float(np.hypot(delta[:, 0], delta[:, 1]).max()),
    )
    if check_stability and e_after + dissipation > L + STABILITY_RTOL * (1.0 + L):
        raise StabilityViolation(f"energy inequality violated: {e_after!r} + {dissipation!r} > {L!r}")
    return new, kappa, mu, report


def run_single_curve_flow(c, dt, T, eps_steady=1e-6):
    """Iterate :func:`single_curve_step` until ``T`` or a steady state.

    Returns ``(nodes, kappa, mu, steps, steady)``.
    """
    c = np.asarray(c, dtype=float)
    kappa, mu = None, None
    n_steps = int(round(T / dt))
    for k in range(1, n_steps + 1):
        c, kappa, mu, rep = single_curve_step(c, dt)
        if rep.max_displacement < eps_steady * dt:
            return c, kappa, mu, k, True
    return c, kappa, mu, n_steps, False
