"""Stationarity and constraint instrumentation for triod states and flow runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import lumped_masses, segment_frames
from .exceptions import StabilityViolation
from .geometry import horizontal_lift

__all__ = [
    "StationarityReport",
    "ENERGY_COLUMNS",
    "junction_angle_defect",
    "curvature_sum_test",
    "multiplier_to_lambda",
    "lambda_to_multiplier",
    "lambda_from_system",
    "lift_triod",
    "stationarity_report",
    "energy_series",
]

ENERGY_COLUMNS = (
    "t",
    "L_total",
    "L1",
    "L2",
    "L3",
    "mu1",
    "mu2",
    "mu3",
    "dissipation",
    "angle_defect",
    "z_spread",
)


@dataclass(frozen=True)
class StationarityReport:
    angle_defect: float
    curvature_means: np.ndarray
    curvature_stddevs: np.ndarray
    curvature_sum: float
    lam: tuple
    junction_z_spread: float


def junction_angle_defect(state):
    """Length of the sum of the three unit tangents leaving the junction.

    Zero exactly when the first segments meet at 120 degrees; at most 3.
    """
    total = np.zeros(2)
    for c in state.curves:
        total += segment_frames(c[:2]).tangent[0]
    return float(np.hypot(*total))


def curvature_sum_test(solution, state):
    """Mass-weighted mean and standard deviation of the nodal curvature per curve.

    Returns
    -------
    (means, stddevs, sum_of_means)
    """
    kappa = np.asarray(solution.kappa, dtype=float)
    means = np.empty(3)
    stds = np.empty(3)
    for a, c in enumerate(state.curves):
        m = lumped_masses(c)
        means[a] = np.dot(m, kappa[a]) / m.sum()
        stds[a] = np.sqrt(np.dot(m, (kappa[a] - means[a]) ** 2) / m.sum())
    return means, stds, float(means.sum())


def multiplier_to_lambda(mu, tol=1e-10):
    """Convert ``(μ_1, μ_2, μ_3)`` with zero sum to ``(λ_1, λ_2) = (-μ_1, μ_3)``."""
    mu = np.asarray(mu, dtype=float)
    scale = 1.0 + float(np.abs(mu).max())
    if abs(mu.sum()) > tol * scale:
        raise ValueError(f"multipliers must sum to zero, got sum {mu.sum():.3e}")
    lam1, lam2 = -mu[0], mu[2]
    if abs(mu[1] - (lam1 - lam2)) > tol * scale:
        raise ValueError("multipliers are inconsistent with mu2 = lambda1 - lambda2")
    return float(lam1), float(lam2)


def lambda_to_multiplier(lam1, lam2):
    return np.array([-lam1, lam1 - lam2, lam2], dtype=float)


def lambda_from_system(state, kappa):
    """Solve the 2x2 multiplier system built from lengths and curvature integrals.

    With ``L_α`` the curve lengths and ``I_α = Σ_i m_i κ_i`` the lumped
    curvature integrals, ``(λ_1, λ_2)`` solves
    ``[[L1 + L2, -L2], [-L2, L2 + L3]] λ = (I2 - I1, I3 - I2)``, the condition
    that ``I_α - L_α μ_α`` agree for all three curves.
    """
    kappa = np.asarray(kappa, dtype=float)
    masses = [lumped_masses(c) for c in state.curves]
    L = np.array([m.sum() for m in masses])
    I = np.array([np.dot(m, k) for m, k in zip(masses, kappa)])
    mat = np.array([[L[0] + L[1], -L[1]], [-L[1], L[1] + L[2]]])
    lam = np.linalg.solve(mat, [I[1] - I[0], I[2] - I[1]])
    return float(lam[0]), float(lam[1])


def lift_triod(state):
    """Lift every curve backward from its fixed endpoint.

    Returns
    -------
    (ndarray of shape (3, J+1, 3), float)
        The lifted curves and the spread ``max - min`` of their junction heights.
    """
    lifts = np.stack(
        [horizontal_lift(c, z_end=z) for c, z in zip(state.curves, state.endpoint_z)]
    )
    zj = lifts[:, 0, 2]
    return lifts, float(zj.max() - zj.min())


def stationarity_report(state, solution):
    """Bundle the stationarity diagnostics of ``state`` and the step that produced it."""
    means, stds, total = curvature_sum_test(solution, state)
    return StationarityReport(
        angle_defect=junction_angle_defect(state),
        curvature_means=means,
        curvature_stddevs=stds,
        curvature_sum=total,
        lam=multiplier_to_lambda(solution.mu, tol=1e-8),
        junction_z_spread=lift_triod(state)[1],
    )


def energy_series(outcome):
    """Tabulate a flow run as columns keyed by :data:`ENERGY_COLUMNS`.

    The first row describes the initial state (multipliers undefined, shown as
    NaN, and zero dissipation); each further row is one step.

    Raises
    ------
    StabilityViolation
        If the total energy increases between consecutive rows beyond round-off.
    """
    rows = []
    init = outcome.initial_state
    if init is not None:
        L = init.lengths()
        rows.append(
            [init.time, L.sum(), *L, np.nan, np.nan, np.nan, 0.0, junction_angle_defect(init), lift_triod(init)[1]]
        )
    for r in outcome.series:
        L = r.lengths
        rows.append([r.t, L.sum(), *L, *r.mu, r.dissipation, r.angle_defect, r.z_spread])
    table = np.array(rows, dtype=float).reshape(-1, len(ENERGY_COLUMNS))
    total = table[:, 1]
    bad = np.flatnonzero(np.diff(total) > 1e-10 * (1.0 + total[:-1]))
    if bad.size:
        i = int(bad[0])
        raise StabilityViolation(f"total energy increased from {total[i]!r} to {total[i + 1]!r}")
    return {name: table[:, k] for k, name in enumerate(ENERGY_COLUMNS)}
