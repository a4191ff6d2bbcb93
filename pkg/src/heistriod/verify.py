"""Acceptance checks shared by the test suite and the ``verify`` command."""

from __future__ import annotations

import functools
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.spatial.distance import directed_hausdorff

from .curves import TriodState, lumped_normals
from .diagnostics import curvature_sum_test, junction_angle_defect
from .experiments import builtin_experiment, build_initial_state, run_experiment
from .flow import FlowStatus, run_flow, run_single_curve_flow, solve_step
from .geodesics import arc_endpoint, arc_point, geodesic_between
from .geometry import discrete_G

__all__ = [
    "curve_hausdorff",
    "CheckResult",
    "run_preset",
    "check_steiner_fixed_point",
    "check_exp2_terminal",
    "check_exp4_terminal",
    "check_singularity_times",
    "check_unconditional_stability",
    "check_geodesic_oracle",
    "check_single_curve_convergence",
    "check_stationarity",
    "check_drift_convergence",
    "check_determinism",
    "checks_for_experiment",
    "random_triod",
]


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.criterion}: {self.name} -- {self.detail}"


@functools.lru_cache(maxsize=None)
def run_preset(exp_id, **overrides):
    """Run a preset without writing files; results are cached per process."""
    cfg = builtin_experiment(exp_id).with_overrides(**overrides)
    return run_experiment(cfg, write=False, record_snapshots=False)


def check_steiner_fixed_point(J=100, dt=1e-4, T=1.0):
    """Run the Steiner configuration for the full time with steady-state stopping off."""
    cfg = builtin_experiment(1).with_overrides(J=J, dt=dt, T=T)
    state0 = build_initial_state(cfg)
    ref = state0.curves
    worst = {"drift": 0.0, "energy": 0.0}

    def watch(st, sol):
        worst["drift"] = max(worst["drift"], float(np.abs(st.curves - ref).max()))
        worst["energy"] = max(worst["energy"], abs(sol.report.energy_after - 6.0))

    start = time.perf_counter()
    out = run_flow(state0, dt, T, eps_steady=0.0, on_step=watch, record=False)
    elapsed = time.perf_counter() - start
    worst["energy"] = max(worst["energy"], abs(state0.energy() - 6.0))
    ok = (
        out.status is FlowStatus.REACHED_T
        and worst["drift"] <= 1e-8
        and worst["energy"] <= 1e-8
        and elapsed < 60.0
    )
    detail = (
        f"status {out.status.value} at t={out.final_state.time:.4g}, max drift {worst['drift']:.2e}, "
        f"max |L_E - 6| {worst['energy']:.2e}, runtime {elapsed:.1f}s"
    )
    return CheckResult(1, "Steiner fixed point", ok, detail)


def check_exp2_terminal():
    res = run_preset(2)
    st = res.outcome.final_state
    L1 = float(st.lengths()[0])
    defect = junction_angle_defect(st)
    ok = abs(L1 - 0.326) <= 0.010 and defect <= 1e-2
    detail = f"{res.outcome.status.value} at t={st.time:.4g}: L_E(c1) = {L1:.4f} (0.326 +- 0.010), angle defect {defect:.2e}"
    return CheckResult(2, "experiment 2 terminal length", ok, detail)


def check_exp4_terminal():
    res = run_preset(4)
    st = res.outcome.final_state
    Lmin = float(st.lengths().min())
    ok = abs(Lmin - 0.065) <= 0.005 and st.time >= 0.5 - 1e-12
    detail = f"{res.outcome.status.value} at t={st.time:.4g}: shortest length {Lmin:.4f} (0.065 +- 0.005)"
    return CheckResult(3, "experiment 4 terminal length", ok, detail)


def check_singularity_times(ids=(3, 14, 15)):
    spec = {3: (1, 1.46, 0.15), 14: (1, 1.42, 0.15), 15: (2, None, 0.25)}
    parts = []
    ok = True
    for k in ids:
        curve, t_ref, tol = spec[k]
        out = run_preset(k).outcome
        t = out.final_state.time
        good = out.status is FlowStatus.SINGULARITY and out.vanished_curve == curve
        good &= abs(t - t_ref) <= tol if t_ref is not None else t <= tol
        ok &= good
        target = f"{t_ref} +- {tol}" if t_ref is not None else f"<= {tol}"
        parts.append(f"exp {k}: {out.status.value}, curve {out.vanished_curve}, t={t:.4f} ({target})")
    return CheckResult(4, "singularity times", ok, "; ".join(parts))


def random_triod(rng, J=None):
    """A random regular triod with a generic junction and curved arms."""
    J = int(rng.integers(3, 13)) if J is None else J
    S = rng.uniform(-1, 1, 2)
    base = rng.uniform(0, 2 * math.pi) + np.array([0.0, 2.1, 4.2]) + rng.uniform(-0.5, 0.5, 3)
    curves = []
    u = np.linspace(0.0, 1.0, J + 1)[:, None]
    for ang in base:
        P = S + rng.uniform(0.5, 3.0) * np.array([math.cos(ang), math.sin(ang)])
        c = (1 - u) * S + u * P
        c[1:-1] += rng.normal(scale=0.3 * np.hypot(*(P - S)) / J, size=(J - 1, 2))
        curves.append(c)
    return TriodState.from_curves(np.stack(curves), endpoint_z=rng.normal(size=3))


def check_unconditional_stability(n=1000, dts=(1e-4, 1e-2, 1.0), seed=20240501):
    rng = np.random.default_rng(seed)
    violations = 0
    failures = 0
    worst = -math.inf
    for _ in range(n):
        st = random_triod(rng)
        for dt in dts:
            try:
                _, sol = solve_step(st, dt, check_stability=False)
            except ArithmeticError:
                failures += 1
                continue
            r = sol.report
            excess = (r.energy_after + r.dissipation - r.energy_before) / (1.0 + r.energy_before)
            worst = max(worst, excess)
            violations += excess > 1e-10
    ok = violations == 0 and failures == 0
    detail = (
        f"{n} triods x {len(dts)} step sizes: {violations} violations, {failures} solver failures, "
        f"worst relative excess {worst:.2e}"
    )
    return CheckResult(5, "unconditional stability", ok, detail)


def _circle_deviation(c):
    """Relative deviation of the nodes ``c`` from the circle (or line) through three of them."""
    a, b, d = c[0], c[len(c) // 2], c[-1]
    chord = max(np.hypot(*(d - a)), np.hypot(*(b - a)))
    ax, ay = a
    bx, by = b
    dx, dy = d
    den = 2.0 * (ax * (by - dy) + bx * (dy - ay) + dx * (ay - by))
    if abs(den) < 1e-9 * chord * chord:
        t = (d - a) / np.hypot(*(d - a))
        off = (c - a) @ np.array([-t[1], t[0]])
        return float(np.abs(off).max() / chord)
    ux = ((ax**2 + ay**2) * (by - dy) + (bx**2 + by**2) * (dy - ay) + (dx**2 + dy**2) * (ay - by)) / den
    uy = ((ax**2 + ay**2) * (dx - bx) + (bx**2 + by**2) * (ax - dx) + (dx**2 + dy**2) * (bx - ax)) / den
    R = np.hypot(ax - ux, ay - uy)
    dev = np.abs(np.hypot(c[:, 0] - ux, c[:, 1] - uy) - R)
    return float(dev.max() / R)


def check_geodesic_oracle(n=1000, samples=100, seed=7):
    rng = np.random.default_rng(seed)
    worst_g = 0.0
    worst_c = 0.0
    for _ in range(n):
        q = np.append(rng.uniform(-2, 2, 2), rng.uniform(-2, 2))
        gamma, _ = geodesic_between(np.zeros(3), q, samples)
        worst_g = max(worst_g, abs(discrete_G(gamma[:, :2]) - q[2]))
        worst_c = max(worst_c, _circle_deviation(gamma[:, :2]))
    spot = arc_endpoint(math.pi, 1.0, 2 * math.pi / 3)[2]
    spot_err = abs(spot + 1 / (2 * math.pi))
    ok = worst_g <= 1e-8 and worst_c <= 1e-8 and spot_err <= 1e-12
    detail = (
        f"{n} targets: max |G - Q3| {worst_g:.2e}, max relative circle deviation {worst_c:.2e}; "
        f"spot height {spot:.15f} (error {spot_err:.1e})"
    )
    return CheckResult(6, "geodesic oracle", ok, detail)


def _perturb_preserving_area(c, amplitude, rng):
    """Add interior noise, then a smooth normal bump restoring the oriented area."""
    J = len(c) - 1
    target = discrete_G(c)
    L = float(np.hypot(*np.diff(c, axis=0).T).sum())
    noisy = c.copy()
    noisy[1:-1] += rng.uniform(-1, 1, size=(J - 1, 2)) * amplitude * L
    w = lumped_normals(noisy)
    w /= np.maximum(np.hypot(w[:, 0], w[:, 1]), 1e-300)[:, None]
    bump = np.sin(np.linspace(0.0, math.pi, J + 1))[:, None] * w

    def gap(s):
        return discrete_G(noisy + s * bump) - target

    lo, hi = -0.5 * L, 0.5 * L
    s = brentq(gap, lo, hi, xtol=1e-16) if gap(lo) * gap(hi) < 0 else 0.0
    return noisy + s * bump


def _densify(c, per_segment=64):
    """Points along every segment of the polyline ``c``, ends included."""
    u = np.linspace(0.0, 1.0, per_segment, endpoint=False)[:, None, None]
    pts = (1.0 - u) * c[None, :-1] + u * c[None, 1:]
    return np.vstack([pts.transpose(1, 0, 2).reshape(-1, c.shape[1]), c[-1:]])


def curve_hausdorff(c, dense):
    """Hausdorff distance between the polyline ``c`` and a densely sampled curve."""
    fine = _densify(np.asarray(c, dtype=float))
    return max(directed_hausdorff(fine, dense)[0], directed_hausdorff(dense, fine)[0])


def check_single_curve_convergence(J=100, dt=5e-3, T=400.0, seed=3):
    lam, s_f, a0 = math.pi, 1.0, 2 * math.pi / 3
    q = arc_endpoint(lam, s_f, a0)
    gamma, spec = geodesic_between(np.zeros(3), q, samples=J)
    rng = np.random.default_rng(seed)
    c0 = _perturb_preserving_area(gamma[:, :2], 0.01, rng)
    c, _, _, steps, steady = run_single_curve_flow(c0, dt, T)
    dense = np.array([arc_point(spec.lam, s, spec.alpha0) for s in np.linspace(0.0, spec.s_f, 20001)])
    dist = curve_hausdorff(c, dense)
    ok = steady and dist <= 1e-3
    detail = (
        f"{'steady' if steady else 'not steady'} after {steps} steps; Hausdorff distance to the arc {dist:.2e} "
        f"(area drift {abs(discrete_G(c) - q[2]):.1e})"
    )
    return CheckResult(7, "single-curve convergence", ok, detail)


def check_stationarity(ids=(1, 2, 4, 5, 7, 12, 13)):
    parts = []
    ok = True
    steady = 0
    for k in ids:
        out = run_preset(k).outcome
        if out.status is not FlowStatus.STEADY_STATE:
            parts.append(f"exp {k}: {out.status.value}, not applicable")
            continue
        steady += 1
        st = out.final_state
        defect = junction_angle_defect(st)
        _, stds, total = curvature_sum_test(out.last_solution, st)
        good = defect <= 1e-2 and stds.max() <= 5e-2 and abs(total) <= 1e-2
        ok &= good
        parts.append(f"exp {k}: defect {defect:.1e}, max stddev {stds.max():.1e}, sum {total:.1e}")
    detail = f"{steady} steady outcomes; " + "; ".join(parts)
    return CheckResult(8, "stationarity diagnostics", ok, detail)


def check_drift_convergence(dts=(4e-4, 2e-4, 1e-4), T=1.0):
    spreads = []
    for dt in dts:
        out = run_preset(2, dt=dt, T=T, eps_steady=0.0).outcome
        spreads.append(out.series[-1].z_spread)
    ratios = [a / b for a, b in zip(spreads[:-1], spreads[1:])]
    ok = all(abs(r - 2.0) <= 0.3 for r in ratios)
    detail = "spreads " + ", ".join(f"{s:.3e}" for s in spreads) + "; ratios " + ", ".join(f"{r:.3f}" for r in ratios)
    return CheckResult(9, "constraint-drift convergence", ok, detail)


def check_determinism(ids=(1, 7)):
    parts = []
    ok = True
    for k in ids:
        cfg = builtin_experiment(k)
        digests = []
        with tempfile.TemporaryDirectory() as tmp:
            for run in ("a", "b"):
                res = run_experiment(cfg, Path(tmp) / run)
                digests.append({name: Path(p).read_bytes() for name, p in res.files.items()})
        same = digests[0] == digests[1]
        ok &= same
        parts.append(f"exp {k}: {len(digests[0])} files {'identical' if same else 'DIFFER'}")
    return CheckResult(10, "determinism", ok, "; ".join(parts))


def checks_for_experiment(exp_id):
    """Acceptance checks that involve experiment ``exp_id``."""
    key = str(exp_id)
    table = {
        "1": [check_steiner_fixed_point, lambda: check_stationarity((1,)), lambda: check_determinism((1,))],
        "2": [check_exp2_terminal, lambda: check_stationarity((2,)), check_drift_convergence],
        "3": [lambda: check_singularity_times((3,))],
        "4": [check_exp4_terminal, lambda: check_stationarity((4,))],
        "5": [lambda: check_stationarity((5,))],
        "7": [lambda: check_stationarity((7,)), lambda: check_determinism((7,))],
        "12": [lambda: check_stationarity((12,))],
        "13": [lambda: check_stationarity((13,))],
        "14": [lambda: check_singularity_times((14,))],
        "15": [lambda: check_singularity_times((15,))],
    }
    return table.get(key, [lambda: check_determinism((key,))])
