"""CSV series, node snapshots and SVG plots.

Numbers in CSV files are written with 17 significant digits so that a
snapshot read back reproduces the stored state bit for bit.  SVG output uses
a fixed canvas and fixed decimal formatting, so equal inputs give equal bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curves import TriodState
from .diagnostics import ENERGY_COLUMNS, lift_triod

__all__ = [
    "SnapshotRecord",
    "snapshot_record",
    "state_from_snapshot",
    "write_energy_csv",
    "read_energy_csv",
    "write_snapshots_csv",
    "read_snapshots_csv",
    "read_polyline_csv",
    "write_polyline_csv",
    "write_svg",
    "SINGLE_TIME_COLORS",
    "MULTI_TIME_COLORS",
]

SINGLE_TIME_COLORS = ("#808000", "#800080", "#ffd700")  # olive, purple, gold
MULTI_TIME_COLORS = ("#0000ff", "#000000", "#ff0000")  # initial, intermediate, final

SNAPSHOT_COLUMNS = ("t", "alpha", "j", "x", "y", "z")


def _fmt(v):
    return format(float(v), ".17g")


@dataclass(frozen=True)
class SnapshotRecord:
    """Lifted nodes of a triod at one time; ``nodes`` has shape ``(3, J+1, 3)``."""

    t: float
    nodes: np.ndarray

    @property
    def J(self):
        return self.nodes.shape[1] - 1


def snapshot_record(state):
    """Record ``state`` with heights lifted backward from the fixed end points."""
    lifts, _ = lift_triod(state)
    return SnapshotRecord(state.time, lifts)


def state_from_snapshot(record):
    """Rebuild the triod stored in ``record`` (planar nodes, end heights and time)."""
    nodes = np.asarray(record.nodes, dtype=float)
    return TriodState.from_curves(nodes[:, :, :2], endpoint_z=nodes[:, -1, 2], time=record.t)


def write_energy_csv(table, path):
    """Write the columns of :func:`~heistriod.diagnostics.energy_series` in fixed order."""
    cols = [np.asarray(table[name], dtype=float) for name in ENERGY_COLUMNS]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ENERGY_COLUMNS)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def read_energy_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(-1, len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def write_snapshots_csv(records, path):
    """One row per node: ``t, alpha, j, x, y, z`` with ``alpha`` in 1..3."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_COLUMNS)
        for rec in records:
            t = _fmt(rec.t)
            for a in range(3):
                for j, (x, y, z) in enumerate(rec.nodes[a]):
                    w.writerow([t, a + 1, j, _fmt(x), _fmt(y), _fmt(z)])


def read_snapshots_csv(path):
    """Inverse of :func:`write_snapshots_csv`.

    Raises
    ------
    ValueError
        If a snapshot does not hold the same number of nodes on each curve.
    """
    groups = {}
    order = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            key = row["t"]
            if key not in groups:
                groups[key] = {1: [], 2: [], 3: []}
                order.append(key)
            groups[key][int(row["alpha"])].append(
                (int(row["j"]), float(row["x"]), float(row["y"]), float(row["z"]))
            )
    records = []
    for key in order:
        curves = []
        for a in (1, 2, 3):
            pts = sorted(groups[key][a])
            if [p[0] for p in pts] != list(range(len(pts))):
                raise ValueError(f"snapshot t={key}: curve {a} has missing or repeated nodes")
            curves.append([p[1:] for p in pts])
        if len({len(c) for c in curves}) != 1:
            raise ValueError(f"snapshot t={key}: node counts differ between curves")
        records.append(SnapshotRecord(float(key), np.array(curves, dtype=float)))
    return records


def read_polyline_csv(path):
    """Read an ``x,y`` (optionally ``x,y,z``) table with or without a header row."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if rows:
                    raise
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError(f"{path}: expected 2 or 3 numeric columns")
    return arr


def write_polyline_csv(nodes, path, header=("x", "y", "z")):
    nodes = np.asarray(nodes, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header[: nodes.shape[1]])
        for row in nodes:
            w.writerow([_fmt(v) for v in row])


class _Canvas:
    def __init__(self, width, height, margin):
        self.width = width
        self.height = height
        self.margin = margin
        self.parts = []

    def fit(self, xmin, xmax, ymin, ymax, equal):
        span_x = max(xmax - xmin, 1e-12)
        span_y = max(ymax - ymin, 1e-12)
        sx = (self.width - 2 * self.margin) / span_x
        sy = (self.height - 2 * self.margin) / span_y
        if equal:
            sx = sy = min(sx, sy)
        # centre the data box on the canvas
        ox = 0.5 * (self.width - sx * span_x) - sx * xmin
        oy = 0.5 * (self.height + sy * span_y) + sy * ymin
        self.map = lambda x, y: (ox + sx * x, oy - sy * y)

    def polyline(self, pts, color, width=1.5):
        coords = " ".join("{:.3f},{:.3f}".format(*self.map(x, y)) for x, y in pts)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width:.1f}"/>'
        )

    def dot(self, x, y, color, r=2.5):
        px, py = self.map(x, y)
        self.parts.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="{r:.1f}" fill="{color}"/>')

    def text(self, px, py, s, anchor="start"):
        self.parts.append(
            f'<text x="{px:.1f}" y="{py:.1f}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{s}</text>'
        )

    def render(self):
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
            f'<svg version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" xmlns="http://www.w3.org/2000/svg">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _projected_svg(states):
    canvas = _Canvas(640, 640, 40)
    pts = np.concatenate([s.curves.reshape(-1, 2) for s in states])
    canvas.fit(pts[:, 0].min(), pts[:, 0].max(), pts[:, 1].min(), pts[:, 1].max(), equal=True)
    n = len(states)
    for k, st in enumerate(states):
        for a, c in enumerate(st.curves):
            if n == 1:
                color = SINGLE_TIME_COLORS[a]
            else:
                color = MULTI_TIME_COLORS[0 if k == 0 else (2 if k == n - 1 else 1)]
            canvas.polyline(c, color)
    last = states[-1]
    for p in last.endpoints:
        canvas.dot(p[0], p[1], "#404040")
    canvas.dot(last.junction[0], last.junction[1], "#404040")
    times = ", ".join(f"{s.time:.4g}" for s in states)
    canvas.text(canvas.margin, 20, f"t = {times}")
    return canvas.render()


def _energy_svg(table, columns):
    t = np.asarray(table["t"], dtype=float)
    series = [(name, np.asarray(table[name], dtype=float)) for name in columns]
    canvas = _Canvas(640, 400, 50)
    vals = np.concatenate([v for _, v in series])
    vals = vals[np.isfinite(vals)]
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    t0, t1 = float(t.min()), float(t.max())
    if t1 - t0 < 1e-12:
        t1 = t0 + 1.0
    canvas.fit(t0, t1, lo, hi, equal=False)
    axis = [(t0, lo), (t1, lo)], [(t0, lo), (t0, hi)]
    for seg in axis:
        canvas.polyline(seg, "#808080", width=1.0)
    for tv, yv, anchor, dx, dy in ((t0, lo, "middle", 0, 16), (t1, lo, "middle", 0, 16)):
        px, py = canvas.map(tv, yv)
        canvas.text(px + dx, py + dy, f"{tv:.4g}", anchor)
    for yv in (lo, hi):
        px, py = canvas.map(t0, yv)
        canvas.text(px - 4, py + 4, f"{yv:.4g}", "end")
    for k, (name, v) in enumerate(series):
        ok = np.isfinite(v)
        canvas.polyline(np.column_stack([t[ok], v[ok]]), MULTI_TIME_COLORS[(k + 1) % 3])
        canvas.text(canvas.width - canvas.margin, 20 + 14 * k, name, "end")
    return canvas.render()


def write_svg(data, mode, path, *, columns=("L_total",)):
    """Write a static SVG 1.1 plot.

    Parameters
    ----------
    data : sequence of TriodState or mapping
        States for ``mode="projected"``; an energy table for ``mode="energy"``.
    mode : {"projected", "energy"}
        Projected triods use olive, purple and gold per curve for a single
        time, and blue, black and red for initial, intermediate and final times.
    columns : tuple of str
        Energy-table columns to draw in ``"energy"`` mode.
    """
    if mode == "projected":
        states = list(data)
        if not states:
            raise ValueError("no snapshots to plot")
        text = _projected_svg(states)
    elif mode == "energy":
        if data is None or len(data["t"]) == 0:
            raise ValueError("empty energy table")
        text = _energy_svg(data, columns)
    else:
        raise ValueError(f"unknown plot mode {mode!r}")
    Path(path).write_text(text, encoding="utf-8")
    return Path(path)
