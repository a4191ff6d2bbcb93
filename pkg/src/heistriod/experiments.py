"""Experiment configurations, the built-in presets and the experiment runner.

A configuration is a JSON document::

    {
      "schema": 1,
      "name": "exp2",
      "junction": [0, 0, 0],
      "endpoints": [[-0.5, 0, 0], [1, -3, 0], [1, 3, 0]],
      "initial": {"kind": "PlanarLine"},
      "J": 100, "dt": "0.0001", "T": "5",
      "eps_sing": null, "eps_steady": "1e-06",
      "snapshots": ["0", "1", "5"], "svg": true
    }

Reals may be given as JSON numbers or decimal strings; they are written back
as shortest round-trip decimal strings.  An end point may omit its height
(``[x, y]`` or ``[x, y, null]``) for the generators that produce planar
curves, in which case the height comes from lifting the initial curve.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .diagnostics import energy_series
from .exceptions import ConfigError, DegenerateInputError
from .flow import run_flow
from .initial import (
    BezierHandle,
    make_initial_bezier_compatible,
    make_initial_example_family,
    make_initial_geodesic,
    make_initial_line3d,
    make_initial_planar_line,
)
from .io import snapshot_record, write_energy_csv, write_snapshots_csv, write_svg

__all__ = [
    "SCHEMA_VERSION",
    "INITIAL_KINDS",
    "ExperimentConfig",
    "RunResult",
    "builtin_experiment",
    "builtin_ids",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "save_config",
    "build_initial_state",
    "run_experiment",
    "default_output_root",
]

SCHEMA_VERSION = 1
INITIAL_KINDS = ("PlanarLine", "Line3D", "BezierCompatible", "ExampleFamily", "GeodesicSampled")
_PLANAR_KINDS = ("PlanarLine", "BezierCompatible")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one flow run.

    ``endpoints`` holds three ``(x, y, z)`` tuples where ``z`` may be None for
    planar generators.  ``initial`` is the generator description, a dict with
    key ``"kind"`` plus generator parameters.  ``z_tolerance`` bounds the
    difference between a given end height and the lifted one for planar
    generators.
    """

    name: str
    junction: tuple
    endpoints: tuple
    initial: dict
    J: int = 100
    dt: float = 1e-4
    T: float = 1.0
    eps_sing: float | None = None
    eps_steady: float = 1e-6
    snapshots: tuple = ()
    svg: bool = True
    qualitative: bool = False
    z_tolerance: float = 1e-3
    notes: str = ""

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


@dataclass
class RunResult:
    config: ExperimentConfig
    outcome: object
    table: dict
    files: dict = field(default_factory=dict)
    snapshots: list = field(default_factory=list)


def _h(angle, d1, end_angle, d2):
    return {"angle": angle, "d1": d1, "end_angle": end_angle, "d2": d2}


_SQRT3 = math.sqrt(3.0)
_CHORD_5 = math.degrees(math.atan2(-3.0, 1.0))

# d1 values below were calibrated with ``initial.calibrate_handle`` at J = 100 so
# that the lifted end heights hit the preset ones.
_PRESETS = {
    "1": dict(
        junction=(0, 0, 0),
        endpoints=((-2, 0, 0), (1, -_SQRT3, 0), (1, _SQRT3, 0)),
        initial={"kind": "PlanarLine"},
        T=1.0,
        snapshots=(0, 1),
        notes="Steiner configuration, a steady state",
    ),
    "2": dict(
        junction=(0, 0, 0),
        endpoints=((-0.5, 0, 0), (1, -3, 0), (1, 3, 0)),
        initial={"kind": "PlanarLine"},
        T=5.0,
        snapshots=(0, 1, 5),
        notes="obtuse triangle; relaxes to 120 degrees, shortest curve about 0.326",
    ),
    "3": dict(
        junction=(0, 0, 0),
        endpoints=((-0.5, 0, 0), (1, -9, 0), (1, 9, 0)),
        initial={"kind": "PlanarLine"},
        T=2.0,
        snapshots=(0, 1, 1.46),
        notes="very obtuse triangle; curve 1 vanishes near t = 1.46",
    ),
    "4": dict(
        junction=(0, 0.1, 0),
        endpoints=((1, 0, -0.05), (0, 0, 0), (-0.5, _SQRT3 / 2, 0.025)),
        initial={"kind": "Line3D"},
        T=0.5,
        snapshots=(0, 0.5),
        notes="straight lines in space; P3 height 0.025 makes its segment horizontal",
    ),
    "5": dict(
        junction=(0, 0, 0),
        endpoints=((-0.5, 0, 0), (1, -3, -0.167), (1, 3, 0.167)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(180.0, 1 / 6, 180.0, 1 / 6),
                _h(-60.0, 0.9535391489603615, _CHORD_5, 0.5),
                _h(60.0, 0.9535391489603615, -_CHORD_5, 0.5),
            ],
        },
        T=5.0,
        snapshots=(0, 1, 5),
    ),
    "6": dict(
        junction=(0, 0, 0),
        endpoints=((-0.5, 0, 0), (1, -9, -2.74), (1, 9, 2.74)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(180.0, 1 / 6, 180.0, 1 / 6),
                _h(-60.0, 2.126990487181406, -90.0, 3.0),
                _h(60.0, 2.126990487181406, 90.0, 3.0),
            ],
        },
        T=20.0,
        snapshots=(0, 1, 5, 16.6),
        notes="shortest curve vanishes near t = 16.6",
    ),
    "7": dict(
        junction=(0, 0, 0),
        endpoints=((1, 0, 0), (1, 0, -0.07), (1, 0, 0.07)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(0.0, 1 / 3, 0.0, 1 / 3),
                _h(120.0, 0.29939819847383026, 0.0, 0.2),
                _h(240.0, 0.29939819847383037, 0.0, 0.2),
            ],
        },
        T=0.2,
        snapshots=(0, 0.02, 0.05, 0.2),
        notes="equal projected end points; approaches a symmetric double bubble",
    ),
    "7b": dict(
        junction=(-1, 0, 0),
        endpoints=((0, 0, 0), (0, 0, -0.07), (0, 0, 0.07)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(0.0, 1 / 3, 0.0, 1 / 3),
                _h(120.0, 0.29939819847383026, 0.0, 0.2),
                _h(240.0, 0.29939819847383037, 0.0, 0.2),
            ],
        },
        T=0.2,
        snapshots=(0, 0.02, 0.05, 0.2),
        notes="experiment 7 shifted one unit to the left",
    ),
    "8": dict(
        junction=(-1, 0, 0),
        endpoints=((0, 0, 0), (0, 0, -0.13), (0, 0, 0.02)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(0.0, 1 / 3, 0.0, 1 / 3),
                _h(120.0, 0.3046761253565542, -30.0, 0.4),
                _h(240.0, 0.08104173192695678, 0.0, 0.1),
            ],
        },
        T=0.2,
        snapshots=(0, 0.02, 0.2),
        qualitative=True,
        notes="unequal enclosed areas",
    ),
    "9": dict(
        junction=(-1, 0, 0),
        endpoints=((0, 0, 0), (0, 0, 1.95), (0, 0, 0.02)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(0.0, 1 / 3, 0.0, 1 / 3),
                _h(240.0, 3.2952942661632654, 90.0, 2.0),
                _h(120.0, 0.29494515824069867, 90.0, 0.3),
            ],
        },
        T=20.0,
        snapshots=(0, 0.5, 5, 20),
        qualitative=True,
        notes="strongly unequal enclosed areas",
    ),
    "10": dict(
        junction=(-1, 0, 0),
        endpoints=((0, 0, 0), (0, 0, 1.95), (0, 0, -1.04)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(0.0, 1 / 3, 0.0, 1 / 3),
                _h(240.0, 3.2952942661632654, 90.0, 2.0),
                _h(120.0, 1.5852767467657187, -90.0, 1.5),
            ],
        },
        T=2.0,
        snapshots=(0, 0.5, 1.2),
        qualitative=True,
        notes="shortest curve vanishes",
    ),
    "11": dict(
        junction=(-1, 0, 0),
        endpoints=((0, 0, 0), (0, 0, 1.95), (0, 0, -0.39)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(0.0, 1 / 3, 0.0, 1 / 3),
                _h(240.0, 3.2952942661632654, 90.0, 2.0),
                _h(120.0, 0.4692485165878114, -90.0, 0.8),
            ],
        },
        T=5.0,
        snapshots=(0, 0.36, 0.38, 0.5, 5),
        qualitative=True,
        notes="unequal double bubble with a change of energy decay rate",
    ),
    "12": dict(
        junction=(0, 0, 0),
        endpoints=((-1, 0, 0), (1, 0, 0.07), (1, 0, -0.07)),
        initial={
            "kind": "BezierCompatible",
            "handles": [
                _h(180.0, 1 / 3, 180.0, 1 / 3),
                _h(-60.0, 0.2993977793165886, 0.0, 0.2),
                _h(60.0, 0.2993977793165886, 0.0, 0.2),
            ],
        },
        T=0.3,
        snapshots=(0, 0.05, 0.3),
        notes="approaches a lens",
    ),
    "13": dict(
        junction=(0, 0, 0),
        endpoints=((0, 0, -math.pi), (1, -_SQRT3, 0), (1, _SQRT3, 0)),
        initial={"kind": "GeodesicSampled", "alpha0": [1.5 * math.pi, 0.0, 0.0]},
        T=7.0,
        snapshots=(0, 1, 2, 7),
        notes="curve 1 starts as a closed circle over the junction",
    ),
    "14": dict(
        junction=(0.5, -0.5, 0),
        endpoints=((1, 0, 0), (0, 0, 0), (0, 0, -2)),
        initial={"kind": "ExampleFamily", "b": [1.0, 1.0, 1.0], "origin": "endpoint"},
        T=2.0,
        snapshots=(0, 1, 1.42),
        notes="curve 1 vanishes near t = 1.42",
    ),
    "15": dict(
        junction=(0.1, 0.1, 0),
        endpoints=((1, 0, 0), (0, 0, 0), (-0.5, _SQRT3 / 2, 0)),
        initial={"kind": "ExampleFamily", "b": [0.0, 0.0, 0.0], "origin": "endpoint"},
        T=0.5,
        snapshots=(0, 0.1, 0.2),
        notes="curve 2 vanishes near t = 0.2",
    ),
}


def builtin_ids():
    return tuple(_PRESETS)


def builtin_experiment(exp_id):
    """Preset configuration ``exp_id`` (1 to 15, or ``"7b"`` for the shifted experiment 7)."""
    key = str(exp_id).strip().lower()
    if key not in _PRESETS:
        raise ValueError(f"unknown experiment {exp_id!r}; choose one of {', '.join(_PRESETS)}")
    p = dict(_PRESETS[key])
    p["junction"] = tuple(float(v) for v in p["junction"])
    p["endpoints"] = tuple(tuple(float(v) for v in e) for e in p["endpoints"])
    p["snapshots"] = tuple(float(v) for v in p["snapshots"])
    p["initial"] = json.loads(json.dumps(p["initial"]))
    return ExperimentConfig(name=f"exp{key}", **p)


# ---------------------------------------------------------------- config I/O


def _real(value, path, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"expected a real number, got {value!r}", path)
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"not a decimal number: {value!r}", path) from None
    if not math.isfinite(out):
        raise ConfigError("must be finite", path)
    return out


def _point(value, path, allow_missing_z):
    if not isinstance(value, (list, tuple)) or len(value) not in (2, 3):
        raise ConfigError("expected [x, y] or [x, y, z]", path)
    x = _real(value[0], f"{path}[0]")
    y = _real(value[1], f"{path}[1]")
    z = _real(value[2], f"{path}[2]", allow_none=True) if len(value) == 3 else None
    if z is None and not allow_missing_z:
        raise ConfigError("height is required", f"{path}[2]")
    return (x, y, z)


def _initial(value, path):
    if not isinstance(value, dict) or "kind" not in value:
        raise ConfigError('expected an object with a "kind" field', path)
    kind = value["kind"]
    if kind not in INITIAL_KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(INITIAL_KINDS)}", f"{path}.kind")
    out = {"kind": kind}
    if kind == "BezierCompatible":
        hs = value.get("handles")
        if not isinstance(hs, list) or len(hs) != 3:
            raise ConfigError("expected three handle objects", f"{path}.handles")
        out["handles"] = []
        for i, h in enumerate(hs):
            if not isinstance(h, dict):
                raise ConfigError("expected an object", f"{path}.handles[{i}]")
            out["handles"].append(
                {k: _real(h.get(k), f"{path}.handles[{i}].{k}") for k in ("angle", "d1", "end_angle", "d2")}
            )
    elif kind in ("ExampleFamily", "GeodesicSampled"):
        key = "b" if kind == "ExampleFamily" else "alpha0"
        vals = value.get(key, [0.0, 0.0, 0.0])
        if not isinstance(vals, list) or len(vals) != 3:
            raise ConfigError("expected three reals", f"{path}.{key}")
        out[key] = [_real(v, f"{path}.{key}[{i}]") for i, v in enumerate(vals)]
        if kind == "ExampleFamily":
            origin = value.get("origin", "endpoint")
            if origin not in ("endpoint", "junction"):
                raise ConfigError('expected "endpoint" or "junction"', f"{path}.origin")
            out["origin"] = origin
    extra = set(value) - set(out) - ({"handles"} if kind == "BezierCompatible" else set())
    if extra:
        raise ConfigError(f"unexpected fields {sorted(extra)}", path)
    return out


_KNOWN_FIELDS = {
    "schema", "name", "junction", "endpoints", "initial", "J", "dt", "T", "eps_sing",
    "eps_steady", "snapshots", "svg", "qualitative", "z_tolerance", "notes",
}


def config_from_dict(doc):
    """Validate a parsed configuration document; errors name the offending field."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", "$")
    extra = set(doc) - _KNOWN_FIELDS
    if extra:
        raise ConfigError(f"unknown fields {sorted(extra)}", "$")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema {doc.get('schema')!r}, expected {SCHEMA_VERSION}", "$.schema")
    for key in ("junction", "endpoints", "initial"):
        if key not in doc:
            raise ConfigError("missing required field", f"$.{key}")
    initial = _initial(doc["initial"], "$.initial")
    allow_missing = initial["kind"] in _PLANAR_KINDS
    junction = _point(doc["junction"], "$.junction", allow_missing_z=True)
    junction = (junction[0], junction[1], 0.0 if junction[2] is None else junction[2])
    ends = doc["endpoints"]
    if not isinstance(ends, list) or len(ends) != 3:
        raise ConfigError("expected three end points", "$.endpoints")
    endpoints = tuple(_point(e, f"$.endpoints[{i}]", allow_missing) for i, e in enumerate(ends))
    J = doc.get("J", 100)
    if isinstance(J, bool) or not isinstance(J, int) or J < 2:
        raise ConfigError("must be an integer >= 2", "$.J")
    dt = _real(doc.get("dt", 1e-4), "$.dt")
    T = _real(doc.get("T", 1.0), "$.T")
    if dt <= 0:
        raise ConfigError("must be positive", "$.dt")
    if T < 0:
        raise ConfigError("must be non-negative", "$.T")
    eps_sing = _real(doc.get("eps_sing"), "$.eps_sing", allow_none=True)
    if eps_sing is not None and eps_sing <= 0:
        raise ConfigError("must be positive", "$.eps_sing")
    eps_steady = _real(doc.get("eps_steady", 1e-6), "$.eps_steady")
    if eps_steady < 0:
        raise ConfigError("must be non-negative", "$.eps_steady")
    snaps = doc.get("snapshots", [])
    if not isinstance(snaps, list):
        raise ConfigError("expected a list of times", "$.snapshots")
    snapshots = tuple(_real(s, f"$.snapshots[{i}]") for i, s in enumerate(snaps))
    for key in ("svg", "qualitative"):
        if key in doc and not isinstance(doc[key], bool):
            raise ConfigError("expected true or false", f"$.{key}")
    name = doc.get("name", "experiment")
    if not isinstance(name, str) or not name:
        raise ConfigError("expected a non-empty string", "$.name")
    return ExperimentConfig(
        name=name,
        junction=junction,
        endpoints=endpoints,
        initial=initial,
        J=J,
        dt=dt,
        T=T,
        eps_sing=eps_sing,
        eps_steady=eps_steady,
        snapshots=snapshots,
        svg=doc.get("svg", True),
        qualitative=doc.get("qualitative", False),
        z_tolerance=_real(doc.get("z_tolerance", 1e-3), "$.z_tolerance"),
        notes=str(doc.get("notes", "")),
    )


def _dec(v):
    return None if v is None else repr(float(v))


def config_to_dict(cfg):
    """JSON-ready document for ``cfg``; reals become round-trip decimal strings."""
    initial = {"kind": cfg.initial["kind"]}
    if "handles" in cfg.initial:
        initial["handles"] = [{k: _dec(h[k]) for k in ("angle", "d1", "end_angle", "d2")} for h in cfg.initial["handles"]]
    for key in ("b", "alpha0"):
        if key in cfg.initial:
            initial[key] = [_dec(v) for v in cfg.initial[key]]
    if "origin" in cfg.initial:
        initial["origin"] = cfg.initial["origin"]
    return {
        "schema": SCHEMA_VERSION,
        "name": cfg.name,
        "junction": [_dec(v) for v in cfg.junction],
        "endpoints": [[_dec(v) for v in e] for e in cfg.endpoints],
        "initial": initial,
        "J": int(cfg.J),
        "dt": _dec(cfg.dt),
        "T": _dec(cfg.T),
        "eps_sing": _dec(cfg.eps_sing),
        "eps_steady": _dec(cfg.eps_steady),
        "snapshots": [_dec(s) for s in cfg.snapshots],
        "svg": bool(cfg.svg),
        "qualitative": bool(cfg.qualitative),
        "z_tolerance": _dec(cfg.z_tolerance),
        "notes": cfg.notes,
    }


def load_config(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", str(path)) from exc
    return config_from_dict(doc)


def save_config(cfg, path):
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n", encoding="utf-8")


# ------------------------------------------------------------------- running


def build_initial_state(cfg):
    """Initial :class:`~heistriod.curves.TriodState` described by ``cfg``.

    Raises
    ------
    ConfigError
        If end points coincide, or a given end height disagrees with the lift
        of a planar generator by more than ``cfg.z_tolerance``.
    """
    kind = cfg.initial["kind"]
    S = np.asarray(cfg.junction, dtype=float)
    planar_ends = [e[:2] for e in cfg.endpoints]
    try:
        if kind == "PlanarLine":
            state = make_initial_planar_line(S, planar_ends, cfg.J)
        elif kind == "BezierCompatible":
            handles = [BezierHandle(**h) for h in cfg.initial["handles"]]
            state = make_initial_bezier_compatible(S, planar_ends, handles, cfg.J)
        elif kind == "Line3D":
            state = make_initial_line3d(S, cfg.endpoints, cfg.J)
        elif kind == "ExampleFamily":
            state = make_initial_example_family(
                S, cfg.endpoints, cfg.initial["b"], cfg.J, cfg.initial.get("origin", "endpoint")
            )
        else:
            state = make_initial_geodesic(S, cfg.endpoints, cfg.J, cfg.initial["alpha0"])
    except DegenerateInputError as exc:
        raise ConfigError(str(exc), "$.initial") from exc
    for i, e in enumerate(cfg.endpoints):
        z = e[2]
        if z is not None and abs(z - state.endpoint_z[i]) > cfg.z_tolerance:
            raise ConfigError(
                f"given height {z} differs from the lifted height {state.endpoint_z[i]:.6g}",
                f"$.endpoints[{i}][2]",
            )
    pts = [tuple(np.append(p, z)) for p, z in zip(state.endpoints, state.endpoint_z)]
    if len(set(pts)) < 3:
        raise ConfigError("the three end points must be pairwise distinct", "$.endpoints")
    return state


def default_output_root():
    return Path(os.environ.get("HEIS_TRIOD_OUT", "heis_triod_out"))


def run_experiment(cfg, out_dir=None, *, write=True, record_snapshots=True):
    """Build the initial triod, run the flow and write the outputs.

    Files written into ``out_dir`` (default ``$HEIS_TRIOD_OUT/<name>``):
    ``config.json``, ``energy.csv``, ``snapshots.csv`` and, when ``cfg.svg``
    is set, ``triod_final.svg``, ``triod_times.svg`` and ``energy.svg``.
    """
    state = build_initial_state(cfg)
    snaps = []
    outcome = run_flow(
        state,
        cfg.dt,
        cfg.T,
        eps_sing=cfg.eps_sing,
        eps_steady=cfg.eps_steady,
        snapshot_times=cfg.snapshots if record_snapshots else (),
        on_snapshot=snaps.append,
    )
    table = energy_series(outcome)
    result = RunResult(cfg, outcome, table, snapshots=snaps)
    if not write:
        return result
    out = Path(out_dir) if out_dir is not None else default_output_root() / cfg.name
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    files["config"] = out / "config.json"
    save_config(cfg, files["config"])
    files["energy_csv"] = out / "energy.csv"
    write_energy_csv(table, files["energy_csv"])
    if snaps:
        files["snapshots_csv"] = out / "snapshots.csv"
        write_snapshots_csv([snapshot_record(s) for s in snaps], files["snapshots_csv"])
    if cfg.svg:
        files["triod_final_svg"] = write_svg([outcome.final_state], "projected", out / "triod_final.svg")
        times = snaps if len(snaps) > 1 else [state, outcome.final_state]
        files["triod_times_svg"] = write_svg(times, "projected", out / "triod_times.svg")
        shortest = f"L{int(np.argmin(outcome.final_state.lengths())) + 1}"
        files["energy_svg"] = write_svg(table, "energy", out / "energy.svg", columns=("L_total", shortest))
    result.files = files
    return result
