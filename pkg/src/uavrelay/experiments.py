"""Seeded Monte Carlo sweeps over the user-distribution / radio / geometry knobs."""
import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

CSV_COLUMNS = [
    "sweep_kind", "point_param_name", "point_param_value", "run_index", "seed",
    "se_optimized", "se_static", "se_upper", "radius_opt_m", "alpha", "wall_ms",
]
METRICS = ["se_optimized", "se_static", "se_upper", "radius_opt_m", "alpha", "gain", "wall_ms"]


def sample_users(mean_xy, std_xy, count, seed):
    """``count`` ground users with independent normal x and y coordinates."""
    if min(std_xy) < 0:
        raise ValueError("standard deviations must be >= 0")
    rng = np.random.default_rng(seed)
    x = rng.normal(mean_xy[0], std_xy[0], size=count)
    y = rng.normal(mean_xy[1], std_xy[1], size=count)
    return np.column_stack([x, y, np.zeros(count)])


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def run_seed(master_seed, point_index, run_index):
    """Order-independent per-run seed: nested splitmix64 over the three ints."""
    h = splitmix64(int(master_seed) & MASK64)
    h = splitmix64(h ^ int(point_index))
    return splitmix64(h ^ int(run_index))


class SweepKind(str, Enum):
    STDDEV = "stddev"
    TXPOWER = "txpower"
    RADIUS_VS_POWER = "radius-vs-power"
    ALT_DIST_GRID = "alt-dist-grid"


# parameter names and the config keys each one drives
PARAMS = {
    SweepKind.STDDEV: ("std_m",),
    SweepKind.TXPOWER: ("uav_tx_power_W",),
    SweepKind.RADIUS_VS_POWER: ("std_m", "uav_tx_power_W"),
    SweepKind.ALT_DIST_GRID: ("altitude_m", "centroid_distance_m"),
}

_KEYS = {
    "std_m": ("users.distribution.std_x", "users.distribution.std_y"),
    "uav_tx_power_W": ("radio.uav_tx_power_W",),
    "altitude_m": ("uav.altitude_m",),
    "centroid_distance_m": ("users.distribution.mean_x",),
}

DEFAULT_GRIDS = {
    SweepKind.STDDEV: [1000.0, 2000.0, 3000.0],
    SweepKind.TXPOWER: [0.1, 1.0, 10.0, 100.0],
    SweepKind.RADIUS_VS_POWER: list(product([1000.0, 2000.0, 3000.0], [0.1, 1.0, 10.0, 100.0])),
    SweepKind.ALT_DIST_GRID: list(product([500.0, 1000.0, 2000.0], [2500.0, 5000.0, 10000.0])),
}


def point_overrides(kind, point):
    kind = SweepKind(kind)
    values = point if isinstance(point, (tuple, list)) else (point,)
    names = PARAMS[kind]
    if len(values) != len(names):
        raise ValueError(f"{kind.value} points need {len(names)} values, got {point!r}")
    ov = {}
    for name, v in zip(names, values):
        for key in _KEYS[name]:
            ov[key] = float(v)
        if name == "centroid_distance_m":
            ov["users.distribution.mean_y"] = 0.0
    return ov


@dataclass
class SweepSpec:
    kind: SweepKind
    grid: list
    runs_per_point: int
    base_config: dict
    master_seed: int = 0

    def __post_init__(self):
        self.kind = SweepKind(self.kind)
        if self.runs_per_point < 1:
            raise ValueError("runs_per_point must be >= 1")
        if not self.grid:
            raise ValueError("grid must be non-empty")
        users = self.base_config.get("users")
        if not (isinstance(users, dict) and "distribution" in users):
            raise ValueError("sweeps need a base scenario with a user distribution")


@dataclass
class ExperimentResult:
    kind: SweepKind
    records: list
    aggregates: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def _fmt_point(kind, point):
    names = PARAMS[SweepKind(kind)]
    values = point if isinstance(point, (tuple, list)) else (point,)
    return ";".join(names), ";".join(repr(float(v)) for v in values)


def _run_one(task):
    # imported here so worker processes only pay for what they use
    from .baselines import static_baseline, upper_bound
    from .orchestrator import optimize
    from .scenario import apply_overrides, scenario_from_dict

    kind, point_index, point, run_index, seed, base = task
    name, value = _fmt_point(kind, point)
    rec = {
        "sweep_kind": SweepKind(kind).value, "point_param_name": name,
        "point_param_value": value, "point_index": point_index,
        "run_index": run_index, "seed": seed,
    }
    try:
        ov = point_overrides(kind, point)
        ov["users.distribution.seed"] = seed
        scenario = scenario_from_dict(apply_overrides(base, ov))
        t0 = time.perf_counter()
        sol = optimize(scenario)
        wall = (time.perf_counter() - t0) * 1e3
        st = static_baseline(scenario, splitmix64(seed ^ 0x5354415449430000))
        ub = upper_bound(scenario)
        rec.update(se_optimized=sol.objective, se_static=st.objective,
                   se_upper=ub.objective, radius_opt_m=sol.trajectory.radius_m,
                   alpha=sol.alpha, wall_ms=wall)
    except Exception as exc:  # recorded, never dropped silently
        log.warning("run %s/%s failed: %s", point_index, run_index, exc)
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def _aggregate(kind, grid, records):
    out = []
    for i, point in enumerate(grid):
        rows = [r for r in records if r["point_index"] == i and "error" not in r]
        failed = sum(1 for r in records if r["point_index"] == i and "error" in r)
        name, value = _fmt_point(kind, point)
        agg = {"point_index": i, "point_param_name": name, "point_param_value": value,
               "n": len(rows), "failures": failed}
        for m in METRICS:
            if m == "gain":
                vals = np.array([r["se_optimized"] - r["se_static"] for r in rows])
            else:
                vals = np.array([r[m] for r in rows], dtype=float)
            agg[f"{m}_mean"] = float(vals.mean()) if vals.size else math.nan
            agg[f"{m}_se"] = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else math.nan
        out.append(agg)
    return out


def run_sweep(spec: SweepSpec, parallelism: int = 1, progress=None) -> ExperimentResult:
    """Run every (point, run) pair; records come back sorted by (point, run)."""
    tasks = [
        (spec.kind.value, i, point, r, run_seed(spec.master_seed, i, r), spec.base_config)
        for i, point in enumerate(spec.grid)
        for r in range(spec.runs_per_point)
    ]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * parallelism))))
    else:
        records = []
        for k, t in enumerate(tasks):
            records.append(_run_one(t))
            if progress:
                progress(k + 1, len(tasks))
    records.sort(key=lambda r: (r["point_index"], r["run_index"]))
    failures = [r for r in records if "error" in r]
    return ExperimentResult(spec.kind, records, _aggregate(spec.kind, spec.grid, records), failures)


def _csv_value(rec, col, timing):
    v = rec.get(col, "")
    if col == "wall_ms" and not timing:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def emit_results(result: ExperimentResult, path, fmt="csv", timing=True):
    """Write records as CSV (fixed columns) or JSON (records + aggregates).

    ``timing=False`` blanks the wall-clock column so that output is
    reproducible byte for byte.
    """
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for rec in result.records:
                if "error" in rec:
                    continue
                w.writerow([_csv_value(rec, c, timing) for c in CSV_COLUMNS])
    elif fmt == "json":
        recs = []
        for rec in result.records:
            r = dict(rec)
            if not timing:
                r.pop("wall_ms", None)
            recs.append(r)
        aggs = [dict(a) for a in result.aggregates]
        if not timing:
            for a in aggs:
                a.pop("wall_ms_mean", None)
                a.pop("wall_ms_se", None)
        doc = {"sweep_kind": SweepKind(result.kind).value, "columns": CSV_COLUMNS,
               "records": recs, "aggregates": aggs,
               "failures": len(result.failures)}
        path.write_text(json.dumps(doc, indent=1, allow_nan=True))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def load_results(path):
    """Read back a JSON result file."""
    doc = json.loads(Path(path).read_text())
    records = doc["records"]
    return ExperimentResult(SweepKind(doc["sweep_kind"]), records, doc.get("aggregates", []),
                            [r for r in records if "error" in r])


def aggregate_table(result: ExperimentResult, metric):
    """``{point_param_value: mean}`` for quick trend checks."""
    return {a["point_param_value"]: a[f"{metric}_mean"] for a in result.aggregates}
