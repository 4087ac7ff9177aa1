"""Command line: ``uavrelay optimize | sweep | baseline``.

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 I/O error.
"""
import argparse
import csv
import json
import logging
import sys
import time

from .baselines import static_baseline, upper_bound
from .experiments import (CSV_COLUMNS, DEFAULT_GRIDS, PARAMS, SweepKind,
                          SweepSpec, emit_results, run_sweep)
from .orchestrator import optimize
from .scenario import ScenarioError, load_scenario, parse_overrides
from .solvers import SolverError

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3


def _parse_grid(text, kind):
    width = len(PARAMS[SweepKind(kind)])
    points = []
    for item in text.split(","):
        vals = [float(v) for v in item.split("x")]
        if len(vals) != width:
            raise ScenarioError(f"grid point {item!r} needs {width} value(s) joined by 'x'")
        points.append(vals[0] if width == 1 else tuple(vals))
    return points


def _solution_doc(scenario, sol, ub, st):
    return {
        "objective": sol.objective,
        "alpha": sol.alpha,
        "trajectory": {"center_xy_m": list(sol.trajectory.center_xy),
                       "radius_m": sol.trajectory.radius_m,
                       "altitude_m": sol.trajectory.altitude_m},
        "outer_trace": sol.outer_trace,
        "schedule": sol.schedule.binary.astype(int).tolist(),
        "eta": sol.eta.eta.tolist(),
        "baselines": {"upper_bound": ub.objective, "static": st.objective},
        "scenario": scenario.to_dict(),
    }


def cmd_optimize(args):
    scenario = load_scenario(args.scenario, parse_overrides(args.set))
    t0 = time.perf_counter()
    sol = optimize(scenario)
    wall = (time.perf_counter() - t0) * 1e3
    ub = upper_bound(scenario)
    st = static_baseline(scenario, args.seed)
    print(f"optimized SE   {sol.objective:.6f} bits/s/Hz  "
          f"(alpha={sol.alpha:.4f}, r={sol.trajectory.radius_m:.1f} m, "
          f"center=({sol.trajectory.center_xy[0]:.1f}, {sol.trajectory.center_xy[1]:.1f}) m)")
    print(f"static SE      {st.objective:.6f}   gain {sol.objective - st.objective:+.6f}")
    print(f"upper bound SE {ub.objective:.6f}")
    if args.out:
        if args.format == "json":
            with open(args.out, "w") as fh:
                json.dump(_solution_doc(scenario, sol, ub, st), fh, indent=1)
        else:
            row = {"sweep_kind": "single", "point_param_name": "", "point_param_value": "",
                   "run_index": 0, "seed": args.seed, "se_optimized": repr(sol.objective),
                   "se_static": repr(st.objective), "se_upper": repr(ub.objective),
                   "radius_opt_m": repr(sol.trajectory.radius_m), "alpha": repr(sol.alpha),
                   "wall_ms": repr(wall)}
            with open(args.out, "w", newline="") as fh:
                w = csv.DictWriter(fh, CSV_COLUMNS, lineterminator="\n")
                w.writeheader()
                w.writerow(row)
    return EXIT_OK


def cmd_sweep(args):
    scenario = load_scenario(args.scenario, parse_overrides(args.set))
    base = scenario.to_dict()
    if "distribution" not in base["users"]:
        raise ScenarioError("sweeps need users given as a distribution")
    kind = SweepKind(args.kind)
    grid = _parse_grid(args.grid, kind) if args.grid else DEFAULT_GRIDS[kind]
    spec = SweepSpec(kind, grid, args.runs, base, args.seed)

    def progress(k, total):
        if k % max(1, total // 20) == 0 or k == total:
            print(f"  {k}/{total} runs", file=sys.stderr)

    result = run_sweep(spec, args.parallelism, progress=progress)
    emit_results(result, args.out, args.format, timing=not args.no_timing)
    for a in result.aggregates:
        print(f"{a['point_param_name']}={a['point_param_value']}: "
              f"opt {a['se_optimized_mean']:.4f}  static {a['se_static_mean']:.4f}  "
              f"upper {a['se_upper_mean']:.4f}  radius {a['radius_opt_m_mean']:.1f} m  "
              f"(n={a['n']}, failed={a['failures']})")
    return EXIT_OK if not result.failures else EXIT_SOLVER


def cmd_baseline(args):
    scenario = load_scenario(args.scenario, parse_overrides(args.set))
    if args.kind == "upper":
        res = upper_bound(scenario)
        extra = {"alpha": res.details["alpha"].tolist(),
                 "hover_points_m": res.details["hover_points"].tolist()}
    else:
        res = static_baseline(scenario, args.seed)
        t = res.details["trajectory"]
        extra = {"alpha": res.details["alpha"], "center_xy_m": list(t.center_xy),
                 "radius_m": t.radius_m}
    print(json.dumps({"kind": res.kind.value, "objective": res.objective, **extra}, indent=1))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="uavrelay", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("optimize", help="optimize one scenario and compare with the baselines")
    o.add_argument("--scenario", required=True)
    o.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    o.add_argument("--out")
    o.add_argument("--format", choices=["csv", "json"], default="json")
    o.add_argument("--seed", type=int, default=0, help="static-baseline scheduling seed")
    o.set_defaults(func=cmd_optimize)

    s = sub.add_parser("sweep", help="Monte Carlo study")
    s.add_argument("--kind", required=True, choices=[k.value for k in SweepKind])
    s.add_argument("--scenario", required=True)
    s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--runs", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--parallelism", type=int, default=1)
    s.add_argument("--grid", help="comma-separated points; 2-D points as AxB")
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--no-timing", action="store_true", help="blank wall_ms for reproducible output")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("baseline", help="evaluate a baseline only")
    b.add_argument("--kind", required=True, choices=["upper", "static"])
    b.add_argument("--scenario", required=True)
    b.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_baseline)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
