"""Compare the numba and numpy kernel flavours.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the simplex pivoting on a desk-scale scheduling LP, the squared
distance / spectral-efficiency tables at full scale, and one full
``optimize`` call.  Each flavour is warmed up once first so numba's
compile time is excluded.
"""
import argparse
import timeit

import numpy as np

from uavrelay import channel, kernels
from uavrelay.orchestrator import optimize, static_alpha
from uavrelay.scenario import Trajectory, default_scenario
from uavrelay.solvers import solve_lp
from uavrelay.subproblems import scheduling_lp


def cases(flavour):
    """``{name: callable}`` for one flavour.  The elementwise kernels are
    called directly; the solver cases go through the dispatch flag."""
    kernels.USE_NUMBA = flavour == "numba"
    desk = default_scenario()
    full = default_scenario(desk=False)
    traj = Trajectory((5000.0, 0.0), 800.0, 1000.0)
    lp = scheduling_lp(desk, static_alpha(desk), *channel.se_tables(desk, traj))
    pos = traj.positions(full.num_slots)
    users = np.ascontiguousarray(full.users)
    a = channel.link_constants(full).a_g
    d = kernels._sq_dist_np(users, pos)
    sq = kernels._sq_dist_nb if flavour == "numba" else kernels._sq_dist_np
    se = kernels._se_nb if flavour == "numba" else kernels._se_np
    return {
        "simplex (scheduling LP, G=10 N=64)": lambda: solve_lp(lp),
        "sq_dist (G=20 N=500)": lambda: sq(users, pos),
        "se table (G=20 N=500)": lambda: se(a, d),
        "optimize (desk scenario)": lambda: optimize(desk),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    flavours = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    if not kernels.HAVE_NUMBA:
        print("numba not available (or disabled); timing the numpy flavour only")
    results = {}
    for fl in flavours:
        for name, fn in cases(fl).items():
            fn()  # warm-up / JIT compile
            number = 1 if name.startswith("optimize") else 20
            t = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            results[name, fl] = t

    width = max(len(n) for n, _ in results)
    print(f"{'kernel':<{width}}  " + "  ".join(f"{f:>12}" for f in flavours) + "   speed-up")
    for name in dict.fromkeys(n for n, _ in results):
        row = [results[name, f] for f in flavours]
        ratio = f"{row[0] / row[1]:8.1f}x" if len(row) == 2 else ""
        print(f"{name:<{width}}  " + "  ".join(f"{1e3 * t:10.3f}ms" for t in row) + f"   {ratio}")


if __name__ == "__main__":
    main()
