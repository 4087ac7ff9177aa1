"""Dense two-phase bounded-variable simplex.

Variables are shifted/mirrored/split so that every column lives in
``[0, u]``; rows get slacks and, where needed, artificials.  Phase one
minimises the artificial sum, phase two the (negated) objective.  Pivoting
runs in :func:`uavrelay.kernels.simplex_iterate`.
"""
import numpy as np

from .. import kernels
from .types import LinearProgram, SolveResult, Status

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-9


def _standardize(lp):
    """Return ``(Tmap, offset, upper)`` with ``x = Tmap @ y + offset``."""
    n = lp.n
    cols, upper, offset = [], [], np.zeros(n)
    for j in range(n):
        lo, hi = lp.bounds[j]
        e = np.zeros(n)
        if np.isfinite(lo):
            e[j] = 1.0
            cols.append(e)
            upper.append(hi - lo)
            offset[j] = lo
        elif np.isfinite(hi):
            e[j] = -1.0
            cols.append(e)
            upper.append(np.inf)
            offset[j] = hi
        else:
            e[j] = 1.0
            cols.append(e)
            cols.append(-e)
            upper.extend([np.inf, np.inf])
    Tmap = np.array(cols).T.reshape(n, len(cols))
    return Tmap, offset, np.array(upper, dtype=float)


def _reduced_costs(T, cost, basis):
    return cost - cost[basis] @ T


def _pivot(T, d, basis, r, q):
    T[r] /= T[r, q]
    f = T[:, q].copy()
    f[r] = 0.0
    T -= np.outer(f, T[r])
    d -= d[q] * T[r]
    basis[r] = q


def solve_lp(lp: LinearProgram, tol: float = 1e-7, max_iter=None) -> SolveResult:
    """Maximise ``lp``.  ``tol`` is the reduced-cost optimality tolerance."""
    Tmap, offset, yup = _standardize(lp)
    A = lp.A @ Tmap
    b = lp.b - lp.A @ offset
    c = lp.objective @ Tmap
    m, ny = A.shape

    sense = lp.sense
    slack_cols = [i for i in range(m) if sense[i] != "="]
    ns = len(slack_cols)
    S = np.zeros((m, ns))
    for k, i in enumerate(slack_cols):
        S[i, k] = 1.0 if sense[i] == "<=" else -1.0
    flip = b < 0
    A[flip] *= -1
    S[flip] *= -1
    b = np.where(flip, -b, b)

    basis = np.empty(m, dtype=np.int64)
    need_art = []
    for i in range(m):
        hits = np.flatnonzero(S[i] == 1.0)
        if hits.size:
            basis[i] = ny + hits[0]
        else:
            need_art.append(i)
    na = len(need_art)
    Art = np.zeros((m, na))
    for k, i in enumerate(need_art):
        Art[i, k] = 1.0
        basis[i] = ny + ns + k

    ntot = ny + ns + na
    T = np.hstack([A, S, Art])
    upper = np.concatenate([yup, np.full(ns + na, np.inf)])
    xB = b.copy()
    at_upper = np.zeros(ntot, dtype=bool)
    if max_iter is None:
        max_iter = 10 * (m + ntot)
    pivots = 0
    keep = np.ones(m, dtype=bool)

    if na:
        cost1 = np.zeros(ntot)
        cost1[ny + ns:] = 1.0
        d = _reduced_costs(T, cost1, basis)
        code, it = kernels.simplex_iterate(T, d, xB, basis, at_upper, upper,
                                           max_iter, tol, PIVOT_TOL)
        pivots += it
        if code == kernels.ITERATION_LIMIT:
            return SolveResult(Status.ITERATION_LIMIT, np.full(lp.n, np.nan), np.nan, np.inf, pivots)
        infeas = float(np.sum(xB[basis >= ny + ns]))
        if infeas > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return SolveResult(Status.INFEASIBLE, np.full(lp.n, np.nan), np.nan, np.inf, pivots)
        # drive zero-valued artificials out of the basis, drop redundant rows
        for i in range(m):
            if basis[i] < ny + ns:
                continue
            row = np.abs(T[i, :ny + ns])
            row[basis[basis < ny + ns]] = 0.0
            cand = np.flatnonzero(row > PIVOT_TOL)
            if cand.size:
                q = int(cand[0])
                val = upper[q] if at_upper[q] else 0.0
                _pivot(T, np.zeros(ntot), basis, i, q)
                xB[i] = val
                at_upper[q] = False
            else:
                keep[i] = False
        T, xB, basis, b = T[keep], xB[keep], basis[keep], b[keep]
        T = np.ascontiguousarray(T[:, :ny + ns])
        upper = upper[:ny + ns]
        at_upper = at_upper[:ny + ns].copy()
        ntot = ny + ns

    cost = np.concatenate([-c, np.zeros(ns)])
    d = _reduced_costs(T, cost, basis)
    code, it = kernels.simplex_iterate(T, d, xB, basis, at_upper, upper,
                                       max(max_iter - pivots, 0), tol, PIVOT_TOL)
    pivots += it
    if code == kernels.UNBOUNDED:
        return SolveResult(Status.UNBOUNDED, np.full(lp.n, np.nan), np.inf, np.inf, pivots)

    y = np.where(at_upper, upper, 0.0)
    y[basis] = xB
    # refine basic values against the unpivoted system
    full = np.hstack([A, S])[keep]
    rhs = b - full @ np.where(np.isin(np.arange(ntot), basis), 0.0, y)
    try:
        yb = np.linalg.solve(full[:, basis], rhs)
        if np.all(np.abs(yb - xB) <= 1e-6 * (1.0 + np.abs(xB))):
            y[basis] = yb
    except np.linalg.LinAlgError:
        pass
    y = np.clip(y, 0.0, upper)

    x = Tmap @ y[:ny] + offset
    kkt = _kkt_residual(lp, x, d, basis, at_upper, upper)
    status = Status.OPTIMAL if code == kernels.OPTIMAL else Status.ITERATION_LIMIT
    return SolveResult(status, x, float(lp.objective @ x), kkt, pivots)


def _kkt_residual(lp, x, d, basis, at_upper, upper):
    """Largest primal violation or reduced-cost sign error."""
    r = lp.A @ x - lp.b
    viol = 0.0
    for i, s in enumerate(lp.sense):
        if s == "<=":
            viol = max(viol, r[i])
        elif s == ">=":
            viol = max(viol, -r[i])
        else:
            viol = max(viol, abs(r[i]))
    viol = max(viol, np.max(lp.bounds[:, 0] - x, initial=0.0), np.max(x - lp.bounds[:, 1], initial=0.0))
    nonbasic = np.ones(d.size, dtype=bool)
    nonbasic[basis] = False
    movable = nonbasic & (upper > 0)
    dual = np.concatenate([
        np.maximum(-d[movable & ~at_upper], 0.0),
        np.maximum(d[movable & at_upper], 0.0),
    ])
    scale = max(1.0, np.abs(lp.objective).max(initial=0.0))
    return float(max(viol, dual.max(initial=0.0) / scale))
