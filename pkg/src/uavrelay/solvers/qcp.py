"""Log-barrier interior-point method for small convex QCPs.

Every inequality (linear row, finite bound, quadratic row) becomes
``f_i(x) <= 0``; equality rows are kept in the Newton KKT system.  A
phase-one problem ``min s  s.t.  f_i(x) <= s`` supplies a strictly feasible
start when the caller's warm start is not one.
"""
from types import SimpleNamespace

import numpy as np

from .types import ConvexQcp, SolveResult, Status

MU = 20.0
NEWTON_TOL = 1e-10
MAX_CENTERING = 60


class _Ineqs:
    """All inequalities of a problem in stacked form."""

    def __init__(self, qcp):
        n = qcp.n
        rows, rhs = [], []
        eq_rows, eq_rhs = [], []
        for a, b, s in qcp.constraints:
            if s == "<=":
                rows.append(a)
                rhs.append(b)
            elif s == ">=":
                rows.append(-a)
                rhs.append(-b)
            else:
                eq_rows.append(a)
                eq_rhs.append(b)
        eye = np.eye(n)
        for j, (lo, hi) in enumerate(qcp.bounds):
            if np.isfinite(lo):
                rows.append(-eye[j])
                rhs.append(-lo)
            if np.isfinite(hi):
                rows.append(eye[j])
                rhs.append(hi)
        self.L = np.array(rows, dtype=float).reshape(len(rows), n)
        self.l = np.array(rhs, dtype=float)
        self.E = np.array(eq_rows, dtype=float).reshape(len(eq_rows), n)
        self.e = np.array(eq_rhs, dtype=float)

        quads = qcp.quad
        if quads:
            idx = sorted({int(i) for c in quads
                          for i in (range(n) if c.index is None else c.index)})
            self.U = np.array(idx, dtype=np.int64)
            where = {v: k for k, v in enumerate(idx)}
            p = len(idx)
            self.Qs = np.zeros((len(quads), p, p))
            for k, c in enumerate(quads):
                sub = np.arange(n) if c.index is None else c.index
                loc = np.array([where[int(i)] for i in sub])
                self.Qs[k][np.ix_(loc, loc)] = c.Q
            self.qs = np.array([c.q for c in quads])
            self.rq = np.array([c.rhs for c in quads])
        else:
            self.U = np.zeros(0, dtype=np.int64)
            self.Qs = np.zeros((0, 0, 0))
            self.qs = np.zeros((0, n))
            self.rq = np.zeros(0)
        self.n = n
        self.m = self.L.shape[0] + self.qs.shape[0]

    def values(self, x):
        xu = x[self.U]
        fq = np.einsum("i,kij,j->k", xu, self.Qs, xu) + self.qs @ x - self.rq
        return np.concatenate([self.L @ x - self.l, fq])

    def jacobian(self, x):
        Jq = self.qs.copy()
        if self.U.size:
            Jq[:, self.U] += 2.0 * (self.Qs @ x[self.U])
        return np.vstack([self.L, Jq])

    def quad_hessian(self, w):
        """``sum_k w_k * 2 Q_k`` scattered into an ``n x n`` matrix."""
        H = np.zeros((self.n, self.n))
        if self.U.size:
            nl = self.L.shape[0]
            H[np.ix_(self.U, self.U)] = 2.0 * np.einsum("k,kij->ij", w[nl:], self.Qs)
        return H


def _newton_dir(H, g, E):
    n = H.shape[0]
    H = H + 1e-14 * (1.0 + np.abs(np.diag(H)).max(initial=0.0)) * np.eye(n)
    if E.shape[0]:
        K = np.block([[H, E.T], [E, np.zeros((E.shape[0], E.shape[0]))]])
        rhs = np.concatenate([-g, np.zeros(E.shape[0])])
        try:
            sol = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
        return sol[:n]
    try:
        return np.linalg.solve(H, -g)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(H, -g, rcond=None)[0]


def _barrier_min(cost, ineq, E, x, t, budget, stop=None):
    """Minimise ``t*cost.x - sum log(-f(x))`` from strictly feasible ``x``.

    Returns ``(x, steps_used)``.  ``stop(x)`` may end the run early.
    """
    def phi(z):
        f = ineq.values(z)
        if np.any(f >= 0.0):
            return np.inf
        return t * (cost @ z) - np.sum(np.log(-f))

    steps = 0
    fx = phi(x)
    for _ in range(MAX_CENTERING):
        if steps >= budget:
            break
        f = ineq.values(x)
        w = 1.0 / -f
        J = ineq.jacobian(x)
        g = t * cost + J.T @ w
        H = (J.T * w**2) @ J + ineq.quad_hessian(w)
        dx = _newton_dir(H, g, E)
        dec = -(g @ dx)
        steps += 1
        if dec / 2.0 <= NEWTON_TOL:
            break
        s = 1.0
        while s > 1e-12:
            trial = phi(x + s * dx)
            if trial <= fx - 0.25 * s * dec:
                break
            s *= 0.5
        else:
            break
        x = x + s * dx
        fx = trial
        if stop is not None and stop(x):
            break
    return x, steps


def _phase_one(ineq, E, e, x, budget):
    f = ineq.values(x)
    if f.size == 0 or f.max() < 0.0:
        return x, 0
    n = x.size
    s0 = f.max() + max(1.0, abs(f.max()))
    # keep the auxiliary problem bounded: s >= -|s0| and a wide box around x
    R = 1e4 * (1.0 + np.abs(x).max())
    box = np.vstack([np.hstack([np.eye(n), np.zeros((n, 1))]),
                     np.hstack([-np.eye(n), np.zeros((n, 1))])])
    box_rhs = np.concatenate([x + R, R - x])
    floor = np.zeros((1, n + 1))
    floor[0, n] = -1.0
    extra = np.vstack([box, floor])
    extra_rhs = np.append(box_rhs, abs(s0))

    def values(z):
        return np.concatenate([ineq.values(z[:n]) - z[n], extra @ z - extra_rhs])

    def jacobian(z):
        J = np.hstack([ineq.jacobian(z[:n]), -np.ones((ineq.m, 1))])
        return np.vstack([J, extra])

    def quad_hessian(w):
        H = np.zeros((n + 1, n + 1))
        H[:n, :n] = ineq.quad_hessian(w[:ineq.m])
        return H

    sh = SimpleNamespace(n=n + 1, m=ineq.m + extra.shape[0], values=values,
                         jacobian=jacobian, quad_hessian=quad_hessian)
    E1 = np.hstack([E, np.zeros((E.shape[0], 1))])
    cost = np.zeros(n + 1)
    cost[n] = 1.0
    z = np.append(x, s0)
    t = _initial_t(cost, sh, z)
    used = 0
    while used < budget:
        z, k = _barrier_min(cost, sh, E1, z, t, budget - used,
                            stop=lambda v: v[n] < 0.0)
        used += k
        if z[n] < 0.0:
            return z[:n], used
        if sh.m / t < 1e-12 * max(1.0, abs(s0)):
            break
        t *= MU
    return None, used


def _initial_t(cost, ineq, x):
    """Barrier weight that best balances the cost against the barrier gradient."""
    f = ineq.values(x)
    gb = ineq.jacobian(x).T @ (1.0 / -f)
    cc = cost @ cost
    t = -(cost @ gb) / cc if cc > 0 else 1.0
    return t if t > 0 else ineq.m / max(1.0, abs(cost @ x))


def solve_qcp(qcp: ConvexQcp, tol: float = 1e-7, x0=None, max_steps: int = 200) -> SolveResult:
    """Maximise a convex QCP.

    ``x0`` is a warm start; it need not be strictly feasible.  ``tol`` is the
    relative duality-gap target; ``max_steps`` caps the total number of
    Newton steps over both phases.
    """
    ineq = _Ineqs(qcp)
    E, e = ineq.E, ineq.e
    n = qcp.n
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if E.shape[0]:
        x = x + np.linalg.lstsq(E, e - E @ x, rcond=None)[0]

    x, used = _phase_one(ineq, E, e, x, max_steps)
    nan = np.full(n, np.nan)
    if x is None:
        status = Status.ITERATION_LIMIT if used >= max_steps else Status.INFEASIBLE
        return SolveResult(status, nan, np.nan, np.inf, used)

    cost = -qcp.objective
    m = max(ineq.m, 1)
    t = _initial_t(cost, ineq, x) if ineq.m else 1.0
    gap_ok = False
    while used < max_steps:
        x, k = _barrier_min(cost, ineq, E, x, t, max_steps - used)
        used += k
        if m / t <= tol * max(1.0, abs(cost @ x)):
            gap_ok = True
            break
        t *= MU

    obj = float(qcp.objective @ x)
    kkt = _kkt(qcp, ineq, x, t)
    status = Status.OPTIMAL if gap_ok else Status.ITERATION_LIMIT
    return SolveResult(status, x, obj, kkt, used)


def _kkt(qcp, ineq, x, t):
    """max(relative stationarity, relative duality gap) at the barrier point."""
    f = ineq.values(x)
    lam = 1.0 / (t * -f) if f.size else f
    r = -qcp.objective + ineq.jacobian(x).T @ lam
    if ineq.E.shape[0]:
        nu = np.linalg.lstsq(ineq.E.T, -r, rcond=None)[0]
        r = r + ineq.E.T @ nu
    scale = max(1.0, np.linalg.norm(qcp.objective))
    gap = ineq.m / t / max(1.0, abs(qcp.objective @ x))
    return float(max(np.linalg.norm(r) / scale, gap))
