"""Hot numeric kernels, each in a numba flavour and a numpy flavour.

The numba flavours are plain loops; the numpy flavours vectorise the same
arithmetic.  Both are always importable (``*_nb`` degrades to a Python loop
when numba is unavailable) so tests and benchmarks can compare them.  The
public names at the bottom pick one according to :data:`USE_NUMBA`.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit

USE_NUMBA = HAVE_NUMBA

# simplex exit codes
OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

# consecutive degenerate pivots before pricing falls back to pure Bland
STALL_LIMIT = 50


# --------------------------------------------------------------------------
# bounded-variable tableau simplex: Dantzig pricing, Bland tie-breaking
# --------------------------------------------------------------------------

@njit
def _simplex_nb(T, d, xB, basis, at_upper, upper, max_iter, tol, piv_tol):
    m, ncol = T.shape
    pos = np.full(ncol, -1, dtype=np.int64)
    for i in range(m):
        pos[basis[i]] = i
    it = 0
    stall = 0
    while True:
        q = -1
        delta = 0.0
        best = 0.0
        bland = stall >= STALL_LIMIT
        for j in range(ncol):
            if pos[j] >= 0 or upper[j] <= 0.0:
                continue
            if not at_upper[j] and d[j] < -tol:
                score = -d[j]
                sgn = 1.0
            elif at_upper[j] and d[j] > tol:
                score = d[j]
                sgn = -1.0
            else:
                continue
            if score > best:
                best = score
                q = j
                delta = sgn
                if bland:
                    break
        if q < 0:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it

        theta = upper[q]
        r = -1
        for i in range(m):
            a = delta * T[i, q]
            if a > piv_tol:
                v = xB[i]
                if v < 0.0:
                    v = 0.0
                lim = v / a
            elif a < -piv_tol and upper[basis[i]] < np.inf:
                v = upper[basis[i]] - xB[i]
                if v < 0.0:
                    v = 0.0
                lim = v / (-a)
            else:
                continue
            if lim < theta or (lim == theta and r >= 0 and basis[i] < basis[r]):
                theta = lim
                r = i
        if theta == np.inf:
            return UNBOUNDED, it

        for i in range(m):
            xB[i] -= delta * theta * T[i, q]
        it += 1
        stall = stall + 1 if theta == 0.0 else 0
        if r < 0:
            # entering variable hits its own opposite bound
            at_upper[q] = not at_upper[q]
            continue

        leave = basis[r]
        new_val = delta * theta
        if at_upper[q]:
            new_val += upper[q]
        at_upper[leave] = delta * T[r, q] < 0.0
        at_upper[q] = False

        p = T[r, q]
        for k in range(ncol):
            T[r, k] /= p
        for i in range(m):
            if i == r:
                continue
            f = T[i, q]
            if f != 0.0:
                for k in range(ncol):
                    T[i, k] -= f * T[r, k]
        f = d[q]
        for k in range(ncol):
            d[k] -= f * T[r, k]
        basis[r] = q
        pos[leave] = -1
        pos[q] = r
        xB[r] = new_val


def _simplex_np(T, d, xB, basis, at_upper, upper, max_iter, tol, piv_tol):
    m, ncol = T.shape
    is_basic = np.zeros(ncol, dtype=bool)
    is_basic[basis] = True
    movable = upper > 0.0
    it = 0
    stall = 0
    while True:
        score = np.where(at_upper, d, -d)
        cand = ~is_basic & movable & (score > tol)
        idx = np.flatnonzero(cand)
        if idx.size == 0:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it
        if stall >= STALL_LIMIT:
            q = int(idx[0])
        else:
            q = int(idx[np.argmax(score[idx])])
        delta = -1.0 if at_upper[q] else 1.0

        col = delta * T[:, q]
        ub = upper[basis]
        lims = np.full(m, np.inf)
        dec = col > piv_tol
        inc = (col < -piv_tol) & np.isfinite(ub)
        lims[dec] = np.maximum(xB[dec], 0.0) / col[dec]
        lims[inc] = np.maximum(ub[inc] - xB[inc], 0.0) / -col[inc]
        theta = upper[q]
        r = -1
        best = lims.min() if m else np.inf
        if best < theta:
            ties = np.flatnonzero(lims == best)
            r = int(ties[np.argmin(basis[ties])])
            theta = best
        if theta == np.inf:
            return UNBOUNDED, it

        xB -= theta * col
        it += 1
        stall = stall + 1 if theta == 0.0 else 0
        if r < 0:
            at_upper[q] = not at_upper[q]
            continue

        leave = basis[r]
        new_val = delta * theta + (upper[q] if at_upper[q] else 0.0)
        at_upper[leave] = col[r] < 0.0
        at_upper[q] = False

        T[r] /= T[r, q]
        f = T[:, q].copy()
        f[r] = 0.0
        T -= np.outer(f, T[r])
        d -= d[q] * T[r]
        basis[r] = q
        is_basic[leave] = False
        is_basic[q] = True
        xB[r] = new_val


# --------------------------------------------------------------------------
# squared distances and spectral efficiency
# --------------------------------------------------------------------------

@njit
def _sq_dist_nb(points, targets):
    G = points.shape[0]
    N = targets.shape[0]
    out = np.empty((G, N))
    for g in range(G):
        for n in range(N):
            s = 0.0
            for k in range(3):
                t = targets[n, k] - points[g, k]
                s += t * t
            out[g, n] = s
    return out


def _sq_dist_np(points, targets):
    diff = targets[None, :, :] - points[:, None, :]
    return np.einsum("gnk,gnk->gn", diff, diff)


@njit
def _se_nb(a, d):
    flat = d.ravel()
    out = np.empty(flat.size)
    for i in range(flat.size):
        out[i] = np.log2(1.0 + a / flat[i])
    return out.reshape(d.shape)


def _se_np(a, d):
    return np.log2(1.0 + a / d)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def simplex_iterate(T, d, xB, basis, at_upper, upper, max_iter, tol=1e-9,
                    piv_tol=1e-9):
    """Run bounded primal simplex pivots in place until optimal.

    Entering column: largest reduced-cost violation, lowest index on ties;
    after ``STALL_LIMIT`` degenerate pivots in a row, plain Bland (first
    eligible index) until progress resumes.  Leaving row: minimum ratio,
    lowest basic index on ties.

    ``T`` is the tableau ``B^-1 A``, ``d`` the reduced costs of a
    minimisation, ``xB`` the basic values, ``at_upper`` the nonbasic bound
    status.  Returns ``(code, pivots)``.
    """
    fn = _simplex_nb if USE_NUMBA else _simplex_np
    code, it = fn(T, d, xB, basis, at_upper, upper, int(max_iter),
                  float(tol), float(piv_tol))
    return int(code), int(it)


def sq_dist(points, targets):
    """``out[g, n] = ||targets[n] - points[g]||^2`` for 3-vectors."""
    points = np.ascontiguousarray(points, dtype=float)
    targets = np.ascontiguousarray(targets, dtype=float)
    if USE_NUMBA:
        return _sq_dist_nb(points, targets)
    return _sq_dist_np(points, targets)


def se_from_sq_dist(a, d):
    """``log2(1 + a / d)`` elementwise.

    Always the numpy flavour: its vectorised log2 beats the compiled loop
    by about an order of magnitude (see benchmarks/bench_kernels.py).
    """
    return _se_np(float(a), np.asarray(d, dtype=float))
