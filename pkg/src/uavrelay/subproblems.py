"""Block subproblems: timeshare LP, scheduling LP + rounding, SCA trajectory."""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import channel
from .scenario import Scenario, Trajectory
from .solvers import (ConvexQcp, LinearProgram, QuadConstraint, SolverError,
                      Status, solve_lp, solve_qcp)

log = logging.getLogger(__name__)

LN2 = math.log(2.0)


@dataclass
class Schedule:
    """``binary[g, n] = 1`` when user ``g`` transmits in slot ``n``."""

    binary: np.ndarray
    relaxed: np.ndarray = None

    def __post_init__(self):
        self.binary = np.asarray(self.binary, dtype=float)
        if self.relaxed is None:
            self.relaxed = self.binary.copy()

    def check(self, scenario, tol=1e-9):
        B, R = self.binary, self.relaxed
        M, cap = scenario.users_per_slot, scenario.user_cap
        if not np.all((B == 0) | (B == 1)):
            raise ValueError("binary schedule has non-binary entries")
        if np.any(B.sum(axis=0) > M) or np.any(B.sum(axis=1) > cap):
            raise ValueError("binary schedule breaks a slot or user cap")
        if np.any(R < -tol) or np.any(R > 1 + tol):
            raise ValueError("relaxed schedule outside [0, 1]")
        if np.any(R.sum(axis=0) > M + tol) or np.any(R.sum(axis=1) > cap + tol):
            raise ValueError("relaxed schedule breaks a slot or user cap")


@dataclass
class SlotBounds:
    eta: np.ndarray


@dataclass
class SqDistances:
    d_gv: np.ndarray
    d_vb: np.ndarray


@dataclass
class SCAOptions:
    rel_tol: float = 1e-4
    max_iters: int = 50
    solver_tol: float = 1e-7
    max_steps: int = 200


@dataclass
class SCAResult:
    trajectory: Trajectory
    bounds: SlotBounds
    objective: float
    trace: list = field(default_factory=list)
    distances: SqDistances = None


# ---------------------------------------------------------------------------
# shared evaluation helpers
# ---------------------------------------------------------------------------

def slot_values(alpha, gv_slot, vb):
    """Per-slot achievable SE ``min(alpha*SE_GV_n, (1-alpha)*SE_VB_n)``."""
    return np.minimum(alpha * gv_slot, (1.0 - alpha) * vb)


def objective_on(scenario, alpha, traj, binary, consts=None):
    se_gv, se_vb = channel.se_tables(scenario, traj, consts)
    gv = channel.slot_gv_se(se_gv, binary, scenario.users_per_slot)
    eta = slot_values(alpha, gv, se_vb)
    return float(eta.mean()), eta


def round_robin_schedule(scenario: Scenario) -> Schedule:
    """Users cycle through the slots in index order, respecting both caps."""
    return Schedule(_cyclic(scenario, np.arange(scenario.num_users)))


def random_schedule(scenario: Scenario, rng) -> Schedule:
    """Round-robin over a random user order, slots shuffled."""
    perm = rng.permutation(scenario.num_users)
    B = _cyclic(scenario, perm)
    return Schedule(B[:, rng.permutation(scenario.num_slots)])


def _cyclic(scenario, order):
    G, N, M = scenario.num_users, scenario.num_slots, scenario.users_per_slot
    seats = min(N * M, G * scenario.user_cap)
    B = np.zeros((G, N))
    for k in range(seats):
        B[order[k % G], k // M] = 1.0
    return B


# ---------------------------------------------------------------------------
# timeshare
# ---------------------------------------------------------------------------

def optimize_timeshare(scenario: Scenario, traj: Trajectory, binary, se=None):
    """Best ``alpha`` for a fixed trajectory and schedule.

    Returns ``(alpha, SlotBounds, objective)``.  ``se`` may carry
    precomputed ``(SE_gv, SE_vb)`` tables.
    """
    se_gv, se_vb = se if se is not None else channel.se_tables(scenario, traj)
    N = scenario.num_slots
    gv = channel.slot_gv_se(se_gv, binary, scenario.users_per_slot)

    # x = [alpha, eta_1..eta_N]
    c = np.concatenate([[0.0], np.full(N, 1.0 / N)])
    A = np.zeros((2 * N, N + 1))
    A[:N, 0] = -gv
    A[N:, 0] = se_vb
    A[:N, 1:] = np.eye(N)
    A[N:, 1:] = np.eye(N)
    b = np.concatenate([np.zeros(N), se_vb])
    bounds = np.column_stack([np.zeros(N + 1), np.r_[1.0, np.full(N, np.inf)]])
    res = solve_lp(LinearProgram(c, A, b, "<=", bounds))
    if not res.ok:
        raise SolverError(f"timeshare LP ended with {res.status.value}", res)
    alpha = float(np.clip(res.x[0], 0.0, 1.0))
    eta = slot_values(alpha, gv, se_vb)
    obj = float(eta.mean())
    if abs(obj - res.objective_value) > 1e-7 * max(1.0, abs(obj)):
        raise SolverError(f"timeshare LP objective {res.objective_value} != {obj}", res)
    return alpha, SlotBounds(eta), obj


# ---------------------------------------------------------------------------
# scheduling
# ---------------------------------------------------------------------------

def scheduling_lp(scenario: Scenario, alpha, se_gv, se_vb) -> LinearProgram:
    """Relaxed scheduling LP over ``x[g*N + n]`` then ``eta_n``."""
    G, N, M = scenario.num_users, scenario.num_slots, scenario.users_per_slot
    nx = G * N
    c = np.concatenate([np.zeros(nx), np.full(N, 1.0 / N)])
    A = np.zeros((2 * N + G, nx + N))
    cols = np.arange(nx).reshape(G, N)
    slots = np.arange(N)
    # eta_n - (alpha/M) sum_g SE_gn x_gn <= 0
    A[slots[None, :], cols] = -(alpha / M) * se_gv
    A[slots, nx + slots] = 1.0
    # sum_g x_gn <= M
    A[N + slots[None, :], cols] = 1.0
    # sum_n x_gn <= cap
    A[2 * N + np.arange(G)[:, None], cols] = 1.0
    b = np.concatenate([np.zeros(N), np.full(N, float(M)), np.full(G, float(scenario.user_cap))])
    ub = np.concatenate([np.ones(nx), (1.0 - alpha) * se_vb])
    bounds = np.column_stack([np.zeros(nx + N), ub])
    return LinearProgram(c, A, b, "<=", bounds)


def round_schedule(relaxed, M, cap):
    """Slot by slot, take the ``M`` largest relaxed values among users with
    cap left; ties go to the lower user index."""
    G, N = relaxed.shape
    left = np.full(G, cap)
    B = np.zeros((G, N))
    for n in range(N):
        order = np.lexsort((np.arange(G), -relaxed[:, n]))
        picked = 0
        for g in order:
            if picked == M:
                break
            if left[g] > 0:
                B[g, n] = 1.0
                left[g] -= 1
                picked += 1
    return B


def optimize_schedule(scenario: Scenario, traj: Trajectory, alpha, se=None):
    """Relaxed scheduling LP followed by greedy top-M rounding.

    Returns ``(Schedule, SlotBounds, objective)`` where the objective is
    evaluated on the binary schedule.
    """
    se_gv, se_vb = se if se is not None else channel.se_tables(scenario, traj)
    G, N, M = scenario.num_users, scenario.num_slots, scenario.users_per_slot
    res = solve_lp(scheduling_lp(scenario, alpha, se_gv, se_vb))
    if not res.ok:
        raise SolverError(f"scheduling LP ended with {res.status.value}", res)
    relaxed = np.clip(res.x[:G * N].reshape(G, N), 0.0, 1.0)
    binary = round_schedule(relaxed, M, scenario.user_cap)
    eta = slot_values(alpha, channel.slot_gv_se(se_gv, binary, M), se_vb)
    obj = float(eta.mean())
    lp_obj = res.objective_value
    if not (lp_obj >= obj - 1e-7 * max(1.0, lp_obj) and obj >= 0.0):
        raise SolverError(f"scheduling sandwich broken: LP {lp_obj}, rounded {obj}", res)
    return Schedule(binary, relaxed), SlotBounds(eta), obj


# ---------------------------------------------------------------------------
# trajectory (SCA)
# ---------------------------------------------------------------------------

def se_derivative(a_const, d):
    """d/dd log2(1 + a/d) = -a / (ln2 * d * (d + a))."""
    return -a_const / (LN2 * d * (d + a_const))


def surrogate_se(a_const, d, d0):
    """First-order expansion of ``log2(1 + a/d)`` about ``d0``; a global
    lower bound because the function is convex in ``d``."""
    return channel.se_of_sq_dist(a_const, d0) + se_derivative(a_const, d0) * (d - d0)


def _slot_geometry(N):
    ang = 2.0 * np.pi * np.arange(1, N + 1) / N
    return np.cos(ang), np.sin(ang)


def _surrogate_rows(weights, points, H, cos, sin, L):
    """Quadratic pieces of ``sum_k w_k ||x_n(u) - p_k||^2`` for one slot.

    ``x_n(u) = (L(u0 + u2 cos), L(u1 + u2 sin), H)``.  Returns ``(Q, q, const)``
    on ``u = (u0, u1, u2)``.
    """
    P = np.array([[1.0, 0.0, cos], [0.0, 1.0, sin]])
    wsum = weights.sum()
    Q = (L * L * wsum) * (P.T @ P)
    q = -2.0 * L * (P.T @ (weights @ points[:, :2]))
    const = float(weights @ ((points[:, :2] ** 2).sum(axis=1) + (H - points[:, 2]) ** 2))
    return Q, q, const


def build_sca_qcp(scenario: Scenario, alpha, binary, traj: Trajectory, consts=None):
    """Convex subproblem around ``traj``.

    Variables are ``u = (c_x, c_y, r) / L`` followed by one ``eta`` per
    active slot.  The squared-distance auxiliaries are substituted by their
    defining quadratics: their coefficients in the linearised SE are
    non-positive, so the relaxed ``d >= ||.||^2`` rows are tight at the
    optimum.  Returns ``(qcp, active_slots, L)``.
    """
    c = consts or channel.link_constants(scenario)
    G, N, M = scenario.num_users, scenario.num_slots, scenario.users_per_slot
    H = scenario.altitude_m
    L = max(H, scenario.min_radius_m)
    B = np.asarray(binary)
    active = np.flatnonzero(B.sum(axis=0) > 0) if 0.0 < alpha < 1.0 else np.zeros(0, int)
    K = active.size
    nvar = 3 + K

    d_gv, d_vb = channel.sq_distances(scenario, traj)
    se_gv0 = channel.se_of_sq_dist(c.a_g, d_gv)
    se_vb0 = channel.se_of_sq_dist(c.a_b, d_vb)
    beta_gv = -se_derivative(c.a_g, d_gv)
    beta_vb = -se_derivative(c.a_b, d_vb)
    cos, sin = _slot_geometry(N)
    bs = scenario.bs_position[None, :]

    quads = []
    geo = np.arange(3)
    for k, n in enumerate(active):
        users = np.flatnonzero(B[:, n])
        w = (alpha / M) * beta_gv[users, n]
        Q, q3, const = _surrogate_rows(w, scenario.users[users], H, cos[n], sin[n], L)
        rhs = (alpha / M) * np.sum(se_gv0[users, n] + beta_gv[users, n] * d_gv[users, n]) - const
        q = np.zeros(nvar)
        q[:3] = q3
        q[3 + k] = 1.0
        quads.append(QuadConstraint(Q, q, rhs, geo))

        w = np.array([(1.0 - alpha) * beta_vb[n]])
        Q, q3, const = _surrogate_rows(w, bs, H, cos[n], sin[n], L)
        rhs = (1.0 - alpha) * (se_vb0[n] + beta_vb[n] * d_vb[n]) - const
        q = np.zeros(nvar)
        q[:3] = q3
        q[3 + k] = 1.0
        quads.append(QuadConstraint(Q, q, rhs, geo))

    obj = np.concatenate([np.zeros(3), np.full(K, 1.0 / N)])
    bounds = np.full((nvar, 2), [-np.inf, np.inf])
    bounds[2, 0] = scenario.min_radius_m / L
    return ConvexQcp(obj, bounds=bounds, quad=quads), active, L


def surrogate_objective(scenario, alpha, binary, traj0, traj, consts=None):
    """Value of the linearised objective (built around ``traj0``) at ``traj``."""
    c = consts or channel.link_constants(scenario)
    d0_gv, d0_vb = channel.sq_distances(scenario, traj0)
    d_gv, d_vb = channel.sq_distances(scenario, traj)
    gv = (np.asarray(binary) * surrogate_se(c.a_g, d_gv, d0_gv)).sum(axis=0) / scenario.users_per_slot
    vb = surrogate_se(c.a_b, d_vb, d0_vb)
    has_users = np.asarray(binary).sum(axis=0) > 0
    vals = np.where(has_users, slot_values(alpha, gv, vb), 0.0)
    return float(vals.mean())


def sca_trajectory(scenario: Scenario, alpha, binary, init: Trajectory,
                   opts: SCAOptions = None) -> SCAResult:
    """Successive convex approximation over the circle (center, radius)."""
    opts = opts or SCAOptions()
    if init.radius_m < scenario.min_radius_m:
        raise ValueError("initial radius below r_min")
    consts = channel.link_constants(scenario)
    H = scenario.altitude_m
    traj = init
    best, _ = objective_on(scenario, alpha, traj, binary, consts)
    trace = [best]

    for it in range(opts.max_iters):
        qcp, active, L = build_sca_qcp(scenario, alpha, binary, traj, consts)
        if active.size == 0:
            break
        u0 = np.array([traj.center_xy[0] / L, traj.center_xy[1] / L,
                       max(traj.radius_m / L, scenario.min_radius_m / L + 1e-6)])
        x0 = np.concatenate([u0, np.zeros(active.size)])
        # eta just below the tighter of its two surrogate rows
        room = -np.array([c.value(x0) for c in qcp.quad]).reshape(-1, 2).min(axis=1)
        x0[3:] = room - 1e-3 * (1.0 + np.abs(room))
        res = solve_qcp(qcp, tol=opts.solver_tol, x0=x0, max_steps=opts.max_steps)
        if res.status is Status.INFEASIBLE:
            raise SolverError("SCA subproblem infeasible at a feasible incumbent", res)
        if res.status is not Status.OPTIMAL:
            log.debug("SCA iteration %d: solver %s", it, res.status.value)
            if not np.all(np.isfinite(res.x)):
                break
        u = res.x[:3] * L
        cand = Trajectory((u[0], u[1]), max(u[2], scenario.min_radius_m), H)
        surr = surrogate_objective(scenario, alpha, binary, traj, cand, consts)
        true, _ = objective_on(scenario, alpha, cand, binary, consts)
        if true < best:
            break
        improvement = (surr - best) / max(abs(best), 1e-12)
        traj, best = cand, true
        trace.append(best)
        if improvement < opts.rel_tol:
            break

    best, eta = objective_on(scenario, alpha, traj, binary, consts)
    d_gv, d_vb = channel.sq_distances(scenario, traj)
    return SCAResult(traj, SlotBounds(eta), best, trace, SqDistances(d_gv, d_vb))
