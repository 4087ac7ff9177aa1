"""True objective and the block-coordinate ascent driver."""
import logging
from dataclasses import dataclass, field

import numpy as np

from . import channel
from .scenario import Scenario, Trajectory
from .subproblems import (SCAOptions, Schedule, SlotBounds, objective_on,
                          optimize_schedule, optimize_timeshare,
                          round_robin_schedule, sca_trajectory)

log = logging.getLogger(__name__)


@dataclass
class OuterOptions:
    rel_tol: float = 1e-4
    max_outer: int = 20
    sca: SCAOptions = field(default_factory=SCAOptions)


@dataclass
class RelaySolution:
    alpha: float
    trajectory: Trajectory
    schedule: Schedule
    eta: SlotBounds
    objective: float
    outer_trace: list = field(default_factory=list)
    inner_traces: list = field(default_factory=list)


def evaluate_objective(scenario: Scenario, alpha, traj: Trajectory, binary) -> float:
    """Average achievable SE: mean over slots of ``min(a*GV_n, (1-a)*VB_n)``."""
    return objective_on(scenario, alpha, traj, binary)[0]


def static_alpha(scenario: Scenario, center_xy=None) -> float:
    """``SE2 / (SE1 + SE2)`` for one virtual user at the dead-zone center
    served by a stationary relay directly above it."""
    c = channel.link_constants(scenario)
    mu = scenario.dead_zone_center if center_xy is None else np.asarray(center_xy)
    H = scenario.altitude_m
    se1 = channel.se_of_sq_dist(c.a_g, H * H)
    relay = np.array([mu[0], mu[1], H])
    se2 = channel.se_of_sq_dist(c.a_b, float(np.sum((relay - scenario.bs_position) ** 2)))
    return se2 / (se1 + se2)


def initial_solution(scenario: Scenario, schedule: Schedule = None) -> RelaySolution:
    """Static-baseline circle and timeshare with a round-robin schedule."""
    mu = scenario.dead_zone_center
    traj = Trajectory((mu[0], mu[1]), scenario.min_radius_m, scenario.altitude_m)
    alpha = static_alpha(scenario)
    sched = schedule or round_robin_schedule(scenario)
    obj, eta = objective_on(scenario, alpha, traj, sched.binary)
    return RelaySolution(alpha, traj, sched, SlotBounds(eta), obj, [obj])


def optimize(scenario: Scenario, opts: OuterOptions = None, init: RelaySolution = None) -> RelaySolution:
    """Cycle schedule -> trajectory -> timeshare until the objective stalls.

    A block's output replaces the incumbent only when it does not lower the
    true objective.
    """
    opts = opts or OuterOptions()
    sol = init or initial_solution(scenario)
    alpha, traj, sched = sol.alpha, sol.trajectory, sol.schedule
    obj = evaluate_objective(scenario, alpha, traj, sched.binary)
    trace = [obj]
    inner = []

    for k in range(opts.max_outer):
        start = obj
        se = channel.se_tables(scenario, traj)
        new_sched, _, val = optimize_schedule(scenario, traj, alpha, se=se)
        if val >= obj:
            sched, obj = new_sched, val

        res = sca_trajectory(scenario, alpha, sched.binary, traj, opts.sca)
        inner.append(res.trace)
        if res.objective >= obj:
            traj, obj = res.trajectory, res.objective

        se = channel.se_tables(scenario, traj)
        a, _, val = optimize_timeshare(scenario, traj, sched.binary, se=se)
        if val >= obj:
            alpha, obj = a, val

        trace.append(obj)
        log.debug("outer %d: %.6f", k, obj)
        if obj - start < opts.rel_tol * max(abs(start), 1e-12):
            break

    final, eta = objective_on(scenario, alpha, traj, sched.binary)
    return RelaySolution(alpha, traj, sched, SlotBounds(eta), final, trace, inner)
