"""Comparison systems: per-user hovering upper bound and the static circle."""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import channel
from .orchestrator import evaluate_objective, static_alpha
from .scenario import Scenario, Trajectory
from .subproblems import random_schedule

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class BaselineKind(str, Enum):
    UPPER_BOUND = "UpperBound"
    STATIC = "Static"


@dataclass
class BaselineResult:
    kind: BaselineKind
    objective: float
    details: dict = field(default_factory=dict)


def relay_se(se1, se2):
    """``SE1*SE2/(SE1+SE2)``: the min of the two links at the equalising timeshare."""
    s = se1 + se2
    return np.where(s > 0, se1 * se2 / np.where(s > 0, s, 1.0), 0.0)


def _hover_se(t, user, scenario, a1, a2):
    """Relay SE with the UAV at fraction ``t`` of the way from user to BS."""
    bs = scenario.bs_position
    H = scenario.altitude_m
    xy = (1.0 - t) * user[:2] + t * bs[:2]
    d1 = float(np.sum((xy - user[:2]) ** 2)) + H * H
    d2 = float(np.sum((xy - bs[:2]) ** 2)) + (H - bs[2]) ** 2
    return channel.se_of_sq_dist(a1, d1), channel.se_of_sq_dist(a2, d2)


def _best_t(f, grid=64, tol=1e-6):
    ts = np.linspace(0.0, 1.0, grid + 1)
    vals = np.array([f(t) for t in ts])
    i = int(np.argmax(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid)]
    a = hi - GOLDEN * (hi - lo)
    b = lo + GOLDEN * (hi - lo)
    fa, fb = f(a), f(b)
    while hi - lo > tol:
        if fa < fb:
            lo, a, fa = a, b, fb
            b = lo + GOLDEN * (hi - lo)
            fb = f(b)
        else:
            hi, b, fb = b, a, fa
            a = hi - GOLDEN * (hi - lo)
            fa = f(a)
    cands = [(vals[i], ts[i]), (fa, a), (fb, b)]
    return max(cands)[1]


def upper_bound(scenario: Scenario, band_users: int = 1) -> BaselineResult:
    """Each user served alone by a UAV hovering at its best relay point.

    The hover point is searched on the segment between the user and the BS
    ground positions at altitude ``H``; the timeshare equalises the links.
    ``band_users`` sets how many users share the band (1 = full band).
    """
    a1 = channel.link_constants(scenario, users_per_slot=band_users).a_g
    a2 = channel.link_constants(scenario).a_b
    ts, alphas, vals, points = [], [], [], []
    for user in scenario.users:
        t = _best_t(lambda s: float(relay_se(*_hover_se(s, user, scenario, a1, a2))))
        se1, se2 = _hover_se(t, user, scenario, a1, a2)
        ts.append(t)
        alphas.append(se2 / (se1 + se2))
        vals.append(float(relay_se(se1, se2)))
        xy = (1.0 - t) * user[:2] + t * scenario.bs_position[:2]
        points.append([xy[0], xy[1], scenario.altitude_m])
    return BaselineResult(BaselineKind.UPPER_BOUND, float(np.mean(vals)), {
        "t": np.array(ts), "alpha": np.array(alphas),
        "per_user": np.array(vals), "hover_points": np.array(points),
    })


def static_baseline(scenario: Scenario, seed) -> BaselineResult:
    """Minimum-radius circle over the dead-zone center, random schedule,
    analytic single-virtual-user timeshare."""
    mu = scenario.dead_zone_center
    traj = Trajectory((mu[0], mu[1]), scenario.min_radius_m, scenario.altitude_m)
    alpha = static_alpha(scenario)
    sched = random_schedule(scenario, np.random.default_rng(seed))
    obj = evaluate_objective(scenario, alpha, traj, sched.binary)
    return BaselineResult(BaselineKind.STATIC, obj, {
        "trajectory": traj, "alpha": alpha, "schedule": sched,
    })
