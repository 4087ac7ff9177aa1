"""Free-space link budget: received power, SNR and spectral efficiency.

Everything is in linear units.  The distance forms ``log2(1 + A / d)`` use
the squared distance ``d`` and the link constants below:

    A_G = P_G Gt Gr M (lambda / 4 pi)^2 / (N0 B)     (band split over M users)
    A_B = P_V Gt Gr   (lambda / 4 pi)^2 / (N0 B)
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .scenario import Scenario, Trajectory, uav_position


@dataclass(frozen=True)
class LinkConstants:
    a_g: float
    a_b: float


def link_constants(scenario: Scenario, users_per_slot=None) -> LinkConstants:
    """``users_per_slot`` overrides M in ``A_G`` (e.g. 1 for full-band service)."""
    r = scenario.radio
    M = scenario.users_per_slot if users_per_slot is None else users_per_slot
    k = r.path_gain_const / r.noise_W
    return LinkConstants(a_g=r.user_tx_power_W * M * k, a_b=r.uav_tx_power_W * k)


def se_of_sq_dist(a, d):
    """``log2(1 + a / d)``; scalar or array ``d``."""
    if np.ndim(d) == 0 and np.ndim(a) == 0:
        return math.log2(1.0 + a / d)
    if np.ndim(a):
        return np.log2(1.0 + np.asarray(a) / d)
    return kernels.se_from_sq_dist(a, d)


# -- per-index operations -------------------------------------------------

def rx_power_gv(scenario: Scenario, traj: Trajectory, user: int, slot: int) -> float:
    """Power the UAV receives from user ``g`` (0-based) in slot ``n`` (1-based)."""
    r = scenario.radio
    p = uav_position(traj, slot, scenario.num_slots)
    dist = np.linalg.norm(p - scenario.users[user])
    return r.user_tx_power_W * r.antenna_gain_tx * r.antenna_gain_rx * (
        r.wavelength_m / (4 * math.pi * dist)) ** 2


def rx_power_vb(scenario: Scenario, traj: Trajectory, slot: int) -> float:
    r = scenario.radio
    p = uav_position(traj, slot, scenario.num_slots)
    dist = np.linalg.norm(p - scenario.bs_position)
    return r.uav_tx_power_W * r.antenna_gain_tx * r.antenna_gain_rx * (
        r.wavelength_m / (4 * math.pi * dist)) ** 2


def se_gv_user(scenario: Scenario, traj: Trajectory, user: int, slot: int) -> float:
    snr = rx_power_gv(scenario, traj, user, slot) / (scenario.radio.noise_W / scenario.users_per_slot)
    return math.log2(1.0 + snr)


def se_vb(scenario: Scenario, traj: Trajectory, slot: int) -> float:
    snr = rx_power_vb(scenario, traj, slot) / scenario.radio.noise_W
    return math.log2(1.0 + snr)


def se_gv_slot(scenario: Scenario, traj: Trajectory, schedule, slot: int) -> float:
    """Mean per-user GV SE over the users scheduled in slot ``n`` (1-based)."""
    col = np.asarray(schedule)[:, slot - 1]
    total = sum(se_gv_user(scenario, traj, g, slot) for g in np.flatnonzero(col))
    return total / scenario.users_per_slot


# -- vectorised forms used by the solvers ---------------------------------

def sq_distances(scenario: Scenario, traj: Trajectory):
    """``(d_gv (G, N), d_vb (N,))`` squared distances."""
    pos = traj.positions(scenario.num_slots)
    d_gv = kernels.sq_dist(scenario.users, pos)
    d_vb = kernels.sq_dist(scenario.bs_position[None, :], pos)[0]
    return d_gv, d_vb


def se_tables(scenario: Scenario, traj: Trajectory, consts=None):
    """``(SE_gv (G, N), SE_vb (N,))`` per user/slot and per slot."""
    c = consts or link_constants(scenario)
    d_gv, d_vb = sq_distances(scenario, traj)
    return kernels.se_from_sq_dist(c.a_g, d_gv), kernels.se_from_sq_dist(c.a_b, d_vb)


def slot_gv_se(se_gv, schedule, M):
    """Per-slot mean scheduled GV SE from a ``(G, N)`` table."""
    return (np.asarray(schedule) * se_gv).sum(axis=0) / M
