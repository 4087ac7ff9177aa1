"""Problem instance, circular trajectory and config-file loading."""
import copy
import json
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

log = logging.getLogger(__name__)


class ScenarioError(ValueError):
    """Config could not be parsed or violates a scenario invariant."""


class SpeedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RadioConfig:
    user_tx_power_W: float = 0.01
    uav_tx_power_W: float = 10.0
    wavelength_m: float = 0.15          # 2 GHz carrier
    antenna_gain_tx: float = 1.0
    antenna_gain_rx: float = 1.0
    bandwidth_Hz: float = 1e6
    noise_psd_W_per_Hz: float = 4e-21   # -174 dBm/Hz

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ScenarioError(f"radio.{name} must be strictly positive, got {value!r}")

    @property
    def noise_W(self):
        return self.noise_psd_W_per_Hz * self.bandwidth_Hz

    @property
    def path_gain_const(self):
        """``Gt * Gr * (lambda / 4 pi)^2``."""
        return self.antenna_gain_tx * self.antenna_gain_rx * (self.wavelength_m / (4 * math.pi)) ** 2


@dataclass(frozen=True)
class UserDistribution:
    mean_x: float
    mean_y: float
    std_x: float
    std_y: float
    count: int
    seed: int = 0


@dataclass(frozen=True, eq=False)
class Scenario:
    users: np.ndarray                       # (G, 3)
    users_per_slot: int = 2                 # M
    num_slots: int = 500                    # N
    slot_duration_s: Optional[float] = None  # T_s; None -> one revolution per 50 s
    altitude_m: float = 1000.0              # H
    min_radius_m: float = 500.0
    speed_min_mps: float = 30.0
    speed_max_mps: float = 100.0
    bs_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    radio: RadioConfig = field(default_factory=RadioConfig)
    distribution: Optional[UserDistribution] = None

    def __post_init__(self):
        users = np.array(self.users, dtype=float)
        if users.ndim != 2 or users.shape[1] not in (2, 3) or users.shape[0] == 0:
            raise ScenarioError("users must be a non-empty list of [x, y, 0] positions")
        if users.shape[1] == 2:
            users = np.column_stack([users, np.zeros(len(users))])
        if np.any(users[:, 2] != 0.0):
            raise ScenarioError("user z-coordinates must be exactly 0 (ground level)")
        if not np.all(np.isfinite(users)):
            raise ScenarioError("user positions must be finite")
        users.setflags(write=False)
        object.__setattr__(self, "users", users)
        bs = np.array(self.bs_position, dtype=float).ravel()
        if bs.size != 3 or not np.all(np.isfinite(bs)):
            raise ScenarioError("bs position must be a finite 3-vector")
        bs.setflags(write=False)
        object.__setattr__(self, "bs_position", bs)
        M, G, N = self.users_per_slot, self.num_users, self.num_slots
        if not isinstance(N, (int, np.integer)) or N < 1:
            raise ScenarioError(f"num_slots must be >= 1, got {N!r}")
        if self.slot_duration_s is None:
            object.__setattr__(self, "slot_duration_s", 50.0 / N)
        if not isinstance(M, (int, np.integer)) or M < 1:
            raise ScenarioError(f"users_per_slot must be >= 1, got {M!r}")
        if M > G:
            raise ScenarioError(f"users_per_slot ({M}) exceeds the number of users ({G})")
        for name in ("altitude_m", "min_radius_m", "slot_duration_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ScenarioError(f"{name} must be > 0, got {v!r}")
        if not (0 <= self.speed_min_mps <= self.speed_max_mps):
            raise ScenarioError("speed bounds must satisfy 0 <= v_min <= v_max")
        if self.altitude_m <= bs[2]:
            raise ScenarioError("altitude must exceed the BS height")
        if (N * M) % G:
            log.debug("N*M/G = %s is not integral; per-user cap floors to %d",
                      N * M / G, self.user_cap)

    @property
    def num_users(self):
        return self.users.shape[0]

    @property
    def user_cap(self):
        """Maximum number of slots any single user may be scheduled in."""
        return (self.num_slots * self.users_per_slot) // self.num_users

    @property
    def dead_zone_center(self):
        """(mu_x, mu_y): distribution mean if sampled, else the user centroid."""
        if self.distribution is not None:
            return np.array([self.distribution.mean_x, self.distribution.mean_y])
        return self.users[:, :2].mean(axis=0)

    def replace(self, **changes):
        return replace(self, **changes)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self):
        d = {
            "bs": {"position_m": self.bs_position.tolist()},
            "uav": {
                "altitude_m": self.altitude_m,
                "min_radius_m": self.min_radius_m,
                "speed_min_mps": self.speed_min_mps,
                "speed_max_mps": self.speed_max_mps,
            },
            "slots": {
                "count": int(self.num_slots),
                "duration_s": self.slot_duration_s,
                "users_per_slot": int(self.users_per_slot),
            },
            "radio": dict(self.radio.__dict__),
        }
        if self.distribution is not None:
            d["users"] = {"distribution": dict(self.distribution.__dict__)}
        else:
            d["users"] = self.users.tolist()
        return d


@dataclass(frozen=True)
class Trajectory:
    center_xy: tuple
    radius_m: float
    altitude_m: float

    def __post_init__(self):
        c = tuple(float(v) for v in self.center_xy)
        if len(c) != 2:
            raise ValueError("center_xy must have two components")
        object.__setattr__(self, "center_xy", c)
        if not self.altitude_m > 0:
            raise ValueError("altitude must be positive")
        if self.radius_m < 0:
            raise ValueError("radius must be non-negative")

    def positions(self, num_slots):
        """UAV positions for slots ``n = 1..N`` as an ``(N, 3)`` array."""
        ang = 2.0 * np.pi * np.arange(1, num_slots + 1) / num_slots
        cx, cy = self.center_xy
        return np.column_stack([
            cx + self.radius_m * np.cos(ang),
            cy + self.radius_m * np.sin(ang),
            np.full(num_slots, float(self.altitude_m)),
        ])

    def check(self, scenario, tol=0.0):
        if self.radius_m < scenario.min_radius_m - tol:
            raise ValueError(f"radius {self.radius_m} below r_min {scenario.min_radius_m}")


def uav_position(traj: Trajectory, slot: int, num_slots: int) -> np.ndarray:
    """Position during slot ``n`` (1-based, periodic in ``N``)."""
    a = 2.0 * math.pi * slot / num_slots
    cx, cy = traj.center_xy
    return np.array([cx + traj.radius_m * math.cos(a),
                     cy + traj.radius_m * math.sin(a),
                     float(traj.altitude_m)])


def implied_speed(traj: Trajectory, scenario: Scenario) -> float:
    """Constant speed that completes one revolution over all slots.

    Warns (never raises) when it falls outside the airframe's speed range.
    """
    v = 2.0 * math.pi * traj.radius_m / (scenario.num_slots * scenario.slot_duration_s)
    if not scenario.speed_min_mps <= v <= scenario.speed_max_mps:
        warnings.warn(
            f"implied speed {v:.3f} m/s outside [{scenario.speed_min_mps}, "
            f"{scenario.speed_max_mps}] m/s", SpeedWarning, stacklevel=2)
    return v


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

DEFAULT_CONFIG = {
    "bs": {"position_m": [0.0, 0.0, 0.0]},
    "users": {"distribution": {"mean_x": 5000.0, "mean_y": 0.0, "std_x": 1000.0,
                               "std_y": 1000.0, "count": 20, "seed": 0}},
    "uav": {"altitude_m": 1000.0, "min_radius_m": 500.0,
            "speed_min_mps": 30.0, "speed_max_mps": 100.0},
    "slots": {"count": 500, "users_per_slot": 2},
    "radio": dict(RadioConfig().__dict__),
}

DESK_OVERRIDES = {
    "users.distribution.count": 10,
    "slots.count": 64,
}


def _coerce(text):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return text


def apply_overrides(cfg, overrides):
    """Set dotted keys (``"radio.uav_tx_power_W"``) in a nested config dict."""
    cfg = copy.deepcopy(cfg)
    for key, value in (overrides or {}).items():
        if isinstance(value, str):
            value = _coerce(value)
        parts = key.split(".")
        node = cfg
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                node[p] = {}
            node = node[p]
        node[parts[-1]] = value
    return cfg


def parse_overrides(items):
    """``["a.b=1", ...]`` -> ``{"a.b": "1"}``."""
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ScenarioError(f"override {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


_KNOWN = {"bs", "users", "uav", "slots", "radio"}


def scenario_from_dict(cfg) -> Scenario:
    from .experiments import sample_users  # late import, experiments imports us

    if not isinstance(cfg, dict):
        raise ScenarioError("config root must be a mapping")
    unknown = set(cfg) - _KNOWN
    if unknown:
        raise ScenarioError(f"unknown top-level config keys: {sorted(unknown)}")
    try:
        bs = cfg.get("bs", {}).get("position_m", [0.0, 0.0, 0.0])
        uav = cfg.get("uav", {})
        slots = cfg.get("slots", {})
        radio = RadioConfig(**cfg.get("radio", {}))
        users_cfg = cfg.get("users")
        dist = None
        if isinstance(users_cfg, dict) and "distribution" in users_cfg:
            dist = UserDistribution(**users_cfg["distribution"])
            if dist.std_x < 0 or dist.std_y < 0:
                raise ScenarioError("user distribution std must be >= 0")
            users = sample_users((dist.mean_x, dist.mean_y), (dist.std_x, dist.std_y),
                                 int(dist.count), dist.seed)
        elif isinstance(users_cfg, list):
            users = users_cfg
        else:
            raise ScenarioError("users must be a list of positions or {distribution: ...}")
        return Scenario(
            users=users,
            users_per_slot=slots.get("users_per_slot", 2),
            num_slots=slots.get("count", 500),
            slot_duration_s=slots.get("duration_s"),
            altitude_m=float(uav.get("altitude_m", 1000.0)),
            min_radius_m=float(uav.get("min_radius_m", 500.0)),
            speed_min_mps=float(uav.get("speed_min_mps", 30.0)),
            speed_max_mps=float(uav.get("speed_max_mps", 100.0)),
            bs_position=bs,
            radio=radio,
            distribution=dist,
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError, KeyError, AttributeError) as exc:
        raise ScenarioError(f"invalid scenario config: {exc}") from exc


def load_scenario(path, overrides=None) -> Scenario:
    """Read a JSON config, apply dotted-key overrides, validate."""
    try:
        text = Path(path).read_text()
    except OSError:
        raise
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON ({exc})") from exc
    return scenario_from_dict(apply_overrides(cfg, overrides))


def default_scenario(desk=True, **overrides) -> Scenario:
    """Full-scale defaults, or the smaller desk-scale variant."""
    ov = dict(DESK_OVERRIDES) if desk else {}
    ov.update(overrides)
    return scenario_from_dict(apply_overrides(DEFAULT_CONFIG, ov))
