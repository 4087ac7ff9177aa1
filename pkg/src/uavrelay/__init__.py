"""Fixed-wing UAV relay optimisation: timeshare, scheduling and circular
trajectory chosen by block-coordinate ascent, with baselines and a Monte
Carlo harness."""
from .baselines import BaselineResult, static_baseline, upper_bound
from .orchestrator import (OuterOptions, RelaySolution, evaluate_objective,
                           optimize)
from .scenario import (RadioConfig, Scenario, ScenarioError, Trajectory,
                       default_scenario, load_scenario, uav_position)

__version__ = "0.1.0"

__all__ = [
    "BaselineResult", "OuterOptions", "RadioConfig", "RelaySolution", "Scenario",
    "ScenarioError", "Trajectory", "default_scenario", "evaluate_objective",
    "load_scenario", "optimize", "static_baseline", "uav_position", "upper_bound",
]
