"""Selfish-mining simulator with tie-breaking and Nik fork-choice defenses."""

from .chain import Block, BlockTree, Branch, Decision, branch_weight, choose_branch, longest_branch
from .defense import DefensePolicy, FailSafeController, controller_feedback, offered_actions, update_fail_safe
from .simulator import (
    MineEvent,
    Simulation,
    SimulationResult,
    SimulationSpec,
    mine_step,
    relative_revenue,
    simulate,
)
from .sweep import (
    SweepConfig,
    load_sweep_config,
    lower_bound_threshold,
    run_sweep,
    threshold_sweep,
    write_sweep,
)

__all__ = [
    "Block", "BlockTree", "Branch", "Decision", "DefensePolicy", "FailSafeController",
    "MineEvent", "Simulation", "SimulationResult", "SimulationSpec", "SweepConfig",
    "branch_weight", "choose_branch", "controller_feedback", "load_sweep_config",
    "longest_branch", "lower_bound_threshold", "mine_step", "offered_actions",
    "relative_revenue", "run_sweep", "simulate", "threshold_sweep", "update_fail_safe",
    "write_sweep",
]
