"""Fork-choice defenses: tie-breaking and the learning fail-safe (Nik) defense."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..automata import FSLA, make_scheme
from ..hybrid import AVDHLA, SVDHLA, DepthAction

CONTROLLER_KINDS = ("fsla", "svdhla", "avdhla")
DEFENSE_KINDS = ("tie-breaking", "nik")
WEIGHT_MODES = ("creation", "first-received")

_ALL = (DepthAction.GROW, DepthAction.STOP, DepthAction.SHRINK)


class FailSafeController:
    """Binary-feedback automaton over {Grow, Stop, Shrink}.

    The wrapped automaton is a P-model learner, so the S-model feedback
    ``beta`` is turned into a reward with probability ``beta``. When the
    automaton's current action is not offered, Stop is played instead.
    """

    def __init__(self, kind: str, depth: int = 3, scheme: str | None = "L_ReP",
                 lambda1: float = 0.1, lambda2: float = 0.01):
        if kind not in CONTROLLER_KINDS:
            raise ValueError(f"unknown controller {kind!r}")
        self.kind = kind
        if kind == "fsla":
            self.automaton = FSLA(3, depth, start_action=DepthAction.STOP)
        else:
            s = make_scheme(scheme, lambda1, lambda2)
            cls = SVDHLA if kind == "svdhla" else AVDHLA
            self.automaton = cls(3, depth, s.lambda1, s.lambda2, start_action=DepthAction.STOP)

    def choose(self, options: Sequence[DepthAction], rng: np.random.Generator) -> DepthAction:
        action = DepthAction(self.automaton.select_action(rng))
        return action if action in options else DepthAction.STOP

    def reinforce(self, beta: float, rng: np.random.Generator) -> int:
        signal = int(rng.random() < beta)
        self.automaton.update(signal)
        return signal


@dataclass
class DefensePolicy:
    """Fork-choice policy of the honest pool.

    ``tau`` is the decision interval in mined blocks and ``theta`` the
    feedback interval in units of ``tau``. Only the nik kind uses the
    controller and the fail-safe range.
    """

    kind: str = "tie-breaking"
    controller: str = "svdhla"
    k_min: int = 1
    k_max: int = 5
    k_initial: int | None = None
    tau: int = 5
    theta: int = 10
    controller_depth: int = 3
    scheme: str | None = "L_ReP"
    lambda1: float = 0.1
    lambda2: float = 0.01
    weight_mode: str = "creation"
    K: int = field(init=False, default=0)
    weight_decisions: int = field(init=False, default=0)
    total_decisions: int = field(init=False, default=0)

    def __post_init__(self):
        self.validate()
        self.K = self.k_min if self.k_initial is None else self.k_initial
        self._controller = None
        if self.kind == "nik":
            self._controller = FailSafeController(
                self.controller, self.controller_depth, self.scheme, self.lambda1, self.lambda2
            )

    def validate(self) -> None:
        if self.kind not in DEFENSE_KINDS:
            raise ValueError(f"unknown defense {self.kind!r}")
        if self.controller not in CONTROLLER_KINDS:
            raise ValueError(f"unknown controller {self.controller!r}")
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError("need 1 <= k_min <= k_max")
        if self.k_initial is not None and not self.k_min <= self.k_initial <= self.k_max:
            raise ValueError("k_initial outside [k_min, k_max]")
        if self.tau < 1 or self.theta < 1:
            raise ValueError("tau and theta must be >= 1")
        if self.controller_depth < 1:
            raise ValueError("controller_depth must be >= 1")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")

    @property
    def label(self) -> str:
        return "tie-breaking" if self.kind == "tie-breaking" else f"nik-{self.controller}"

    def record(self, by_weight: bool) -> None:
        self.total_decisions += 1
        if by_weight:
            self.weight_decisions += 1


def offered_actions(K: int, k_min: int, k_max: int) -> tuple[DepthAction, ...]:
    """Depth actions allowed for the current fail-safe value."""
    opts = [a for a in _ALL
            if not (a == DepthAction.GROW and K >= k_max)
            and not (a == DepthAction.SHRINK and K <= k_min)]
    return tuple(opts)


def update_fail_safe(policy: DefensePolicy, rng: np.random.Generator) -> DepthAction:
    """Pick Grow/Stop/Shrink for K at a tau boundary and apply it."""
    options = offered_actions(policy.K, policy.k_min, policy.k_max)
    if options == (DepthAction.STOP,):
        return DepthAction.STOP
    action = policy._controller.choose(options, rng)
    if action == DepthAction.GROW:
        policy.K += 1
    elif action == DepthAction.SHRINK:
        policy.K -= 1
    return action


def controller_feedback(policy: DefensePolicy, rng: np.random.Generator) -> float:
    """Feed the window's weight-decision share to the controller and reset."""
    total = policy.total_decisions
    beta = policy.weight_decisions / total if total else 0.0
    policy._controller.reinforce(beta, rng)
    policy.weight_decisions = 0
    policy.total_decisions = 0
    return beta
