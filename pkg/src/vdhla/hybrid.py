"""Variable-depth hybrid automata (SVDHLA and AVDHLA).

A Tsetlin automaton interacts with the environment while one VASLA
(symmetric) or one VASLA per action (asymmetric) decides, at every action
switch, whether the governed depth grows, shrinks or stays put.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Sequence

import numpy as np

from .automata import FSLA, VASLA, Automaton, UpdateScheme

DEFAULT_MAX_DEPTH = 20


class DepthAction(IntEnum):
    GROW = 0
    STOP = 1
    SHRINK = 2


_NO_SHRINK = (DepthAction.GROW, DepthAction.STOP)
_ALL = (DepthAction.GROW, DepthAction.STOP, DepthAction.SHRINK)


class HybridAutomaton(Automaton):
    """Fusion of an L_{KN,K} automaton with VASLA depth controllers.

    In symmetric mode a single controller and a single counter pair govern
    the common depth. In asymmetric mode each action owns a controller, a
    counter pair and its own depth; only the departed action's depth moves.
    """

    def __init__(
        self,
        k: int,
        depth: int | Sequence[int],
        scheme: UpdateScheme,
        symmetric: bool,
        max_depth: int = DEFAULT_MAX_DEPTH,
        controller_probs: Sequence[float] | None = None,
        start_action: int = 0,
    ):
        self.fsla = FSLA(k, depth, start_action=start_action)
        if symmetric and len(set(self.fsla.depths)) != 1:
            raise ValueError("symmetric mode needs one common depth")
        if max(self.fsla.depths) > max_depth:
            raise ValueError(f"initial depth exceeds max_depth={max_depth}")
        self.n_actions = k
        self.symmetric = symmetric
        self.max_depth = max_depth
        self.scheme = scheme
        n_scopes = 1 if symmetric else k
        self.controllers = [VASLA(3, scheme, controller_probs) for _ in range(n_scopes)]
        self.depth_counter = [0] * n_scopes
        self.transition_counter = [0] * n_scopes
        self.pending_switch: int | None = None
        self.last_beta: float | None = None
        self.switches = 0

    @property
    def depths(self) -> list[int]:
        return list(self.fsla.depths)

    def depth_of(self, action: int) -> int:
        return self.fsla.depths[action]

    def _scope(self, action: int) -> int:
        return 0 if self.symmetric else action

    def select_action(self, rng: np.random.Generator) -> int:
        departed = self.pending_switch
        if departed is None:
            return self.fsla.action
        self.pending_switch = None
        scope = self._scope(departed)
        depth = self.fsla.depths[departed]
        options = _NO_SHRINK if depth == 1 else _ALL
        choice = self.controllers[scope].select_action(rng, options)
        if choice == DepthAction.GROW and depth < self.max_depth:
            depth += 1
        elif choice == DepthAction.SHRINK:
            depth -= 1
        # GROW at the cap degrades to STOP.
        self.fsla.update_depth(depth, None if self.symmetric else departed)
        self.fsla.enter_boundary()
        return self.fsla.action

    def update(self, signal: int) -> None:
        if signal not in (0, 1):
            raise ValueError(f"hybrid automaton expects a binary signal, got {signal!r}")
        scope = self._scope(self.fsla.action)
        if signal == 1:
            if self.fsla.is_depth_transition(1):
                self.depth_counter[scope] += 1
            self.fsla.update(1)
            self.transition_counter[scope] += 1
            return
        # Penalties count as transitions too; this is what makes the
        # worked example come out at 1/3.
        self.transition_counter[scope] += 1
        if self.fsla.is_action_switching(0):
            tc = self.transition_counter[scope]
            beta = self.depth_counter[scope] / tc if tc else 0.0
            self.last_beta = beta
            self.controllers[scope].update(beta)
            self.depth_counter[scope] = 0
            self.transition_counter[scope] = 0
            self.pending_switch = self.fsla.action
            self.switches += 1
        self.fsla.update(0)


class SVDHLA(HybridAutomaton):
    """Symmetric variant: SVDHLA(K, N, lambda1, lambda2)."""

    def __init__(self, k: int, n: int, lambda1: float, lambda2: float, **kwargs):
        super().__init__(k, int(n), UpdateScheme(lambda1, lambda2), symmetric=True, **kwargs)


class AVDHLA(HybridAutomaton):
    """Asymmetric variant: AVDHLA(K, N_1..N_K, lambda1, lambda2).

    A scalar ``depths`` is broadcast to every action.
    """

    def __init__(self, k: int, depths: int | Sequence[int], lambda1: float, lambda2: float, **kwargs):
        super().__init__(k, depths, UpdateScheme(lambda1, lambda2), symmetric=False, **kwargs)
