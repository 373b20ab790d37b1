"""P-model environments and the Markov steady-state analyser."""

from __future__ import annotations

from typing import Sequence

import numpy as np

ROW_TOL = 1e-9


class SteadyStateError(ValueError):
    """The chain has no unique stationary distribution."""


class Environment:
    n_actions: int

    def reward_probability(self, action: int) -> float:
        raise NotImplementedError

    def respond(self, action: int, rng: np.random.Generator) -> int:
        raise NotImplementedError


def _as_probs(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} entries must lie in [0, 1]")
    return arr


class StationaryEnv(Environment):
    def __init__(self, reward_probs: Sequence[float]):
        self.reward_probs = _as_probs(reward_probs, "reward_probs")
        if self.reward_probs.ndim != 1 or self.reward_probs.size == 0:
            raise ValueError("reward_probs must be a non-empty vector")
        self.n_actions = self.reward_probs.size

    @property
    def penalty_probs(self) -> np.ndarray:
        return 1.0 - self.reward_probs

    def reward_probability(self, action: int) -> float:
        return float(self.reward_probs[action])

    def respond(self, action: int, rng: np.random.Generator) -> int:
        return int(rng.random() < self.reward_probs[action])


def favorable_probs(k: int, favorable_prob: float, favorable_action: int = 0) -> list[float]:
    """One favourable action; the remaining mass is shared evenly by the rest."""
    if k < 2:
        raise ValueError("need at least two actions")
    rest = (1.0 - favorable_prob) / (k - 1)
    probs = [rest] * k
    probs[favorable_action] = favorable_prob
    return probs


class MarkovSwitchingEnv(Environment):
    """Reward probabilities governed by an ergodic Markov chain.

    ``reward[s][a]`` is the reward probability of action ``a`` while the chain
    sits in state ``s``. The chain advances one step per interaction, after
    the response has been drawn.
    """

    def __init__(self, transition, reward, initial_state: int = 0):
        self.transition = check_row_stochastic(transition)
        self.reward = _as_probs(reward, "reward")
        n_states = self.transition.shape[0]
        if self.reward.ndim != 2 or self.reward.shape[0] != n_states:
            raise ValueError("reward matrix needs one row per chain state")
        if not 0 <= initial_state < n_states:
            raise ValueError("initial state out of range")
        self.n_actions = self.reward.shape[1]
        self.state = initial_state
        self._cdf = np.cumsum(self.transition, axis=1)

    def reward_probability(self, action: int) -> float:
        return float(self.reward[self.state, action])

    def respond(self, action: int, rng: np.random.Generator) -> int:
        signal = int(rng.random() < self.reward[self.state, action])
        row = self._cdf[self.state]
        nxt = int(np.searchsorted(row, rng.random() * row[-1], side="right"))
        self.state = min(nxt, len(row) - 1)
        return signal


class StateDependentEnv(Environment):
    """Model A: the used action gets worse, every other action recovers.

    Drift is written in penalty space (c = 1 - d) and clamped so each c
    stays inside [0, 1]. It applies after every interaction regardless of
    the outcome.
    """

    def __init__(self, reward_probs: Sequence[float], theta, phi):
        self.reward_probs = _as_probs(reward_probs, "reward_probs")
        k = self.reward_probs.size
        self.n_actions = k
        self.theta = np.broadcast_to(np.asarray(theta, dtype=float), (k,)).copy()
        self.phi = np.broadcast_to(np.asarray(phi, dtype=float), (k,)).copy()
        if np.any(self.theta < 0) or np.any(self.phi < 0):
            raise ValueError("theta and phi must be non-negative")

    @property
    def penalty_probs(self) -> np.ndarray:
        return 1.0 - self.reward_probs

    def reward_probability(self, action: int) -> float:
        return float(self.reward_probs[action])

    def drift(self, action: int) -> None:
        c = 1.0 - self.reward_probs
        step_up = min(self.theta[action], 1.0 - c[action])
        others = np.arange(self.n_actions) != action
        step_down = np.minimum(self.phi[others], c[others])
        c[action] += step_up
        c[others] -= step_down
        self.reward_probs = np.clip(1.0 - c, 0.0, 1.0)

    def respond(self, action: int, rng: np.random.Generator) -> int:
        signal = int(rng.random() < self.reward_probs[action])
        self.drift(action)
        return signal


# ---------------------------------------------------------------------------
# Steady state
# ---------------------------------------------------------------------------


def check_row_stochastic(matrix) -> np.ndarray:
    t = np.array(matrix, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise ValueError("transition matrix must be square and non-empty")
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError("transition entries must lie in [0, 1]")
    sums = t.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOL)
    if bad.size:
        raise ValueError(
            f"transition rows {bad.tolist()} do not sum to 1 (sums={sums[bad].tolist()})"
        )
    return t


def is_ergodic(t: np.ndarray) -> bool:
    """Irreducible and aperiodic, i.e. some power of ``t`` is strictly positive."""
    n = t.shape[0]
    reach = (t > 0).astype(int)
    power = reach.copy()
    # Wielandt's bound on the primitivity exponent.
    for _ in range((n - 1) ** 2 + 1):
        if np.all(power > 0):
            return True
        power = np.minimum(power @ reach, 1)
    return bool(np.all(power > 0))


def steady_state(transition) -> np.ndarray:
    """Unique ``v`` with ``v T = v`` and ``sum(v) = 1``."""
    t = check_row_stochastic(transition)
    if not is_ergodic(t):
        raise SteadyStateError("transition matrix is not ergodic")
    n = t.shape[0]
    a = t.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        v = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SteadyStateError(str(exc)) from exc
    v = np.clip(v, 0.0, None)
    return v / v.sum()


def effective_stationary(env: MarkovSwitchingEnv) -> StationaryEnv:
    """Stationary environment seen by an automaton in the long run."""
    v = steady_state(env.transition)
    return StationaryEnv(np.clip(v @ env.reward, 0.0, 1.0))
