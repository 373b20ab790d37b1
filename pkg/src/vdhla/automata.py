"""Classical learning automata: fixed-structure L_{KN,K}, VSLA and VASLA.

Action indices are 0-based. FSLA positions are 1-based, with position 1
the deepest (most committed) state and position ``depth`` the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-9
_RENORM_DRIFT = 1e-12


class DegenerateVectorError(ValueError):
    """Raised when a probability vector cannot be normalised."""


# ---------------------------------------------------------------------------
# Update schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UpdateScheme:
    lambda1: float
    lambda2: float

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    @property
    def name(self) -> str:
        l1, l2 = self.lambda1, self.lambda2
        if l1 == 0 and l2 == 0:
            return "pure_chance"
        if l2 == 0:
            return "L_RI"
        if l1 == 0:
            return "L_PI"
        if l1 == l2:
            return "L_RP"
        if l1 > l2:
            return "L_ReP"
        return "custom"

    @classmethod
    def pure_chance(cls) -> "UpdateScheme":
        return cls(0.0, 0.0)

    @classmethod
    def reward_inaction(cls, c: float) -> "UpdateScheme":
        return cls(c, 0.0)

    @classmethod
    def penalty_inaction(cls, c: float) -> "UpdateScheme":
        return cls(0.0, c)

    @classmethod
    def reward_penalty(cls, c: float) -> "UpdateScheme":
        return cls(c, c)

    @classmethod
    def reward_epsilon_penalty(cls, c1: float, c2: float) -> "UpdateScheme":
        if not c1 > c2:
            raise ValueError("L_ReP needs lambda1 > lambda2")
        return cls(c1, c2)


SCHEME_PRESETS = {
    "pure_chance": lambda l1=0.0, l2=0.0: UpdateScheme.pure_chance(),
    "L_RI": lambda l1, l2=0.0: UpdateScheme.reward_inaction(l1),
    "L_PI": lambda l1=0.0, l2=0.0: UpdateScheme.penalty_inaction(l2),
    "L_RP": lambda l1, l2=None: UpdateScheme.reward_penalty(l1),
    "L_ReP": lambda l1, l2: UpdateScheme.reward_epsilon_penalty(l1, l2),
}


def make_scheme(name: str | None, lambda1: float = 0.0, lambda2: float = 0.0) -> UpdateScheme:
    """Build a scheme from a preset name, or from raw rates when ``name`` is None."""
    if name is None:
        return UpdateScheme(lambda1, lambda2)
    try:
        factory = SCHEME_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown update scheme {name!r}") from None
    return factory(lambda1, lambda2)


# ---------------------------------------------------------------------------
# Probability vector helpers
# ---------------------------------------------------------------------------


def check_probability_vector(p: Sequence[float]) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("probability vector must be a non-empty 1-d sequence")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"probabilities must lie in [0, 1]: {arr}")
    if abs(arr.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"probabilities must sum to 1, got {arr.sum()!r}")
    return arr


def _renormalise(p: np.ndarray) -> np.ndarray:
    np.clip(p, 0.0, 1.0, out=p)
    total = p.sum()
    if abs(total - 1.0) > _RENORM_DRIFT:
        p /= total
    return p


def vsla_update(p: Sequence[float], chosen: int, signal: int, scheme: UpdateScheme) -> np.ndarray:
    """Linear reward/penalty update of a VSLA probability vector (P-model)."""
    if signal not in (0, 1):
        raise ValueError(f"VSLA expects a binary signal, got {signal!r}")
    p = np.array(p, dtype=float)
    r = p.size
    if signal == 1:
        lam = scheme.lambda1
        p *= 1.0 - lam
        p[chosen] += lam
    else:
        lam = scheme.lambda2
        if r == 1:
            return p
        old_chosen = p[chosen]
        p = lam / (r - 1) + (1.0 - lam) * p
        p[chosen] = (1.0 - lam) * old_chosen
    return _renormalise(p)


def vasla_scale(p: Sequence[float], available: Sequence[int]) -> np.ndarray:
    """Rescale the weights of the available actions so they sum to one.

    The result is ordered like ``available``.
    """
    if len(available) == 0:
        raise ValueError("available action set is empty")
    sub = np.asarray(p, dtype=float)[list(available)]
    total = sub.sum()
    if total <= 0.0:
        raise DegenerateVectorError(
            f"available actions {list(available)} carry no probability mass"
        )
    return sub / total


def vasla_update(
    p: Sequence[float],
    chosen: int,
    signal: float,
    scheme: UpdateScheme,
    r: int | None = None,
) -> np.ndarray:
    """S-model linear update over the vector ``p`` (chosen and non-chosen rules).

    ``r`` is the number of available actions; it defaults to ``len(p)``.
    """
    if not 0.0 <= signal <= 1.0:
        raise ValueError(f"S-model signal must lie in [0, 1], got {signal!r}")
    p = np.array(p, dtype=float)
    if r is None:
        r = p.size
    if r < 2:
        raise ValueError("VASLA update needs at least two available actions")
    l1, l2 = scheme.lambda1, scheme.lambda2
    beta = signal
    old = p[chosen]
    p = p - l1 * beta * p + l2 * (1.0 - beta) * (1.0 / (r - 1) - p)
    p[chosen] = old + l1 * beta * (1.0 - old) - l2 * (1.0 - beta) * old
    return _renormalise(p)


def pure_chance_select(k: int, rng: np.random.Generator) -> int:
    if k < 1:
        raise ValueError("need at least one action")
    return int(rng.integers(k))


# ---------------------------------------------------------------------------
# Fixed-structure automaton
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AutomatonState:
    action: int
    position: int


def fsla_select_action(state: AutomatonState) -> int:
    return state.action


def fsla_is_action_switching(state: AutomatonState, signal: int, depth: int) -> bool:
    return signal == 0 and state.position == depth


def fsla_is_depth_transition(state: AutomatonState, signal: int) -> bool:
    return signal == 1 and state.position <= 2


def fsla_update(
    state: AutomatonState, signal: int, depths: Sequence[int]
) -> AutomatonState:
    """One Tsetlin L_{KN,K} transition.

    ``depths[i]`` is the number of states of action ``i``. A penalty at the
    boundary moves clockwise and enters the next action at its own boundary.
    """
    if signal == 1:
        return AutomatonState(state.action, max(1, state.position - 1))
    if state.position < depths[state.action]:
        return AutomatonState(state.action, state.position + 1)
    nxt = (state.action + 1) % len(depths)
    return AutomatonState(nxt, depths[nxt])


class Automaton:
    """Common interface: pick an action, then learn from the response."""

    n_actions: int

    def select_action(self, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def update(self, signal: int) -> None:
        raise NotImplementedError


class FSLA(Automaton):
    """Tsetlin L_{KN,K} automaton with (possibly) per-action depths."""

    def __init__(self, k: int, depth: int | Sequence[int], start_action: int = 0):
        if k < 1:
            raise ValueError("need at least one action")
        if isinstance(depth, (int, np.integer)):
            depths = [int(depth)] * k
        else:
            depths = [int(d) for d in depth]
        if len(depths) != k:
            raise ValueError(f"expected {k} depths, got {len(depths)}")
        if min(depths) < 1:
            raise ValueError("every depth must be >= 1")
        if not 0 <= start_action < k:
            raise ValueError("start action out of range")
        self.n_actions = k
        self.depths = depths
        self.state = AutomatonState(start_action, depths[start_action])

    @property
    def action(self) -> int:
        return self.state.action

    @property
    def position(self) -> int:
        return self.state.position

    def select_action(self, rng: np.random.Generator | None = None) -> int:
        return self.state.action

    def is_action_switching(self, signal: int) -> bool:
        return fsla_is_action_switching(self.state, signal, self.depths[self.state.action])

    def is_depth_transition(self, signal: int) -> bool:
        return fsla_is_depth_transition(self.state, signal)

    def update(self, signal: int) -> None:
        if signal not in (0, 1):
            raise ValueError(f"FSLA expects a binary signal, got {signal!r}")
        self.state = fsla_update(self.state, signal, self.depths)

    def update_depth(self, depth: int, action: int | None = None) -> None:
        """Change the depth of one action, or of every action when ``action`` is None."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if action is None:
            self.depths = [depth] * self.n_actions
        else:
            self.depths[action] = depth

    def enter_boundary(self) -> None:
        """Place the automaton on the boundary state of its current action."""
        a = self.state.action
        self.state = AutomatonState(a, self.depths[a])


class VSLA(Automaton):
    def __init__(self, k: int, scheme: UpdateScheme, probs: Sequence[float] | None = None):
        if k < 2:
            raise ValueError("VSLA needs at least two actions")
        self.n_actions = k
        self.scheme = scheme
        self.p = np.full(k, 1.0 / k) if probs is None else check_probability_vector(probs).copy()
        if self.p.size != k:
            raise ValueError("initial vector length differs from action count")
        self._last: int | None = None

    def select_action(self, rng: np.random.Generator) -> int:
        self._last = int(rng.choice(self.n_actions, p=self.p))
        return self._last

    def update(self, signal: int) -> None:
        if self._last is None:
            raise RuntimeError("update() called before select_action()")
        self.p = vsla_update(self.p, self._last, signal, self.scheme)


class VASLA:
    """Variable action-set automaton driven by an S-model signal.

    Selection rescales the weights of the offered subset. The update is
    applied to the rescaled subset vector (with ``r`` = subset size) and the
    result is mapped back by the subset's original mass, leaving the
    weights of unoffered actions untouched.
    """

    def __init__(self, k: int, scheme: UpdateScheme, probs: Sequence[float] | None = None):
        self.n_actions = k
        self.scheme = scheme
        self.p = np.full(k, 1.0 / k) if probs is None else check_probability_vector(probs).copy()
        if self.p.size != k:
            raise ValueError("initial vector length differs from action count")
        self.last_action: int | None = None
        self._last_subset: tuple[int, ...] | None = None

    def select_action(self, rng: np.random.Generator, available: Sequence[int] | None = None) -> int:
        subset = tuple(range(self.n_actions)) if available is None else tuple(available)
        scaled = vasla_scale(self.p, subset)
        if len(subset) == 1:
            choice = subset[0]
        else:
            choice = subset[int(rng.choice(len(subset), p=scaled))]
        self.last_action = choice
        self._last_subset = subset
        return choice

    def update(self, beta: float) -> bool:
        """Reinforce the last chosen action. Returns False if nothing was learnt."""
        if self.last_action is None:
            return False
        subset, chosen = self._last_subset, self.last_action
        self.last_action, self._last_subset = None, None
        if len(subset) < 2:
            return False
        if self.scheme.lambda1 == 0.0 and self.scheme.lambda2 == 0.0:
            return True
        idx = list(subset)
        mass = self.p[idx].sum()
        if len(subset) == self.n_actions:
            self.p = vasla_update(self.p, chosen, beta, self.scheme)
            return True
        scaled = vasla_scale(self.p, subset)
        scaled = vasla_update(scaled, subset.index(chosen), beta, self.scheme)
        p = self.p.copy()
        p[idx] = scaled * mass
        self.p = _renormalise(p)
        return True


class PureChance(Automaton):
    """Picks uniformly at random every step and never learns."""

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("need at least one action")
        self.n_actions = k

    def select_action(self, rng: np.random.Generator) -> int:
        return pure_chance_select(self.n_actions, rng)

    def update(self, signal: int) -> None:
        pass
