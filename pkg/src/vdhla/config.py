"""Experiment configuration: TOML files, validation and sweep expansion.

One file describes one experiment. An optional ``[sweep]`` table maps
dotted keys (``"automaton.k"``) to value lists; the file then expands into
the cartesian product of those values, one config per combination. A value
that is itself a table is merged into the addressed table, which lets
coupled parameters such as (lambda1, lambda2) vary together.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import tomli

from .automata import FSLA, VSLA, Automaton, PureChance, make_scheme
from .environments import (
    Environment,
    MarkovSwitchingEnv,
    StateDependentEnv,
    StationaryEnv,
    favorable_probs,
)
from .hybrid import AVDHLA, DEFAULT_MAX_DEPTH, SVDHLA

AUTOMATON_KINDS = ("fsla", "svdhla", "avdhla", "vsla", "pure_chance")
ENVIRONMENT_KINDS = ("stationary", "markov", "state_dependent")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


@dataclass
class AutomatonSpec:
    kind: str
    k: int
    depth: int | list[int] = 1
    scheme: str | None = None
    lambda1: float = 0.0
    lambda2: float = 0.0
    max_depth: int = DEFAULT_MAX_DEPTH
    start_action: int = 0

    def validate(self) -> None:
        if self.kind not in AUTOMATON_KINDS:
            raise ConfigError(f"unknown automaton kind {self.kind!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigError("automaton.k must be a positive integer")
        if self.kind in ("vsla", "svdhla", "avdhla") and self.k < 2:
            raise ConfigError(f"{self.kind} needs k >= 2")
        depths = self.depth if isinstance(self.depth, list) else [self.depth]
        if any(not isinstance(d, int) or d < 1 for d in depths):
            raise ConfigError("depths must be integers >= 1")
        if isinstance(self.depth, list):
            if self.kind not in ("avdhla", "fsla"):
                raise ConfigError("per-action depths are only valid for avdhla/fsla")
            if len(self.depth) != self.k:
                raise ConfigError(f"expected {self.k} depths, got {len(self.depth)}")
        if not isinstance(self.start_action, int) or not 0 <= self.start_action < self.k:
            raise ConfigError("start_action out of range")
        if max(depths) > self.max_depth:
            raise ConfigError("initial depth exceeds max_depth")
        try:
            self.update_scheme()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def update_scheme(self):
        return make_scheme(self.scheme, self.lambda1, self.lambda2)

    def build(self) -> Automaton:
        scheme = self.update_scheme()
        if self.kind == "fsla":
            return FSLA(self.k, self.depth, start_action=self.start_action)
        if self.kind == "svdhla":
            return SVDHLA(self.k, self.depth, scheme.lambda1, scheme.lambda2,
                         max_depth=self.max_depth, start_action=self.start_action)
        if self.kind == "avdhla":
            return AVDHLA(self.k, self.depth, scheme.lambda1, scheme.lambda2,
                         max_depth=self.max_depth, start_action=self.start_action)
        if self.kind == "vsla":
            return VSLA(self.k, scheme)
        return PureChance(self.k)


@dataclass
class EnvironmentSpec:
    kind: str
    reward_probs: list[float] | None = None
    favorable_prob: float | None = None
    favorable_action: int = 0
    transition: list[list[float]] | None = None
    reward: list[list[float]] | None = None
    initial_state: int = 0
    theta: float | list[float] = 0.0
    phi: float | list[float] = 0.0

    def initial_probs(self, k: int) -> list[float]:
        if self.reward_probs is not None:
            return list(self.reward_probs)
        if self.favorable_prob is None:
            raise ConfigError(f"{self.kind} environment needs reward_probs or favorable_prob")
        return favorable_probs(k, self.favorable_prob, self.favorable_action)

    def validate(self, k: int) -> None:
        if self.kind not in ENVIRONMENT_KINDS:
            raise ConfigError(f"unknown environment kind {self.kind!r}")
        try:
            env = self.build(k)
        except ValueError as exc:
            raise ConfigError(f"environment: {exc}") from exc
        if env.n_actions != k:
            raise ConfigError(f"environment has {env.n_actions} actions, automaton has {k}")

    def build(self, k: int) -> Environment:
        if self.kind == "stationary":
            return StationaryEnv(self.initial_probs(k))
        if self.kind == "markov":
            if self.transition is None or self.reward is None:
                raise ConfigError("markov environment needs transition and reward")
            return MarkovSwitchingEnv(self.transition, self.reward, self.initial_state)
        return StateDependentEnv(self.initial_probs(k), self.theta, self.phi)


@dataclass
class ExperimentConfig:
    name: str
    automaton: AutomatonSpec
    environment: EnvironmentSpec
    iterations: int = 1000
    seeds: list[int] = field(default_factory=lambda: list(range(30)))
    favorable_action: int | None = None

    def validate(self) -> "ExperimentConfig":
        if not self.name:
            raise ConfigError("experiment needs a name")
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise ConfigError("iterations must be an integer >= 1")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if any(not isinstance(s, int) or s < 0 for s in self.seeds):
            raise ConfigError("seeds must be non-negative integers")
        self.automaton.validate()
        self.environment.validate(self.automaton.k)
        fav = self.favorable_action
        if fav is not None and not 0 <= fav < self.automaton.k:
            raise ConfigError("favorable_action out of range")
        return self

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["environment"] = {k: v for k, v in data["environment"].items() if v is not None}
        data["automaton"] = {k: v for k, v in data["automaton"].items() if v is not None}
        if data["favorable_action"] is None:
            del data["favorable_action"]
        return data


def _set_dotted(data: dict, key: str, value: Any) -> None:
    parts = key.split(".")
    node = data
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"sweep key {key!r} does not address a table")
    target = node.get(parts[-1])
    if isinstance(value, dict):
        if target is None:
            target = node[parts[-1]] = {}
        if not isinstance(target, dict):
            raise ConfigError(f"sweep key {key!r}: cannot merge a table into a scalar")
        target.update(copy.deepcopy(value))
    else:
        node[parts[-1]] = value


def _parse_seeds(raw: Any) -> list[int]:
    if isinstance(raw, int):
        if raw < 1:
            raise ConfigError("seed count must be >= 1")
        return list(range(raw))
    if isinstance(raw, list):
        return list(raw)
    raise ConfigError("seeds must be a count or a list of integers")


def _from_mapping(data: dict[str, Any]) -> ExperimentConfig:
    data = copy.deepcopy(data)
    try:
        auto = AutomatonSpec(**data.pop("automaton"))
        env = EnvironmentSpec(**data.pop("environment"))
    except KeyError as exc:
        raise ConfigError(f"missing table [{exc.args[0]}]") from None
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    seeds = _parse_seeds(data.pop("seeds", 30))
    unknown = set(data) - {"name", "iterations", "favorable_action"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    return ExperimentConfig(
        name=data.get("name", ""),
        automaton=auto,
        environment=env,
        iterations=data.get("iterations", 1000),
        seeds=seeds,
        favorable_action=data.get("favorable_action"),
    ).validate()


def _slug(value: Any) -> str:
    if isinstance(value, dict):
        return "-".join(_slug(v) for v in value.values() if not isinstance(v, list))
    if isinstance(value, list):
        return "-".join(str(v) for v in value)
    return str(value)


def _remove_label(data: dict, key: str) -> None:
    node = data
    for part in key.split("."):
        node = node[part]
    node.pop("label", None)


def expand(data: dict[str, Any]) -> list[ExperimentConfig]:
    """Turn one parsed config document into validated experiment configs."""
    data = dict(data)
    sweep = data.pop("sweep", None)
    if not sweep:
        return [_from_mapping(data)]
    keys = list(sweep)
    for key in keys:
        if not isinstance(sweep[key], list) or not sweep[key]:
            raise ConfigError(f"sweep values for {key!r} must be a non-empty list")
    configs = []
    base_name = data.get("name", "")
    for combo in itertools.product(*(sweep[k] for k in keys)):
        item = copy.deepcopy(data)
        tags = []
        for key, value in zip(keys, combo):
            _set_dotted(item, key, value)
            tag = value.get("label") if isinstance(value, dict) else None
            if tag is not None:
                _remove_label(item, key)
                tags.append(str(tag))
            else:
                tags.append(f"{key.split('.')[-1]}-{_slug(value)}")
        item["name"] = base_name + "__" + "_".join(tags)
        configs.append(_from_mapping(item))
    return configs


def load_config(path: str | Path) -> list[ExperimentConfig]:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    data.setdefault("name", path.stem)
    return expand(data)
