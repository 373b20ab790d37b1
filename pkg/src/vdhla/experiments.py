"""Seeded trial runner, metrics and suite aggregation."""

from __future__ import annotations

import json
import logging
import os
import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import ExperimentConfig

log = logging.getLogger(__name__)

TRIAL_COLUMNS = ("iteration", "reward", "cum_tnr", "cum_tnas", "action", "p_favorable")


def trial_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (automaton, environment) generators derived from one seed."""
    auto_ss, env_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(auto_ss), np.random.default_rng(env_ss)


@dataclass
class MetricsTrace:
    rewards: np.ndarray
    actions: np.ndarray
    favorable_action: int | None = None

    @property
    def iterations(self) -> int:
        return int(self.rewards.size)

    @property
    def cum_tnr(self) -> np.ndarray:
        return np.cumsum(self.rewards)

    @property
    def switches(self) -> np.ndarray:
        s = np.zeros(self.actions.size, dtype=np.int64)
        s[1:] = self.actions[1:] != self.actions[:-1]
        return s

    @property
    def cum_tnas(self) -> np.ndarray:
        return np.cumsum(self.switches)

    @property
    def p_favorable(self) -> np.ndarray | None:
        if self.favorable_action is None:
            return None
        hits = np.cumsum(self.actions == self.favorable_action)
        return hits / np.arange(1, self.actions.size + 1)

    @property
    def tnr(self) -> int:
        return int(self.rewards.sum())

    @property
    def tnas(self) -> int:
        return int(self.switches.sum())

    @property
    def final_p_favorable(self) -> float | None:
        p = self.p_favorable
        return None if p is None else float(p[-1])

    def to_csv(self, path: str | Path) -> None:
        p = self.p_favorable
        tnr, tnas = self.cum_tnr, self.cum_tnas
        lines = [",".join(TRIAL_COLUMNS)]
        for i in range(self.iterations):
            pf = "" if p is None else f"{p[i]:.6f}"
            lines.append(
                f"{i + 1},{self.rewards[i]},{tnr[i]},{tnas[i]},{self.actions[i]},{pf}"
            )
        Path(path).write_text("\n".join(lines) + "\n")


def run_loop(automaton, environment, iterations: int, auto_rng, env_rng, favorable_action=None) -> MetricsTrace:
    """select -> respond -> record -> update, ``iterations`` times."""
    rewards = np.empty(iterations, dtype=np.int64)
    actions = np.empty(iterations, dtype=np.int64)
    select, respond, update = automaton.select_action, environment.respond, automaton.update
    for i in range(iterations):
        a = select(auto_rng)
        beta = respond(a, env_rng)
        actions[i] = a
        rewards[i] = beta
        update(beta)
    return MetricsTrace(rewards, actions, favorable_action)


def run_trial(config: ExperimentConfig, seed: int) -> MetricsTrace:
    config.validate()
    auto_rng, env_rng = trial_streams(seed)
    automaton = config.automaton.build()
    environment = config.environment.build(config.automaton.k)
    return run_loop(automaton, environment, config.iterations, auto_rng, env_rng, config.favorable_action)


def summarize(config: ExperimentConfig, traces: Sequence[MetricsTrace]) -> dict:
    tnr = np.array([t.tnr for t in traces], dtype=float)
    tnas = np.array([t.tnas for t in traces], dtype=float)
    pf = [t.final_p_favorable for t in traces]
    return {
        "name": config.name,
        "seeds": len(traces),
        "mean_tnr": float(tnr.mean()),
        "std_tnr": float(tnr.std(ddof=1)) if len(traces) > 1 else 0.0,
        "mean_tnas": float(tnas.mean()),
        "std_tnas": float(tnas.std(ddof=1)) if len(traces) > 1 else 0.0,
        "mean_p_favorable": None if pf[0] is None else float(np.mean(pf)),
    }


def _trial_job(args):
    config, seed = args
    return run_trial(config, seed)


def run_suite(
    configs: Iterable[ExperimentConfig],
    out_dir: str | Path | None = None,
    parallelism: int = 1,
) -> list[dict]:
    """Run every (config, seed) pair and aggregate per config.

    With ``out_dir`` set, one CSV per trial lands in ``out_dir/<name>/`` and
    the aggregate goes to ``out_dir/summary.json``. Outputs are staged and
    moved into place only once everything succeeded.
    """
    configs = [c.validate() for c in configs]
    jobs = [(c, s) for c in configs for s in c.seeds]
    if parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            traces = list(pool.map(_trial_job, jobs, chunksize=4))
    else:
        traces = [_trial_job(job) for job in jobs]

    summary, by_config, pos = [], [], 0
    for c in configs:
        n = len(c.seeds)
        chunk = traces[pos:pos + n]
        pos += n
        by_config.append(chunk)
        summary.append(summarize(c, chunk))

    if out_dir is not None:
        write_outputs(Path(out_dir), configs, by_config, summary)
    return summary


def write_outputs(out_dir: Path, configs, by_config, summary) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir))
    try:
        for c, traces in zip(configs, by_config):
            cdir = staging / c.name
            cdir.mkdir()
            for seed, trace in zip(c.seeds, traces):
                trace.to_csv(cdir / f"seed_{seed}.csv")
        (staging / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
        for entry in sorted(staging.iterdir()):
            target = out_dir / entry.name
            if target.is_dir():
                shutil.rmtree(target)
            os.replace(entry, target)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    log.info("wrote %d configs to %s", len(configs), out_dir)
