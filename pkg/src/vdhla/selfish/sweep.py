"""Alpha sweeps, lower-bound thresholds and their on-disk formats."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import tomli

from .defense import DefensePolicy
from .simulator import SimulationSpec, relative_revenue, simulate

SWEEP_COLUMNS = (
    "defense", "controller", "alpha", "seed", "selfish_revenue",
    "honest_revenue", "final_K", "weight_decision_fraction",
)
GRID_STEP = 0.01


def default_alphas() -> list[float]:
    return [round(a, 2) for a in np.arange(0.01, 0.50, GRID_STEP)]


def defense_key(policy: DefensePolicy) -> tuple[str, str]:
    """(defense, controller) labels used in CSV rows and summary keys."""
    if policy.kind == "tie-breaking":
        return "tie-breaking", ""
    scheme = policy.scheme if policy.scheme is not None else f"{policy.lambda1}/{policy.lambda2}"
    return "nik", f"{policy.controller}:{scheme}"


@dataclass
class SweepConfig:
    name: str = "selfish"
    total_blocks: int = 10_000
    gamma: float = 0.5
    alphas: list[float] = field(default_factory=default_alphas)
    seeds: list[int] = field(default_factory=lambda: list(range(30)))
    defenses: list[DefensePolicy] = field(default_factory=lambda: [DefensePolicy()])

    def validate(self) -> "SweepConfig":
        if not self.alphas:
            raise ValueError("alpha grid is empty")
        if not self.defenses:
            raise ValueError("at least one defense is required")
        if any(not isinstance(s, int) or s < 0 for s in self.seeds):
            raise ValueError("seeds must be non-negative integers")
        for a in self.alphas:
            SimulationSpec(self.total_blocks, a, self.gamma, self.seeds, self.defenses[0]).validate()
        for d in self.defenses:
            d.validate()
        return self

    def to_dict(self) -> dict[str, Any]:
        defenses = []
        for d in self.defenses:
            defenses.append({f.name: getattr(d, f.name) for f in dataclasses.fields(d) if f.init})
        return {
            "name": self.name,
            "total_blocks": self.total_blocks,
            "gamma": self.gamma,
            "alphas": list(self.alphas),
            "seeds": list(self.seeds),
            "defense": defenses,
        }


def sweep_from_mapping(data: dict[str, Any]) -> SweepConfig:
    data = dict(data)
    raw_defenses = data.pop("defense", None)
    if not raw_defenses:
        raise ValueError("sweep config needs at least one [[defense]] table")
    defenses = [DefensePolicy(**d) for d in raw_defenses]
    seeds = data.pop("seeds", 30)
    seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    alphas = data.pop("alphas", None)
    if alphas is None:
        lo = data.pop("alpha_min", 0.01)
        hi = data.pop("alpha_max", 0.49)
        step = data.pop("alpha_step", GRID_STEP)
        n = int(round((hi - lo) / step)) + 1
        alphas = [round(lo + i * step, 10) for i in range(n)]
    cfg = SweepConfig(
        name=data.pop("name", "selfish"),
        total_blocks=data.pop("total_blocks", 10_000),
        gamma=data.pop("gamma", 0.5),
        alphas=[float(a) for a in alphas],
        seeds=seeds,
        defenses=defenses,
    )
    if data:
        raise ValueError(f"unknown sweep keys: {sorted(data)}")
    return cfg.validate()


def load_sweep_config(path: str | Path) -> SweepConfig:
    path = Path(path)
    with path.open("rb") as fh:
        data = tomli.load(fh)
    data.setdefault("name", path.stem)
    return sweep_from_mapping(data)


def _alpha_job(args) -> list[dict[str, Any]]:
    policy, alpha, seeds, total_blocks, gamma = args
    defense, controller = defense_key(policy)
    spec = SimulationSpec(total_blocks, alpha, gamma, list(seeds), policy)
    rows = []
    for seed in seeds:
        res = simulate(spec, seed)
        rev = relative_revenue(res)
        rows.append({
            "defense": defense,
            "controller": controller,
            "alpha": alpha,
            "seed": seed,
            "selfish_revenue": rev["selfish"],
            "honest_revenue": rev["honest"],
            "final_K": res.final_K,
            "weight_decision_fraction": res.weight_decision_fraction,
        })
    return rows


def run_sweep(config: SweepConfig, parallelism: int = 1) -> list[dict[str, Any]]:
    """One row per (defense, alpha, seed), in that order."""
    config.validate()
    jobs = [(d, a, tuple(config.seeds), config.total_blocks, config.gamma)
            for d in config.defenses for a in config.alphas]
    if parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            chunks = list(pool.map(_alpha_job, jobs))
    else:
        chunks = [_alpha_job(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def mean_revenue(rows: Sequence[dict[str, Any]]) -> dict[str, dict[float, float]]:
    """Mean selfish revenue per defense label and alpha."""
    acc: dict[str, dict[float, list[float]]] = {}
    for r in rows:
        label = r["defense"] if not r["controller"] else f"{r['defense']}/{r['controller']}"
        acc.setdefault(label, {}).setdefault(r["alpha"], []).append(r["selfish_revenue"])
    return {lab: {a: float(np.mean(v)) for a, v in sorted(by.items())} for lab, by in acc.items()}


def lower_bound_threshold(means: dict[float, float]) -> float | None:
    """Smallest alpha whose mean selfish revenue exceeds alpha, else None."""
    for alpha in sorted(means):
        if means[alpha] > alpha:
            return alpha
    return None


def threshold_sweep(rows: Sequence[dict[str, Any]]) -> dict[str, dict[str, Any]]:
    """Per-defense threshold summary; no crossing is reported as ">= grid max"."""
    out = {}
    for label, means in mean_revenue(rows).items():
        thr = lower_bound_threshold(means)
        grid_max = max(means)
        out[label] = {
            "threshold": thr,
            "reported": f"{thr:.2f}" if thr is not None else f">= {grid_max:.2f}",
            "grid_max": grid_max,
            "mean_selfish_revenue": {f"{a:.2f}": m for a, m in means.items()},
        }
    return out


def effective_threshold(summary: dict[str, Any]) -> float:
    """Threshold as a number; an uncrossed grid counts as its upper end."""
    thr = summary["threshold"]
    return summary["grid_max"] if thr is None else thr


def rows_to_csv(rows: Sequence[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({**r, "alpha": f"{r['alpha']:.2f}",
                         "selfish_revenue": f"{r['selfish_revenue']:.6f}",
                         "honest_revenue": f"{r['honest_revenue']:.6f}",
                         "weight_decision_fraction": f"{r['weight_decision_fraction']:.6f}"})
    return buf.getvalue()


def write_sweep(out_dir: str | Path, config: SweepConfig, rows, summary) -> tuple[Path, Path]:
    """Write ``<name>.csv`` and ``<name>_thresholds.json``, each via an atomic rename."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{config.name}.csv"
    json_path = out_dir / f"{config.name}_thresholds.json"
    for path, text in ((csv_path, rows_to_csv(rows)),
                       (json_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")):
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".tmp-")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    return csv_path, json_path
