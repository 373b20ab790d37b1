"""Command-line entry point.

Exit codes: 0 success, 2 configuration or input error, 3 runtime failure.
Errors are reported on stderr as a single ``error[<kind>]: <message>`` line.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import tomli

from .config import ConfigError, expand
from .environments import SteadyStateError, steady_state
from .experiments import run_suite
from .selfish.sweep import run_sweep, sweep_from_mapping, threshold_sweep, write_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

log = logging.getLogger("vdhla")


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind = kind
        self.code = code


def _config_error(message: str) -> CliError:
    return CliError("config", message, EXIT_CONFIG)


def _read_toml(path: str | None) -> dict:
    if path is None:
        raise _config_error("no config file given")
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise _config_error(f"{path}: {exc.strerror}") from exc
    except tomli.TOMLDecodeError as exc:
        raise _config_error(f"{path}: {exc}") from exc
    data.setdefault("name", Path(path).stem)
    return data


def _is_sweep(data: dict) -> bool:
    return "defense" in data


def _load_experiments(path, seeds):
    data = _read_toml(path)
    if _is_sweep(data):
        raise _config_error(f"{path} is a selfish-sweep config")
    try:
        configs = expand(data)
    except (ConfigError, ValueError) as exc:
        raise _config_error(str(exc)) from exc
    if seeds is not None:
        for c in configs:
            c.seeds = list(range(seeds))
    return configs


def _load_sweep(path, seeds):
    data = _read_toml(path)
    if not _is_sweep(data):
        raise _config_error(f"{path} has no [[defense]] tables")
    if seeds is not None:
        data["seeds"] = seeds
    try:
        return sweep_from_mapping(data)
    except (TypeError, ValueError) as exc:
        raise _config_error(str(exc)) from exc


def read_matrix(path: str) -> np.ndarray:
    """Rows of whitespace-separated reals; blank lines and ``#`` comments ignored."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _config_error(f"{path}: {exc.strerror}") from exc
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                rows.append([float(x) for x in line.split()])
            except ValueError as exc:
                raise _config_error(f"{path}: {exc}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise _config_error(f"{path}: expected a rectangular matrix")
    return np.array(rows)


def cmd_run_experiment(args) -> int:
    configs = _load_experiments(args.config, args.seeds)
    if args.dry_run:
        print(f"ok: {len(configs)} config(s), {sum(len(c.seeds) for c in configs)} trial(s)")
        return EXIT_OK
    summary = run_suite(configs, out_dir=args.out, parallelism=args.parallelism)
    for s in summary:
        print(f"{s['name']}: TNR {s['mean_tnr']:.1f} +- {s['std_tnr']:.1f}, "
              f"TNAS {s['mean_tnas']:.1f} +- {s['std_tnas']:.1f}")
    return EXIT_OK


def cmd_steady_state(args) -> int:
    path = args.matrix or args.config
    if path is None:
        raise _config_error("steady-state needs a matrix file")
    t = read_matrix(path)
    try:
        v = steady_state(t)
    except SteadyStateError as exc:
        raise CliError("runtime", str(exc), EXIT_RUNTIME) from exc
    except ValueError as exc:
        raise _config_error(str(exc)) from exc
    if args.dry_run:
        print(f"ok: {t.shape[0]}x{t.shape[1]} ergodic transition matrix")
        return EXIT_OK
    text = "[" + ", ".join(f"{x:.{args.decimals}f}" for x in v) + "]"
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "steady_state.json").write_text(json.dumps({"steady_state": v.tolist()}, indent=2) + "\n")
    return EXIT_OK


def cmd_selfish_sweep(args) -> int:
    cfg = _load_sweep(args.config, args.seeds)
    if args.dry_run:
        n = len(cfg.defenses) * len(cfg.alphas) * len(cfg.seeds)
        print(f"ok: {len(cfg.defenses)} defense(s), {len(cfg.alphas)} alpha(s), {n} run(s)")
        return EXIT_OK
    rows = run_sweep(cfg, parallelism=args.parallelism)
    summary = threshold_sweep(rows)
    write_sweep(args.out, cfg, rows, summary)
    for label, s in summary.items():
        print(f"{label}: threshold {s['reported']}")
    return EXIT_OK


def cmd_validate_config(args) -> int:
    path = args.path or args.config
    data = _read_toml(path)
    if _is_sweep(data):
        normalized = _load_sweep(path, args.seeds).to_dict()
    else:
        normalized = [c.to_dict() for c in _load_experiments(path, args.seeds)]
    print(json.dumps(normalized, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vdhla", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--seeds", type=int, help="override: run seeds 0..N-1")
        p.add_argument("--parallelism", type=int, default=1, help="worker processes")
        p.add_argument("--dry-run", action="store_true", help="validate only, do not simulate")
        if needs_out:
            p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("run-experiment", help="run automaton experiments from a config")
    common(p)
    p.set_defaults(func=cmd_run_experiment)

    p = sub.add_parser("steady-state", help="stationary distribution of a transition matrix")
    p.add_argument("matrix", nargs="?", help="plain-text matrix file")
    common(p, needs_out=False)
    p.add_argument("--out", default=None, help="also write steady_state.json here")
    p.add_argument("--decimals", type=int, default=4)
    p.set_defaults(func=cmd_steady_state)

    p = sub.add_parser("selfish-sweep", help="alpha sweep and lower-bound thresholds")
    common(p)
    p.set_defaults(func=cmd_selfish_sweep)

    p = sub.add_parser("validate-config", help="validate a config and print it normalized")
    p.add_argument("path", nargs="?", help="config file (same as --config)")
    common(p, needs_out=False)
    p.set_defaults(func=cmd_validate_config)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "parallelism", 1) < 1:
        print("error[config]: --parallelism must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "seeds", None) is not None and args.seeds < 1:
        print("error[config]: --seeds must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error[{exc.kind}]: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - last-resort contract for scripts
        print(f"error[runtime]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
