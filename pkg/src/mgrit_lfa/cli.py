"""Command-line entry point.

Subcommands map onto the experiment kinds:

    mgrit-lfa fig3      --out results/        lfa-sweep grids + cross-sections
    mgrit-lfa fig4      --out results/        lower-bound-curve CSV
    mgrit-lfa measured  --out results/        measured-vs-lfa CSV
    mgrit-lfa oracle    --out results/        oracle-check JSON
    mgrit-lfa cgc-probe --out results/        correction-order slopes CSV

Every subcommand accepts --config <path> (flat key = value file matching
ExperimentConfig fields), --out <dir>, --seed <u64>, and --threads <n>; the
MGRIT_LFA_THREADS environment variable is the fallback when --threads is
absent. Exit codes: 0 success, 2 config error, 3 numerical guard triggered
(a divergent solve outside the measured runner, a singular operator, or a
failed oracle check).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import engine
from .experiments import (ConfigError, ExperimentConfig, parse_config_file,
                          run_experiment)

SUBCOMMAND_KINDS = {
    "fig3": "lfa-sweep",
    "fig4": "lower-bound-curve",
    "measured": "measured-vs-lfa",
    "oracle": "oracle-check",
    "cgc-probe": "cgc-probe",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mgrit-lfa",
        description="Two-level MGRIT convergence experiments and LFA sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMAND_KINDS.items():
        sp = sub.add_parser(name, help=f"run the {kind} experiment")
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--out", help="output directory (default: current)")
        sp.add_argument("--seed", type=int, help="RNG seed override")
        sp.add_argument("--threads", type=int,
                        help="worker threads (fallback: MGRIT_LFA_THREADS)")
    return parser


def _resolve_threads(flag_value) -> int | None:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("MGRIT_LFA_THREADS")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(
                f"MGRIT_LFA_THREADS={env!r} is not an integer") from None
    return None


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = parse_config_file(args.config) if args.config else {}
    overrides["kind"] = SUBCOMMAND_KINDS[args.command]
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    threads = _resolve_threads(args.threads)
    if threads is not None:
        overrides["threads"] = threads
    try:
        config = ExperimentConfig(**overrides)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return config.validate()


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        outcome = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (engine.DivergenceError, ValueError) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3
    if config.kind == "oracle-check":
        status = "passed" if outcome["passed"] else "FAILED"
        print(f"oracle check {status}: {outcome['path']}")
        return 0 if outcome["passed"] else 3
    if isinstance(outcome, dict):
        for name in sorted(outcome):
            print(f"{name}: {outcome[name]}")
    else:
        print(outcome)
    return 0


if __name__ == "__main__":
    sys.exit(main())
