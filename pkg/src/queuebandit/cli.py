"""Command-line entry points: run experiments, validate configs, and check
the expected-observations law on live simulations.

Output directory precedence: --out flag, then the QUEUEBANDIT_OUT
environment variable, then the config file's out_dir.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
import yaml

from .config import ConfigError, load_config
from .harness import GridPoint, RunId, build_grid, derive_substream, env_substream, run_experiment
from .bandits import BanditEnv
from .controllers import run_qr_mab
from .metrics import expected_observations
from .queueing import SamplingPolicy

OUT_DIR_ENV = "QUEUEBANDIT_OUT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="queuebandit")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute the experiment described by a config file")
    run_p.add_argument("--config", required=True, help="YAML config path")
    run_p.add_argument("--seed", type=int, default=None, help="override master_seed")
    run_p.add_argument("--reps", type=int, default=None, help="override replications")
    run_p.add_argument("--out", default=None, help="override output directory")
    run_p.add_argument("--workers", type=int, default=None, help="override worker count")
    run_p.add_argument("--trace", action="store_true", help="force per-slot regret tracing on")

    val_p = sub.add_parser("validate", help="parse and check a config file, run nothing")
    val_p.add_argument("--config", required=True, help="YAML config path")

    prop_p = sub.add_parser(
        "prop1",
        help="simulate and report mean observations against min(lambda, mu) * horizon",
    )
    prop_p.add_argument("--lambda", dest="lam", type=float, required=True)
    prop_p.add_argument("--mu", type=float, required=True)
    prop_p.add_argument("--horizon", type=int, required=True)
    prop_p.add_argument("--reps", type=int, default=500)
    prop_p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg, text = load_config(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.reps is not None:
        cfg.replications = args.reps
    if args.out is not None:
        cfg.out_dir = args.out
    elif os.environ.get(OUT_DIR_ENV):
        cfg.out_dir = os.environ[OUT_DIR_ENV]
    if args.workers is not None:
        cfg.workers = args.workers
    if args.trace:
        cfg.trace = True
    result = run_experiment(cfg, config_text=text)
    print(f"config_hash: {result.config_hash}")
    print(f"summary: {result.summary_path} ({len(result.rows)} rows)")
    if result.trace_path is not None:
        print(f"trace: {result.trace_path}")
    print(f"metadata: {result.metadata_path}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg, _ = load_config(args.config)
    print(f"OK: {len(build_grid(cfg))} grid point(s), {cfg.replications} replication(s)")
    return 0


def _cmd_prop1(args: argparse.Namespace) -> int:
    if not 0.0 <= args.lam <= 1.0:
        raise ConfigError(f"lambda={args.lam} outside [0, 1]")
    if not 0.0 <= args.mu <= 1.0:
        raise ConfigError(f"mu={args.mu} outside [0, 1]")
    if args.horizon < 1:
        raise ConfigError(f"horizon={args.horizon} must be >= 1")
    if args.reps < 1:
        raise ConfigError(f"reps={args.reps} must be >= 1")

    grid = GridPoint(lam=args.lam, mu=args.mu)
    counts = np.empty(args.reps)
    for rep in range(args.reps):
        env = BanditEnv.draw(5, seed=env_substream(args.seed, rep))
        seed = derive_substream(args.seed, RunId("prop1", grid, rep))
        trace = run_qr_mab(env, "ucb", SamplingPolicy.fifo(), args.lam, args.mu, args.horizon, seed)
        counts[rep] = trace.n_observations()
    expected = expected_observations(args.lam, args.mu, args.horizon)
    observed = float(counts.mean())
    rel = abs(observed - expected) / expected if expected else abs(observed)
    print(f"expected observations min(lambda, mu) * T = {expected}")
    print(f"observed mean over {args.reps} runs        = {observed}")
    print(f"relative error                            = {rel:.4%}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "validate": _cmd_validate, "prop1": _cmd_prop1}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except yaml.YAMLError as exc:
        print(f"config parse error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
