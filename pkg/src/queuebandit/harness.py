"""Monte Carlo experiment runner: seeding, sweeps, CSV persistence.

Seeding discipline: every (grid point, replication) owns hash-derived
substreams, so runs are reproducible regardless of execution order or
worker count. The environment stream is keyed by the replication index
alone; replication i therefore faces the same randomly drawn environment
at every grid point, which turns cross-policy comparisons into
common-random-number comparisons without biasing any single batch.

Outputs are one summary CSV row per grid point (plus an optional thinned
regret-trajectory CSV) and a metadata JSON holding the verbatim config.
Both CSVs start with a ``# config_hash=...`` comment line so downstream
tools can carry provenance into rendered artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bandits import BanditEnv
from .config import ExperimentConfig, validate_config
from .controllers import (
    BASE_UFQ,
    BASE_UFRB,
    FULL_FEEDBACK,
    QR_MAB,
    RANDOM,
    RunTrace,
    run_base_update_from_queue,
    run_base_update_from_replay_buffer,
    run_full_feedback,
    run_qr_mab,
    run_random,
)
from .metrics import (
    BatchKey,
    EnergyModel,
    ReferenceAggregates,
    RunResult,
    SummaryRow,
    pseudo_regret,
    summarize_results,
)
from .queueing import DELTA_UNIFORM, SamplingPolicy

SUMMARY_COLUMNS = [
    "policy", "controller", "algorithm", "lambda", "mu", "alpha",
    "bias_fraction", "T", "reps", "reward_mean", "reward_std",
    "regret_mean", "regret_std", "nobs_mean", "energy_mean", "energy_std",
    "rli", "esi", "alg_updates", "packet_touches", "queue_ops",
    "storage_integral", "wallclock_s",
]

TRACE_COLUMNS = [
    "policy", "controller", "algorithm", "lambda", "mu", "alpha",
    "bias_fraction", "rep", "slot", "regret",
]


@dataclass(frozen=True)
class GridPoint:
    """One point of the sweep; None marks a parameter that does not apply."""

    lam: Optional[float] = None
    mu: Optional[float] = None
    alpha: Optional[float] = None
    bias_fraction: Optional[float] = None

    def stream_key(self) -> str:
        def f(v):
            return "none" if v is None else repr(float(v))

        return f"lam={f(self.lam)}|mu={f(self.mu)}|alpha={f(self.alpha)}|bias={f(self.bias_fraction)}"


@dataclass(frozen=True)
class RunId:
    """Identity of one replication within an experiment.

    The config hash is provenance only: substreams are derived from the
    structural identity (grid point, replication), so equal grid points
    re-use streams across experiments and stay comparable run-for-run.
    """

    config_hash: str
    grid: GridPoint
    replication: int

    def stream_key(self) -> str:
        return f"run|{self.grid.stream_key()}|rep={self.replication}"


def _key_to_spawn_words(key: str) -> tuple[int, ...]:
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))


def derive_substream(master_seed: int, run_id: RunId) -> np.random.SeedSequence:
    """Hash-based split of the master seed: order-independent, collision-free
    in practice (128 bits of SHA-256 feed the spawn key)."""
    return np.random.SeedSequence(master_seed, spawn_key=_key_to_spawn_words(run_id.stream_key()))


def env_substream(master_seed: int, replication: int) -> np.random.SeedSequence:
    """Environment stream for one replication, shared by every grid point."""
    return np.random.SeedSequence(master_seed, spawn_key=_key_to_spawn_words(f"env|rep={replication}"))


def build_grid(cfg: ExperimentConfig) -> list[GridPoint]:
    if cfg.controller == RANDOM:
        return [GridPoint()]
    if cfg.controller == FULL_FEEDBACK:
        return [GridPoint(lam=1.0, mu=1.0)]
    alphas = cfg.alphas if cfg.policy == DELTA_UNIFORM else [None]
    biases = cfg.bias_fractions if cfg.policy == DELTA_UNIFORM else [None]
    return [
        GridPoint(lam=lam, mu=mu, alpha=a, bias_fraction=b)
        for lam in cfg.lambdas
        for mu in cfg.mus
        for a in alphas
        for b in biases
    ]


def _make_env(cfg: ExperimentConfig, replication: int) -> BanditEnv:
    ss = env_substream(cfg.master_seed, replication)
    if cfg.fixed_thetas is not None:
        return BanditEnv(cfg.fixed_thetas, seed=ss)
    return BanditEnv.draw(cfg.k, seed=ss)


def _policy_for(cfg: ExperimentConfig, grid: GridPoint) -> SamplingPolicy:
    if cfg.policy == DELTA_UNIFORM:
        return SamplingPolicy.delta_uniform(grid.alpha, grid.bias_fraction)
    return SamplingPolicy(cfg.policy)


def _run_trace(cfg: ExperimentConfig, controller: str, grid: GridPoint, replication: int) -> RunTrace:
    env = _make_env(cfg, replication)
    seed = derive_substream(cfg.master_seed, RunId(cfg.config_hash(), grid, replication))
    if controller == QR_MAB:
        return run_qr_mab(env, cfg.algorithm, _policy_for(cfg, grid), grid.lam, grid.mu, cfg.horizon, seed)
    if controller == BASE_UFQ:
        return run_base_update_from_queue(
            env, cfg.algorithm, _policy_for(cfg, grid), grid.lam, grid.mu,
            cfg.horizon, seed, update_from_any_arm=cfg.update_from_any_arm,
        )
    if controller == BASE_UFRB:
        return run_base_update_from_replay_buffer(
            env, cfg.algorithm, _policy_for(cfg, grid), grid.lam, grid.mu, cfg.horizon, seed,
        )
    if controller == FULL_FEEDBACK:
        return run_full_feedback(env, cfg.algorithm, cfg.horizon, seed)
    if controller == RANDOM:
        return run_random(env, cfg.horizon, seed)
    raise ValueError(f"unknown controller {controller!r}")


def thin_slots(horizon: int, interval: int) -> list[int]:
    """Recording slots: interval, 2*interval, ..., capped at the horizon.

    ceil(horizon / interval) slots total; the last one is the horizon
    itself when the interval does not divide it.
    """
    n = math.ceil(horizon / interval)
    return [min(k * interval, horizon) for k in range(1, n + 1)]


@dataclass
class _TaskOutput:
    result: RunResult
    thinned_regret: Optional[np.ndarray]
    wallclock_s: float


def _execute_task(cfg: ExperimentConfig, controller: str, grid: GridPoint, replication: int) -> _TaskOutput:
    t0 = time.perf_counter()
    trace = _run_trace(cfg, controller, grid, replication)
    result = RunResult.from_trace(trace)
    thinned = None
    if cfg.trace and controller == cfg.controller:
        regret = pseudo_regret(trace, trace.thetas)
        thinned = regret[np.array(thin_slots(cfg.horizon, cfg.trace_interval)) - 1]
    return _TaskOutput(result, thinned, time.perf_counter() - t0)


def _pool_task(args: tuple) -> _TaskOutput:
    return _execute_task(*args)


@dataclass
class ExperimentResult:
    config_hash: str
    rows: list[SummaryRow]
    references: Optional[ReferenceAggregates]
    summary_path: Path
    trace_path: Optional[Path]
    metadata_path: Path


def _batch_key(cfg: ExperimentConfig, controller: str, grid: GridPoint) -> BatchKey:
    if controller == RANDOM:
        return BatchKey(RANDOM, "none", "none", None, None, None, None, cfg.horizon)
    if controller == FULL_FEEDBACK:
        return BatchKey(FULL_FEEDBACK, cfg.algorithm, "fifo", 1.0, 1.0, None, None, cfg.horizon)
    policy = _policy_for(cfg, grid)
    return BatchKey(
        controller, cfg.algorithm, policy.label(), grid.lam, grid.mu,
        grid.alpha, grid.bias_fraction, cfg.horizon,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest round-trip decimal
    return str(value)


def _row_values(row: SummaryRow) -> list[str]:
    return [
        row.policy, row.controller, row.algorithm, _fmt(row.lam), _fmt(row.mu),
        _fmt(row.alpha), _fmt(row.bias_fraction), _fmt(row.horizon), _fmt(row.reps),
        _fmt(row.reward_mean), _fmt(row.reward_std), _fmt(row.regret_mean),
        _fmt(row.regret_std), _fmt(row.nobs_mean), _fmt(row.energy_mean),
        _fmt(row.energy_std), _fmt(row.rli), _fmt(row.esi), _fmt(row.alg_updates),
        _fmt(row.packet_touches), _fmt(row.queue_ops), _fmt(row.storage_integral),
        _fmt(row.wallclock_s),
    ]


def write_summary_csv(path: Path, rows: list[SummaryRow], config_hash: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config_hash={config_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow(_row_values(row))


def write_trace_csv(
    path: Path,
    entries: list[tuple[BatchKey, int, np.ndarray]],
    slots: list[int],
    config_hash: str,
) -> None:
    """entries: (batch key, replication, thinned regret values) per run."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config_hash={config_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for key, rep, values in entries:
            prefix = [
                key.policy, key.controller, key.algorithm, _fmt(key.lam), _fmt(key.mu),
                _fmt(key.alpha), _fmt(key.bias_fraction), _fmt(rep),
            ]
            for slot, value in zip(slots, values):
                writer.writerow(prefix + [_fmt(slot), _fmt(float(value))])


def run_experiment(cfg: ExperimentConfig, config_text: Optional[str] = None) -> ExperimentResult:
    """Execute the full sweep and persist summary/trace/metadata files.

    Work is farmed over a process pool when cfg.workers > 1; the reduction
    is ordered by (grid index, replication), so worker count never changes
    any output value.
    """
    validate_config(cfg)
    config_hash = cfg.config_hash()
    grid = build_grid(cfg)
    reps = cfg.replications

    tasks: list[tuple[ExperimentConfig, str, GridPoint, int]] = []
    for point in grid:
        for rep in range(reps):
            tasks.append((cfg, cfg.controller, point, rep))
    ref_specs: list[tuple[str, GridPoint]] = []
    if cfg.references:
        ref_specs = [(FULL_FEEDBACK, GridPoint(lam=1.0, mu=1.0)), (RANDOM, GridPoint())]
        for controller, point in ref_specs:
            for rep in range(reps):
                tasks.append((cfg, controller, point, rep))

    started = time.perf_counter()
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outputs = list(pool.map(_pool_task, tasks, chunksize=max(1, len(tasks) // (cfg.workers * 8))))
    else:
        outputs = [_execute_task(*task) for task in tasks]
    total_wallclock = time.perf_counter() - started

    n_grid_tasks = len(grid) * reps
    grid_outputs = outputs[:n_grid_tasks]
    ref_outputs = outputs[n_grid_tasks:]

    energy_model = EnergyModel(cfg.w_update, cfg.w_touch, cfg.w_queue, cfg.w_storage)
    references = None
    if cfg.references:
        ff_results = [o.result for o in ref_outputs[:reps]]
        rnd_results = [o.result for o in ref_outputs[reps:]]
        references = ReferenceAggregates(
            r_min=float(np.mean([r.reward for r in rnd_results])),
            r_max=float(np.mean([r.reward for r in ff_results])),
            e_min=float(np.mean([energy_model.energy(r.counters) for r in rnd_results])),
            e_max=float(np.mean([energy_model.energy(r.counters) for r in ff_results])),
        )

    rows: list[SummaryRow] = []
    trace_entries: list[tuple[BatchKey, int, np.ndarray]] = []
    for gi, point in enumerate(grid):
        batch = grid_outputs[gi * reps : (gi + 1) * reps]
        key = _batch_key(cfg, cfg.controller, point)
        rows.append(
            summarize_results(
                key,
                [o.result for o in batch],
                energy_model,
                references,
                wallclock_s=float(np.mean([o.wallclock_s for o in batch])),
            )
        )
        if cfg.trace:
            for rep, out in enumerate(batch):
                trace_entries.append((key, rep, out.thinned_regret))

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "summary.csv"
    write_summary_csv(summary_path, rows, config_hash)

    trace_path = None
    if cfg.trace:
        trace_path = out_dir / "trace.csv"
        write_trace_csv(trace_path, trace_entries, thin_slots(cfg.horizon, cfg.trace_interval), config_hash)

    metadata_path = out_dir / "metadata.json"
    metadata = {
        "schema_version": 1,
        "config_hash": config_hash,
        "config": cfg.as_dict(),
        "config_text": config_text,
        "package_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "total_wallclock_s": total_wallclock,
        "references": None
        if references is None
        else {
            "r_min": references.r_min,
            "r_max": references.r_max,
            "e_min": references.e_min,
            "e_max": references.e_max,
        },
    }
    with open(metadata_path, "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2)
        fh.write("\n")

    return ExperimentResult(
        config_hash=config_hash,
        rows=rows,
        references=references,
        summary_path=summary_path,
        trace_path=trace_path,
        metadata_path=metadata_path,
    )
