"""Regret, reward, observation, and abstract energy accounting.

Energy is deliberately not measured in joules: hardware readings are not
reproducible, so each run accumulates four counters that an energy model
turns into a single abstract cost. Counter semantics, shared by every
controller:

- ``alg_updates``: sufficient-statistic write events. One per packet applied
  incrementally; the replay-buffer controller recomputes once per slot and
  charges one write per recompute.
- ``packet_touches``: packets read while updating. One per incremental
  update; a replay recompute touches every buffered packet.
- ``queue_ops``: admissions plus removals, network queue and agent-side arm
  queues combined.
- ``storage_integral``: sum over slots of packets held agent-side
  (packet-slots). Zero for controllers without storage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from .controllers import RunTrace


@dataclass
class EnergyCounters:
    alg_updates: int = 0
    packet_touches: int = 0
    queue_ops: int = 0
    storage_integral: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "alg_updates": self.alg_updates,
            "packet_touches": self.packet_touches,
            "queue_ops": self.queue_ops,
            "storage_integral": self.storage_integral,
        }


@dataclass(frozen=True)
class EnergyModel:
    """Weighted sum over the counters; weights are reported with results."""

    w_update: float = 1.0
    w_touch: float = 1.0
    w_queue: float = 0.1
    w_storage: float = 0.01

    def __post_init__(self):
        for name in ("w_update", "w_touch", "w_queue", "w_storage"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def energy(self, counters: EnergyCounters) -> float:
        return (
            self.w_update * counters.alg_updates
            + self.w_touch * counters.packet_touches
            + self.w_queue * counters.queue_ops
            + self.w_storage * counters.storage_integral
        )


def pseudo_regret(trace: "RunTrace", thetas: Sequence[float]) -> np.ndarray:
    """Cumulative pseudo-regret trajectory: sum over slots of (best mean -
    mean of the played arm). Uses true means, not realized rewards, so the
    trajectory is non-decreasing with per-slot increments in [0, best mean].
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    arms = np.asarray(trace.arms)
    if arms.size == 0:
        raise ValueError("trace is empty")
    if arms.max() >= thetas.size or arms.min() < 0:
        raise ValueError("trace plays an arm not covered by thetas")
    gaps = thetas.max() - thetas[arms]
    return np.cumsum(gaps)


def expected_observations(lam: float, mu: float, horizon: int) -> float:
    """Expected number of served packets by the horizon: min(lam, mu) * T."""
    if not 0.0 <= lam <= 1.0 or not 0.0 <= mu <= 1.0:
        raise ValueError("lam and mu must lie in [0, 1]")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    return min(lam, mu) * horizon


def rli(r_p: float, r_min: float, r_max: float) -> float:
    """Reward loss indicator: 1 - (R_p - R_min) / (R_max - R_min).

    0 at the full-feedback reference, 1 at the random-play reference.
    Values outside [0, 1] are reported as-is.
    """
    if r_max == r_min:
        raise ValueError("degenerate references: r_max == r_min")
    return 1.0 - (r_p - r_min) / (r_max - r_min)


def esi(e_p: float, e_min: float, e_max: float) -> float:
    """Energy saving indicator: 1 - (E_p - E_min) / (E_max - E_min)."""
    if e_max == e_min:
        raise ValueError("degenerate references: e_max == e_min")
    return 1.0 - (e_p - e_min) / (e_max - e_min)


@dataclass(frozen=True)
class ReferenceAggregates:
    """Batch means of the two reference controllers used by rli/esi."""

    r_min: float
    r_max: float
    e_min: float
    e_max: float


@dataclass(frozen=True)
class BatchKey:
    """Configuration identity of one batch; replications must all share it."""

    controller: str
    algorithm: str
    policy: str
    lam: Optional[float]
    mu: Optional[float]
    alpha: Optional[float]
    bias_fraction: Optional[float]
    horizon: int


@dataclass(frozen=True)
class RunResult:
    """The per-replication scalars every summary is built from."""

    reward: int
    regret: float
    nobs: int
    counters: EnergyCounters

    @classmethod
    def from_trace(cls, trace: "RunTrace") -> "RunResult":
        return cls(
            reward=trace.total_reward(),
            regret=float(pseudo_regret(trace, trace.thetas)[-1]),
            nobs=trace.n_observations(),
            counters=trace.counters,
        )


@dataclass
class SummaryRow:
    """Aggregates of one batch of replications at a single grid point."""

    policy: str
    controller: str
    algorithm: str
    lam: Optional[float]
    mu: Optional[float]
    alpha: Optional[float]
    bias_fraction: Optional[float]
    horizon: int
    reps: int
    reward_mean: float
    reward_std: float
    regret_mean: float
    regret_std: float
    nobs_mean: float
    energy_mean: float
    energy_std: float
    rli: Optional[float]
    esi: Optional[float]
    alg_updates: float
    packet_touches: float
    queue_ops: float
    storage_integral: float
    wallclock_s: float = 0.0


def _mean_std(values: np.ndarray) -> tuple[float, float]:
    # Sample std (ddof=1); a single replication reports std 0.
    mean = float(values.mean())
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return mean, std


def summarize_results(
    key: BatchKey,
    results: Sequence[RunResult],
    energy_model: EnergyModel,
    references: Optional[ReferenceAggregates] = None,
    wallclock_s: float = 0.0,
) -> SummaryRow:
    """Reduce per-replication scalars of one configuration to a summary row."""
    if not results:
        raise ValueError("need at least one result")
    rewards = np.array([r.reward for r in results], dtype=np.float64)
    regrets = np.array([r.regret for r in results], dtype=np.float64)
    energies = np.array([energy_model.energy(r.counters) for r in results], dtype=np.float64)

    reward_mean, reward_std = _mean_std(rewards)
    regret_mean, regret_std = _mean_std(regrets)
    energy_mean, energy_std = _mean_std(energies)

    row_rli = row_esi = None
    if references is not None:
        row_rli = rli(reward_mean, references.r_min, references.r_max)
        row_esi = esi(energy_mean, references.e_min, references.e_max)

    return SummaryRow(
        policy=key.policy,
        controller=key.controller,
        algorithm=key.algorithm,
        lam=key.lam,
        mu=key.mu,
        alpha=key.alpha,
        bias_fraction=key.bias_fraction,
        horizon=key.horizon,
        reps=len(results),
        reward_mean=reward_mean,
        reward_std=reward_std,
        regret_mean=regret_mean,
        regret_std=regret_std,
        nobs_mean=float(np.mean([r.nobs for r in results])),
        energy_mean=energy_mean,
        energy_std=energy_std,
        rli=row_rli,
        esi=row_esi,
        alg_updates=float(np.mean([r.counters.alg_updates for r in results])),
        packet_touches=float(np.mean([r.counters.packet_touches for r in results])),
        queue_ops=float(np.mean([r.counters.queue_ops for r in results])),
        storage_integral=float(np.mean([r.counters.storage_integral for r in results])),
        wallclock_s=wallclock_s,
    )


def summarize(
    traces: Sequence["RunTrace"],
    energy_model: EnergyModel,
    references: Optional[ReferenceAggregates] = None,
    wallclock_s: float = 0.0,
) -> SummaryRow:
    """Reduce replications of one configuration to a summary row.

    All traces must come from the same configuration; rli/esi are filled
    only when reference aggregates are supplied.
    """
    if not traces:
        raise ValueError("need at least one trace")
    key = traces[0].config_key()
    for tr in traces[1:]:
        if tr.config_key() != key:
            raise ValueError(f"mixed configurations: {tr.config_key()} vs {key}")
    results = [RunResult.from_trace(tr) for tr in traces]
    return summarize_results(key, results, energy_model, references, wallclock_s)


def replay_counters(trace: "RunTrace") -> EnergyCounters:
    """Reconstruct the energy counters from the per-slot trace alone.

    Independent of the online accumulation in the controllers; used as an
    oracle to check that the two bookkeepings agree.
    """
    admitted = int(np.count_nonzero(trace.admitted))
    served = int(np.count_nonzero(trace.served_arm >= 0))
    updates = int(np.count_nonzero(trace.update_arm >= 0))
    buffered_sum = int(trace.buffered.sum())

    c = EnergyCounters()
    if trace.controller == "random":
        return c
    if trace.controller in ("qr-mab", "full-feedback"):
        c.queue_ops = admitted + served
        c.alg_updates = updates
        c.packet_touches = updates
    elif trace.controller == "base-ufq":
        # Transfers count twice (network removal + arm-queue append); each
        # agent update pops one packet from an arm queue.
        c.queue_ops = admitted + 2 * served + updates
        c.alg_updates = updates
        c.packet_touches = updates
        c.storage_integral = buffered_sum
    elif trace.controller == "base-ufrb":
        c.queue_ops = admitted + 2 * served
        c.alg_updates = trace.horizon  # one recompute per slot
        c.packet_touches = buffered_sum
        c.storage_integral = buffered_sum
    else:
        raise ValueError(f"unknown controller {trace.controller!r}")
    return c
