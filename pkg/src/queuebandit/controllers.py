"""Closed-loop controllers binding algorithm, environment, and queue.

Every controller steps the same slot skeleton, in this order: the algorithm
proposes an arm, the environment is played, the feedback packet is offered
to the channel, and any service/update happens last. One arm is played every
slot no matter what, so regret accrues even when no feedback ever arrives.

Randomness is split into three per-run streams (channel, position sampling,
algorithm) plus the environment's own stream, so that runs of different
policies under one seed stay slot-by-slot comparable: a policy that consumes
more position draws cannot shift anybody else's stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .bandits import AlgorithmState, BanditEnv, make_algorithm
from .metrics import BatchKey, EnergyCounters
from .queueing import FIFO, LIFO, GeoGeoQueue, Packet, SamplingPolicy
from .rngutil import BufferedUniforms

QR_MAB = "qr-mab"
BASE_UFQ = "base-ufq"
BASE_UFRB = "base-ufrb"
RANDOM = "random"
FULL_FEEDBACK = "full-feedback"

CONTROLLERS = (QR_MAB, BASE_UFQ, BASE_UFRB, RANDOM, FULL_FEEDBACK)


@dataclass
class RunStreams:
    """Independent per-run streams: channel Bernoullis, queue-position
    draws, and algorithm-internal randomness.

    Channel and sampling serve scalar uniforms through BufferedUniforms,
    which preserves the exact draw sequence of the underlying generators.
    """

    channel: BufferedUniforms
    sampling: BufferedUniforms
    algorithm: np.random.Generator

    @classmethod
    def from_seed(cls, seed) -> "RunStreams":
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        chan, samp, alg = ss.spawn(3)
        return cls(
            channel=BufferedUniforms(np.random.default_rng(chan)),
            sampling=BufferedUniforms(np.random.default_rng(samp)),
            algorithm=np.random.default_rng(alg),
        )


@dataclass(frozen=True)
class SlotRecord:
    """One slot of a run, reconstructed from the trace arrays."""

    slot: int
    arm: int
    true_mean: float
    reward: int
    admitted: bool
    served_packet: Optional[Packet]
    update_packet: Optional[Packet]
    queue_length_after: int
    buffered_after: int


@dataclass
class RunTrace:
    """Per-slot record of one replication plus final state and counters.

    Stored as parallel arrays (one entry per slot); -1 marks "no packet" in
    the served/update columns. ``buffered`` is the agent-side packet count
    after the slot, zero for controllers without storage.
    """

    controller: str
    algorithm: str
    policy_label: str
    lam: Optional[float]
    mu: Optional[float]
    alpha: Optional[float]
    bias_fraction: Optional[float]
    horizon: int
    thetas: np.ndarray
    arms: np.ndarray
    rewards: np.ndarray
    admitted: np.ndarray
    served_arm: np.ndarray
    served_reward: np.ndarray
    served_birth: np.ndarray
    update_arm: np.ndarray
    update_reward: np.ndarray
    queue_len: np.ndarray
    buffered: np.ndarray
    counters: EnergyCounters
    final_state: Optional[AlgorithmState]

    def config_key(self) -> BatchKey:
        return BatchKey(
            controller=self.controller,
            algorithm=self.algorithm,
            policy=self.policy_label,
            lam=self.lam,
            mu=self.mu,
            alpha=self.alpha,
            bias_fraction=self.bias_fraction,
            horizon=self.horizon,
        )

    def total_reward(self) -> int:
        return int(self.rewards.sum())

    def n_observations(self) -> int:
        """Packets served from the network queue over the whole run."""
        return int(np.count_nonzero(self.served_arm >= 0))

    def slot_records(self) -> Iterator[SlotRecord]:
        for i in range(self.horizon):
            served = None
            if self.served_arm[i] >= 0:
                served = Packet(int(self.served_arm[i]), int(self.served_reward[i]), int(self.served_birth[i]))
            update = None
            if self.update_arm[i] >= 0:
                update = Packet(int(self.update_arm[i]), int(self.update_reward[i]), -1)
            yield SlotRecord(
                slot=i + 1,
                arm=int(self.arms[i]),
                true_mean=float(self.thetas[self.arms[i]]),
                reward=int(self.rewards[i]),
                admitted=bool(self.admitted[i]),
                served_packet=served,
                update_packet=update,
                queue_length_after=int(self.queue_len[i]),
                buffered_after=int(self.buffered[i]),
            )


class _TraceArrays:
    """Preallocated per-slot columns filled by the controller loops."""

    __slots__ = (
        "arms", "rewards", "admitted", "served_arm", "served_reward",
        "served_birth", "update_arm", "update_reward", "queue_len", "buffered",
    )

    def __init__(self, horizon: int):
        self.arms = np.zeros(horizon, dtype=np.int32)
        self.rewards = np.zeros(horizon, dtype=np.int8)
        self.admitted = np.zeros(horizon, dtype=bool)
        self.served_arm = np.full(horizon, -1, dtype=np.int32)
        self.served_reward = np.full(horizon, -1, dtype=np.int8)
        self.served_birth = np.full(horizon, -1, dtype=np.int64)
        self.update_arm = np.full(horizon, -1, dtype=np.int32)
        self.update_reward = np.full(horizon, -1, dtype=np.int8)
        self.queue_len = np.zeros(horizon, dtype=np.int64)
        self.buffered = np.zeros(horizon, dtype=np.int64)


def _make_trace(
    controller: str,
    algorithm: str,
    policy: Optional[SamplingPolicy],
    lam: Optional[float],
    mu: Optional[float],
    horizon: int,
    env: BanditEnv,
    ta: _TraceArrays,
    counters: EnergyCounters,
    state: Optional[AlgorithmState],
) -> RunTrace:
    alpha = bias = None
    label = "none"
    if policy is not None:
        label = policy.label()
        if policy.kind == "delta-uniform":
            alpha, bias = policy.alpha, policy.bias_fraction
    return RunTrace(
        controller=controller,
        algorithm=algorithm,
        policy_label=label,
        lam=lam,
        mu=mu,
        alpha=alpha,
        bias_fraction=bias,
        horizon=horizon,
        thetas=env.thetas,
        arms=ta.arms,
        rewards=ta.rewards,
        admitted=ta.admitted,
        served_arm=ta.served_arm,
        served_reward=ta.served_reward,
        served_birth=ta.served_birth,
        update_arm=ta.update_arm,
        update_reward=ta.update_reward,
        queue_len=ta.queue_len,
        buffered=ta.buffered,
        counters=counters,
        final_state=state,
    )


def _check_run_args(horizon: int, lam: float, mu: float) -> None:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if not 0.0 <= lam <= 1.0 or not 0.0 <= mu <= 1.0:
        raise ValueError("lam and mu must lie in [0, 1]")


def run_qr_mab(
    env: BanditEnv,
    algorithm: str,
    policy: SamplingPolicy,
    lam: float,
    mu: float,
    horizon: int,
    seed,
    *,
    _controller_name: str = QR_MAB,
) -> RunTrace:
    """Queue-based remote control: play, push feedback through the lossy
    channel into the server queue, and update from whichever packet the
    sampling policy serves."""
    _check_run_args(horizon, lam, mu)
    streams = RunStreams.from_seed(seed)
    chan, samp, alg_rng = streams.channel, streams.sampling, streams.algorithm
    state = make_algorithm(algorithm, env.k)
    queue = GeoGeoQueue(lam, mu)
    ta = _TraceArrays(horizon)
    c = EnergyCounters()
    stochastic = state.stochastic_selection
    stale = True
    arm = 0
    for i in range(horizon):
        if stale or stochastic:
            arm = state.select(alg_rng)
            stale = False
        r = env.pull(arm)
        if queue.admit(Packet(arm, r, i + 1), chan):
            ta.admitted[i] = True
            c.queue_ops += 1
        pkt = queue.try_serve(policy, chan, samp)
        if pkt is not None:
            c.queue_ops += 1
            state.update(pkt.arm, pkt.reward)
            c.alg_updates += 1
            c.packet_touches += 1
            stale = True
            ta.served_arm[i] = pkt.arm
            ta.served_reward[i] = pkt.reward
            ta.served_birth[i] = pkt.birth_slot
            ta.update_arm[i] = pkt.arm
            ta.update_reward[i] = pkt.reward
        ta.arms[i] = arm
        ta.rewards[i] = r
        ta.queue_len[i] = len(queue.buffer)
    return _make_trace(_controller_name, algorithm, policy, lam, mu, horizon, env, ta, c, state)


def run_full_feedback(env: BanditEnv, algorithm: str, horizon: int, seed) -> RunTrace:
    """Loss- and delay-free reference: the lam=mu=1 corner of run_qr_mab."""
    return run_qr_mab(
        env, algorithm, SamplingPolicy.fifo(), 1.0, 1.0, horizon, seed,
        _controller_name=FULL_FEEDBACK,
    )


def run_random(env: BanditEnv, horizon: int, seed) -> RunTrace:
    """Uniformly random play: no feedback, no queue, no learning."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    streams = RunStreams.from_seed(seed)
    alg_rng = streams.algorithm
    ta = _TraceArrays(horizon)
    k = env.k
    for i in range(horizon):
        arm = int(alg_rng.integers(k))
        ta.arms[i] = arm
        ta.rewards[i] = env.pull(arm)
    return _make_trace(RANDOM, "none", None, None, None, horizon, env, ta, EnergyCounters(), None)


class ArmQueues:
    """Agent-side per-arm packet buffers used by the storage baselines."""

    def __init__(self, k: int):
        self.queues: list[list[Packet]] = [[] for _ in range(k)]
        self.total = 0

    def push(self, packet: Packet) -> None:
        self.queues[packet.arm].append(packet)
        self.total += 1

    def pop_oldest(self, arm: int) -> Packet:
        packet = self.queues[arm].pop(0)
        self.total -= 1
        return packet

    def first_nonempty(self) -> Optional[int]:
        for arm, q in enumerate(self.queues):
            if q:
                return arm
        return None


def _check_net_policy(net_policy: SamplingPolicy) -> None:
    if net_policy.kind not in (FIFO, LIFO):
        raise ValueError("network-queue transfer policy must be fifo or lifo")


def run_base_update_from_queue(
    env: BanditEnv,
    algorithm: str,
    net_policy: SamplingPolicy,
    lam: float,
    mu: float,
    horizon: int,
    seed,
    update_from_any_arm: bool = False,
) -> RunTrace:
    """Storage baseline: served packets land in per-arm agent queues and are
    consumed (oldest first) only when the algorithm plays that arm.

    With ``update_from_any_arm`` the agent instead pops from the lowest-index
    nonempty arm queue when the played arm's queue is empty; at most one
    update happens per slot either way.
    """
    _check_run_args(horizon, lam, mu)
    _check_net_policy(net_policy)
    streams = RunStreams.from_seed(seed)
    chan, samp, alg_rng = streams.channel, streams.sampling, streams.algorithm
    state = make_algorithm(algorithm, env.k)
    queue = GeoGeoQueue(lam, mu)
    arm_queues = ArmQueues(env.k)
    ta = _TraceArrays(horizon)
    c = EnergyCounters()
    stochastic = state.stochastic_selection
    stale = True
    arm = 0
    for i in range(horizon):
        if stale or stochastic:
            arm = state.select(alg_rng)
            stale = False
        r = env.pull(arm)
        if queue.admit(Packet(arm, r, i + 1), chan):
            ta.admitted[i] = True
            c.queue_ops += 1
        pkt = queue.try_serve(net_policy, chan, samp)
        if pkt is not None:
            arm_queues.push(pkt)
            c.queue_ops += 2  # network removal + arm-queue append
            ta.served_arm[i] = pkt.arm
            ta.served_reward[i] = pkt.reward
            ta.served_birth[i] = pkt.birth_slot
        update_from = arm if arm_queues.queues[arm] else None
        if update_from is None and update_from_any_arm:
            update_from = arm_queues.first_nonempty()
        if update_from is not None:
            fed = arm_queues.pop_oldest(update_from)
            c.queue_ops += 1
            state.update(fed.arm, fed.reward)
            c.alg_updates += 1
            c.packet_touches += 1
            stale = True
            ta.update_arm[i] = fed.arm
            ta.update_reward[i] = fed.reward
        ta.arms[i] = arm
        ta.rewards[i] = r
        ta.queue_len[i] = len(queue.buffer)
        ta.buffered[i] = arm_queues.total
        c.storage_integral += arm_queues.total
    return _make_trace(BASE_UFQ, algorithm, net_policy, lam, mu, horizon, env, ta, c, state)


def run_base_update_from_replay_buffer(
    env: BanditEnv,
    algorithm: str,
    net_policy: SamplingPolicy,
    lam: float,
    mu: float,
    horizon: int,
    seed,
) -> RunTrace:
    """Storage baseline that never discards: every slot the algorithm's
    statistics are the aggregate of all packets ever transferred.

    The aggregate over a grow-only buffer equals the incremental update
    applied at transfer time, so the statistics are maintained incrementally;
    the energy counters still charge a full recompute (one write event plus
    one touch per buffered packet) every slot.
    """
    _check_run_args(horizon, lam, mu)
    _check_net_policy(net_policy)
    streams = RunStreams.from_seed(seed)
    chan, samp, alg_rng = streams.channel, streams.sampling, streams.algorithm
    state = make_algorithm(algorithm, env.k)
    queue = GeoGeoQueue(lam, mu)
    arm_queues = ArmQueues(env.k)
    ta = _TraceArrays(horizon)
    c = EnergyCounters()
    stochastic = state.stochastic_selection
    stale = True
    arm = 0
    for i in range(horizon):
        if stale or stochastic:
            arm = state.select(alg_rng)
            stale = False
        r = env.pull(arm)
        if queue.admit(Packet(arm, r, i + 1), chan):
            ta.admitted[i] = True
            c.queue_ops += 1
        pkt = queue.try_serve(net_policy, chan, samp)
        if pkt is not None:
            arm_queues.push(pkt)
            c.queue_ops += 2
            state.update(pkt.arm, pkt.reward)
            stale = True
            ta.served_arm[i] = pkt.arm
            ta.served_reward[i] = pkt.reward
            ta.served_birth[i] = pkt.birth_slot
        c.alg_updates += 1  # per-slot recompute over the whole buffer
        c.packet_touches += arm_queues.total
        c.storage_integral += arm_queues.total
        ta.arms[i] = arm
        ta.rewards[i] = r
        ta.queue_len[i] = len(queue.buffer)
        ta.buffered[i] = arm_queues.total
    return _make_trace(BASE_UFRB, algorithm, net_policy, lam, mu, horizon, env, ta, c, state)
