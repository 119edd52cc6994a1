"""Lossy uplink into a server-side Geo/Geo/1 queue, plus queue-sampling rules.

Discrete time. Each slot a feedback packet survives the channel and joins
the queue with probability ``lam``; a service opportunity arrives with
probability ``mu`` and, if the queue is nonempty, removes the packet at a
position chosen by the sampling policy. Positions are 1-based with position
1 the oldest packet. The buffer is unbounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .rngutil import UniformSource

FIFO = "fifo"
LIFO = "lifo"
UNIFORM = "uniform"
DELTA_UNIFORM = "delta-uniform"

POLICY_KINDS = (FIFO, LIFO, UNIFORM, DELTA_UNIFORM)


class Packet(NamedTuple):
    """One feedback unit: which arm was played, what it paid, and when."""

    arm: int
    reward: int
    birth_slot: int


@dataclass(frozen=True)
class SamplingPolicy:
    """Rule for picking which queued packet a service opportunity observes.

    ``delta-uniform`` mixes a point mass at a biased position with the
    uniform distribution over occupied positions: the biased position
    c = clamp(round(bias_fraction * L), 1, L) is drawn with probability
    ``alpha``, and a uniformly random position with probability 1 - alpha.
    ``alpha``/``bias_fraction`` are meaningful for delta-uniform only.
    """

    kind: str
    alpha: float = 0.0
    bias_fraction: float = 0.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}, expected one of {POLICY_KINDS}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 <= self.bias_fraction <= 1.0:
            raise ValueError("bias_fraction must lie in [0, 1]")

    @classmethod
    def fifo(cls) -> "SamplingPolicy":
        return cls(FIFO)

    @classmethod
    def lifo(cls) -> "SamplingPolicy":
        return cls(LIFO)

    @classmethod
    def uniform(cls) -> "SamplingPolicy":
        return cls(UNIFORM)

    @classmethod
    def delta_uniform(cls, alpha: float, bias_fraction: float) -> "SamplingPolicy":
        return cls(DELTA_UNIFORM, alpha=alpha, bias_fraction=bias_fraction)

    def label(self) -> str:
        if self.kind == DELTA_UNIFORM:
            return f"{self.kind}(alpha={self.alpha:g},bias={self.bias_fraction:g})"
        return self.kind


def bias_position(bias_fraction: float, length: int) -> int:
    """Biased index c = round(bias_fraction * L), half-up, clamped to 1..L.

    Round-half-up (not banker's rounding) so that bias_fraction=1 lands
    exactly on the newest packet and bias_fraction=0 clamps to the oldest.
    """
    c = math.floor(bias_fraction * length + 0.5)
    return min(max(c, 1), length)


def sampling_pmf(policy: SamplingPolicy, length: int) -> np.ndarray:
    """Probability over positions 1..L; entry i is the mass on position i+1."""
    if length < 1:
        raise ValueError("queue length must be >= 1")
    if policy.kind == FIFO:
        pmf = np.zeros(length)
        pmf[0] = 1.0
    elif policy.kind == LIFO:
        pmf = np.zeros(length)
        pmf[-1] = 1.0
    elif policy.kind == UNIFORM:
        pmf = np.full(length, 1.0 / length)
    else:
        pmf = np.full(length, (1.0 - policy.alpha) / length)
        pmf[bias_position(policy.bias_fraction, length) - 1] += policy.alpha
    return pmf


def draw_position(policy: SamplingPolicy, length: int, rng: UniformSource) -> int:
    """Draw a 1-based position distributed as sampling_pmf(policy, length).

    Stochastic kinds consume exactly one uniform per draw; deterministic
    kinds consume none. The uniform branch of delta-uniform reuses the same
    draw (rescaled), so alpha=0 replays the uniform policy's exact position
    sequence and alpha=1 never branches on the rng.
    """
    if length < 1:
        raise ValueError("queue length must be >= 1")
    if policy.kind == FIFO:
        return 1
    if policy.kind == LIFO:
        return length
    u = rng.random()
    if policy.kind == UNIFORM:
        return min(int(u * length), length - 1) + 1
    if u < policy.alpha:
        return bias_position(policy.bias_fraction, length)
    v = (u - policy.alpha) / (1.0 - policy.alpha)
    return min(int(v * length), length - 1) + 1


@dataclass
class GeoGeoQueue:
    """Unbounded discrete-time queue with Bernoulli admission and service.

    Within a slot, admission happens before service, so a packet admitted
    in slot t is eligible for service in slot t. A service opportunity on
    an empty queue is consumed as a no-op, keeping the service process iid.
    """

    lam: float
    mu: float
    buffer: list[Packet] = field(default_factory=list)
    admitted_total: int = 0
    served_total: int = 0

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.buffer)

    def admit(self, packet: Packet, rng: UniformSource) -> bool:
        """Append the packet with probability lam; report whether it survived."""
        if rng.random() < self.lam:
            self.buffer.append(packet)
            self.admitted_total += 1
            return True
        return False

    def try_serve(
        self,
        policy: SamplingPolicy,
        rng: UniformSource,
        position_rng: Optional[UniformSource] = None,
    ) -> Optional[Packet]:
        """With probability mu, remove and return one packet chosen by policy.

        ``rng`` drives the service Bernoulli; ``position_rng`` (defaulting
        to ``rng``) drives the position draw, letting callers keep the two
        on independent streams.
        """
        if rng.random() >= self.mu:
            return None
        if not self.buffer:
            return None
        pos = draw_position(policy, len(self.buffer), position_rng if position_rng is not None else rng)
        packet = self.buffer.pop(pos - 1)
        self.served_total += 1
        return packet
