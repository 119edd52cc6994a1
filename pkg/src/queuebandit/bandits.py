"""Stationary Bernoulli bandit environment and the agent-side decision rules.

The environment is a K-armed bandit with fixed means in [0, 1]; the two
decision rules (UCB and Thompson Sampling) are plain state machines whose
``select``/``update`` methods are driven by a controller. Updates are only
applied when a feedback packet actually reaches the agent, so both states
are built to tolerate arbitrarily sparse update sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rngutil import BufferedUniforms, SeedLike, as_generator


class BanditEnv:
    """K-armed Bernoulli environment with means fixed for its whole lifetime.

    Rewards are drawn from the environment's own generator, one uniform per
    pull, so two identically seeded environments produce bit-identical
    reward sequences for identical pull sequences.
    """

    def __init__(self, thetas, seed: SeedLike = None):
        thetas = np.asarray(thetas, dtype=np.float64)
        if thetas.ndim != 1 or thetas.size < 2:
            raise ValueError("need at least 2 arms")
        if np.any(thetas < 0.0) or np.any(thetas > 1.0):
            raise ValueError("arm means must lie in [0, 1]")
        self.thetas = thetas
        self.thetas.setflags(write=False)
        self.k = int(thetas.size)
        self._means = thetas.tolist()
        self._uniforms = BufferedUniforms(as_generator(seed))

    @classmethod
    def draw(cls, k: int, seed: SeedLike = None) -> "BanditEnv":
        """Fresh environment with means drawn uniformly on [0, 1].

        The same generator that drew the means keeps serving the pulls, so a
        single seed pins down the full environment behaviour.
        """
        if k < 2:
            raise ValueError("need at least 2 arms")
        rng = as_generator(seed)
        return cls(rng.random(k), seed=rng)

    @property
    def best_mean(self) -> float:
        return float(self.thetas.max())

    def pull(self, arm: int) -> int:
        """Play one arm, return its Bernoulli reward."""
        if not 0 <= arm < self.k:
            raise IndexError(f"arm {arm} out of range for {self.k}-armed bandit")
        return 1 if self._uniforms.random() < self._means[arm] else 0


@dataclass
class UcbState:
    """Per-arm counts and reward sums for the upper-confidence-bound rule.

    The empirical mean is kept as a (sum, count) pair and the index is
    formed at call time: mean + sqrt(2 ln N / N_a). Arms never observed get
    an infinite index so they win the argmax; ties resolve to the lowest
    arm index, which keeps the selection deterministic between updates.
    """

    counts: list[int]
    sums: list[float]
    total: int = 0
    stochastic_selection = False

    @classmethod
    def fresh(cls, k: int) -> "UcbState":
        return cls(counts=[0] * k, sums=[0.0] * k)

    @property
    def k(self) -> int:
        return len(self.counts)

    def mean(self, arm: int) -> float:
        if self.counts[arm] == 0:
            raise ValueError(f"arm {arm} has no observations")
        return self.sums[arm] / self.counts[arm]

    def index(self, arm: int) -> float:
        n_a = self.counts[arm]
        if n_a == 0:
            return math.inf
        return self.sums[arm] / n_a + math.sqrt(2.0 * math.log(self.total) / n_a)

    def indices(self) -> np.ndarray:
        return np.array([self.index(arm) for arm in range(self.k)])

    def select(self, rng: np.random.Generator | None = None) -> int:
        # Argmax with first-maximiser tie-break; an unseen arm has an
        # infinite index, so the lowest unseen index wins outright.
        counts, sums = self.counts, self.sums
        log2n = 2.0 * math.log(self.total) if self.total > 0 else 0.0
        best_arm = -1
        best = -math.inf
        for arm, n_a in enumerate(counts):
            if n_a == 0:
                return arm
            value = sums[arm] / n_a + math.sqrt(log2n / n_a)
            if value > best:
                best = value
                best_arm = arm
        return best_arm

    def update(self, arm: int, reward: int) -> None:
        if not 0 <= arm < self.k:
            raise IndexError(f"arm {arm} out of range")
        if reward not in (0, 1):
            raise ValueError("reward must be 0 or 1")
        self.counts[arm] += 1
        self.sums[arm] += reward
        self.total += 1


@dataclass
class TsState:
    """Beta-Bernoulli posterior state for Thompson Sampling.

    Uniform Beta(1, 1) priors; a reward of 1 bumps the success count, 0 the
    failure count, so arm a's posterior is Beta(S_a + 1, F_a + 1).
    """

    successes: np.ndarray
    failures: np.ndarray
    # Posterior parameters successes+1 / failures+1, maintained in place so
    # the per-slot sampling call allocates nothing.
    _alpha: np.ndarray = field(init=False, repr=False)
    _beta: np.ndarray = field(init=False, repr=False)
    stochastic_selection = True

    def __post_init__(self):
        self._alpha = self.successes.astype(np.float64) + 1.0
        self._beta = self.failures.astype(np.float64) + 1.0

    @classmethod
    def fresh(cls, k: int) -> "TsState":
        return cls(
            successes=np.zeros(k, dtype=np.int64),
            failures=np.zeros(k, dtype=np.int64),
        )

    @property
    def k(self) -> int:
        return self.successes.size

    def posterior_mean(self, arm: int) -> float:
        s, f = self.successes[arm], self.failures[arm]
        return float((s + 1) / (s + f + 2))

    def select(self, rng: np.random.Generator) -> int:
        return int(rng.beta(self._alpha, self._beta).argmax())

    def update(self, arm: int, reward: int) -> None:
        if not 0 <= arm < self.k:
            raise IndexError(f"arm {arm} out of range")
        if reward not in (0, 1):
            raise ValueError("reward must be 0 or 1")
        if reward:
            self.successes[arm] += 1
            self._alpha[arm] += 1.0
        else:
            self.failures[arm] += 1
            self._beta[arm] += 1.0


AlgorithmState = UcbState | TsState

ALGORITHMS = {"ucb": UcbState.fresh, "ts": TsState.fresh}


def make_algorithm(name: str, k: int) -> AlgorithmState:
    try:
        factory = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}, expected one of {sorted(ALGORITHMS)}") from None
    return factory(k)
