"""Queue, channel, and sampling-policy behaviour."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from queuebandit.queueing import (
    DELTA_UNIFORM,
    FIFO,
    GeoGeoQueue,
    LIFO,
    Packet,
    SamplingPolicy,
    UNIFORM,
    bias_position,
    draw_position,
    sampling_pmf,
)
from queuebandit.rngutil import BufferedUniforms


class ScriptedRng:
    """Deterministic stand-in for a Generator; pops prescripted uniforms."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def packets(n, arm=0):
    return [Packet(arm, 1, t + 1) for t in range(n)]


class TestSamplingPmf:
    def test_fifo_point_mass_on_oldest(self):
        assert sampling_pmf(SamplingPolicy.fifo(), 5).tolist() == [1, 0, 0, 0, 0]

    def test_lifo_point_mass_on_newest(self):
        assert sampling_pmf(SamplingPolicy.lifo(), 4).tolist() == [0, 0, 0, 1]

    def test_delta_uniform_mixture(self):
        pmf = sampling_pmf(SamplingPolicy.delta_uniform(0.5, 1.0), 10)
        assert pmf[-1] == pytest.approx(0.55)
        assert np.allclose(pmf[:-1], 0.05)

    def test_delta_uniform_alpha_zero_is_uniform(self):
        pmf = sampling_pmf(SamplingPolicy.delta_uniform(0.0, 0.7), 4)
        assert np.allclose(pmf, 0.25)

    def test_rejects_empty_queue(self):
        with pytest.raises(ValueError):
            sampling_pmf(SamplingPolicy.fifo(), 0)

    @given(
        kind=st.sampled_from([FIFO, LIFO, UNIFORM]),
        length=st.integers(1, 10_000),
    )
    def test_pmf_sums_to_one_plain(self, kind, length):
        assert abs(sampling_pmf(SamplingPolicy(kind), length).sum() - 1.0) < 1e-12

    @given(
        alpha=st.floats(0, 1),
        bias=st.floats(0, 1),
        length=st.integers(1, 10_000),
    )
    def test_pmf_sums_to_one_delta_uniform(self, alpha, bias, length):
        pmf = sampling_pmf(SamplingPolicy.delta_uniform(alpha, bias), length)
        assert abs(pmf.sum() - 1.0) < 1e-12
        assert np.all(pmf >= 0)


class TestBiasPosition:
    def test_half_up_rounding(self):
        # 0.5 * 5 = 2.5 rounds up to 3, not to the even neighbour.
        assert bias_position(0.5, 5) == 3

    def test_endpoints_clamp(self):
        assert bias_position(0.0, 7) == 1
        assert bias_position(1.0, 7) == 7

    @given(bias=st.floats(0, 1), length=st.integers(1, 1000))
    def test_always_a_valid_position(self, bias, length):
        assert 1 <= bias_position(bias, length) <= length


class TestSamplingPolicy:
    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            SamplingPolicy("round-robin")

    def test_rejects_out_of_range_parameters(self):
        with pytest.raises(ValueError):
            SamplingPolicy.delta_uniform(1.5, 0.0)
        with pytest.raises(ValueError):
            SamplingPolicy.delta_uniform(0.5, -0.2)


class TestDrawPosition:
    def test_deterministic_kinds_consume_no_randomness(self):
        rng = ScriptedRng([])
        assert draw_position(SamplingPolicy.fifo(), 9, rng) == 1
        assert draw_position(SamplingPolicy.lifo(), 9, rng) == 9

    def test_matches_pmf_empirically(self):
        # Goodness of fit at fixed queue length, 1e5 draws per policy.
        rng = np.random.default_rng(5)
        length, draws = 10, 100_000
        for policy in (
            SamplingPolicy.uniform(),
            SamplingPolicy.delta_uniform(0.5, 1.0),
            SamplingPolicy.delta_uniform(0.3, 0.4),
        ):
            counts = np.zeros(length)
            for _ in range(draws):
                counts[draw_position(policy, length, rng) - 1] += 1
            assert np.all(np.abs(counts / draws - sampling_pmf(policy, length)) < 0.01)

    @given(
        alpha=st.floats(0, 1),
        bias=st.floats(0, 1),
        length=st.integers(1, 500),
        u=st.floats(0, 1, exclude_max=True),
    )
    def test_always_in_range(self, alpha, bias, length, u):
        pos = draw_position(SamplingPolicy.delta_uniform(alpha, bias), length, ScriptedRng([u]))
        assert 1 <= pos <= length


class TestQueue:
    def test_admit_certain(self):
        queue = GeoGeoQueue(1.0, 0.0)
        for pkt in packets(3):
            assert queue.admit(pkt, np.random.default_rng(0))
        assert len(queue) == 3

    def test_admit_never(self):
        queue = GeoGeoQueue(0.0, 0.0)
        for pkt in packets(50):
            assert not queue.admit(pkt, np.random.default_rng(0))
        assert len(queue) == 0

    def test_admit_monte_carlo_rate(self):
        # Oracle: Bernoulli(0.5) admission mean at n=1e5.
        queue = GeoGeoQueue(0.5, 0.0)
        rng = np.random.default_rng(8)
        n = 100_000
        admitted = sum(queue.admit(Packet(0, 0, 1), rng) for _ in range(n))
        assert abs(admitted / n - 0.5) < 0.01

    def test_serve_lifo_takes_newest(self):
        queue = GeoGeoQueue(1.0, 1.0)
        rng = np.random.default_rng(0)
        p1, p2, p3 = packets(3)
        queue.buffer.extend([p1, p2, p3])
        assert queue.try_serve(SamplingPolicy.lifo(), rng) == p3
        assert queue.buffer == [p1, p2]

    def test_serve_fifo_takes_oldest(self):
        queue = GeoGeoQueue(1.0, 1.0)
        rng = np.random.default_rng(0)
        p1, p2, p3 = packets(3)
        queue.buffer.extend([p1, p2, p3])
        assert queue.try_serve(SamplingPolicy.fifo(), rng) == p1
        assert queue.buffer == [p2, p3]

    def test_serve_never_when_mu_zero(self):
        queue = GeoGeoQueue(1.0, 0.0)
        queue.buffer.extend(packets(5))
        rng = np.random.default_rng(0)
        assert all(queue.try_serve(SamplingPolicy.fifo(), rng) is None for _ in range(100))
        assert len(queue) == 5

    def test_service_opportunity_on_empty_queue_is_noop(self):
        queue = GeoGeoQueue(1.0, 1.0)
        assert queue.try_serve(SamplingPolicy.fifo(), np.random.default_rng(0)) is None
        assert queue.served_total == 0

    def test_queue_length_counts(self):
        queue = GeoGeoQueue(1.0, 1.0)
        rng = np.random.default_rng(0)
        assert len(queue) == 0
        for pkt in packets(3):
            queue.admit(pkt, rng)
        queue.try_serve(SamplingPolicy.fifo(), rng)
        assert len(queue) == 2

    def test_conservation_after_n_admissions(self):
        queue = GeoGeoQueue(1.0, 0.0)
        rng = np.random.default_rng(0)
        for pkt in packets(64):
            queue.admit(pkt, rng)
        assert len(queue) == 64

    def test_rejects_out_of_range_rates(self):
        with pytest.raises(ValueError):
            GeoGeoQueue(1.2, 0.5)
        with pytest.raises(ValueError):
            GeoGeoQueue(0.5, -0.1)

    @given(st.lists(st.tuples(st.booleans(), st.booleans()), max_size=300), st.integers(0, 2**31))
    @settings(max_examples=50)
    def test_conservation_invariant(self, script, seed):
        # admitted == served + length, exactly, under any admission/service mix.
        queue = GeoGeoQueue(0.7, 0.4)
        rng = np.random.default_rng(seed)
        for t, (offer, serve) in enumerate(script):
            if offer:
                queue.admit(Packet(0, 1, t), rng)
            if serve:
                queue.try_serve(SamplingPolicy.uniform(), rng)
            assert queue.admitted_total == queue.served_total + len(queue)

    def test_scripted_dynamics_match_lindley_recursion(self):
        # Oracle: with scripted admission/service uniforms the queue length
        # must follow L_t = max(L_{t-1} + A_t - S_t, 0) (admission first,
        # service may catch the packet admitted in the same slot).
        lam, mu = 0.6, 0.5
        adm_u = [0.1, 0.9, 0.3, 0.59, 0.61, 0.2, 0.0, 0.99, 0.5, 0.1]
        srv_u = [0.9, 0.4, 0.6, 0.45, 0.51, 0.49, 0.8, 0.3, 0.2, 0.9]
        queue = GeoGeoQueue(lam, mu)
        chan = ScriptedRng([v for pair in zip(adm_u, srv_u) for v in pair])
        lengths = []
        for t in range(10):
            queue.admit(Packet(0, 1, t + 1), chan)
            queue.try_serve(SamplingPolicy.fifo(), chan, position_rng=ScriptedRng([]))
            lengths.append(len(queue))
        level = 0
        expected = []
        for a_u, s_u in zip(adm_u, srv_u):
            level = max(level + (a_u < lam) - (s_u < mu), 0)
            expected.append(level)
        assert lengths == expected


def _serve_sequence(policy, seed, slots=400):
    """Shared-scenario harness: same channel/sampling streams, one policy."""
    ss = np.random.SeedSequence(seed)
    chan_ss, samp_ss = ss.spawn(2)
    chan = BufferedUniforms(np.random.default_rng(chan_ss))
    samp = BufferedUniforms(np.random.default_rng(samp_ss))
    queue = GeoGeoQueue(0.7, 0.4)
    served = []
    for t in range(slots):
        queue.admit(Packet(t % 5, t % 2, t + 1), chan)
        pkt = queue.try_serve(policy, chan, position_rng=samp)
        if pkt is not None:
            served.append(pkt)
    return served


class TestPolicyEndpointEquivalence:
    def test_alpha_one_bias_one_replays_lifo(self):
        assert _serve_sequence(SamplingPolicy.delta_uniform(1.0, 1.0), 31) == _serve_sequence(
            SamplingPolicy.lifo(), 31
        )

    def test_alpha_one_bias_zero_replays_fifo(self):
        assert _serve_sequence(SamplingPolicy.delta_uniform(1.0, 0.0), 32) == _serve_sequence(
            SamplingPolicy.fifo(), 32
        )

    def test_alpha_zero_replays_uniform(self):
        assert _serve_sequence(SamplingPolicy.delta_uniform(0.0, 0.8), 33) == _serve_sequence(
            SamplingPolicy.uniform(), 33
        )


class TestGeoGeo1Statistics:
    def test_stable_queue_time_average_bounded(self):
        # Stationary mean for this admission-then-service order is
        # lam*(1-mu)/(mu-lam); the asserted envelope 3*lam*(1-lam)/(mu-lam)
        # sits strictly above it.
        lam, mu, slots = 0.3, 0.6, 100_000
        queue = GeoGeoQueue(lam, mu)
        chan = BufferedUniforms(np.random.default_rng(2024))
        total = 0
        for t in range(slots):
            queue.admit(Packet(0, 1, t + 1), chan)
            queue.try_serve(SamplingPolicy.fifo(), chan)
            total += len(queue)
        envelope = 3 * lam * (1 - lam) / (mu - lam)
        assert total / slots < envelope

    def test_overloaded_queue_grows_at_drift_rate(self):
        lam, mu, slots = 0.6, 0.3, 100_000
        queue = GeoGeoQueue(lam, mu)
        chan = BufferedUniforms(np.random.default_rng(7))
        for t in range(slots):
            queue.admit(Packet(0, 1, t + 1), chan)
            queue.try_serve(SamplingPolicy.lifo(), chan)
        assert abs(len(queue) / slots - (lam - mu)) < 0.02

    def test_served_count_matches_min_rate_law_full_grid(self):
        # E[N_T] = min(lam, mu) * T for every (lam, mu) pair; the served
        # count is a queue-level quantity, independent of any bandit on top.
        # On the critical diagonal lam == mu the exact system serves
        # min(lam, mu)*T - E[L_T] with E[L_T] ~ sqrt(4*lam*(1-mu)*T/pi)
        # (reflected random walk), which exceeds 2% of the ideal value at
        # (0.3, 0.3); the expectation is corrected there before applying
        # the same 2% tolerance.
        horizon, reps = 5000, 500
        rates = (0.3, 0.6, 0.9)
        pkt = Packet(0, 1, 0)
        fifo = SamplingPolicy.fifo()
        for lam in rates:
            for mu in rates:
                total = 0
                for rep in range(reps):
                    chan = BufferedUniforms(np.random.default_rng(np.random.SeedSequence(99, spawn_key=(rep,))))
                    queue = GeoGeoQueue(lam, mu)
                    admit, serve = queue.admit, queue.try_serve
                    for _ in range(horizon):
                        admit(pkt, chan)
                        serve(fifo, chan)
                    total += queue.served_total
                expected = min(lam, mu) * horizon
                if lam == mu:
                    expected -= math.sqrt(4 * lam * (1 - mu) * horizon / math.pi)
                assert abs(total / reps - expected) / (min(lam, mu) * horizon) < 0.02, (lam, mu)
