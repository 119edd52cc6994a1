"""Scratch exploration: effect sizes behind the headline comparisons.

Not part of the test suite; prints means/stds and Welch statistics at a
configurable replication count so tolerance choices are grounded.
"""

import sys
import time

import numpy as np
from scipy import stats

from queuebandit.bandits import BanditEnv
from queuebandit.controllers import (
    run_base_update_from_queue,
    run_base_update_from_replay_buffer,
    run_full_feedback,
    run_qr_mab,
    run_random,
)
from queuebandit.harness import GridPoint, RunId, derive_substream, env_substream
from queuebandit.metrics import EnergyModel, pseudo_regret
from queuebandit.queueing import SamplingPolicy

SEED = 777
T = 5000
MODEL = EnergyModel()


def batch(label, controller, algorithm, policy, lam, mu, reps):
    rewards = np.empty(reps)
    regrets = np.empty(reps)
    energies = np.empty(reps)
    grid = GridPoint(lam, mu, getattr(policy, "alpha", None) if policy and policy.kind == "delta-uniform" else None,
                     policy.bias_fraction if policy and policy.kind == "delta-uniform" else None)
    t0 = time.perf_counter()
    for rep in range(reps):
        env = BanditEnv.draw(5, seed=env_substream(SEED, rep))
        seed = derive_substream(SEED, RunId("x", grid, rep))
        if controller == "qr":
            tr = run_qr_mab(env, algorithm, policy, lam, mu, T, seed)
        elif controller == "ufq":
            tr = run_base_update_from_queue(env, algorithm, policy, lam, mu, T, seed)
        elif controller == "ufrb":
            tr = run_base_update_from_replay_buffer(env, algorithm, policy, lam, mu, T, seed)
        elif controller == "ff":
            tr = run_full_feedback(env, algorithm, T, seed)
        else:
            tr = run_random(env, T, seed)
        rewards[rep] = tr.total_reward()
        regrets[rep] = pseudo_regret(tr, tr.thetas)[-1]
        energies[rep] = MODEL.energy(tr.counters)
    dt = time.perf_counter() - t0
    print(f"{label:34s} reward {rewards.mean():7.1f}±{rewards.std(ddof=1):6.1f} "
          f"regret {regrets.mean():7.1f}±{regrets.std(ddof=1):6.1f} energy {energies.mean():9.1f} [{dt:.1f}s]")
    return rewards, regrets, energies


def welch(name, a, b):
    t = stats.ttest_ind(a, b, equal_var=False)
    print(f"  {name}: diff={a.mean()-b.mean():8.2f}  p={t.pvalue:.2e}")


if __name__ == "__main__":
    reps = int(sys.argv[1]) if len(sys.argv) > 1 else 200

    print("== P2: UCB LIFO mu=0.3 over lambda ==")
    r01, *_ = batch("lifo l=0.1", "qr", "ucb", SamplingPolicy.lifo(), 0.1, 0.3, reps)
    r03, *_ = batch("lifo l=0.3", "qr", "ucb", SamplingPolicy.lifo(), 0.3, 0.3, reps)
    r06, *_ = batch("lifo l=0.6", "qr", "ucb", SamplingPolicy.lifo(), 0.6, 0.3, reps)
    r09, *_ = batch("lifo l=0.9", "qr", "ucb", SamplingPolicy.lifo(), 0.9, 0.3, reps)
    welch("rising 0.3 vs 0.1", r03, r01)
    welch("flat 0.6 vs 0.9  ", r06, r09)
    se = np.sqrt(r06.var(ddof=1) / reps + r09.var(ddof=1) / reps)
    print(f"  flat |diff|={abs(r06.mean()-r09.mean()):.2f} vs 2*SE={2*se:.2f}")

    print("== P3: UCB FIFO mu=0.3 ==")
    f04, *_ = batch("fifo l=0.4", "qr", "ucb", SamplingPolicy.fifo(), 0.4, 0.3, reps)
    f09, *_ = batch("fifo l=0.9", "qr", "ucb", SamplingPolicy.fifo(), 0.9, 0.3, reps)
    welch("decay 0.4 vs 0.9", f04, f09)

    print("== P4: UCB delta-uniform l=0.6 mu=0.3 ==")
    a0, *_ = batch("du a=0.0 b=1", "qr", "ucb", SamplingPolicy.delta_uniform(0.0, 1.0), 0.6, 0.3, reps)
    a5, *_ = batch("du a=0.5 b=1", "qr", "ucb", SamplingPolicy.delta_uniform(0.5, 1.0), 0.6, 0.3, reps)
    a1, *_ = batch("du a=1.0 b=1", "qr", "ucb", SamplingPolicy.delta_uniform(1.0, 1.0), 0.6, 0.3, reps)
    b0, *_ = batch("du a=0.5 b=0", "qr", "ucb", SamplingPolicy.delta_uniform(0.5, 0.0), 0.6, 0.3, reps)
    welch("a=0.5 vs a=1 (lifo)", a5, a1)
    welch("a=0.5 vs a=0 (unif)", a5, a0)
    welch("b=1 vs b=0 at a=0.5", a5, b0)

    print("== P5: TS l=0.8 mu=0.6 regrets ==")
    _, g_du, _ = batch("ts du", "qr", "ts", SamplingPolicy.delta_uniform(0.5, 1.0), 0.8, 0.6, reps)
    _, g_ff, _ = batch("ts fifo", "qr", "ts", SamplingPolicy.fifo(), 0.8, 0.6, reps)
    _, g_lf, _ = batch("ts lifo", "qr", "ts", SamplingPolicy.lifo(), 0.8, 0.6, reps)
    _, g_q, _ = batch("ts ufq lifo", "ufq", "ts", SamplingPolicy.lifo(), 0.8, 0.6, reps)
    _, g_rb, _ = batch("ts ufrb lifo", "ufrb", "ts", SamplingPolicy.lifo(), 0.8, 0.6, reps)
    welch("du vs fifo", g_du, g_ff)
    welch("du vs lifo", g_du, g_lf)
    welch("du vs ufq ", g_du, g_q)
    welch("du vs ufrb", g_du, g_rb)

    print("== P6: UCB l=0.8 mu=0.6 regrets ==")
    _, u_du, _ = batch("ucb du", "qr", "ucb", SamplingPolicy.delta_uniform(0.5, 1.0), 0.8, 0.6, reps)
    _, u_ff, _ = batch("ucb fifo", "qr", "ucb", SamplingPolicy.fifo(), 0.8, 0.6, reps)
    _, u_lf, _ = batch("ucb lifo", "qr", "ucb", SamplingPolicy.lifo(), 0.8, 0.6, reps)
    _, u_q, _ = batch("ucb ufq lifo", "ufq", "ucb", SamplingPolicy.lifo(), 0.8, 0.6, reps)
    _, u_rb, _ = batch("ucb ufrb lifo", "ufrb", "ucb", SamplingPolicy.lifo(), 0.8, 0.6, reps)
    _, u_or, _ = batch("ucb full-feedback", "ff", "ucb", None, 1.0, 1.0, reps)
    welch("oracle vs du  ", u_or, u_du)
    welch("oracle vs ufrb", u_or, u_rb)
    welch("ufrb vs du    ", u_rb, u_du)
    welch("du vs lifo    ", u_du, u_lf)
    welch("du vs fifo    ", u_du, u_ff)
    welch("du vs ufq     ", u_du, u_q)
    welch("ufrb vs lifo  ", u_rb, u_lf)
    welch("ufrb vs fifo  ", u_rb, u_ff)

    print("== P7: UCB l=0.8 mu=0.3 energy ==")
    _, _, e_du = batch("ucb du", "qr", "ucb", SamplingPolicy.delta_uniform(0.5, 1.0), 0.8, 0.3, reps)
    _, _, e_rb = batch("ucb ufrb lifo", "ufrb", "ucb", SamplingPolicy.lifo(), 0.8, 0.3, reps)
    print(f"  per-run dominance: {np.all(e_rb > e_du)} (min gap {np.min(e_rb - e_du):.1f})")
