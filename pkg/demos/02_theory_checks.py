"""
Exact checks on small synthetic worlds
======================================

Logs produced by a *sequence* of different logging policies behave, in
expectation, exactly like logs from their average.  In a finite world we
can see this by enumerating every possible log.
"""

import numpy as np

from warmstart import simworld as sw

inst = sw.random_instance(seed=7, n_contexts=2, n_actions=3, T=3)
print("logging policy in round 1:\n", inst.seq.policy_at(0).round(3))
print("averaged policy:\n", sw.mixture_policy(inst.seq).round(3))

brute = sw.enumerate_estimator_mean(inst.world, inst.seq, inst.h, inst.pi_hat, inst.tau)
exact = sw.exact_estimator_expectation(inst.world, inst.seq, inst.h, inst.pi_hat, inst.tau)
print(f"mean over all logs {brute:.15f}\nmean via averaging {exact:.15f}")

# clipping can only shrink the estimate when the propensities are right ...
pi = sw.mixture_policy(inst.seq)
print("lemma bounds with the true propensities:", sw.lemma1_bounds(inst.world, pi, pi, inst.tau, inst.h))

# ... but an underestimated propensity inflates it by exactly eps / tau
tau, eps = 0.1, 0.05
one = sw.SyntheticWorld(["x"], [1.0], ["a1", "a2"], [[1.0, 1.0]])
mean = sw.exact_estimator_expectation(one, np.array([[tau + eps, 1 - tau - eps]]), [0],
                                      np.array([[tau, 1 - tau]]), tau)
print(f"true value 1.0, expected estimate {mean:.4f}, error {mean - 1:.4f} = eps/tau")

# the Hoeffding radius is conservative in simulation
coin = sw.SyntheticWorld(["x"], [1.0], ["a"], [[0.5]], sw.BERNOULLI)
seq = sw.PolicySequence([(np.ones((1, 1)), 100)])
rate = sw.hoeffding_check(coin, seq, [0], np.ones((1, 1)), 1.0, 0.05, trials=10_000)
print(f"fraction of logs outside the Hoeffding radius: {rate:.4f} (delta = 0.05)")
