"""
A synthetic warm-start table
============================

The bundled world has five pages and six ads.  Each page mostly shows one
ad, sometimes a second, and rarely a third; ad5 is never shown at all.
We train the importance-weighted regressor and the unweighted baseline on
the log and compare their exact expected estimates with the uniform-random
policy over each page's feasible ads.
"""

from warmstart import TrainConfig, fit_empirical, train_learned, train_naive
from warmstart import simworld as sw

world, seq = sw.load_shipped()
data = sw.log_events(world, seq, seed=0)
table = fit_empirical(data)
catalog = dict(world.action_features)
print(f"{data.T} logged events, {len(catalog)} ads")

print("method\ttau\texpected estimate\tchoices")
for tau in (0.05, 0.01):
    learned = train_learned(data, table, TrainConfig(tau=tau), catalog)
    value = sw.exact_estimator_expectation(world, seq, learned, table, tau)
    choice = [learned.choose(x, world.context_features[x]) for x in world.contexts]
    print(f"Learned\t{tau}\t{value:.4f}\t{choice}")
    print(f"Random\t{tau}\t{sw.exact_random_expectation(world, seq, table, tau):.4f}")

# the unweighted model extrapolates to the never-logged ad and earns nothing
naive = train_naive(data, TrainConfig(weighted=False), catalog)
choice = [naive.choose(x, world.context_features[x]) for x in world.contexts]
print(f"Naive\t0.05\t{sw.exact_estimator_expectation(world, seq, naive, table, 0.05):.4f}\t{choice}")
print("true value of the naive choices:", sw.exact_policy_value(world, naive))
