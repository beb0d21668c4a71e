"""
Clipped inverse-propensity estimates on a tiny log
==================================================

Four logged impressions of one page, three showing ad ``a`` and one ad ``b``.
We fit the empirical propensities, score two fixed policies and print the
Chernoff interval that goes with each estimate.
"""

from warmstart import (Dataset, EstimatorConfig, LoggedEvent, evaluate_policy,
                       evaluate_random_baseline, fit_empirical)
from warmstart.estimator import confidence_interval

# the log: (context, action, reward)
events = [LoggedEvent("page", "a", 1.0), LoggedEvent("page", "a", 0.0),
          LoggedEvent("page", "b", 1.0), LoggedEvent("page", "a", 0.5)]
data = Dataset(tuple(events))

# propensities are plain count ratios: a was shown 3 times out of 4
table = fit_empirical(data)
print("p(a|page) =", table.prob("page", "a"), " p(b|page) =", table.prob("page", "b"))

# a policy is any function from an event to an action id
for tau in (0.5, 0.05):
    cfg = EstimatorConfig(tau)
    for name, h in [("always a", lambda e: "a"), ("always b", lambda e: "b")]:
        est = evaluate_policy(data, h, table, cfg)
        print(f"tau={tau:<5} {name}: {est.point:.4f}  [{est.ci_low:.4f}, {est.ci_high:.4f}]")
    rnd = evaluate_random_baseline(data, table, cfg)
    print(f"tau={tau:<5} random  : {rnd.point:.4f}")

# the interval for an estimate of exactly zero has a closed form
lo, hi = confidence_interval(0.0, T=1000, tau=1.0, delta=0.05)
print("zero estimate, T=1000:", (lo, hi), "closed form:", 1 - 0.025 ** (1 / 1000))
