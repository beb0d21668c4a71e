"""Clipped inverse-propensity value estimate and its Chernoff interval.

For a deterministic policy ``h`` and logged events ``(x_t, a_t, r_t)``::

    V = (1/T) * sum_t r_t * I(h(x_t) == a_t) / max(p(a_t | x_t), tau)

Every term lies in ``[0, 1/tau]``.  The interval rescales the estimate by
``tau`` into ``[0, 1]``, inverts the binary relative entropy bound
``KL(m || q) <= ln(2/delta) / T`` on each side, and rescales back by ``1/tau``.
The interval assumes IID terms; logs produced by a sequence of distinct
policies satisfy this only approximately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from .core import Dataset, EstimatorConfig, LoggedEvent
from .errors import ConfigError, DomainError, EstimationError

KL_TOL = 1e-10


class PropensityModel(Protocol):
    def prob(self, x: str, a: str) -> float: ...

    def feasible_set(self, x: str) -> frozenset: ...


Policy = Callable[[LoggedEvent], str]


@dataclass(frozen=True)
class ValueEstimate:
    point: float
    ci_low: float
    ci_high: float
    T: int
    tau: float
    delta: float

    @property
    def interval(self) -> tuple:
        return (self.ci_low, self.ci_high)


def clipped_weight(p: float, tau: float) -> float:
    """Importance weight ``1 / max(p, tau)``, always in ``[1, 1/tau]``."""
    if not tau > 0:
        raise ConfigError(f"tau must be positive, got {tau!r}")
    return 1.0 / max(p, tau)


def pairwise_sum(values: Sequence[float]) -> float:
    """Tree summation: halves are summed recursively, blocks of <= 8 left to right.

    The order depends only on ``len(values)``, so chunked parallel reductions
    that follow the same tree reproduce the sequential result bit for bit.
    """
    n = len(values)
    if n <= 8:
        s = 0.0
        for v in values:
            s += v
        return s
    mid = n // 2
    return pairwise_sum(values[:mid]) + pairwise_sum(values[mid:])


def kl_bernoulli(p: float, q: float) -> float:
    """Binary relative entropy ``KL(p || q)`` with ``0 ln 0 = 0``."""
    out = 0.0
    if p > 0.0:
        out += math.inf if q <= 0.0 else p * math.log(p / q)
    if p < 1.0:
        out += math.inf if q >= 1.0 else (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def kl_upper(m: float, eps: float, tol: float = KL_TOL) -> float:
    """Largest ``q`` in ``[m, 1]`` with ``KL(m || q) <= eps`` (bisection)."""
    if m >= 1.0:
        return 1.0
    lo, hi = m, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if kl_bernoulli(m, mid) <= eps:
            lo = mid
        else:
            hi = mid
    return lo


def kl_lower(m: float, eps: float, tol: float = KL_TOL) -> float:
    """Smallest ``q`` in ``[0, m]`` with ``KL(m || q) <= eps`` (bisection)."""
    if m <= 0.0:
        return 0.0
    lo, hi = 0.0, m
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if kl_bernoulli(m, mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def confidence_interval(point: float, T: int, tau: float, delta: float = 0.05) -> tuple:
    """Two-sided relative-entropy Chernoff interval for an estimate in ``[0, 1/tau]``."""
    if not tau > 0:
        raise ConfigError(f"tau must be positive, got {tau!r}")
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"delta must lie in (0, 1), got {delta!r}")
    if T < 1:
        raise EstimationError("interval needs T >= 1")
    top = 1.0 / tau
    if not (0.0 <= point <= top * (1 + 1e-12)):
        raise DomainError(f"estimate {point!r} outside [0, {top!r}]")
    m = min(max(tau * point, 0.0), 1.0)
    eps = math.log(2.0 / delta) / T
    lo = kl_lower(m, eps) / tau
    hi = kl_upper(m, eps) / tau
    # guard the ordering against rescaling round-off
    return max(0.0, min(lo, point)), min(top, max(hi, point))


def _finish(terms, data: Dataset, cfg: EstimatorConfig) -> ValueEstimate:
    point = pairwise_sum(terms) / data.T
    lo, hi = confidence_interval(point, data.T, cfg.tau, cfg.delta)
    return ValueEstimate(point, lo, hi, data.T, cfg.tau, cfg.delta)


def evaluate_policy(data: Dataset, h: Policy, prop: PropensityModel, cfg: EstimatorConfig) -> ValueEstimate:
    """Clipped IPS estimate of a deterministic policy ``h`` on ``data``.

    ``h`` is called with each logged event and must return an action id;
    events where it disagrees with the logged action contribute 0.
    """
    if data.T < 1:
        raise EstimationError("cannot evaluate a policy on an empty dataset")
    terms = []
    for e in data.events:
        if e.reward == 0.0 or h(e) != e.action_id:
            terms.append(0.0)
        else:
            terms.append(e.reward * clipped_weight(prop.prob(e.context_id, e.action_id), cfg.tau))
    return _finish(terms, data, cfg)


def evaluate_random_baseline(data: Dataset, prop: PropensityModel, cfg: EstimatorConfig,
                             seed: Optional[int] = None, sampled: bool = False) -> ValueEstimate:
    """Estimate for the policy drawing uniformly from the feasible set ``C(x)``.

    By default the indicator ``I(h(x_t) = a_t)`` is replaced by its exact
    expectation ``1/|C(x_t)|`` (zero when the logged action is not feasible),
    which needs no randomness.  ``sampled=True`` draws the action instead,
    using ``seed``.
    """
    if data.T < 1:
        raise EstimationError("cannot evaluate a policy on an empty dataset")
    rng = np.random.default_rng(seed) if sampled else None
    terms = []
    for e in data.events:
        feasible = prop.feasible_set(e.context_id)
        if e.action_id not in feasible:
            terms.append(0.0)
            continue
        w = clipped_weight(prop.prob(e.context_id, e.action_id), cfg.tau)
        if sampled:
            choice = sorted(feasible)[rng.integers(len(feasible))]
            terms.append(e.reward * w if choice == e.action_id else 0.0)
        else:
            terms.append(e.reward * w / len(feasible))
    return _finish(terms, data, cfg)
