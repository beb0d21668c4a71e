"""Importance-weighted squared-loss SGD regressor and argmax policies.

The click regressor is linear over the crossed (context x action) features
plus an intercept.  Each logged event ``(x, a, y)`` contributes the loss
``w * (y - f(x, a))**2`` with ``w = 1 / max(p(a|x), tau)`` (``w = 1`` for the
unweighted variant).  One SGD step moves every active weight by
``2 * lr * w * (y - f) * value``.  The intercept is a fixed offset (zero after
training); a constant feature crossed with itself plays the role of a learned
bias.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .core import (EMPTY, Dataset, LoggedEvent, SparseVector, atomic_write,
                   cross_features, sparse_dot)
from .errors import ConfigError, FormatError, PolicyError, TrainingError
from .estimator import clipped_weight

log = logging.getLogger(__name__)

DEFAULT_LEARNING_RATES = (0.2, 0.1, 0.05, 0.02, 0.01)
MODEL_MAGIC = "#warmstart-model v1"


@dataclass
class LinearModel:
    weights: dict = field(default_factory=dict)
    intercept: float = 0.0
    learning_rate: float = 0.0
    tau: float = 1.0
    passes: int = 1
    weighted: bool = True

    def score(self, features: SparseVector) -> float:
        return sparse_dot(self.weights, features) + self.intercept

    def predict(self, context: SparseVector, action: SparseVector) -> float:
        return self.score(cross_features(context, action))


@dataclass(frozen=True)
class TrainConfig:
    learning_rates: tuple = DEFAULT_LEARNING_RATES
    passes: int = 1
    tau: float = 0.05
    seed: int = 0
    weighted: bool = True

    def __post_init__(self):
        object.__setattr__(self, "learning_rates", tuple(float(r) for r in self.learning_rates))
        if not self.learning_rates or any(not (r > 0 and math.isfinite(r)) for r in self.learning_rates):
            raise ConfigError("learning_rates must be a nonempty list of positive numbers")
        if self.passes < 1:
            raise ConfigError("passes must be >= 1")
        if not 0 < self.tau <= 1:
            raise ConfigError(f"tau must lie in (0, 1], got {self.tau!r}")


def importance_weight(event: LoggedEvent, prop, cfg: TrainConfig) -> float:
    if not cfg.weighted:
        return 1.0
    return clipped_weight(prop.prob(event.context_id, event.action_id), cfg.tau)


class _FeatureCache:
    """Memoizes crossed features per (context features, action features)."""

    def __init__(self):
        self._cache = {}

    def __call__(self, event: LoggedEvent) -> SparseVector:
        key = (event.context_features, event.action_features)
        f = self._cache.get(key)
        if f is None:
            f = self._cache[key] = cross_features(*key)
        return f


def event_loss(model: LinearModel, features: SparseVector, y: float, w: float) -> float:
    r = y - model.score(features)
    return w * r * r


def event_gradient(model: LinearModel, features: SparseVector, y: float, w: float) -> tuple:
    """Analytic gradient of :func:`event_loss` with respect to each active weight."""
    g = -2.0 * w * (y - model.score(features))
    return {i: g * v for i, v in zip(features.ids, features.values)}


def sgd_step(model: LinearModel, features: SparseVector, y: float, w: float, lr: float) -> None:
    """One in-place SGD update on a single event."""
    step = 2.0 * lr * w * (y - model.score(features))
    if step == 0.0:
        return
    weights = model.weights
    for i, v in zip(features.ids, features.values):
        nw = weights.get(i, 0.0) + step * v
        if not math.isfinite(nw):
            raise TrainingError(f"SGD diverged at learning rate {lr!r}")
        weights[i] = nw


def train_regressor(data: Dataset, prop, cfg: TrainConfig,
                    learning_rate: Optional[float] = None) -> LinearModel:
    """SGD over ``data`` in log order for ``cfg.passes`` passes, from all-zero weights.

    ``learning_rate`` defaults to the first entry of ``cfg.learning_rates``.
    Raises :class:`TrainingError` naming the rate when any weight becomes
    non-finite.
    """
    if data.T < 1:
        raise TrainingError("cannot train on an empty dataset")
    lr = cfg.learning_rates[0] if learning_rate is None else float(learning_rate)
    model = LinearModel(learning_rate=lr, tau=cfg.tau, passes=cfg.passes, weighted=cfg.weighted)
    feats = _FeatureCache()
    weights = [importance_weight(e, prop, cfg) for e in data.events]
    for _ in range(cfg.passes):
        for e, w in zip(data.events, weights):
            sgd_step(model, feats(e), e.reward, w, lr)
    return model


def training_error(model: LinearModel, data: Dataset, prop, cfg: TrainConfig) -> float:
    """Mean of ``w * (y - f(x, a))**2`` over ``data``."""
    feats = _FeatureCache()
    total = math.fsum(event_loss(model, feats(e), e.reward, importance_weight(e, prop, cfg))
                      for e in data.events)
    return total / data.T


@dataclass
class Candidate:
    learning_rate: float
    model: Optional[LinearModel]
    train_error: float
    failure: Optional[str] = None

    @property
    def diverged(self) -> bool:
        return self.model is None


def _fit_candidate(args) -> Candidate:
    data, prop, cfg, lr = args
    try:
        model = train_regressor(data, prop, cfg, lr)
    except TrainingError as exc:
        log.info("%s", exc)
        return Candidate(lr, None, math.inf, str(exc))
    try:
        err = training_error(model, data, prop, cfg)
    except OverflowError:
        err = math.inf
    if not math.isfinite(err):
        return Candidate(lr, None, math.inf, f"non-finite training error at learning rate {lr!r}")
    return Candidate(lr, model, err)


def sweep(data: Dataset, prop, cfg: TrainConfig, workers: int = 1) -> list:
    """Train one candidate per learning rate; diverged runs are kept with ``model=None``."""
    jobs = [(data, prop, cfg, lr) for lr in cfg.learning_rates]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_fit_candidate, jobs))
    return [_fit_candidate(j) for j in jobs]


def choose(candidates: Iterable[Candidate]) -> Candidate:
    """Lowest training error; ties go to the smaller learning rate."""
    usable = [c for c in candidates if not c.diverged]
    if not usable:
        raise TrainingError("every learning rate diverged")
    return min(usable, key=lambda c: (c.train_error, c.learning_rate))


def select_model(data: Dataset, prop, cfg: TrainConfig, workers: int = 1) -> LinearModel:
    return choose(sweep(data, prop, cfg, workers)).model


# --------------------------------------------------------------------------
# policies

def act(model: LinearModel, context: SparseVector, candidates: Mapping[str, SparseVector]) -> str:
    """Candidate action with the highest score; ties go to the smallest action id."""
    if not candidates:
        raise PolicyError("no candidate actions to choose from")
    best, best_score = None, -math.inf
    for a in sorted(candidates):
        s = model.predict(context, candidates[a])
        if best is None or s > best_score:
            best, best_score = a, s
    return best


@dataclass
class ArgmaxPolicy:
    """``h(x) = argmax_a f(x, a)`` over the feasible set or over the whole catalog.

    When ``restrict_to_feasible`` is set and the context has an empty
    feasible set, the policy abstains (returns ``None``), which the
    estimator scores as a mismatch.
    """

    model: LinearModel
    catalog: dict
    propensity: object = None
    restrict_to_feasible: bool = True
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.restrict_to_feasible and self.propensity is None:
            raise ConfigError("a feasible-set policy needs a propensity model")

    def candidates(self, context_id: str) -> dict:
        if not self.restrict_to_feasible:
            return self.catalog
        return {a: self.catalog.get(a, EMPTY) for a in self.propensity.feasible_set(context_id)}

    def choose(self, context_id: str, context: SparseVector) -> Optional[str]:
        key = (context_id, context)
        if key not in self._memo:
            cands = self.candidates(context_id)
            self._memo[key] = act(self.model, context, cands) if cands else None
        return self._memo[key]

    def __call__(self, event: LoggedEvent) -> Optional[str]:
        return self.choose(event.context_id, event.context_features)


def train_learned(data: Dataset, prop, cfg: TrainConfig, catalog: Optional[dict] = None,
                  workers: int = 1) -> ArgmaxPolicy:
    """The weighted regressor restricted to the feasible set."""
    model = select_model(data, prop, cfg, workers)
    return ArgmaxPolicy(model, dict(catalog or data.action_catalog()), prop, True)


def train_naive(data: Dataset, cfg: TrainConfig, catalog: Optional[dict] = None,
                workers: int = 1) -> ArgmaxPolicy:
    """Unweighted regression, argmax over every catalog action.

    This is the supervised baseline that ignores how rarely an action was
    logged; it is kept as a negative control.
    """
    if cfg.weighted:
        warnings.warn("train_naive ignores weighted=True and trains unweighted", stacklevel=2)
        cfg = replace(cfg, weighted=False)
    model = select_model(data, None, cfg, workers)
    return ArgmaxPolicy(model, dict(catalog or data.action_catalog()), None, False)


# --------------------------------------------------------------------------
# model file

def format_model(model: LinearModel) -> str:
    lines = [
        MODEL_MAGIC,
        f"#intercept\t{model.intercept!r}",
        f"#tau\t{model.tau!r}",
        f"#learning_rate\t{model.learning_rate!r}",
        f"#passes\t{model.passes}",
        f"#weighted\t{int(model.weighted)}",
    ]
    lines += [f"{i}\t{model.weights[i]!r}" for i in sorted(model.weights) if model.weights[i] != 0.0]
    return "\n".join(lines) + "\n"


def write_model(path, model: LinearModel) -> None:
    atomic_write(path, format_model(model))


def parse_model(lines: Iterable[str]) -> LinearModel:
    lines = iter(lines)
    first = next(lines, "").rstrip("\r\n")
    if first != MODEL_MAGIC:
        raise FormatError("not a model file (missing header)", 1)
    header, weights = {}, {}
    for lineno, raw in enumerate(lines, 2):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        key, sep, value = line.partition("\t")
        if not sep:
            raise FormatError("expected 'key TAB value'", lineno)
        try:
            if key.startswith("#"):
                header[key[1:]] = value
            else:
                w = float(value)
                if not math.isfinite(w):
                    raise ValueError
                weights[int(key)] = w
        except ValueError:
            raise FormatError(f"bad model line {line!r}", lineno) from None
    try:
        return LinearModel(weights, float(header["intercept"]), float(header["learning_rate"]),
                           float(header["tau"]), int(header["passes"]), bool(int(header["weighted"])))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"incomplete model header: {exc}") from None


def read_model(path) -> LinearModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh)
