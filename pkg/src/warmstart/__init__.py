"""Offline policy evaluation and warm-start learning from logged, non-randomized exploration."""
from .core import (Dataset, EstimatorConfig, LoggedEvent, SparseVector, canonicalize,
                   cross_features, hash_token, read_events, sparse_dot, write_events)
from .errors import (CapacityError, ConfigError, DomainError, EstimationError, FormatError,
                     PolicyError, TrainingError, WarmstartError)
from .estimator import (ValueEstimate, clipped_weight, confidence_interval, evaluate_policy,
                        evaluate_random_baseline)
from .learner import (ArgmaxPolicy, LinearModel, TrainConfig, act, select_model, train_learned,
                      train_naive, train_regressor)
from .propensity import PropensityTable, feasible_set, fit_empirical, prob

__version__ = "0.1.0"

__all__ = [
    "ArgmaxPolicy", "CapacityError", "ConfigError", "Dataset", "DomainError", "EstimationError",
    "EstimatorConfig", "FormatError", "LinearModel", "LoggedEvent", "PolicyError",
    "PropensityTable", "SparseVector", "TrainConfig", "TrainingError", "ValueEstimate",
    "WarmstartError", "act", "canonicalize", "clipped_weight", "confidence_interval",
    "cross_features", "evaluate_policy", "evaluate_random_baseline", "feasible_set",
    "fit_empirical", "hash_token", "prob", "read_events", "select_model", "sparse_dot",
    "train_learned", "train_naive", "train_regressor", "write_events",
]
