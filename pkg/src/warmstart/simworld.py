"""Finite synthetic contextual-bandit worlds and exact oracles.

A world has finitely many contexts with known probabilities, a fixed action
list and a table of mean rewards.  Logging is done by a sequence of
per-round policies (stochastic matrices, possibly 0/1).  Because everything
is finite, the expected value of the clipped estimator can be computed two
independent ways:

* :func:`exact_estimator_expectation` uses the averaged logging policy and
  one pass over contexts;
* :func:`enumerate_estimator_mean` sums over every possible length-T log,
  weighting each by its probability under the round-by-round process.

Their agreement is the "averaged policy is expectation-equivalent" property.
"""
from __future__ import annotations

import itertools
import math
from importlib import resources
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .core import (Dataset, LoggedEvent, SparseVector, atomic_write, features_from_tokens,
                   format_features, parse_features, _check_key)
from .errors import CapacityError, ConfigError, FormatError
from .estimator import confidence_interval

ENUMERATION_LIMIT = 10**7
DETERMINISTIC = "deterministic"
BERNOULLI = "bernoulli"
# 25 cycles of the bundled 399-round logging cycle
SHIPPED_ROUNDS = 25 * 399


def _default_context_features(x: str) -> SparseVector:
    return features_from_tokens({f"ctx={x}": 1.0, "bias": 1.0})


def _default_action_features(a: str) -> SparseVector:
    return features_from_tokens({f"act={a}": 1.0, "bias": 1.0})


@dataclass
class SyntheticWorld:
    contexts: list
    context_probs: np.ndarray
    actions: list
    reward_means: np.ndarray
    reward_kind: str = DETERMINISTIC
    context_features: dict = field(default_factory=dict)
    action_features: dict = field(default_factory=dict)

    def __post_init__(self):
        self.contexts = [str(x) for x in self.contexts]
        self.actions = [str(a) for a in self.actions]
        self.context_probs = np.asarray(self.context_probs, dtype=float)
        self.reward_means = np.asarray(self.reward_means, dtype=float)
        nx, na = len(self.contexts), len(self.actions)
        if len(set(self.contexts)) != nx or len(set(self.actions)) != na:
            raise ConfigError("context and action ids must be unique")
        if self.context_probs.shape != (nx,) or self.reward_means.shape != (nx, na):
            raise ConfigError("shape mismatch between ids, probabilities and rewards")
        if np.any(self.context_probs < 0) or abs(self.context_probs.sum() - 1.0) > 1e-12:
            raise ConfigError("context probabilities must be nonnegative and sum to 1")
        if np.any(~np.isfinite(self.reward_means)) or np.any(self.reward_means < 0) \
                or np.any(self.reward_means > 1):
            raise ConfigError("reward means must lie in [0, 1]")
        if self.reward_kind not in (DETERMINISTIC, BERNOULLI):
            raise ConfigError(f"unknown reward kind {self.reward_kind!r}")
        for x in self.contexts:
            self.context_features.setdefault(x, _default_context_features(x))
        for a in self.actions:
            self.action_features.setdefault(a, _default_action_features(a))

    @property
    def n_contexts(self) -> int:
        return len(self.contexts)

    @property
    def n_actions(self) -> int:
        return len(self.actions)


def _check_stochastic(m: np.ndarray, shape) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != shape:
        raise ConfigError(f"policy shape {m.shape} != {shape}")
    if np.any(m < 0) or np.any(np.abs(m.sum(axis=1) - 1.0) > 1e-12):
        raise ConfigError("policy rows must be nonnegative and sum to 1")
    return m


@dataclass
class PolicySequence:
    """Per-round logging policies stored as run-length blocks ``(matrix, rounds)``."""

    blocks: list

    def __post_init__(self):
        blocks = []
        for m, n in self.blocks:
            m = np.asarray(m, dtype=float)
            n = int(n)
            if n < 0:
                raise ConfigError("block repeat count must be >= 0")
            if n:
                blocks.append((_check_stochastic(m, m.shape), n))
        shapes = {m.shape for m, _ in blocks}
        if len(shapes) > 1:
            raise ConfigError("all policies must share one shape")
        self.blocks = blocks

    @classmethod
    def from_policies(cls, policies: Sequence) -> "PolicySequence":
        return cls([(p, 1) for p in policies])

    @property
    def T(self) -> int:
        return sum(n for _, n in self.blocks)

    def __len__(self) -> int:
        return self.T

    def block_index(self) -> np.ndarray:
        """Block id of every round, shape ``(T,)``."""
        return np.repeat(np.arange(len(self.blocks)), [n for _, n in self.blocks])

    def stacked(self) -> np.ndarray:
        return np.stack([m for m, _ in self.blocks])

    def policy_at(self, t: int) -> np.ndarray:
        for m, n in self.blocks:
            if t < n:
                return m
            t -= n
        raise IndexError("round outside the sequence")

    def policies(self) -> list:
        return [m for m, n in self.blocks for _ in range(n)]


def mixture_policy(seq: PolicySequence) -> np.ndarray:
    """Average of the per-round policies, ``pi(a|x) = (1/T) sum_t pi_t(a|x)``."""
    if seq.T < 1:
        raise ConfigError("policy sequence is empty")
    total = sum(n * m for m, n in seq.blocks)
    return total / seq.T


def regret(pi: np.ndarray, pi_hat: np.ndarray) -> np.ndarray:
    """Per-context ``max_a (pi(a|x) - pi_hat(a|x))**2``."""
    return np.max((np.asarray(pi) - np.asarray(pi_hat)) ** 2, axis=1)


class RegretProfile(NamedTuple):
    reg: dict


def regret_profile(world: SyntheticWorld, pi, pi_hat) -> RegretProfile:
    return RegretProfile(dict(zip(world.contexts, regret(pi, pi_hat).tolist())))


# --------------------------------------------------------------------------
# adapters between world indices and id-keyed objects

def policy_actions(world: SyntheticWorld, h) -> np.ndarray:
    """Action index chosen in every context, ``-1`` where ``h`` abstains.

    ``h`` may be an index array, a mapping ``context_id -> action_id`` or a
    policy callable taking a :class:`LoggedEvent`.
    """
    if isinstance(h, Mapping):
        chosen = [h.get(x) for x in world.contexts]
    elif callable(h):
        chosen = [h(LoggedEvent(x, "", 0.0, world.context_features[x])) for x in world.contexts]
    else:
        idx = np.asarray(h, dtype=int)
        if idx.shape != (world.n_contexts,):
            raise ConfigError("policy index array must have one entry per context")
        return idx
    pos = {a: i for i, a in enumerate(world.actions)}
    return np.array([pos[a] if a is not None else -1 for a in chosen], dtype=int)


def propensity_matrix(world: SyntheticWorld, table) -> np.ndarray:
    """Dense ``pi_hat`` from any object with ``prob(x, a)``."""
    return np.array([[table.prob(x, a) for a in world.actions] for x in world.contexts])


def _as_mixture(world, seq) -> np.ndarray:
    pi = mixture_policy(seq) if isinstance(seq, PolicySequence) else np.asarray(seq, dtype=float)
    return _check_stochastic(pi, (world.n_contexts, world.n_actions))


def _as_pi_hat(world, pi_hat) -> np.ndarray:
    if hasattr(pi_hat, "prob"):
        return propensity_matrix(world, pi_hat)
    m = np.asarray(pi_hat, dtype=float)
    if m.shape != (world.n_contexts, world.n_actions):
        raise ConfigError("pi_hat shape mismatch")
    return m


# --------------------------------------------------------------------------
# exact quantities

def exact_policy_value(world: SyntheticWorld, h) -> float:
    """``sum_x P(x) * rbar(x, h(x))``; abstentions earn 0."""
    idx = policy_actions(world, h)
    return math.fsum(float(p) * (world.reward_means[i, a] if a >= 0 else 0.0)
                     for i, (p, a) in enumerate(zip(world.context_probs, idx)))


def exact_estimator_expectation(world: SyntheticWorld, seq, h, pi_hat, tau: float) -> float:
    """Expected estimator value computed through the averaged logging policy.

    ``E_x sum_a pi(a|x) rbar(x, a) I(h(x) = a) / max(pi_hat(a|x), tau)``.
    ``seq`` is a :class:`PolicySequence` or an already averaged matrix.
    """
    pi = _as_mixture(world, seq)
    ph = _as_pi_hat(world, pi_hat)
    idx = policy_actions(world, h)
    terms = []
    for i, a in enumerate(idx):
        if a < 0:
            continue
        terms.append(float(world.context_probs[i]) * pi[i, a] * world.reward_means[i, a]
                     / max(ph[i, a], tau))
    return math.fsum(terms)


def exact_random_expectation(world: SyntheticWorld, seq, pi_hat, tau: float) -> float:
    """Expected estimator value of the policy uniform over ``{a : pi_hat(a|x) > 0}``."""
    pi = _as_mixture(world, seq)
    ph = _as_pi_hat(world, pi_hat)
    terms = []
    for i in range(world.n_contexts):
        feasible = np.flatnonzero(ph[i] > 0)
        for a in feasible:
            terms.append(float(world.context_probs[i]) * pi[i, a] * world.reward_means[i, a]
                         / (len(feasible) * max(ph[i, a], tau)))
    return math.fsum(terms)


def _round_outcomes(world: SyntheticWorld, policy: np.ndarray) -> list:
    """Nonzero-probability ``(prob, x, a, r)`` outcomes of a single round."""
    out = []
    for x in range(world.n_contexts):
        px = float(world.context_probs[x])
        if px == 0.0:
            continue
        for a in range(world.n_actions):
            pa = float(policy[x, a])
            if pa == 0.0:
                continue
            mean = float(world.reward_means[x, a])
            if world.reward_kind == DETERMINISTIC:
                out.append((px * pa, x, a, mean))
            else:
                if mean > 0.0:
                    out.append((px * pa * mean, x, a, 1.0))
                if mean < 1.0:
                    out.append((px * pa * (1.0 - mean), x, a, 0.0))
    return out


def enumerate_estimator_mean(world: SyntheticWorld, seq: PolicySequence, h, pi_hat, tau: float,
                             limit: int = ENUMERATION_LIMIT) -> float:
    """Exact mean of the estimator by summing over every possible log.

    Each round ``t`` draws a context, an action from ``pi_t`` and (for
    Bernoulli worlds) a 0/1 reward; zero-probability branches are pruned.
    Raises :class:`CapacityError` when more than ``limit`` logs remain.
    """
    T = seq.T
    if T < 1:
        raise ConfigError("policy sequence is empty")
    ph = _as_pi_hat(world, pi_hat)
    idx = policy_actions(world, h)
    per_round = [_round_outcomes(world, m) for m in seq.policies()]
    size = 1
    for outcomes in per_round:
        size *= len(outcomes)
        if size > limit:
            raise CapacityError(f"enumeration needs more than {limit} logs")
    terms = []
    for log in itertools.product(*per_round):
        p = 1.0
        value = 0.0
        for prob, x, a, r in log:
            p *= prob
            if idx[x] == a:
                value += r / max(ph[x, a], tau)
        terms.append(p * value / T)
    return math.fsum(terms)


class Lemma1Result(NamedTuple):
    lower: float
    upper: float
    mean: float
    ok: bool


def lemma1_bounds(world: SyntheticWorld, pi, pi_hat, tau: float, h, tol: float = 1e-12) -> Lemma1Result:
    """Bias sandwich for the clipped estimator under propensity error.

    With ``reg(x) = max_a (pi - pi_hat)**2`` and ``S(x) = I(pi(h(x)|x) >= tau)``::

        E_x[S(x) * (V(x) - sqrt(reg(x)) / tau)] <= E[V_hat] <= V + E_x[S(x) * sqrt(reg(x)) / tau]

    ``ok`` reports whether the exact mean lies inside, allowing ``tol`` of
    floating-point slack.
    """
    pi = _as_mixture(world, pi)
    ph = _as_pi_hat(world, pi_hat)
    idx = policy_actions(world, h)
    root_reg = np.sqrt(regret(pi, ph))
    lower_terms, upper_terms = [], []
    for i, a in enumerate(idx):
        p = float(world.context_probs[i])
        v = world.reward_means[i, a] if a >= 0 else 0.0
        supported = a >= 0 and pi[i, a] >= tau
        if supported:
            lower_terms.append(p * (v - root_reg[i] / tau))
            upper_terms.append(p * root_reg[i] / tau)
    mean = exact_estimator_expectation(world, pi, idx, ph, tau)
    lower = math.fsum(lower_terms)
    upper = exact_policy_value(world, idx) + math.fsum(upper_terms)
    return Lemma1Result(lower, upper, mean, lower - tol <= mean <= upper + tol)


def corollary1_radius(world: SyntheticWorld, pi, pi_hat, tau: float) -> float:
    """``sqrt(E_x reg(x)) / tau``."""
    reg = regret(_as_mixture(world, pi), _as_pi_hat(world, pi_hat))
    return math.sqrt(float(np.dot(world.context_probs, reg))) / tau


def hoeffding_radius(T: int, tau: float, delta: float) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * T)) / tau


# --------------------------------------------------------------------------
# sampling

def log_events(world: SyntheticWorld, seq: PolicySequence, seed) -> Dataset:
    """Simulate the logging process; the result depends only on ``seed``.

    Draw order: all contexts, then one uniform per round for the action, then
    (Bernoulli worlds) one uniform per round for the reward.
    """
    x, a, r = _sample_logs(world, seq, np.random.default_rng(seed), 1)
    xf, af = world.context_features, world.action_features
    events = [LoggedEvent(world.contexts[xi], world.actions[ai], float(ri),
                          xf[world.contexts[xi]], af[world.actions[ai]])
              for xi, ai, ri in zip(x[0].tolist(), a[0].tolist(), r[0].tolist())]
    return Dataset(tuple(events))


def _sample_logs(world: SyntheticWorld, seq: PolicySequence, rng: np.random.Generator, trials: int):
    T = seq.T
    if T < 1:
        raise ConfigError("policy sequence is empty")
    x = rng.choice(world.n_contexts, size=(trials, T), p=world.context_probs)
    rows = seq.stacked()[seq.block_index()[None, :], x]          # (trials, T, A)
    cdf = np.cumsum(rows, axis=-1)
    u = rng.random((trials, T, 1))
    a = np.minimum((u >= cdf).sum(axis=-1), world.n_actions - 1)
    # skip zero-probability actions that a rounding tail could select
    bad = np.take_along_axis(rows, a[..., None], axis=-1)[..., 0] == 0
    if np.any(bad):
        a[bad] = np.argmax(rows[bad] > 0, axis=-1)
    means = world.reward_means[x, a]
    if world.reward_kind == DETERMINISTIC:
        r = means
    else:
        r = (rng.random((trials, T)) < means).astype(float)
    return x, a, r


def simulate_estimates(world, seq, h, pi_hat, tau: float, trials: int, seed) -> np.ndarray:
    """Estimator value on ``trials`` independently simulated logs."""
    ph = _as_pi_hat(world, pi_hat)
    idx = policy_actions(world, h)
    x, a, r = _sample_logs(world, seq, np.random.default_rng(seed), trials)
    match = idx[x] == a
    terms = np.where(match, r / np.maximum(ph[x, a], tau), 0.0)
    return terms.mean(axis=1)


def hoeffding_check(world, seq, h, pi_hat, tau: float, delta: float, trials: int, seed=0) -> float:
    """Fraction of simulated logs deviating from the exact mean by more than the Hoeffding radius."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    mean = exact_estimator_expectation(world, seq, h, pi_hat, tau)
    est = simulate_estimates(world, seq, h, pi_hat, tau, trials, seed)
    return float(np.mean(np.abs(est - mean) > hoeffding_radius(seq.T, tau, delta)))


def interval_coverage(world, seq, h, pi_hat, tau: float, delta: float, trials: int, seed=0) -> float:
    """Fraction of simulated logs whose Chernoff interval contains the exact mean."""
    mean = exact_estimator_expectation(world, seq, h, pi_hat, tau)
    est = simulate_estimates(world, seq, h, pi_hat, tau, trials, seed)
    hits = 0
    for v in est.tolist():
        lo, hi = confidence_interval(min(v, 1.0 / tau), seq.T, tau, delta)
        hits += lo <= mean <= hi
    return hits / trials


# --------------------------------------------------------------------------
# random instances

def random_stochastic(rng: np.random.Generator, rows: int, cols: int, zero_prob: float = 0.0) -> np.ndarray:
    """Rows of normalized uniforms; entries are zeroed with ``zero_prob`` (one always survives)."""
    m = rng.random((rows, cols))
    if zero_prob > 0:
        keep = rng.random((rows, cols)) >= zero_prob
        keep[np.arange(rows), rng.integers(cols, size=rows)] = True
        m = m * keep
    return m / m.sum(axis=1, keepdims=True)


class Instance(NamedTuple):
    world: SyntheticWorld
    seq: PolicySequence
    h: np.ndarray
    pi_hat: np.ndarray
    tau: float
    seed: int


def random_instance(seed: int, n_contexts: int = 3, n_actions: int = 3, T: int = 3,
                    reward_kind: str = DETERMINISTIC, zero_prob: float = 0.3,
                    deterministic_logging: bool = False, tau_range=(0.05, 0.6)) -> Instance:
    """Reproducible small world, logging sequence, target policy and propensity guess."""
    rng = np.random.default_rng(seed)
    probs = random_stochastic(rng, 1, n_contexts)[0]
    probs[-1] = 1.0 - probs[:-1].sum()
    world = SyntheticWorld([f"x{i}" for i in range(n_contexts)], probs,
                           [f"a{j}" for j in range(n_actions)],
                           rng.random((n_contexts, n_actions)), reward_kind)
    if deterministic_logging:
        pols = [np.eye(n_actions)[rng.integers(n_actions, size=n_contexts)] for _ in range(T)]
    else:
        pols = [random_stochastic(rng, n_contexts, n_actions, zero_prob) for _ in range(T)]
    seq = PolicySequence.from_policies(pols)
    h = rng.integers(n_actions, size=n_contexts)
    pi_hat = random_stochastic(rng, n_contexts, n_actions, zero_prob)
    tau = float(rng.uniform(*tau_range))
    return Instance(world, seq, h, pi_hat, tau, seed)


# --------------------------------------------------------------------------
# files

def _sections(lines):
    name, body = None, []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            if name is not None:
                yield name, body
            name, body = s[1:-1].strip(), []
        elif name is None:
            raise FormatError("content before the first [section]", lineno)
        else:
            body.append((lineno, line))
    if name is not None:
        yield name, body


def _floats(tokens, lineno) -> list:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise FormatError(f"expected numbers, got {tokens!r}", lineno) from None


def parse_world(lines) -> SyntheticWorld:
    """Parse a world file.

    Sections: ``[contexts]`` rows ``id TAB prob [TAB features]``;
    ``[actions]`` rows ``id [TAB features]``; ``[rewards]`` rows
    ``context_id TAB mean mean ...`` in action order; ``[kind]`` one of
    ``deterministic`` / ``bernoulli``.
    """
    contexts, probs, cfeat, actions, afeat, rewards, kind = [], [], {}, [], {}, {}, DETERMINISTIC
    for name, body in _sections(lines):
        for lineno, line in body:
            fields = line.split("\t")
            if name == "contexts":
                if len(fields) not in (2, 3):
                    raise FormatError("context row is 'id TAB prob [TAB features]'", lineno)
                contexts.append(fields[0])
                probs.append(_floats([fields[1]], lineno)[0])
                if len(fields) == 3:
                    cfeat[fields[0]] = parse_features(fields[2], lineno)
            elif name == "actions":
                actions.append(fields[0])
                if len(fields) > 1:
                    afeat[fields[0]] = parse_features(fields[1], lineno)
            elif name == "rewards":
                if len(fields) != 2:
                    raise FormatError("reward row is 'context_id TAB values'", lineno)
                rewards[fields[0]] = _floats(fields[1].split(), lineno)
            elif name == "kind":
                kind = line.strip()
            else:
                raise FormatError(f"unknown section [{name}]", lineno)
    try:
        matrix = [rewards[x] for x in contexts]
    except KeyError as exc:
        raise FormatError(f"missing reward row for context {exc}") from None
    try:
        return SyntheticWorld(contexts, probs, actions, matrix, kind, cfeat, afeat)
    except ConfigError as exc:
        raise FormatError(str(exc)) from None


def format_world(world: SyntheticWorld) -> str:
    out = ["[contexts]"]
    for x, p in zip(world.contexts, world.context_probs.tolist()):
        _check_key(x, "context id")
        out.append(f"{x}\t{p!r}\t{format_features(world.context_features[x])}")
    out.append("[actions]")
    for a in world.actions:
        _check_key(a, "action id")
        out.append(f"{a}\t{format_features(world.action_features[a])}")
    out.append("[rewards]")
    for x, row in zip(world.contexts, world.reward_means.tolist()):
        out.append(f"{x}\t" + " ".join(repr(v) for v in row))
    out += ["[kind]", world.reward_kind]
    return "\n".join(out) + "\n"


def parse_sequence(lines, world: SyntheticWorld) -> PolicySequence:
    """Parse a policy-sequence file: ``[policy]`` or ``[policy repeat=N]`` sections.

    Each section has one row per context: ``context_id TAB p p ...`` in
    action order.
    """
    blocks = []
    pos = {x: i for i, x in enumerate(world.contexts)}
    for name, body in _sections(lines):
        head, *opts = name.split()
        if head != "policy":
            raise FormatError(f"unknown section [{name}]")
        repeat = 1
        for opt in opts:
            key, _, value = opt.partition("=")
            if key != "repeat":
                raise FormatError(f"unknown policy option {opt!r}")
            try:
                repeat = int(value)
            except ValueError:
                raise FormatError(f"bad repeat count {value!r}") from None
        m = np.full((world.n_contexts, world.n_actions), np.nan)
        for lineno, line in body:
            x, sep, values = line.partition("\t")
            if not sep or x not in pos:
                raise FormatError(f"unknown context row {x!r}", lineno)
            row = _floats(values.split(), lineno)
            if len(row) != world.n_actions:
                raise FormatError("row length differs from the number of actions", lineno)
            m[pos[x]] = row
        if np.isnan(m).any():
            raise FormatError(f"[{name}] lacks a row for some context")
        blocks.append((m, repeat))
    try:
        return PolicySequence(blocks)
    except ConfigError as exc:
        raise FormatError(str(exc)) from None


def format_sequence(seq: PolicySequence, world: SyntheticWorld) -> str:
    out = []
    for m, n in seq.blocks:
        out.append("[policy]" if n == 1 else f"[policy repeat={n}]")
        for x, row in zip(world.contexts, m.tolist()):
            out.append(f"{x}\t" + " ".join(repr(v) for v in row))
    return "\n".join(out) + "\n"


def cycle_sequence(seq: PolicySequence, rounds: int) -> PolicySequence:
    """Truncate or cyclically extend ``seq`` to exactly ``rounds`` rounds."""
    if rounds < 1:
        raise ConfigError("rounds must be >= 1")
    if seq.T < 1:
        raise ConfigError("policy sequence is empty")
    blocks, left = [], rounds
    while left > 0:
        for m, n in seq.blocks:
            take = min(n, left)
            blocks.append((m, take))
            left -= take
            if left == 0:
                break
    return PolicySequence(blocks)


def shipped_paths() -> tuple:
    """Paths of the bundled warm-start world and logging-cycle files."""
    root = resources.files("warmstart") / "data"
    return root / "warmstart_world.txt", root / "warmstart_sequence.txt"


def load_shipped(rounds: int = SHIPPED_ROUNDS) -> tuple:
    """The bundled 5-page, 6-ad world and its logging sequence cycled to ``rounds``."""
    wpath, spath = shipped_paths()
    world = parse_world(wpath.read_text(encoding="utf-8").splitlines())
    seq = parse_sequence(spath.read_text(encoding="utf-8").splitlines(), world)
    return world, cycle_sequence(seq, rounds)


def read_world(path) -> SyntheticWorld:
    with open(path, encoding="utf-8") as fh:
        return parse_world(fh)


def read_sequence(path, world: SyntheticWorld) -> PolicySequence:
    with open(path, encoding="utf-8") as fh:
        return parse_sequence(fh, world)


def write_world(path, world: SyntheticWorld) -> None:
    atomic_write(path, format_world(world))


def write_sequence(path, seq: PolicySequence, world: SyntheticWorld) -> None:
    atomic_write(path, format_sequence(seq, world))
