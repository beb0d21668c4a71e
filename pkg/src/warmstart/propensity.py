"""Empirical logging-policy estimate from action frequencies per context.

``prob(x, a) = #{t : x_t = x and a_t = a} / #{t : x_t = x}``.  Counts are kept
as integers; probabilities are computed on demand.  Contexts are identified by
their ``context_id`` string, never by feature vectors.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .core import Dataset, _check_key, atomic_write
from .errors import EstimationError, FormatError

TABLE_HEADER = "#context_id\taction_id\tpair_count\tcontext_count"


class FitScope(str, enum.Enum):
    """Which part of a split log the table is fitted on."""

    TRAIN = "train"
    SPLIT = "split"
    ALL = "all"


@dataclass
class PropensityTable:
    pair_counts: Counter = field(default_factory=Counter)
    context_counts: Counter = field(default_factory=Counter)
    _feasible: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # counters are treated as frozen once the table exists
        self._feasible = {}
        for (x, a), c in self.pair_counts.items():
            if c > 0:
                self._feasible.setdefault(x, set()).add(a)

    def prob(self, x: str, a: str) -> float:
        n = self.context_counts.get(x, 0)
        if n == 0:
            return 0.0
        return self.pair_counts.get((x, a), 0) / n

    def exact_prob(self, x: str, a: str) -> Fraction:
        n = self.context_counts.get(x, 0)
        return Fraction(self.pair_counts.get((x, a), 0), n) if n else Fraction(0)

    def feasible_set(self, x: str) -> frozenset:
        return frozenset(self._feasible.get(x, ()))

    def merge(self, other: "PropensityTable") -> "PropensityTable":
        """Associative, commutative combination of two tables."""
        return PropensityTable(self.pair_counts + other.pair_counts,
                               self.context_counts + other.context_counts)

    def contexts(self) -> list:
        return sorted(self.context_counts)


def fit_empirical(data: Dataset | Iterable) -> PropensityTable:
    """Count (context, action) pairs and contexts in a single pass."""
    events = data.events if isinstance(data, Dataset) else tuple(data)
    if not events:
        raise EstimationError("cannot fit a propensity table on an empty dataset")
    pairs, contexts = Counter(), Counter()
    for e in events:
        pairs[(e.context_id, e.action_id)] += 1
        contexts[e.context_id] += 1
    return PropensityTable(pairs, contexts)


def fit_scoped(data: Dataset, scope: FitScope | str = FitScope.ALL):
    """Fit according to ``scope``.

    ``all`` fits the whole log (the conservative default for evaluating new
    policies), ``train`` fits events before the split marker, and ``split``
    returns a ``(train_table, test_table)`` pair and requires a marker.
    """
    scope = FitScope(scope)
    if scope is FitScope.ALL:
        return fit_empirical(data)
    if scope is FitScope.TRAIN:
        return fit_empirical(data.train_part())
    if data.split is None:
        raise EstimationError("scope 'split' needs a #split marker in the events file")
    return fit_empirical(data.train_part()), fit_empirical(data.test_part())


def prob(table: PropensityTable, x: str, a: str) -> float:
    return table.prob(x, a)


def feasible_set(table: PropensityTable, x: str) -> frozenset:
    """Actions with positive estimated probability at ``x``; empty if ``x`` is unseen."""
    return table.feasible_set(x)


def format_table(table: PropensityTable) -> str:
    rows = [TABLE_HEADER + "\n"]
    for (x, a) in sorted(table.pair_counts):
        _check_key(x, "context id")
        _check_key(a, "action id")
        rows.append(f"{x}\t{a}\t{table.pair_counts[(x, a)]}\t{table.context_counts[x]}\n")
    return "".join(rows)


def write_table(path, table: PropensityTable) -> None:
    atomic_write(path, format_table(table))


def parse_table(lines: Iterable[str]) -> PropensityTable:
    pairs, contexts = Counter(), Counter()
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise FormatError(f"expected 4 fields, got {len(fields)}", lineno)
        x, a = fields[0], fields[1]
        try:
            pc, cc = int(fields[2]), int(fields[3])
        except ValueError:
            raise FormatError("counts must be integers", lineno) from None
        if pc < 0 or cc <= 0:
            raise FormatError("counts must be positive", lineno)
        if x in contexts and contexts[x] != cc:
            raise FormatError(f"inconsistent context_count for {x!r}", lineno)
        pairs[(x, a)] = pc
        contexts[x] = cc
    for x, n in contexts.items():
        total = sum(c for (cx, _), c in pairs.items() if cx == x)
        if total != n:
            raise FormatError(f"pair counts for {x!r} sum to {total}, expected {n}")
    return PropensityTable(pairs, contexts)


def read_table(path) -> PropensityTable:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh)
