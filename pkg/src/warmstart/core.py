"""Domain types, sparse-vector arithmetic, feature crossing and the events file format.

Feature ids are unsigned 64-bit integers.  String tokens are mapped to ids with
64-bit FNV-1a over their UTF-8 bytes; crossed ids are produced by
:func:`mix_ids`, a splitmix64-based mixer.  Both are pure integer arithmetic,
so ids written to disk are identical on every platform and run.
"""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import ConfigError, FormatError

MASK64 = (1 << 64) - 1
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
CROSS_SALT = 0x9E3779B97F4A7C15

SPLIT_MARKER = "#split"


def hash_token(token: str) -> int:
    """64-bit FNV-1a hash of ``token`` encoded as UTF-8."""
    h = FNV_OFFSET
    for byte in token.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def splitmix64(x: int) -> int:
    """The splitmix64 finalizer: a bijection on 64-bit integers."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix_ids(page_id: int, ad_id: int) -> int:
    """Id of the crossed feature (page_id, ad_id).

    ``splitmix64(page_id ^ splitmix64(ad_id ^ CROSS_SALT))``.  The mix is
    ordered, so ``mix_ids(a, b) != mix_ids(b, a)`` in general.
    """
    return splitmix64((page_id & MASK64) ^ splitmix64((ad_id & MASK64) ^ CROSS_SALT))


@dataclass(frozen=True)
class SparseVector:
    """Canonical sparse vector: strictly increasing ids, finite nonzero values.

    Build instances with :func:`canonicalize`; the constructor validates
    but does not reorder.
    """

    ids: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if len(self.ids) != len(self.values):
            raise FormatError("ids and values differ in length")
        prev = -1
        for i, v in zip(self.ids, self.values):
            if not 0 <= i <= MASK64:
                raise FormatError(f"feature id {i} outside 64-bit unsigned range")
            if i <= prev:
                raise FormatError("feature ids must be strictly increasing")
            if not math.isfinite(v):
                raise FormatError(f"non-finite value for feature {i}")
            prev = i

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[tuple]:
        return iter(zip(self.ids, self.values))

    @property
    def entries(self) -> list:
        return list(zip(self.ids, self.values))

    def __add__(self, other: "SparseVector") -> "SparseVector":
        return canonicalize(list(self) + list(other))


EMPTY = SparseVector()


def canonicalize(entries: Iterable[tuple]) -> SparseVector:
    """Sort by id, sum duplicate ids and drop zeros.

    >>> canonicalize([(7, 0.5), (3, 0.5)]).entries
    [(3, 0.5), (7, 0.5)]
    """
    acc: dict = {}
    for fid, value in entries:
        value = float(value)
        if not math.isfinite(value):
            raise FormatError(f"non-finite value for feature {fid}")
        fid = int(fid)
        if not 0 <= fid <= MASK64:
            raise FormatError(f"feature id {fid} outside 64-bit unsigned range")
        acc[fid] = acc.get(fid, 0.0) + value
    items = sorted((k, v) for k, v in acc.items() if v != 0.0)
    return SparseVector(tuple(k for k, _ in items), tuple(v for _, v in items))


def sparse_dot(weights: Mapping[int, float], f: SparseVector) -> float:
    """Sum of ``weights[id] * value`` over the entries of ``f``; absent weights are 0."""
    get = weights.get
    return sum(get(i, 0.0) * v for i, v in zip(f.ids, f.values))


def cross_features(page: SparseVector, ad: SparseVector) -> SparseVector:
    """Cartesian product of two sparse vectors.

    Each (page entry, ad entry) pair becomes one feature with id
    ``mix_ids(page_id, ad_id)`` and value ``page_value * ad_value``.
    Hash collisions are merged by summation.
    """
    return canonicalize(
        (mix_ids(pi, ai), pv * av)
        for pi, pv in zip(page.ids, page.values)
        for ai, av in zip(ad.ids, ad.values)
    )


@dataclass(frozen=True)
class LoggedEvent:
    """One logged interaction (context, chosen action, observed reward)."""

    context_id: str
    action_id: str
    reward: float
    context_features: SparseVector = EMPTY
    action_features: SparseVector = EMPTY

    def __post_init__(self):
        r = self.reward
        if not (math.isfinite(r) and 0.0 <= r <= 1.0):
            raise FormatError(f"reward {r!r} outside [0, 1]")


@dataclass(frozen=True)
class Dataset:
    """Ordered log of events.

    ``split`` is the index of the first test event when the log carries a
    train/test boundary, else ``None``.
    """

    events: tuple
    split: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if self.split is not None and not 0 <= self.split <= len(self.events):
            raise FormatError(f"split index {self.split} outside the log")

    @property
    def T(self) -> int:
        return len(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def train_part(self) -> "Dataset":
        """Events before the split marker (the whole log when unsplit)."""
        if self.split is None:
            return Dataset(self.events)
        return Dataset(self.events[: self.split])

    def test_part(self) -> "Dataset":
        """Events after the split marker (the whole log when unsplit)."""
        if self.split is None:
            return Dataset(self.events)
        return Dataset(self.events[self.split:])

    def action_catalog(self) -> dict:
        """First-seen action features for each logged action id."""
        catalog: dict = {}
        for e in self.events:
            catalog.setdefault(e.action_id, e.action_features)
        return catalog


@dataclass(frozen=True)
class EstimatorConfig:
    tau: float
    delta: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.tau <= 1.0):
            raise ConfigError(f"tau must lie in (0, 1], got {self.tau!r}")
        if not (0.0 < self.delta < 1.0):
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta!r}")


# --------------------------------------------------------------------------
# text formats

def _split_unquoted(text: str, sep: str) -> list:
    parts, buf, quoted = [], [], False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        if ch == sep and not quoted:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    if quoted:
        raise FormatError(f"unterminated quote in {text!r}")
    parts.append("".join(buf))
    return parts


def parse_features(text: str, line: Optional[int] = None) -> SparseVector:
    """Parse ``id:value,...``; ids are integers or ``"quoted tokens"`` to hash."""
    text = text.strip()
    if not text:
        return EMPTY
    entries = []
    for item in _split_unquoted(text, ","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.rpartition(":")
        if not sep:
            raise FormatError(f"feature {item!r} lacks ':value'", line)
        key = key.strip()
        if len(key) >= 2 and key[0] == '"' and key[-1] == '"':
            fid = hash_token(key[1:-1])
        else:
            try:
                fid = int(key)
            except ValueError:
                raise FormatError(f"bad feature id {key!r}", line) from None
        try:
            v = float(value)
        except ValueError:
            raise FormatError(f"bad feature value {value!r}", line) from None
        entries.append((fid, v))
    try:
        return canonicalize(entries)
    except FormatError as exc:
        raise FormatError(str(exc), line) from None


def format_features(f: SparseVector) -> str:
    return ",".join(f"{i}:{v!r}" for i, v in zip(f.ids, f.values))


def _check_key(key: str, what: str) -> None:
    if not key or any(c in key for c in "\t\r\n") or key.startswith("#"):
        raise FormatError(f"{what} {key!r} cannot be written to a TAB file")


def parse_events(lines: Iterable[str], catalog: Optional[Mapping[str, SparseVector]] = None) -> Dataset:
    """Parse events-file lines into a :class:`Dataset`.

    Blank lines and lines starting with ``#`` are skipped, except the
    ``#split`` marker which records the train/test boundary.  An empty
    action-features field is filled from ``catalog`` when given.
    """
    events = []
    split = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if line.strip() == SPLIT_MARKER:
                if split is not None:
                    raise FormatError("duplicate split marker", lineno)
                split = len(events)
            continue
        fields = line.split("\t")
        if len(fields) not in (4, 5):
            raise FormatError(f"expected 4 or 5 TAB-separated fields, got {len(fields)}", lineno)
        context_id, action_id, reward_text = fields[:3]
        try:
            reward = float(reward_text)
        except ValueError:
            raise FormatError(f"bad reward {reward_text!r}", lineno) from None
        xf = parse_features(fields[3], lineno)
        af = parse_features(fields[4], lineno) if len(fields) == 5 else EMPTY
        if not af and catalog is not None and action_id in catalog:
            af = catalog[action_id]
        try:
            events.append(LoggedEvent(context_id, action_id, reward, xf, af))
        except FormatError as exc:
            raise FormatError(str(exc), lineno) from None
    return Dataset(tuple(events), split)


def format_events(data: Dataset) -> Iterator[str]:
    """Inverse of :func:`parse_events`; floats use ``repr`` so round trips are exact."""
    for t, e in enumerate(data.events):
        if data.split == t:
            yield SPLIT_MARKER + "\n"
        _check_key(e.context_id, "context id")
        _check_key(e.action_id, "action id")
        yield (f"{e.context_id}\t{e.action_id}\t{e.reward!r}\t"
               f"{format_features(e.context_features)}\t{format_features(e.action_features)}\n")
    if data.split == len(data.events):
        yield SPLIT_MARKER + "\n"


def read_events(path, catalog=None) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_events(fh, catalog)


def write_events(path, data: Dataset) -> None:
    atomic_write(path, "".join(format_events(data)))


def read_catalog(path) -> dict:
    """Action catalog file: ``action_id TAB features`` per line."""
    catalog = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            action_id, sep, feats = line.partition("\t")
            if not sep:
                raise FormatError("expected 'action_id TAB features'", lineno)
            catalog[action_id] = parse_features(feats, lineno)
    return catalog


def write_catalog(path, catalog: Mapping[str, SparseVector]) -> None:
    lines = []
    for a in sorted(catalog):
        _check_key(a, "action id")
        lines.append(f"{a}\t{format_features(catalog[a])}\n")
    atomic_write(path, "".join(lines))


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def features_from_tokens(tokens: Mapping[str, float] | Sequence[tuple]) -> SparseVector:
    """Convenience: hash string tokens and canonicalize."""
    items = tokens.items() if isinstance(tokens, Mapping) else tokens
    return canonicalize((hash_token(k), v) for k, v in items)
