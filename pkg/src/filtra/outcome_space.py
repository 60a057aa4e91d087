"""Finite outcome spaces of event paths, events as subsets, probability
measures and seeded path sampling.

An outcome space enumerates every length-T sequence over a finite symbol
alphabet. Paths are indexed lexicographically by declared symbol order, so
index 0 is the all-first-symbol path and the indexing is stable across runs.
Events are stored as bitmasks over path indices, which keeps set algebra
cheap even for large spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, SpaceMismatchError, ValidationError

# Hard stop against accidental exponential blowups (|alphabet|**T paths).
DEFAULT_PATH_CAP = 2 ** 24

# Probability mass must balance to this precision.
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class OutcomeSpace:
    """All length-``horizon`` symbol sequences over ``alphabet``."""

    horizon: int
    alphabet: tuple[str, ...]

    def __post_init__(self):
        if self.horizon < 0:
            raise ValidationError(f"horizon must be >= 0, got {self.horizon}")
        if not self.alphabet:
            raise ValidationError("alphabet must be nonempty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError(f"alphabet symbols must be distinct: {self.alphabet}")
        for sym in self.alphabet:
            if not isinstance(sym, str) or len(sym) != 1:
                raise ValidationError(
                    f"alphabet symbols must be single characters, got {sym!r}")

    @property
    def n_paths(self) -> int:
        return len(self.alphabet) ** self.horizon

    def symbol_index(self, symbol: str) -> int:
        try:
            return self.alphabet.index(symbol)
        except ValueError:
            raise ValidationError(
                f"unknown symbol {symbol!r}, alphabet is {self.alphabet}") from None

    def path_symbols(self, index: int) -> tuple[str, ...]:
        """Symbols of the path at ``index``, first step first."""
        if not 0 <= index < self.n_paths:
            raise ValidationError(f"path index {index} out of range")
        base = len(self.alphabet)
        digits = []
        for _ in range(self.horizon):
            index, digit = divmod(index, base)
            digits.append(self.alphabet[digit])
        return tuple(reversed(digits))

    def path_string(self, index: int) -> str:
        return "".join(self.path_symbols(index))

    def index_of(self, symbols: Iterable[str]) -> int:
        """Inverse of :meth:`path_symbols`."""
        symbols = tuple(symbols)
        if len(symbols) != self.horizon:
            raise ValidationError(
                f"expected {self.horizon} symbols, got {len(symbols)}")
        base = len(self.alphabet)
        index = 0
        for sym in symbols:
            index = index * base + self.symbol_index(sym)
        return index

    def path_strings(self) -> list[str]:
        return [self.path_string(i) for i in range(self.n_paths)]

    @property
    def full_mask(self) -> int:
        return (1 << self.n_paths) - 1


def build_space(horizon: int, alphabet: Sequence[str],
                cap: int = DEFAULT_PATH_CAP) -> OutcomeSpace:
    """Enumerate all ``len(alphabet)**horizon`` paths as an outcome space."""
    space = OutcomeSpace(horizon=horizon, alphabet=tuple(alphabet))
    if space.n_paths > cap:
        raise CapacityError(
            f"{len(alphabet)}**{horizon} = {space.n_paths} paths exceeds cap {cap}")
    return space


def _require_same_space(a, b):
    if a.space != b.space:
        raise SpaceMismatchError(
            f"values live on different spaces: {a.space} vs {b.space}")


def mask_from_bools(bools: np.ndarray) -> int:
    """Pack a boolean vector (index order) into an event bitmask."""
    packed = np.packbits(bools.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


@dataclass(frozen=True)
class Event:
    """A subset of an outcome space, stored as a bitmask over path indices."""

    space: OutcomeSpace
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.space.n_paths:
            raise ValidationError("event mask has bits outside the space")

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, index: int) -> bool:
        return bool((self.mask >> index) & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    def indices(self) -> list[int]:
        return np.flatnonzero(self.to_bools()).tolist()

    def to_bools(self) -> np.ndarray:
        """Boolean membership vector aligned to path index order."""
        n = self.space.n_paths
        raw = self.mask.to_bytes((n + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return bits[:n].astype(bool)

    def path_strings(self) -> list[str]:
        return [self.space.path_string(i) for i in self.indices()]

    def to_jsonable(self) -> list[str]:
        return sorted(self.path_strings())

    @classmethod
    def from_indices(cls, space: OutcomeSpace, indices: Iterable[int]) -> "Event":
        mask = 0
        for i in indices:
            if not 0 <= i < space.n_paths:
                raise ValidationError(f"path index {i} out of range")
            mask |= 1 << i
        return cls(space, mask)

    @classmethod
    def from_strings(cls, space: OutcomeSpace, paths: Iterable[str]) -> "Event":
        return cls.from_indices(space, (space.index_of(tuple(p)) for p in paths))

    @classmethod
    def empty(cls, space: OutcomeSpace) -> "Event":
        return cls(space, 0)

    @classmethod
    def full(cls, space: OutcomeSpace) -> "Event":
        return cls(space, space.full_mask)

    def __or__(self, other: "Event") -> "Event":
        _require_same_space(self, other)
        return Event(self.space, self.mask | other.mask)

    def __and__(self, other: "Event") -> "Event":
        _require_same_space(self, other)
        return Event(self.space, self.mask & other.mask)

    def __invert__(self) -> "Event":
        return Event(self.space, self.space.full_mask ^ self.mask)

    def issubset(self, other: "Event") -> bool:
        _require_same_space(self, other)
        return self.mask & ~other.mask == 0

    def __repr__(self):
        if len(self) <= 16:
            return "{" + ",".join(self.path_strings()) + "}"
        return f"Event(<{len(self)} paths>)"


def event_from_prefix(space: OutcomeSpace, prefix: Sequence[str]) -> Event:
    """All paths whose first ``len(prefix)`` symbols equal ``prefix``.

    Lexicographic indexing makes every prefix cylinder a contiguous index
    block, so the mask is a shifted run of ones.
    """
    prefix = tuple(prefix)
    if len(prefix) > space.horizon:
        raise ValidationError(
            f"prefix of length {len(prefix)} exceeds horizon {space.horizon}")
    base = len(space.alphabet)
    start = 0
    for sym in prefix:
        start = start * base + space.symbol_index(sym)
    block = base ** (space.horizon - len(prefix))
    return Event(space, ((1 << block) - 1) << (start * block))


def complement(e: Event) -> Event:
    """Complement relative to the full space."""
    return ~e


def union(a: Event, b: Event) -> Event:
    return a | b


def intersect(a: Event, b: Event) -> Event:
    return a & b


@dataclass(frozen=True, eq=False)
class ProbabilityMeasure:
    """Probability assignment over the paths of one outcome space.

    Either form (or both, if they agree) may be given:

    * ``step_probs``: one distribution over the alphabet per time step;
      path weights are the per-step products (product measure).
    * ``weights``: an explicit weight per path index.
    """

    space: OutcomeSpace
    step_probs: tuple[tuple[float, ...], ...] | None = None
    weights: tuple[float, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.step_probs is None and self.weights is None:
            raise ValidationError("measure needs step_probs or weights")
        if self.step_probs is not None:
            if len(self.step_probs) != self.space.horizon:
                raise ValidationError(
                    f"need {self.space.horizon} step distributions, "
                    f"got {len(self.step_probs)}")
            for t, dist in enumerate(self.step_probs):
                if len(dist) != len(self.space.alphabet):
                    raise ValidationError(
                        f"step {t} distribution has {len(dist)} entries for "
                        f"{len(self.space.alphabet)} symbols")
                if any(p < 0 for p in dist):
                    raise ValidationError(f"step {t} has a negative probability")
                if abs(math.fsum(dist) - 1.0) > WEIGHT_TOL:
                    raise ValidationError(
                        f"step {t} probabilities sum to {math.fsum(dist)}, not 1")
        if self.weights is not None:
            if len(self.weights) != self.space.n_paths:
                raise ValidationError(
                    f"need {self.space.n_paths} weights, got {len(self.weights)}")
            if any(w < 0 for w in self.weights):
                raise ValidationError("negative path weight")
            if abs(math.fsum(self.weights) - 1.0) > WEIGHT_TOL:
                raise ValidationError(
                    f"weights sum to {math.fsum(self.weights)}, not 1")
        if self.step_probs is not None and self.weights is not None:
            if not np.allclose(self.weight_vector,
                               np.asarray(self.weights), atol=WEIGHT_TOL, rtol=0):
                raise ValidationError("step_probs and weights disagree")

    @cached_property
    def weight_vector(self) -> np.ndarray:
        """Per-path weights in index order (read-only float64)."""
        if self.step_probs is not None:
            vec = np.ones(1)
            for dist in self.step_probs:
                vec = np.kron(vec, np.asarray(dist, dtype=float))
        else:
            vec = np.asarray(self.weights, dtype=float)
        vec.setflags(write=False)
        return vec

    @classmethod
    def uniform(cls, space: OutcomeSpace) -> "ProbabilityMeasure":
        k = len(space.alphabet)
        dist = tuple(1.0 / k for _ in range(k))
        return cls(space, step_probs=tuple(dist for _ in range(space.horizon)))

    @classmethod
    def iid(cls, space: OutcomeSpace,
            symbol_probs: Sequence[float]) -> "ProbabilityMeasure":
        dist = tuple(float(p) for p in symbol_probs)
        return cls(space, step_probs=tuple(dist for _ in range(space.horizon)))

    @classmethod
    def from_weights(cls, space: OutcomeSpace,
                     weights: Sequence[float]) -> "ProbabilityMeasure":
        return cls(space, weights=tuple(float(w) for w in weights))

    def to_jsonable(self) -> dict:
        if self.step_probs is not None:
            return {"step_probabilities": [list(d) for d in self.step_probs]}
        return {"weights": list(self.weights)}

    @classmethod
    def from_jsonable(cls, space: OutcomeSpace, data: dict) -> "ProbabilityMeasure":
        if "step_probabilities" in data:
            return cls(space, step_probs=tuple(
                tuple(float(p) for p in d) for d in data["step_probabilities"]))
        if "weights" in data:
            return cls.from_weights(space, data["weights"])
        raise ValidationError("measure JSON needs step_probabilities or weights")


def probability(measure: ProbabilityMeasure, e: Event) -> float:
    """Total weight of the event's paths."""
    if measure.space != e.space:
        raise SpaceMismatchError("event and measure live on different spaces")
    if not e:
        return 0.0
    if e.mask == e.space.full_mask:
        return 1.0
    return float(measure.weight_vector[e.to_bools()].sum())


def sample_paths(measure: ProbabilityMeasure, n: int,
                 seed: int) -> np.ndarray:
    """Draw ``n`` path indices, reproducibly for a given seed."""
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if measure.step_probs is not None:
        base = len(measure.space.alphabet)
        idx = np.zeros(n, dtype=np.int64)
        for dist in measure.step_probs:
            cum = np.cumsum(np.asarray(dist, dtype=float))
            digits = np.searchsorted(cum, rng.random(n), side="right")
            idx = idx * base + np.minimum(digits, base - 1)
        return idx
    cum = np.cumsum(measure.weight_vector)
    idx = np.searchsorted(cum, rng.random(n), side="right")
    return np.minimum(idx, measure.space.n_paths - 1).astype(np.int64)


def sample_path(measure: ProbabilityMeasure, seed: int) -> int:
    """Draw one path index; deterministic for a given seed."""
    return int(sample_paths(measure, 1, seed)[0])
