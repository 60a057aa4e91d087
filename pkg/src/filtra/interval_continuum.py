"""Exact interval-set algebra on a bounded real universe, plus a
bounded-increment continuous random walk.

Interval sets are finite unions of disjoint, non-mergeable intervals with
explicit per-endpoint open/closed flags, kept in a unique canonical form so
set equality is piece-list equality. Endpoint comparisons are exact on the
stored floats; merging happens only on exact adjacency. Probability
estimates ignore the flags in effect, since single points carry no mass
under a continuous increment law.

Endpoint positions are modelled as (value, side) with side -1/0/+1 meaning
just-below / at / just-above the value, which makes closure-flag arithmetic
(complement, touching-merge, intersection emptiness) ordinary tuple
comparison.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import ValidationError

_BELOW, _AT, _ABOVE = -1, 0, 1


@dataclass(frozen=True)
class Piece:
    """One interval with per-endpoint closure flags."""

    lo: float
    lo_closed: bool
    hi: float
    hi_closed: bool

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError("endpoints must be finite")
        if self.start_pos > self.end_pos:
            raise ValidationError(f"empty or reversed interval {self}")

    @property
    def start_pos(self) -> tuple[float, int]:
        return (self.lo, _AT if self.lo_closed else _ABOVE)

    @property
    def end_pos(self) -> tuple[float, int]:
        return (self.hi, _AT if self.hi_closed else _BELOW)

    def contains(self, x: float) -> bool:
        return self.start_pos <= (x, _AT) <= self.end_pos

    def __str__(self):
        return (("[" if self.lo_closed else "(") + f"{self.lo:g},{self.hi:g}"
                + ("]" if self.hi_closed else ")"))

    def to_jsonable(self) -> dict:
        return {"lo": self.lo, "lo_closed": self.lo_closed,
                "hi": self.hi, "hi_closed": self.hi_closed}


def _piece_from_positions(start: tuple[float, int],
                          end: tuple[float, int]) -> Piece:
    # Start positions are at/above a value, end positions at/below one.
    return Piece(start[0], start[1] == _AT, end[0], end[1] == _AT)


def _touch_or_overlap(left_end: tuple[float, int],
                      right_start: tuple[float, int]) -> bool:
    # Mergeable iff the right piece starts at or before the position
    # immediately after the left piece ends.
    return right_start <= (left_end[0], left_end[1] + 1)


@dataclass(frozen=True)
class IntervalSet:
    """Canonical finite union of flagged intervals inside a closed universe."""

    universe: tuple[float, float]
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        lo, hi = self.universe
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValidationError(f"bad universe {self.universe}")
        prev = None
        for piece in self.pieces:
            if piece.start_pos < (lo, _AT) or piece.end_pos > (hi, _AT):
                raise ValidationError(f"piece {piece} outside universe {self.universe}")
            if prev is not None:
                if piece.start_pos < prev.start_pos:
                    raise ValidationError("pieces out of order; use from_pieces")
                if _touch_or_overlap(prev.end_pos, piece.start_pos):
                    raise ValidationError("pieces mergeable; use from_pieces")
            prev = piece

    @classmethod
    def from_pieces(cls, universe: tuple[float, float],
                    pieces: Iterable[Piece]) -> "IntervalSet":
        """Canonicalize: sort, merge overlapping or exactly touching pieces."""
        ordered = sorted(pieces, key=lambda p: (p.start_pos, p.end_pos))
        merged: list[Piece] = []
        for piece in ordered:
            if merged and _touch_or_overlap(merged[-1].end_pos, piece.start_pos):
                last = merged.pop()
                end = max(last.end_pos, piece.end_pos)
                merged.append(_piece_from_positions(last.start_pos, end))
            else:
                merged.append(piece)
        return cls((float(universe[0]), float(universe[1])), tuple(merged))

    @classmethod
    def empty(cls, universe: tuple[float, float]) -> "IntervalSet":
        return cls.from_pieces(universe, ())

    @classmethod
    def full(cls, universe: tuple[float, float]) -> "IntervalSet":
        lo, hi = universe
        return cls.from_pieces(universe, (Piece(lo, True, hi, True),))

    @classmethod
    def single(cls, universe: tuple[float, float], lo: float, lo_closed: bool,
               hi: float, hi_closed: bool) -> "IntervalSet":
        return cls.from_pieces(universe, (Piece(lo, lo_closed, hi, hi_closed),))

    def __bool__(self) -> bool:
        return bool(self.pieces)

    def __str__(self):
        if not self.pieces:
            return "<empty>"
        return " U ".join(str(p) for p in self.pieces)

    def to_jsonable(self) -> dict:
        return {"universe": list(self.universe),
                "pieces": [p.to_jsonable() for p in self.pieces]}

    @classmethod
    def from_jsonable(cls, data: dict) -> "IntervalSet":
        return cls.from_pieces(
            tuple(data["universe"]),
            (Piece(float(p["lo"]), bool(p["lo_closed"]),
                   float(p["hi"]), bool(p["hi_closed"]))
             for p in data["pieces"]))


def _require_same_universe(a: IntervalSet, b: IntervalSet):
    if a.universe != b.universe:
        raise ValidationError(
            f"universe mismatch: {a.universe} vs {b.universe}")


def interval_complement(s: IntervalSet) -> IntervalSet:
    """Exact complement within the universe; an excluded endpoint becomes
    included and vice versa."""
    lo, hi = s.universe
    gaps: list[Piece] = []
    cursor = (lo, _AT)
    for piece in s.pieces:
        gap_end = (piece.start_pos[0], piece.start_pos[1] - 1)
        if cursor <= gap_end:
            gaps.append(_piece_from_positions(cursor, gap_end))
        cursor = (piece.end_pos[0], piece.end_pos[1] + 1)
    if cursor <= (hi, _AT):
        gaps.append(_piece_from_positions(cursor, (hi, _AT)))
    return IntervalSet(s.universe, tuple(gaps))


def interval_union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    _require_same_universe(a, b)
    return IntervalSet.from_pieces(a.universe, a.pieces + b.pieces)


def interval_intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    _require_same_universe(a, b)
    out: list[Piece] = []
    for pa in a.pieces:
        for pb in b.pieces:
            start = max(pa.start_pos, pb.start_pos)
            end = min(pa.end_pos, pb.end_pos)
            if start <= end:
                out.append(_piece_from_positions(start, end))
    return IntervalSet.from_pieces(a.universe, out)


def interval_contains(s: IntervalSet, x: float) -> bool:
    """Membership with open endpoints excluded strictly."""
    return any(p.contains(x) for p in s.pieces)


_PIECE_RE = re.compile(
    r"^\s*([\[(])\s*([^,\s]+)\s*,\s*([^\])\s]+)\s*([\])])\s*$")


def parse_piece(text: str) -> Piece:
    """Parse one interval literal such as ``[330.3,331.9)``."""
    m = _PIECE_RE.match(text)
    if not m:
        raise ValidationError(f"cannot parse interval {text!r}")
    open_b, lo, hi, close_b = m.groups()
    try:
        return Piece(float(lo), open_b == "[", float(hi), close_b == "]")
    except ValueError as exc:
        raise ValidationError(f"cannot parse interval {text!r}: {exc}") from None


def parse_interval_set(universe: tuple[float, float], text: str) -> IntervalSet:
    """Parse a union of interval literals joined by ``+``."""
    return IntervalSet.from_pieces(
        universe, (parse_piece(part) for part in text.split("+")))


def limit_union_witness(a: float, b: float, x: float) -> int | None:
    """Smallest n >= 1 with a + 1/n <= x <= b - 1/n, or None when x is not
    strictly inside (a, b).

    Witnesses that the open interval is the increasing union of the closed
    intervals [a + 1/n, b - 1/n].
    """
    if a >= b:
        raise ValidationError(f"need a < b, got a={a}, b={b}")
    if not a < x < b:
        return None
    n = max(1, math.ceil(1.0 / (x - a)), math.ceil(1.0 / (b - x)))
    while not (a + 1.0 / n <= x <= b - 1.0 / n):
        n += 1
    while n > 1 and a + 1.0 / (n - 1) <= x <= b - 1.0 / (n - 1):
        n -= 1
    return n


@dataclass(frozen=True)
class ContinuousWalkModel:
    """Price walk whose per-step increment lies in [-d, u].

    The increment law defaults to uniform on [-d, u]; a custom sampler may
    be supplied but its draws must respect the bounds.
    """

    s0: float
    d: float
    u: float
    horizon: int
    sampler: Callable[[np.random.Generator, tuple[int, int]], np.ndarray] | None = None

    def __post_init__(self):
        if self.d <= 0 or self.u <= 0:
            raise ValidationError("increment bounds d and u must be positive")
        if self.horizon < 0:
            raise ValidationError("horizon must be >= 0")

    def sample_increments(self, rng: np.random.Generator,
                          n_paths: int, n_steps: int) -> np.ndarray:
        shape = (n_paths, n_steps)
        if self.sampler is None:
            incs = rng.uniform(-self.d, self.u, size=shape)
        else:
            incs = np.ascontiguousarray(self.sampler(rng, shape), dtype=float)
            if incs.shape != shape:
                raise ValidationError(
                    f"sampler returned shape {incs.shape}, expected {shape}")
            if incs.size and (incs.min() < -self.d or incs.max() > self.u):
                raise ValidationError(
                    f"sampler produced increments outside [-{self.d}, {self.u}]")
        return incs


def cone_bounds(model: ContinuousWalkModel, t: int) -> tuple[float, float]:
    """Reachable closed price band after t bounded steps."""
    if not 0 <= t <= model.horizon:
        raise ValidationError(f"t={t} outside horizon 0..{model.horizon}")
    return (model.s0 - t * model.d, model.s0 + t * model.u)


def estimate_event_probability(model: ContinuousWalkModel, t: int,
                               s: IntervalSet, n: int,
                               seed: int) -> tuple[float, float]:
    """Monte Carlo frequency of the time-t price lying in ``s``, with its
    binomial standard error; deterministic for a given seed."""
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    cone_lo, cone_hi = cone_bounds(model, t)
    if s.universe[0] > cone_lo or s.universe[1] < cone_hi:
        raise ValidationError(
            f"universe {s.universe} does not contain the reachable band "
            f"[{cone_lo}, {cone_hi}] at t={t}")
    rng = np.random.default_rng(seed)
    increments = model.sample_increments(rng, n, t)
    prices = _kernels.walk_prices_at(increments, model.s0, t)
    count = _kernels.count_in_pieces(
        prices,
        np.array([p.lo for p in s.pieces]),
        np.array([p.lo_closed for p in s.pieces], dtype=np.uint8),
        np.array([p.hi for p in s.pieces]),
        np.array([p.hi_closed for p in s.pieces], dtype=np.uint8))
    estimate = count / n
    stderr = math.sqrt(estimate * (1.0 - estimate) / n)
    return estimate, stderr


@dataclass(frozen=True)
class FigureData:
    """One simulated path against its reachability cone, plus event sets
    with membership flags; enough to regenerate a path-and-events plot."""

    path_rows: tuple[tuple[int, float, float, float], ...]
    event_rows: tuple[tuple[int, IntervalSet, bool], ...]

    def to_csv(self) -> str:
        lines = ["t,price,cone_low,cone_high"]
        for t, price, lo, hi in self.path_rows:
            lines.append(f"{t},{price!r},{lo!r},{hi!r}")
        for t, s, member in self.event_rows:
            lines.append("")
            lines.append("event_t,piece,lo,lo_closed,hi,hi_closed,member")
            for i, p in enumerate(s.pieces):
                lines.append(f"{t},{i},{p.lo!r},{p.lo_closed},"
                             f"{p.hi!r},{p.hi_closed},{member}")
        return "\n".join(lines) + "\n"


def emit_cone_figure_data(model: ContinuousWalkModel, seed: int,
                          event_sets: Sequence[tuple[int, IntervalSet]]
                          ) -> FigureData:
    """Simulate one seeded path and tabulate it with the cone and events."""
    for t, _ in event_sets:
        if not 0 <= t <= model.horizon:
            raise ValidationError(f"event time {t} outside horizon")
    rng = np.random.default_rng(seed)
    increments = model.sample_increments(rng, 1, model.horizon)[0]
    prices = [model.s0]
    for inc in increments:
        prices.append(prices[-1] + float(inc))
    path_rows = tuple(
        (t, prices[t], *cone_bounds(model, t))
        for t in range(model.horizon + 1))
    event_rows = tuple(
        (t, s, interval_contains(s, prices[t])) for t, s in event_sets)
    return FigureData(path_rows, event_rows)
