"""Random variables and processes on finite outcome spaces.

Variables carry one float per path. Measurability is structural: a variable
is measurable w.r.t. an algebra iff it is constant on every atom, with level
sets compared by exact value equality (quantize first if tolerance grouping
is wanted).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (DegenerateInputError, SpaceMismatchError,
                     ValidationError)
from .outcome_space import (Event, OutcomeSpace, ProbabilityMeasure,
                            mask_from_bools)
from .sigma_algebra import SigmaAlgebra, generate


@dataclass(frozen=True, eq=False)
class RandomVariable:
    """A real value per path index."""

    space: OutcomeSpace
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (self.space.n_paths,):
            raise ValidationError(
                f"need {self.space.n_paths} values, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("values must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_function(cls, space: OutcomeSpace,
                      fn: Callable[[tuple[str, ...]], float]) -> "RandomVariable":
        return cls(space, np.array([fn(space.path_symbols(i))
                                    for i in range(space.n_paths)], dtype=float))

    @classmethod
    def constant(cls, space: OutcomeSpace, value: float) -> "RandomVariable":
        return cls(space, np.full(space.n_paths, float(value)))

    @classmethod
    def indicator(cls, event: Event) -> "RandomVariable":
        return cls(event.space, event.to_bools().astype(float))

    def __call__(self, index: int) -> float:
        return float(self.values[index])

    def to_jsonable(self) -> dict:
        return {"values": self.values.tolist()}

    @classmethod
    def from_jsonable(cls, space: OutcomeSpace, data: dict) -> "RandomVariable":
        return cls(space, np.asarray(data["values"], dtype=float))


@dataclass(frozen=True, eq=False)
class StochasticProcess:
    """T+1 random variables X_0..X_T sharing one space."""

    space: OutcomeSpace
    variables: tuple[RandomVariable, ...]

    def __post_init__(self):
        if len(self.variables) != self.space.horizon + 1:
            raise ValidationError(
                f"need {self.space.horizon + 1} variables, "
                f"got {len(self.variables)}")
        for var in self.variables:
            if var.space != self.space:
                raise SpaceMismatchError("variable on a different space")

    def __getitem__(self, t: int) -> RandomVariable:
        return self.variables[t]

    @classmethod
    def from_path_function(cls, space: OutcomeSpace,
                           fn: Callable[[int, tuple[str, ...]], float]
                           ) -> "StochasticProcess":
        """Build X_t(path) = fn(t, symbols) for t = 0..T."""
        return cls(space, tuple(
            RandomVariable(space, np.array(
                [fn(t, space.path_symbols(i)) for i in range(space.n_paths)]))
            for t in range(space.horizon + 1)))

    def to_jsonable(self) -> list[dict]:
        return [var.to_jsonable() for var in self.variables]


def level_sets(x: RandomVariable) -> list[Event]:
    """Events of equal value, one per distinct value, canonically ordered."""
    _, inverse = np.unique(x.values, return_inverse=True)
    events = []
    for level in range(inverse.max() + 1):
        events.append(Event(x.space, mask_from_bools(inverse == level)))
    events.sort(key=lambda e: e.mask & -e.mask)
    return events


def sigma_of(x: RandomVariable) -> SigmaAlgebra:
    """Sigma-algebra generated by a single variable: atoms are level sets."""
    return generate(x.space, level_sets(x))


def find_measurability_violation(
        x: RandomVariable,
        algebra: SigmaAlgebra) -> tuple[Event, float, float] | None:
    """First atom on which ``x`` is not constant, with two differing values."""
    if x.space != algebra.space:
        raise SpaceMismatchError("variable and algebra on different spaces")
    for atom in algebra.atoms:
        vals = x.values[atom.to_bools()]
        spread = vals != vals[0]
        if spread.any():
            return atom, float(vals[0]), float(vals[np.argmax(spread)])
    return None


def is_measurable(x: RandomVariable, algebra: SigmaAlgebra) -> bool:
    """True iff ``x`` is constant on every atom of ``algebra``."""
    return find_measurability_violation(x, algebra) is None


def expectation(x: RandomVariable, measure: ProbabilityMeasure) -> float:
    if x.space != measure.space:
        raise SpaceMismatchError("variable and measure on different spaces")
    return float(measure.weight_vector @ x.values)


def conditional_expectation(x: RandomVariable, algebra: SigmaAlgebra,
                            measure: ProbabilityMeasure) -> RandomVariable:
    """Atom-wise probability-weighted average of ``x``.

    The result is measurable w.r.t. ``algebra`` by construction. Atoms of
    zero probability are rejected: no arbitrary version is invented.
    """
    if x.space != algebra.space or x.space != measure.space:
        raise SpaceMismatchError("inputs on different spaces")
    out = np.empty(x.space.n_paths)
    weights = measure.weight_vector
    for atom in algebra.atoms:
        sel = atom.to_bools()
        mass = float(weights[sel].sum())
        if mass <= 0.0:
            raise DegenerateInputError(
                f"atom {atom!r} has zero probability; conditional average undefined")
        out[sel] = float(weights[sel] @ x.values[sel]) / mass
    return RandomVariable(x.space, out)
