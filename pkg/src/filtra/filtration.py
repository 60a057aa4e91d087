"""Filtrations: nested stage-by-stage sigma-algebras over one outcome space.

The natural filtration of the coordinate process has prefix cylinders as
its stage-t atoms; derived processes get the sigma-algebras generated by
their values up to each stage. Nesting and adaptedness are verified rather
than assumed, so deliberately broken stage lists can be diagnosed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import SpaceMismatchError, ValidationError
from .outcome_space import Event, OutcomeSpace, event_from_prefix
from .sigma_algebra import SigmaAlgebra, generate, is_sub_algebra

if TYPE_CHECKING:
    from .random_variable import StochasticProcess


@dataclass(frozen=True)
class Filtration:
    """Stage sigma-algebras F_0..F_T on one space.

    Canonical constructors produce nested stages with a trivial F_0; the
    plain constructor only checks space consistency so that broken stage
    lists can still be built and then diagnosed with :func:`verify_nesting`.
    """

    space: OutcomeSpace
    stages: tuple[SigmaAlgebra, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValidationError("filtration needs at least one stage")
        for stage in self.stages:
            if stage.space != self.space:
                raise SpaceMismatchError("stage on a different space")

    def __len__(self) -> int:
        return len(self.stages)

    def __getitem__(self, t: int) -> SigmaAlgebra:
        return self.stages[t]

    def to_jsonable(self) -> list[dict]:
        return [stage.to_jsonable() for stage in self.stages]

    @classmethod
    def from_jsonable(cls, space: OutcomeSpace, data: list[dict]) -> "Filtration":
        return cls(space, tuple(SigmaAlgebra.from_jsonable(space, d) for d in data))


def natural_filtration(space: OutcomeSpace) -> Filtration:
    """Filtration of the coordinate process: stage-t atoms are the length-t
    prefix cylinders, so |atoms(F_t)| = |alphabet|**t."""
    base = len(space.alphabet)
    stages = []
    for t in range(space.horizon + 1):
        block = base ** (space.horizon - t)
        atoms = tuple(Event(space, ((1 << block) - 1) << (start * block))
                      for start in range(base ** t))
        stages.append(SigmaAlgebra(space, atoms))
    return Filtration(space, tuple(stages))


def prefix_cylinder(space: OutcomeSpace, prefix: str) -> Event:
    """Cylinder event for a symbol-string prefix, e.g. ``"ud"``."""
    return event_from_prefix(space, tuple(prefix))


def filtration_of_process(process: "StochasticProcess") -> Filtration:
    """Stage t is the sigma-algebra generated by the process values up to t.

    Built incrementally: each stage refines the previous one against the
    level sets of the next variable, so nesting holds by construction.
    """
    from .random_variable import level_sets

    space = process.space
    stage = generate(space, level_sets(process.variables[0]))
    stages = [stage]
    for var in process.variables[1:]:
        blocks = []
        for atom in stage.atoms:
            for level in level_sets(var):
                piece = atom.mask & level.mask
                if piece:
                    blocks.append(piece)
        stage = SigmaAlgebra.from_masks(space, blocks)
        stages.append(stage)
    return Filtration(space, tuple(stages))


@dataclass(frozen=True)
class NestingVerdict:
    """Outcome of the stage-nesting check."""

    ok: bool
    t: int | None = None
    witness: Event | None = None

    def __str__(self):
        if self.ok:
            return "ok"
        return f"violated(t={self.t}, atom={self.witness!r})"

    def to_jsonable(self) -> dict:
        if self.ok:
            return {"kind": "ok"}
        return {"kind": "violated", "t": self.t,
                "witness": self.witness.to_jsonable()}


def verify_nesting(filtration: Filtration) -> NestingVerdict:
    """Check F_t is a sub-algebra of F_{t+1} for every consecutive pair.

    On failure reports the smallest t and the canonical-first atom of F_t
    that is not a union of F_{t+1} atoms.
    """
    for t in range(len(filtration) - 1):
        coarse, fine = filtration[t], filtration[t + 1]
        if is_sub_algebra(coarse, fine):
            continue
        for atom in coarse.atoms:
            covered = 0
            for sub in fine.atoms:
                if sub.mask & atom.mask and not sub.mask & ~atom.mask:
                    covered |= sub.mask
            if covered != atom.mask:
                return NestingVerdict(False, t=t, witness=atom)
    return NestingVerdict(True)


def is_adapted(process: "StochasticProcess", filtration: Filtration) -> bool:
    """True iff the stage-t variable is measurable w.r.t. stage t, for all t."""
    from .random_variable import is_measurable

    if process.space != filtration.space:
        raise SpaceMismatchError("process and filtration on different spaces")
    if len(process.variables) != len(filtration):
        raise ValidationError(
            f"horizon mismatch: process has {len(process.variables)} stages, "
            f"filtration has {len(filtration)}")
    return all(is_measurable(var, filtration[t])
               for t, var in enumerate(process.variables))
