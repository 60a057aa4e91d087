"""Sigma-algebras on finite outcome spaces.

A sigma-algebra here is canonically represented by its atom partition: the
pairwise-disjoint minimal measurable sets whose unions make up every member.
The member list is an on-demand view (it has 2**|atoms| entries), guarded by
a cap. Generation from an arbitrary event collection is signature-based
partition refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CapacityError, SpaceMismatchError, ValidationError
from .outcome_space import Event, OutcomeSpace

# Member enumeration is 2**|atoms|; refuse beyond this many atoms.
DEFAULT_ATOM_CAP = 16

OK = "ok"
MISSING_UNIVERSE = "missing_universe"
NOT_CLOSED_COMPLEMENT = "not_closed_complement"
NOT_CLOSED_UNION = "not_closed_union"


def _canonical_atom_key(mask: int) -> int:
    # Atoms are disjoint, so ordering by smallest contained path index is total.
    return (mask & -mask).bit_length()


def _canonical_member_key(mask: int) -> tuple[int, int]:
    # Small sets first, ties broken by the bitmask itself; puts the empty set
    # first and the full space last, and keeps listings diff-stable.
    return (mask.bit_count(), mask)


@dataclass(frozen=True)
class SigmaAlgebra:
    """Atom-partition representation of a sigma-algebra."""

    space: OutcomeSpace
    atoms: tuple[Event, ...]

    def __post_init__(self):
        seen = 0
        for atom in self.atoms:
            if atom.space != self.space:
                raise SpaceMismatchError("atom on a different space")
            if not atom:
                raise ValidationError("empty atom")
            if seen & atom.mask:
                raise ValidationError("atoms overlap")
            seen |= atom.mask
        if seen != self.space.full_mask:
            raise ValidationError("atoms do not cover the space")
        ordered = tuple(sorted((a.mask for a in self.atoms), key=_canonical_atom_key))
        if tuple(a.mask for a in self.atoms) != ordered:
            object.__setattr__(self, "atoms",
                               tuple(Event(self.space, m) for m in ordered))

    @property
    def n_members(self) -> int:
        return 2 ** len(self.atoms)

    @classmethod
    def trivial(cls, space: OutcomeSpace) -> "SigmaAlgebra":
        return cls(space, (Event.full(space),))

    @classmethod
    def discrete(cls, space: OutcomeSpace) -> "SigmaAlgebra":
        return cls(space, tuple(Event(space, 1 << i) for i in range(space.n_paths)))

    @classmethod
    def from_masks(cls, space: OutcomeSpace, masks: Iterable[int]) -> "SigmaAlgebra":
        return cls(space, tuple(Event(space, m) for m in masks))

    def atom_containing(self, index: int) -> Event:
        for atom in self.atoms:
            if index in atom:
                return atom
        raise ValidationError(f"path index {index} out of range")

    def to_jsonable(self) -> dict:
        return {"atoms": [a.path_strings() for a in self.atoms]}

    @classmethod
    def from_jsonable(cls, space: OutcomeSpace, data: dict) -> "SigmaAlgebra":
        return cls(space, tuple(Event.from_strings(space, paths)
                                for paths in data["atoms"]))


def generate(space: OutcomeSpace, generators: Sequence[Event]) -> SigmaAlgebra:
    """Coarsest sigma-algebra containing every generator.

    Atoms are the equivalence classes of paths under "member of exactly the
    same generators", computed by refining the one-block partition against
    each generator in turn.
    """
    for g in generators:
        if g.space != space:
            raise SpaceMismatchError("generator on a different space")
    blocks = [space.full_mask]
    for g in generators:
        refined = []
        for block in blocks:
            inside = block & g.mask
            outside = block & ~g.mask
            if inside and outside:
                refined.append(inside)
                refined.append(outside)
            else:
                refined.append(block)
        blocks = refined
    return SigmaAlgebra.from_masks(space, blocks)


def enumerate_members(algebra: SigmaAlgebra,
                      cap: int = DEFAULT_ATOM_CAP) -> list[Event]:
    """All 2**|atoms| unions of atoms, in canonical order."""
    k = len(algebra.atoms)
    if k > cap:
        raise CapacityError(
            f"{k} atoms would enumerate 2**{k} members (cap {cap} atoms)")
    atom_masks = [a.mask for a in algebra.atoms]
    members = [0] * (2 ** k)
    for subset in range(1, 2 ** k):
        low = subset & -subset
        members[subset] = members[subset ^ low] | atom_masks[low.bit_length() - 1]
    members.sort(key=_canonical_member_key)
    return [Event(algebra.space, m) for m in members]


def contains(algebra: SigmaAlgebra, e: Event) -> bool:
    """True iff ``e`` is a union of atoms, i.e. splits no atom."""
    if algebra.space != e.space:
        raise SpaceMismatchError("event on a different space")
    for atom in algebra.atoms:
        overlap = atom.mask & e.mask
        if overlap and overlap != atom.mask:
            return False
    return True


@dataclass(frozen=True)
class AxiomVerdict:
    """Outcome of checking a collection against the sigma-algebra axioms."""

    kind: str
    witness: Event | None = None
    witness_pair: tuple[Event, Event] | None = None

    @property
    def ok(self) -> bool:
        return self.kind == OK

    def __str__(self):
        if self.ok:
            return "ok"
        if self.kind == MISSING_UNIVERSE:
            return "missing_universe"
        if self.kind == NOT_CLOSED_COMPLEMENT:
            return f"not_closed_complement({self.witness!r})"
        return f"not_closed_union({self.witness_pair[0]!r}, {self.witness_pair[1]!r})"

    def to_jsonable(self) -> dict:
        out = {"kind": self.kind}
        if self.witness is not None:
            out["witness"] = self.witness.to_jsonable()
        if self.witness_pair is not None:
            out["witness_pair"] = [e.to_jsonable() for e in self.witness_pair]
        return out


def verify_axioms(space: OutcomeSpace,
                  collection: Sequence[Event]) -> AxiomVerdict:
    """Check a collection for the finite sigma-algebra axioms.

    Checks, in order: the full space is present, closure under complement,
    closure under pairwise union (on a finite space that implies closure
    under countable union). Returns the first counterexample in canonical
    order; failures are verdicts, not exceptions.
    """
    for e in collection:
        if e.space != space:
            raise SpaceMismatchError("collection event on a different space")
    masks = sorted({e.mask for e in collection}, key=_canonical_member_key)
    have = set(masks)
    full = space.full_mask
    if full not in have:
        return AxiomVerdict(MISSING_UNIVERSE)
    for m in masks:
        if full ^ m not in have:
            return AxiomVerdict(NOT_CLOSED_COMPLEMENT, witness=Event(space, m))
    for a, b in combinations(masks, 2):
        if a | b not in have:
            return AxiomVerdict(NOT_CLOSED_UNION,
                                witness_pair=(Event(space, a), Event(space, b)))
    return AxiomVerdict(OK)


def is_sub_algebra(coarse: SigmaAlgebra, fine: SigmaAlgebra) -> bool:
    """True iff every member of ``coarse`` is a member of ``fine``.

    Equivalent to: the fine partition refines the coarse one, i.e. each atom
    of ``fine`` lies inside a single atom of ``coarse``.
    """
    if coarse.space != fine.space:
        raise SpaceMismatchError("algebras on different spaces")
    for atom in fine.atoms:
        low_bit = atom.mask & -atom.mask
        for parent in coarse.atoms:
            if parent.mask & low_bit:
                if atom.mask & ~parent.mask:
                    return False
                break
    return True
