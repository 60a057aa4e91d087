"""Natural and derived filtrations, nesting and adaptedness.

Claims covered:
    - natural stage t has |alphabet|**t prefix-cylinder atoms, member
      counts [2, 4, 16, 256] on the three-step binary space
    - derived-process stages equal the generated algebras of the value
      history and refine monotonically
    - nesting verification reports the smallest failing stage with the
      canonical-first unrepresentable atom
    - a process peeking one step ahead is not adapted, price paths are
"""

import numpy as np
import pytest

from filtra import (Event, Filtration, LatticeModel, RandomVariable,
                    StochasticProcess, ValidationError, build_price_process,
                    build_space, enumerate_members, event_from_prefix,
                    filtration_of_process, generate, is_adapted,
                    is_sub_algebra, natural_filtration, verify_nesting)

RNG_SEED = 202


def binary3():
    return build_space(3, ("u", "d"))


# -- natural filtration ------------------------------------------------------

def test_binary_member_counts():
    filtration = natural_filtration(binary3())
    assert [stage.n_members for stage in filtration.stages] == [2, 4, 16, 256]


def test_zero_horizon():
    filtration = natural_filtration(build_space(0, ("u", "d")))
    assert len(filtration) == 1
    assert filtration[0].n_members == 2


def test_ternary_atom_counts():
    space = build_space(2, ("a", "b", "c"))
    filtration = natural_filtration(space)
    assert [len(stage.atoms) for stage in filtration.stages] == [1, 3, 9]
    # oracle: generate each stage from scratch via prefix signatures
    for t in range(3):
        gens = []
        for i in range(space.n_paths):
            prefix = space.path_symbols(i)[:t]
            gens.append(event_from_prefix(space, prefix))
        assert {a.mask for a in generate(space, gens).atoms} == \
            {a.mask for a in filtration[t].atoms}


def test_atom_counts_property():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(20):
        k = int(rng.integers(1, 4))
        horizon = int(rng.integers(0, 5))
        space = build_space(horizon, tuple("abc"[:k]))
        filtration = natural_filtration(space)
        assert [len(s.atoms) for s in filtration.stages] == \
            [k ** t for t in range(horizon + 1)]


def test_monotone_refinement():
    filtration = natural_filtration(binary3())
    for t in range(len(filtration) - 1):
        for atom in filtration[t + 1].atoms:
            parents = [p for p in filtration[t].atoms
                       if p.mask & atom.mask]
            assert len(parents) == 1
            assert atom.issubset(parents[0])


# -- derived-process filtrations ---------------------------------------------

def test_price_process_filtration_equals_natural():
    # distinct one-step increments reveal each move exactly
    lattice = build_price_process(LatticeModel(100.0, 10.0, 5.0, 3))
    derived = filtration_of_process(lattice.prices)
    natural = natural_filtration(lattice.space)
    for t in range(4):
        assert {a.mask for a in derived[t].atoms} == \
            {a.mask for a in natural[t].atoms}


def test_constant_process_filtration_is_trivial():
    space = binary3()
    process = StochasticProcess(space, tuple(
        RandomVariable.constant(space, 3.0) for _ in range(4)))
    derived = filtration_of_process(process)
    assert all(len(stage.atoms) == 1 for stage in derived.stages)


def test_symmetric_increments_history_vs_single_value():
    # with u == d the price after two moves forgets the order of the moves,
    # so the algebra of S_2 alone is strictly coarser than stage 2; the
    # value-history filtration still separates ud from du through S_1
    from filtra import sigma_of

    model = LatticeModel(100.0, 7.0, 7.0, 3)
    prices = build_price_process(model).prices
    derived = filtration_of_process(prices)
    natural = natural_filtration(model.space())
    space = model.space()
    # oracle: level sets of the pair (S_1, S_2) by direct enumeration
    sig_groups = {}
    for i in range(space.n_paths):
        path = space.path_string(i)
        s1 = 100.0 + (7.0 if path[0] == "u" else -7.0)
        s2 = s1 + (7.0 if path[1] == "u" else -7.0)
        sig_groups.setdefault((s1, s2), 0)
        sig_groups[(s1, s2)] |= 1 << i
    assert {a.mask for a in derived[2].atoms} == set(sig_groups.values())
    assert {a.mask for a in derived[2].atoms} == \
        {a.mask for a in natural[2].atoms}
    level_algebra = sigma_of(prices[2])
    assert len(level_algebra.atoms) == 3 < len(natural[2].atoms)
    assert is_sub_algebra(level_algebra, natural[2])
    assert not is_sub_algebra(natural[2], level_algebra)


def test_derived_stages_refine_and_nest():
    rng = np.random.default_rng(RNG_SEED + 1)
    for _ in range(30):
        space = build_space(int(rng.integers(1, 5)), ("u", "d"))
        values = rng.integers(0, 3, size=(space.horizon + 1, space.n_paths))
        process = StochasticProcess(space, tuple(
            RandomVariable(space, values[t].astype(float))
            for t in range(space.horizon + 1)))
        derived = filtration_of_process(process)
        assert verify_nesting(derived).ok


# -- nesting verification ----------------------------------------------------

def test_natural_nesting_ok():
    assert verify_nesting(natural_filtration(binary3())).ok


def test_natural_nesting_ok_over_space_grid():
    for k in (1, 2, 3):
        for horizon in range(5):
            space = build_space(horizon, tuple("abc"[:k]))
            assert verify_nesting(natural_filtration(space)).ok


def test_reversed_stages_report_first_atom():
    space = binary3()
    natural = natural_filtration(space)
    broken = Filtration(space, (natural[2], natural[1]))
    verdict = verify_nesting(broken)
    assert not verdict.ok
    assert verdict.t == 0
    assert verdict.witness == event_from_prefix(space, ("u", "u"))


def test_single_stage_is_trivially_nested():
    space = binary3()
    filtration = Filtration(space, (natural_filtration(space)[2],))
    assert verify_nesting(filtration).ok


# -- adaptedness -------------------------------------------------------------

def test_price_process_is_adapted():
    lattice = build_price_process(LatticeModel(100.0, 10.0, 5.0, 3))
    assert is_adapted(lattice.prices, natural_filtration(lattice.space))


def test_peeking_process_is_not_adapted():
    space = binary3()

    def peek(t, symbols):
        # reads the move revealed after t
        if t < space.horizon:
            return 1.0 if symbols[t] == "u" else 0.0
        return 0.0

    process = StochasticProcess.from_path_function(space, peek)
    filtration = natural_filtration(space)
    assert not is_adapted(process, filtration)
    # and the violation is at every stage before the horizon
    from filtra import is_measurable
    for t in range(space.horizon):
        assert not is_measurable(process[t], filtration[t])


def test_constant_process_is_adapted_to_anything():
    space = binary3()
    process = StochasticProcess(space, tuple(
        RandomVariable.constant(space, 1.0) for _ in range(4)))
    assert is_adapted(process, natural_filtration(space))


def test_horizon_mismatch_rejected():
    space = binary3()
    process = StochasticProcess(space, tuple(
        RandomVariable.constant(space, 1.0) for _ in range(4)))
    short = Filtration(space, natural_filtration(space).stages[:2])
    with pytest.raises(ValidationError):
        is_adapted(process, short)


# -- serialization -----------------------------------------------------------

def test_filtration_roundtrip():
    space = binary3()
    filtration = natural_filtration(space)
    again = Filtration.from_jsonable(space, filtration.to_jsonable())
    for a, b in zip(filtration.stages, again.stages):
        assert a == b


def test_stage_members_match_hand_table_sizes():
    filtration = natural_filtration(binary3())
    assert len(enumerate_members(filtration[2])) == 16
    assert len(enumerate_members(filtration[3])) == 256
