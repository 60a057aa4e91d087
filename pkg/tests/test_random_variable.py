"""Random variables: generated algebras, measurability, expectations.

Claims covered:
    - sigma_of atoms are exactly the level sets
    - measurability equals constancy on atoms and equals generated-algebra
      inclusion (oracle equivalence, exhaustive on tiny spaces)
    - expectation and conditional expectation reproduce the hand-enumerated
      lattice numbers: E[S_3] = 107.5 and E[S_3 | first move up] = 115 at
      s0=100, u=10, d=5, p=0.5
    - tower, linearity, total expectation and taking-out-what-is-known hold
      to 1e-12 on randomized triples
    - zero-probability atoms are rejected for conditioning
"""

import itertools
import math

import numpy as np
import pytest

from filtra import (DegenerateInputError, Event, LatticeModel,
                    ProbabilityMeasure, RandomVariable, build_price_process,
                    build_space, conditional_expectation, contains,
                    enumerate_members, event_from_prefix, expectation,
                    generate, is_measurable, is_sub_algebra, level_sets,
                    natural_filtration, sigma_of)

TOL = 1e-12
RNG_SEED = 303


def binary3():
    return build_space(3, ("u", "d"))


def default_lattice():
    return LatticeModel(100.0, 10.0, 5.0, 3)


def lattice_price(path, t):
    """Independent price oracle: walk the increments one by one."""
    price = 100.0
    for sym in path[:t]:
        price = price + 10.0 if sym == "u" else price - 5.0
    return price


def random_partition_algebra(space, rng, max_blocks=4):
    labels = rng.integers(0, max_blocks, size=space.n_paths)
    masks = {}
    for i, lab in enumerate(labels):
        masks[int(lab)] = masks.get(int(lab), 0) | (1 << i)
    from filtra import SigmaAlgebra
    return SigmaAlgebra.from_masks(space, masks.values())


def random_full_support_measure(space, rng):
    raw = rng.random(space.n_paths) + 0.05
    return ProbabilityMeasure.from_weights(space, (raw / raw.sum()).tolist())


# -- generated algebras --------------------------------------------------------

def test_sigma_of_indicator():
    space = binary3()
    a_u = event_from_prefix(space, ("u",))
    algebra = sigma_of(RandomVariable.indicator(a_u))
    assert {a.mask for a in algebra.atoms} == {a_u.mask, (~a_u).mask}


def test_sigma_of_constant():
    space = binary3()
    algebra = sigma_of(RandomVariable.constant(space, 5.0))
    assert len(algebra.atoms) == 1


def test_sigma_of_injective():
    space = build_space(2, ("u", "d"))
    x = RandomVariable(space, np.array([1.0, 2.0, 3.0, 4.0]))
    algebra = sigma_of(x)
    assert all(len(a) == 1 for a in algebra.atoms)
    assert len(enumerate_members(algebra)) == 2 ** space.n_paths


def test_level_sets_partition():
    space = binary3()
    x = RandomVariable(space, np.array([1, 1, 2, 2, 2, 3, 1, 3], dtype=float))
    sets = level_sets(x)
    assert sum(len(s) for s in sets) == 8
    union_mask = 0
    for s in sets:
        assert union_mask & s.mask == 0
        union_mask |= s.mask
    assert union_mask == space.full_mask


# -- measurability -------------------------------------------------------------

def test_price_measurable_against_its_stage():
    lattice = build_price_process(default_lattice())
    filtration = natural_filtration(lattice.space)
    assert is_measurable(lattice.prices[2], filtration[2])


def test_price_not_measurable_one_stage_early():
    lattice = build_price_process(default_lattice())
    filtration = natural_filtration(lattice.space)
    assert not is_measurable(lattice.prices[2], filtration[1])
    # the first-move-up atom mixes prices 120 and 105
    from filtra import find_measurability_violation
    atom, v1, v2 = find_measurability_violation(lattice.prices[2], filtration[1])
    assert atom == event_from_prefix(lattice.space, ("u",))
    assert {v1, v2} == {120.0, 105.0}


def test_everything_measurable_against_singletons():
    space = build_space(2, ("u", "d"))
    singles = generate(space, [Event(space, 1 << i)
                               for i in range(space.n_paths)])
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(10):
        x = RandomVariable(space, rng.random(space.n_paths))
        assert is_measurable(x, singles)


def test_measurability_oracle_equivalence_exhaustive_tiny():
    # every partition of a 4-path space against assorted variables
    space = build_space(2, ("u", "d"))
    rng = np.random.default_rng(RNG_SEED + 1)
    algebras = []
    for blocks in _partitions(list(range(4))):
        masks = [sum(1 << i for i in block) for block in blocks]
        from filtra import SigmaAlgebra
        algebras.append(SigmaAlgebra.from_masks(space, masks))
    for _ in range(40):
        x = RandomVariable(space, rng.integers(0, 3, size=4).astype(float))
        for algebra in algebras:
            expected = is_sub_algebra(sigma_of(x), algebra)
            assert is_measurable(x, algebra) == expected
            # member-enumeration oracle
            members = {m.mask for m in enumerate_members(algebra)}
            by_members = all(s.mask in members for s in level_sets(x))
            assert is_measurable(x, algebra) == by_members


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partial in _partitions(rest):
        for i in range(len(partial)):
            yield partial[:i] + [partial[i] + [first]] + partial[i + 1:]
        yield [[first]] + partial


def test_measurability_oracle_equivalence_randomized():
    rng = np.random.default_rng(RNG_SEED + 2)
    for _ in range(300):
        space = build_space(int(rng.integers(1, 5)), ("u", "d"))
        x = RandomVariable(space,
                           rng.integers(0, 4, size=space.n_paths).astype(float))
        algebra = random_partition_algebra(space, rng)
        assert is_measurable(x, algebra) == is_sub_algebra(sigma_of(x), algebra)


# -- expectation ---------------------------------------------------------------

def test_terminal_price_expectation():
    space = binary3()
    # oracle: enumerate the eight paths with the additive walk
    oracle = math.fsum(
        0.125 * lattice_price("".join(p), 3)
        for p in itertools.product("ud", repeat=3))
    assert abs(oracle - 107.5) < 1e-15
    lattice = build_price_process(default_lattice())
    assert abs(expectation(lattice.prices[3], lattice.measure) - 107.5) < TOL


def test_constant_expectation():
    space = binary3()
    measure = ProbabilityMeasure.uniform(space)
    assert expectation(RandomVariable.constant(space, 3.25), measure) == 3.25


def test_indicator_expectation():
    space = binary3()
    measure = ProbabilityMeasure.uniform(space)
    a_u = event_from_prefix(space, ("u",))
    assert abs(expectation(RandomVariable.indicator(a_u), measure) - 0.5) < TOL


# -- conditional expectation ---------------------------------------------------

def test_conditional_terminal_price_given_first_move():
    lattice = build_price_process(default_lattice())
    filtration = natural_filtration(lattice.space)
    # oracle: average the four continuations after an up move
    ups = [p for p in lattice.space.path_strings() if p.startswith("u")]
    oracle = math.fsum(lattice_price(p, 3) for p in ups) / 4
    assert abs(oracle - 115.0) < 1e-15
    cond = conditional_expectation(lattice.prices[3], filtration[1],
                                   lattice.measure)
    a_u = event_from_prefix(lattice.space, ("u",))
    for i in a_u.indices():
        assert abs(cond(i) - 115.0) < TOL
    assert is_measurable(cond, filtration[1])


def test_conditioning_on_full_information_returns_the_variable():
    space = binary3()
    rng = np.random.default_rng(RNG_SEED + 3)
    x = RandomVariable(space, rng.random(8))
    measure = ProbabilityMeasure.uniform(space)
    singles = generate(space, [Event(space, 1 << i) for i in range(8)])
    cond = conditional_expectation(x, singles, measure)
    assert np.allclose(cond.values, x.values, atol=TOL, rtol=0)


def test_conditioning_on_nothing_returns_the_mean():
    space = binary3()
    rng = np.random.default_rng(RNG_SEED + 4)
    x = RandomVariable(space, rng.random(8))
    measure = ProbabilityMeasure.uniform(space)
    trivial = generate(space, [])
    cond = conditional_expectation(x, trivial, measure)
    assert np.allclose(cond.values, expectation(x, measure), atol=TOL, rtol=0)


def test_zero_probability_atom_rejected():
    space = build_space(1, ("u", "d"))
    measure = ProbabilityMeasure.from_weights(space, [1.0, 0.0])
    x = RandomVariable(space, np.array([1.0, 2.0]))
    singles = generate(space, [Event(space, 1)])
    with pytest.raises(DegenerateInputError):
        conditional_expectation(x, singles, measure)


# -- conditional expectation laws ----------------------------------------------

def _random_nested_algebras(space, rng):
    gens = [Event(space, int(rng.integers(0, space.full_mask + 1)))
            for _ in range(3)]
    fine = generate(space, gens)
    coarse = generate(space, gens[:int(rng.integers(0, 3))])
    return coarse, fine


def test_tower_property_randomized():
    rng = np.random.default_rng(RNG_SEED + 5)
    for _ in range(200):
        space = build_space(int(rng.integers(1, 5)), ("u", "d"))
        coarse, fine = _random_nested_algebras(space, rng)
        measure = random_full_support_measure(space, rng)
        x = RandomVariable(space, rng.normal(size=space.n_paths))
        inner = conditional_expectation(x, fine, measure)
        towered = conditional_expectation(inner, coarse, measure)
        direct = conditional_expectation(x, coarse, measure)
        assert np.allclose(towered.values, direct.values, atol=TOL, rtol=0)


def test_linearity_randomized():
    rng = np.random.default_rng(RNG_SEED + 6)
    space = build_space(3, ("u", "d"))
    for _ in range(150):
        algebra = random_partition_algebra(space, rng)
        measure = random_full_support_measure(space, rng)
        x = RandomVariable(space, rng.normal(size=8))
        y = RandomVariable(space, rng.normal(size=8))
        a, b = rng.normal(), rng.normal()
        combo = RandomVariable(space, a * x.values + b * y.values)
        lhs = conditional_expectation(combo, algebra, measure).values
        rhs = (a * conditional_expectation(x, algebra, measure).values
               + b * conditional_expectation(y, algebra, measure).values)
        assert np.allclose(lhs, rhs, atol=1e-11, rtol=0)


def test_total_expectation_randomized():
    rng = np.random.default_rng(RNG_SEED + 7)
    for _ in range(150):
        space = build_space(int(rng.integers(1, 5)), ("u", "d"))
        algebra = random_partition_algebra(space, rng)
        measure = random_full_support_measure(space, rng)
        x = RandomVariable(space, rng.normal(size=space.n_paths))
        cond = conditional_expectation(x, algebra, measure)
        assert abs(expectation(cond, measure) - expectation(x, measure)) < TOL


def test_taking_out_what_is_known_randomized():
    rng = np.random.default_rng(RNG_SEED + 8)
    space = build_space(3, ("u", "d"))
    for _ in range(150):
        algebra = random_partition_algebra(space, rng)
        measure = random_full_support_measure(space, rng)
        x = RandomVariable(space, rng.normal(size=8))
        # z constant on every atom, hence measurable
        z_vals = np.empty(8)
        for atom in algebra.atoms:
            z_vals[atom.to_bools()] = rng.normal()
        z = RandomVariable(space, z_vals)
        assert is_measurable(z, algebra)
        zx = RandomVariable(space, z.values * x.values)
        lhs = conditional_expectation(zx, algebra, measure).values
        rhs = z.values * conditional_expectation(x, algebra, measure).values
        assert np.allclose(lhs, rhs, atol=1e-11, rtol=0)


# -- representation ------------------------------------------------------------

def test_values_are_frozen():
    space = binary3()
    x = RandomVariable(space, np.zeros(8))
    with pytest.raises(ValueError):
        x.values[0] = 1.0


def test_serialization_roundtrip():
    space = binary3()
    x = RandomVariable(space, np.arange(8, dtype=float))
    again = RandomVariable.from_jsonable(space, x.to_jsonable())
    assert np.array_equal(x.values, again.values)
