import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from isingclt.estimation import (LinkedUniverse, UniverseError, bound_check_semi_invariant,
                                 estimation_check, lattice_universe, random_family,
                                 random_universe, semi_invariant_bound, upsilon)
from isingclt.families import Family
from isingclt.series import c3_lower_bound


def lone(L=3):
    return LinkedUniverse.from_pairs(["T"], [], L)


def test_upsilon_examples():
    assert upsilon(lone(), {"T": 1}, "T") == 1
    assert upsilon(lone(), {"T": 3}, "T") == 3
    u = LinkedUniverse.from_pairs(["a", "b"], [("a", "b")], 2)
    assert upsilon(u, {"a": 2, "b": 5}, "a") == 7
    with pytest.raises(KeyError):
        upsilon(u, {"a": 2}, "b")


def test_estimation_examples():
    L = 4
    r = estimation_check(lone(L), {"T": 1})
    assert r.f == pytest.approx(math.log(L) + L**2)
    assert r.g == 0 and r.holds
    # all multiplicities one: f = m C_L and g <= m ln L
    u = LinkedUniverse.from_pairs(range(4), [(0, 1), (1, 2), (2, 3)], 3)
    r = estimation_check(u, {i: 1 for i in range(4)})
    assert r.f == pytest.approx(4 * (math.log(3) + 9))
    assert r.g <= 4 * math.log(3) + 1e-12
    assert r.holds


def test_universe_validation():
    u = LinkedUniverse([1, 2], {1: {1, 2}, 2: {2}}, 3)
    assert any("symmetric" in v for v in u.violations())
    with pytest.raises(UniverseError):
        estimation_check(u, {1: 1})
    u = LinkedUniverse([1], {1: set()}, 3)
    assert any("itself" in v for v in u.violations())
    u = LinkedUniverse.from_pairs(range(4), [(0, 1), (0, 2), (0, 3)], 3)
    assert any("> L" in v for v in u.violations())
    with pytest.raises(ValueError):
        estimation_check(lone(), {"T": 0})
    with pytest.raises(ValueError):
        estimation_check(lone(), {})


def test_random_universes_hold():
    rng = random.Random(0)
    for _ in range(1000):
        u = random_universe(rng, rng.randint(1, 25), rng.randint(2, 10))
        assert not u.violations()
        fam = random_family(rng, u, 20)
        assert estimation_check(u, fam).holds


@given(st.integers(0, 2**32), st.integers(1, 10))
@settings(max_examples=200)
def test_upsilon_at_least_own_multiplicity(seed, L):
    rng = random.Random(seed)
    u = random_universe(rng, rng.randint(1, 15), L)
    fam = random_family(rng, u, 20)
    for i, n in fam.items():
        assert upsilon(u, fam, i) >= n


@given(st.integers(0, 2**32))
@settings(max_examples=100)
def test_relabeling_invariance(seed):
    rng = random.Random(seed)
    u = random_universe(rng, rng.randint(1, 15), rng.randint(2, 10))
    fam = random_family(rng, u, 20)
    perm = list(u.elements)
    rng.shuffle(perm)
    p = dict(zip(u.elements, perm))
    v = LinkedUniverse([p[e] for e in u.elements], {p[e]: {p[x] for x in s} for e, s in u.links.items()}, u.L)
    a = estimation_check(u, fam)
    b = estimation_check(v, {p[e]: n for e, n in fam.items()})
    assert a.f == pytest.approx(b.f, rel=1e-12) and a.g == pytest.approx(b.g, rel=1e-12)


def test_adversarial_dense_family():
    # every element linked to L-1 others, large equal multiplicities
    L = 10
    groups = [list(range(g * L, g * L + L)) for g in range(3)]
    pairs = [(a, b) for grp in groups for a in grp for b in grp if a < b]
    u = LinkedUniverse.from_pairs(range(3 * L), pairs, L)
    r = estimation_check(u, {e: 20 for e in u.elements})
    assert r.holds
    assert r.f - r.g == pytest.approx(3 * L * 20 * (math.log(L) + L**2 - math.log(L)))


def test_lattice_universe_degree():
    for nu in (1, 2):
        u = lattice_universe(nu, 3)
        assert not u.violations()
        assert max(len(s) for s in u.links.values()) == 4 * nu + 1


def test_semi_invariant_bound_examples():
    e = ((0,), (1,))
    assert bound_check_semi_invariant([(0,), (1,)], Family({e: 1}))
    bound = semi_invariant_bound([(0,), (1,)], Family({e: 1}))
    assert bound == 2 * c3_lower_bound(1) ** 3
    assert bound > 10**37
    # disconnected: the left side is zero
    assert bound_check_semi_invariant([(0,), (5,)], Family({e: 3}))
