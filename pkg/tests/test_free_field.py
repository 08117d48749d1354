import itertools
import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from isingclt.cumulants import cumulant_by_partitions
from isingclt.families import Family, connects, enumerate_connected
from isingclt.free_field import (free_cumulant_of_products, free_moment, free_semi_invariant,
                                 total_spin_multiset)
from isingclt.lattice import shift
from isingclt.verify import (random_disconnected_case, random_lattice_family,
                             random_odd_parity_case, random_points)

E01 = ((0,), (1,))


def test_free_moment_examples():
    assert free_moment({(0,): 1}) == 0
    assert free_moment({(0,): 2}) == 1
    assert free_moment({(0,): 1, (1,): 1}) == 0
    assert free_moment([(0,), (1,), (1,), (0,)]) == 1
    assert free_moment({}) == 1


def brute_free_moment(ms, sites):
    """Average of prod Q_t^mult over all sign assignments of ``sites``."""
    idx = {p: i for i, p in enumerate(sites)}
    total = 0
    for signs in itertools.product((-1, 1), repeat=len(sites)):
        v = 1
        for p, n in ms.items():
            v *= signs[idx[p]] ** n
        total += v
    return Fraction(total, 2 ** len(sites))


def test_parity_rule_against_enumeration():
    sites = [(0,), (1,), (2,)]
    for mults in itertools.product(range(4), repeat=3):
        ms = {p: n for p, n in zip(sites, mults) if n}
        assert free_moment(ms) == brute_free_moment(ms, sites)


def test_pair_with_connecting_edge():
    assert free_semi_invariant([(0,), (1,)], Family({E01: 1})) == 1


def test_free_cumulant_against_partition_sum():
    # independent route: explicit partition sum over parity moments
    rng = random.Random(11)
    for _ in range(40):
        b = random_points(rng, 1, rng.randint(1, 3), 1)
        g = random_lattice_family(rng, 1, rng.randint(0, 3), 1)
        variables = [(t,) for t in b] + g.edge_sequence()

        def mom(S):
            return free_moment([p for i in S for p in variables[i]])

        assert free_cumulant_of_products(variables) == cumulant_by_partitions(mom, len(variables))


def test_single_spin_with_edges_vanishes():
    rng = random.Random(3)
    for _ in range(200):
        nu = rng.choice((1, 2))
        t = random_points(rng, nu, 1, 1)
        g = random_lattice_family(rng, nu, rng.randint(1, 6), 1)
        assert free_semi_invariant(t, g) == 0


def test_odd_parity_vanishes():
    rng = random.Random(4)
    for _ in range(200):
        b, g = random_odd_parity_case(rng, rng.choice((1, 2)))
        assert any(n % 2 for n in total_spin_multiset(b, g).values())
        assert free_semi_invariant(b, g) == 0


def test_disconnected_vanishes():
    rng = random.Random(5)
    for _ in range(200):
        b, g = random_disconnected_case(rng, rng.choice((1, 2)))
        assert not connects(b, g)
        assert free_semi_invariant(b, g) == 0


def test_disconnected_close_by():
    # components separated by one missing edge, not by a large shift
    b = [(0,), (2,)]
    assert free_semi_invariant(b, Family({E01: 2})) == 0
    assert free_semi_invariant(b, Family({E01: 1, ((1,), (2,)): 1})) == 1


coord = st.integers(-3, 3)


@given(st.integers(0, 10**6), st.tuples(coord, coord))
@settings(max_examples=100)
def test_translation_invariance(seed, v):
    rng = random.Random(seed)
    b = random_points(rng, 2, rng.randint(1, 3), 1)
    g = random_lattice_family(rng, 2, rng.randint(0, 4), 1)
    moved = [shift(p, v) for p in b]
    assert free_semi_invariant(moved, g.shifted(v)) == free_semi_invariant(b, g)


def test_connected_values_are_integers():
    vals = {free_semi_invariant([(0,), (1,)], g) for g in enumerate_connected([(0,), (1,)], 3)}
    assert all(isinstance(v, Fraction) and v.denominator == 1 for v in vals)


def test_total_spin_multiset():
    c = total_spin_multiset([(0,), (0,)], Family({E01: 3}))
    assert c == {(0,): 5, (1,): 3}
