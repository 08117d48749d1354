"""Moments and semi-invariants of the spin field under the free measure P_0.

Under P_0 the spins Q_t are independent fair signs, so a product of spins has
expectation 1 when every site occurs an even number of times and 0 otherwise.
Mixed cumulants of single spins Q_t and edge products Phi_{r,s} = Q_r Q_s are
reduced to that parity rule.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cumulants import cumulant_from_table, _check_order
from .families import Family
from .lattice import Point


def free_moment(ms: Mapping[Point, int] | Iterable[Point]) -> Fraction:
    """E_0 of prod Q_t^{mult}: 1 if all multiplicities are even, else 0.

    Accepts a point -> multiplicity mapping or a plain iterable of points.
    """
    counts = ms if isinstance(ms, Mapping) else Counter(tuple(p) for p in ms)
    for p, n in counts.items():
        if n < 0:
            raise ValueError(f"negative multiplicity for {p}")
        if n % 2:
            return Fraction(0)
    return Fraction(1)


def _variables(b: Sequence[Point], gamma: Family | None) -> list[tuple[Point, ...]]:
    variables = [(tuple(t),) for t in b]
    if gamma is not None:
        variables.extend(gamma.edge_sequence())
    return variables


def _parity_masks(variables: list[tuple[Point, ...]]) -> list[int]:
    """Bitmask over distinct sites of the odd-multiplicity support of each variable."""
    sites: dict[Point, int] = {}
    masks = []
    for var in variables:
        mask = 0
        for p in var:
            if p not in sites:
                sites[p] = len(sites)
            mask ^= 1 << sites[p]
        masks.append(mask)
    return masks


def free_cumulant_of_products(variables: Sequence[Sequence[Point]]) -> int:
    """<prod_{t in T_1} Q_t, ..., prod_{t in T_m} Q_t>_0 for point tuples T_i.

    The result is an integer: all free moments are 0 or 1.
    """
    m = len(variables)
    _check_order(m)
    masks = _parity_masks([tuple(tuple(p) for p in v) for v in variables])
    table = [1] * (1 << m)
    xor = [0] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        xor[mask] = xor[mask ^ low] ^ masks[low.bit_length() - 1]
        table[mask] = 1 if xor[mask] == 0 else 0
    return cumulant_from_table(table, m)


def free_semi_invariant(b: Sequence[Point], gamma: Family | None = None) -> Fraction:
    """<Q_t1, ..., Q_tm, Phi_A1, ..., Phi_An>_0 with (A_1..A_n) the edge
    sequence of ``gamma``."""
    return Fraction(free_cumulant_of_products(_variables(b, gamma)))


def total_spin_multiset(b: Sequence[Point], gamma: Family | None = None) -> Counter:
    """Multiset of all underlying spins of b and the edges of gamma."""
    c = Counter(tuple(t) for t in b)
    if gamma is not None:
        for (r, s), n in gamma.entries:
            c[r] += n
            c[s] += n
    return c
