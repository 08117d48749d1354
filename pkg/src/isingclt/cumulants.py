"""Multivariate cumulants (semi-invariants) over set partitions.

A moment oracle is any callable ``moment(S)`` taking a sorted tuple of
0-based indices ``S`` (never empty) and returning ``E(prod_{i in S} X_i)``.
Values may be ints, ``Fraction``s, floats or numpy arrays; the sums below
only use ``+`` and ``*``, so exact inputs give exact outputs.

Two routes compute the same partition sum:

* :func:`cumulant_by_partitions` walks every set partition explicitly.
* :func:`cumulant` groups partitions by the block holding the smallest
  index, which turns the sum into a dynamic program over subsets
  (O(3^m) instead of Bell(m) products of blocks).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

DEFAULT_MAX_ORDER = 12

MomentOracle = Callable[[tuple[int, ...]], object]


class OrderCapExceeded(ValueError):
    """Raised when an order exceeds the configured partition cap."""


_max_order = DEFAULT_MAX_ORDER


def set_max_order(m: int) -> int:
    """Change the partition cap; returns the previous value."""
    global _max_order
    if m < 1:
        raise ValueError("cap must be >= 1")
    old, _max_order = _max_order, m
    return old


def get_max_order() -> int:
    return _max_order


def _check_order(m: int, cap: int | None = None) -> None:
    cap = _max_order if cap is None else cap
    if m < 1:
        raise ValueError(f"order must be >= 1, got {m}")
    if m > cap:
        raise OrderCapExceeded(f"order {m} exceeds the partition cap {cap}")


def bell_number(n: int) -> int:
    """Bell numbers via B(n+1) = sum_i C(n, i) B(i)."""
    bell = [1]
    for j in range(n):
        bell.append(sum(math.comb(j, i) * bell[i] for i in range(j + 1)))
    return bell[n]


def partitions(m: int, cap: int | None = None) -> Iterator[list[list[int]]]:
    """Yield every set partition of {0, ..., m-1} in restricted-growth order.

    Each partition is a list of blocks, each block a sorted list of indices;
    blocks are ordered by their smallest element.
    """
    _check_order(m, cap)
    a = [0] * m
    b = [1] * m  # b[i] = 1 + max(a[0..i-1])
    while True:
        blocks: list[list[int]] = [[] for _ in range(max(a) + 1)]
        for i, label in enumerate(a):
            blocks[label].append(i)
        yield blocks
        # next restricted growth string
        i = m - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, m):
            a[j] = 0
            b[j] = max(b[i], a[i] + 1)


def _moment_table(moment: MomentOracle, m: int) -> list:
    """E(X_S) for every nonempty subset, indexed by bitmask."""
    table: list = [1] * (1 << m)
    for mask in range(1, 1 << m):
        table[mask] = moment(tuple(i for i in range(m) if mask >> i & 1))
    return table


def _is_exact_zero(v) -> bool:
    return isinstance(v, (int, Fraction)) and v == 0


def cumulant_by_partitions(moment: MomentOracle, m: int) -> object:
    """<X_1, ..., X_m> as the explicit sum over all set partitions."""
    _check_order(m)
    table = _moment_table(moment, m)
    total = 0
    for blocks in partitions(m):
        k = len(blocks)
        term = (-1) ** (k - 1) * math.factorial(k - 1)
        for block in blocks:
            v = table[sum(1 << i for i in block)]
            if _is_exact_zero(v):
                term = 0
                break
            term = term * v
        else:
            total = total + term
    return total


def _partition_sums(table: list, m: int) -> list[dict[int, object]]:
    """F[mask][j] = sum over partitions of ``mask`` into j blocks of the
    product of table values of the blocks."""
    full = (1 << m) - 1
    F: list[dict[int, object]] = [dict() for _ in range(full + 1)]
    F[0] = {0: 1}
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        acc: dict[int, object] = {}
        # blocks containing the lowest index: low | sub for sub subset of rest
        sub = rest
        while True:
            block = low | sub
            v = table[block]
            if not _is_exact_zero(v):
                for j, w in F[mask ^ block].items():
                    if _is_exact_zero(w):
                        continue
                    acc[j + 1] = acc.get(j + 1, 0) + v * w
            if sub == 0:
                break
            sub = (sub - 1) & rest
        F[mask] = acc
    return F


def cumulant_from_table(table: list, m: int) -> object:
    F = _partition_sums(table, m)
    total = 0
    for k, s in F[(1 << m) - 1].items():
        total = total + (-1) ** (k - 1) * math.factorial(k - 1) * s
    return total


def cumulant(moment: MomentOracle, m: int) -> object:
    """Semi-invariant <X_1, ..., X_m> of the variables behind ``moment``.

    sum over partitions {S_1..S_k} of (-1)^(k-1) (k-1)! E(X_S1)...E(X_Sk).
    """
    _check_order(m)
    return cumulant_from_table(_moment_table(moment, m), m)


def moment_from_cumulants(cumulant_oracle: MomentOracle, m: int) -> object:
    """Joint moment E(X_1...X_m) = sum over partitions of cumulant products.

    ``cumulant_oracle(S)`` returns the cumulant of the variables indexed by S.
    """
    _check_order(m)
    table = _moment_table(cumulant_oracle, m)
    full = (1 << m) - 1
    G: list = [0] * (full + 1)
    G[0] = 1
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        acc = 0
        sub = rest
        while True:
            block = low | sub
            acc = acc + table[block] * G[mask ^ block]
            if sub == 0:
                break
            sub = (sub - 1) & rest
        G[mask] = acc
    return G[full]


def moment_from_cumulants_by_partitions(cumulant_oracle: MomentOracle, m: int) -> object:
    _check_order(m)
    table = _moment_table(cumulant_oracle, m)
    total = 0
    for blocks in partitions(m):
        term = 1
        for block in blocks:
            term = term * table[sum(1 << i for i in block)]
        total = total + term
    return total


@lru_cache(maxsize=None)
def _gaussian_moment(n: int) -> int:
    # E Z^n for standard normal Z
    if n % 2:
        return 0
    return math.prod(range(n - 1, 0, -2))


def gaussian_moment_oracle(variance: Fraction | int = 1) -> MomentOracle:
    """Moments of one centered Gaussian X repeated in every index slot:
    E(X^n) = sigma^n (n-1)!! for even n, 0 for odd n."""
    variance = Fraction(variance)

    def moment(S: tuple[int, ...]) -> Fraction:
        n = len(S)
        if n % 2:
            return Fraction(0)
        return variance ** (n // 2) * _gaussian_moment(n)

    return moment


def table_oracle(values: dict[tuple[int, ...], object]) -> MomentOracle:
    """Moment oracle backed by an explicit dict keyed by sorted index tuples."""

    def moment(S: tuple[int, ...]):
        return values[S]

    return moment


def relabel(moment: MomentOracle, perm: Sequence[int]) -> MomentOracle:
    """Oracle of the permuted variables Y_i = X_perm[i]."""

    def moment_p(S: tuple[int, ...]):
        return moment(tuple(sorted(perm[i] for i in S)))

    return moment_p
