"""Cluster-expansion lambda-series for the infinite-volume Ising field.

The limiting semi-invariant of spins at b expands as

    <Q_b>_lambda = sum_n lambda^n a_n(b),
    a_n(b) = sum_{|gamma| = n, gamma connects b} <Q_b, Phi_gamma>_0 / gamma!

and the limiting variance of the block spin (alpha = nu) is 1 + sum_n
lambda^n V_n. Coefficients are exact ``Fraction``s; series values are
floats. Every truncated series carries two tail estimates: the rigorous one
implied by the constants L, C2, C3 of the convergence proof (astronomically
pessimistic) and a heuristic extrapolated from the last computed terms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from .cumulants import moment_from_cumulants
from .families import enumerate_connected, family_factorial, family_support
from .free_field import free_cumulant_of_products
from .lattice import Point, origin


@dataclass(frozen=True)
class ProofConstants:
    """Convergence constants for dimension nu.

    L = 4 nu + 1, C2 = 4 nu^2, C3 = 3 L e^(L^2 + 1) (equal to C1 at this L),
    C_nu = 1 / (2 C2 C3) and C = min(C_nu, 1 / (8 C2 C3^3)).
    Real-valued constants are mpmath floats at 50 digits.
    """

    nu: int
    L: int
    C1: mpmath.mpf
    C2: int
    C3: mpmath.mpf
    C_nu: mpmath.mpf
    C: mpmath.mpf

    @property
    def C_L(self) -> mpmath.mpf:
        """Constant ln L + L^2 of the link-counting inequality."""
        with mpmath.workdps(50):
            return mpmath.log(self.L) + self.L**2


@lru_cache(maxsize=None)
def constants(nu: int) -> ProofConstants:
    if nu < 1:
        raise ValueError("dimension must be >= 1")
    L = 4 * nu + 1
    C2 = 4 * nu * nu
    with mpmath.workdps(50):
        C3 = 3 * L * mpmath.exp(L * L + 1)
        C_nu = 1 / (2 * C2 * C3)
        C = min(C_nu, 1 / (8 * C2 * C3**3))
    return ProofConstants(nu=nu, L=L, C1=C3, C2=C2, C3=C3, C_nu=C_nu, C=C)


# Rational lower bound on e, so that C3 lower bounds are exact.
_E_LOWER = Fraction(2718281828459045, 10**15)


@lru_cache(maxsize=None)
def c3_lower_bound(nu: int) -> Fraction:
    """Exact rational r with r <= C3(nu)."""
    L = 4 * nu + 1
    return 3 * L * _E_LOWER ** (L * L + 1)


@dataclass
class SeriesResult:
    """A truncated lambda-series.

    ``terms`` holds (n, exact coefficient, float value of lambda^n * coeff);
    ``partial_sum`` is their sum. ``rigorous_tail`` bounds the omitted terms
    using the proof constants and is +inf outside their domain of validity;
    ``empirical_tail`` extrapolates the last two nonzero terms geometrically
    and is not a bound.
    """

    partial_sum: float
    n_max: int
    rigorous_tail: float
    empirical_tail: float
    terms: list[tuple[int, Fraction, float]] = field(default_factory=list)

    def as_records(self) -> list[dict]:
        return [{"n": n, "coefficient": _frac_str(c), "term": t} for n, c, t in self.terms]


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _normalize(b: Sequence[Point]) -> tuple[Point, ...]:
    """Translate b so its first point is the origin (coefficients are
    translation invariant)."""
    b = [tuple(p) for p in b]
    v = b[0]
    return tuple(tuple(a - c for a, c in zip(p, v)) for p in b)


# -- coefficients ------------------------------------------------------------

@lru_cache(maxsize=None)
def _coefficient_V(base: Point, n: int) -> Fraction:
    total = Fraction(0)
    for g in enumerate_connected([base], n):
        edges = g.edge_sequence()
        gfact = family_factorial(g)
        for t in sorted(family_support(g)):
            if t == base:
                continue
            # t is in the support and g connects (base), so g connects (base, t)
            c = free_cumulant_of_products([(base,), (t,)] + edges)
            if c:
                total += Fraction(c, gfact)
    return total


def coefficient_Vn(nu: int, n: int, base: Sequence[int] | None = None) -> Fraction:
    """Exact V_n: sum over families gamma of length n connecting the base
    point and over sites t != base of the support of
    <Q_base, Q_t, Phi_gamma>_0 / gamma!.

    ``base`` defaults to the origin; the value does not depend on it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    base = origin(nu) if base is None else tuple(int(c) for c in base)
    if len(base) != nu:
        raise ValueError("base point has the wrong dimension")
    return _coefficient_V(base, n)


@lru_cache(maxsize=None)
def _semi_invariant_coefficient(b: tuple[Point, ...], n: int) -> Fraction:
    spins = [(t,) for t in b]
    total = Fraction(0)
    for g in enumerate_connected(list(b), n):
        c = free_cumulant_of_products(spins + g.edge_sequence())
        if c:
            total += Fraction(c, family_factorial(g))
    return total


def semi_invariant_coefficient(b: Sequence[Point], n: int) -> Fraction:
    """a_n(b): the coefficient of lambda^n in the limiting semi-invariant."""
    if not b:
        raise ValueError("b must be nonempty")
    if n < 0:
        raise ValueError("n must be >= 0")
    return _semi_invariant_coefficient(_normalize(b), n)


# -- tails -------------------------------------------------------------------

def _check_tail_x(x: float) -> None:
    if not 0 < x < 0.5:
        raise ValueError(f"x must lie in (0, 1/2), got {x}")


def tail_geometric(x: float, l: int) -> float:
    """sum_{n > l} (n - l) x^n = x^(l+1) / (1 - x)^2."""
    _check_tail_x(x)
    if l < 0:
        raise ValueError("l must be >= 0")
    return x ** (l + 1) / (1 - x) ** 2


def tail_polynomial(x: float, m: int) -> float:
    """Upper bound m! / (1 - x)^(m+1) on sum_{n >= 0} (n + 1)^(m-1) x^n."""
    _check_tail_x(x)
    if m < 1:
        raise ValueError("m must be >= 1")
    return math.factorial(m) / (1 - x) ** (m + 1)


def _rigorous_variance_tail(nu: int, lam: float, n_max: int) -> float:
    # sum_{n > l} |lambda|^n 2 C3^2 n (C2 C3)^n with x = |lambda| C2 C3:
    # sum n x^n = sum (n - l) x^n + l sum x^n = x^(l+1)/(1-x)^2 + l x^(l+1)/(1-x)
    if lam == 0:
        return 0.0
    c = constants(nu)
    with mpmath.workdps(50):
        x = abs(mpmath.mpf(lam)) * c.C2 * c.C3
        if x >= 1:
            return math.inf
        l = n_max
        tail = 2 * c.C3**2 * (x ** (l + 1) / (1 - x) ** 2 + l * x ** (l + 1) / (1 - x))
        return float(tail)


def _rigorous_semi_invariant_tail(nu: int, m: int, lam: float, n_max: int) -> float:
    # |lambda^n a_n| <= C3^m m! x^n, x = |lambda| C2 C3
    if lam == 0:
        return 0.0
    c = constants(nu)
    with mpmath.workdps(50):
        x = abs(mpmath.mpf(lam)) * c.C2 * c.C3
        if x >= 1:
            return math.inf
        return float(c.C3**m * math.factorial(m) * x ** (n_max + 1) / (1 - x))


def empirical_tail(terms: Sequence[tuple[int, Fraction, float]]) -> float:
    """Geometric extrapolation from the last two nonzero terms.

    Returns 0 when fewer than two nonzero terms exist beyond order 0 and the
    last one is zero, and inf when the terms do not decrease.
    """
    nonzero = [(n, abs(t)) for n, _, t in terms if n > 0 and t != 0]
    if not nonzero:
        return 0.0
    if len(nonzero) == 1:
        return math.inf
    (n1, t1), (n2, t2) = nonzero[-2], nonzero[-1]
    r = (t2 / t1) ** (1.0 / (n2 - n1))
    if r >= 1:
        return math.inf
    return t2 * r / (1 - r)


# -- series ------------------------------------------------------------------

def variance_series(nu: int, lam: float, n_max: int) -> SeriesResult:
    """Truncation of 1 + sum_{n=1}^{n_max} lambda^n V_n."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    terms = [(0, Fraction(1), 1.0)]
    for n in range(1, n_max + 1):
        v = coefficient_Vn(nu, n)
        terms.append((n, v, float(v) * lam**n))
    return SeriesResult(
        partial_sum=math.fsum(t for _, _, t in terms),
        n_max=n_max,
        rigorous_tail=_rigorous_variance_tail(nu, lam, n_max),
        empirical_tail=empirical_tail(terms) if lam != 0 else 0.0,
        terms=terms,
    )


def semi_invariant_series(b: Sequence[Point], lam: float, n_max: int) -> SeriesResult:
    """Truncation of the limiting semi-invariant <Q_t1, ..., Q_tm>_lambda."""
    if not b:
        raise ValueError("b must be nonempty")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    terms = []
    for n in range(n_max + 1):
        a = semi_invariant_coefficient(b, n)
        terms.append((n, a, float(a) * lam**n))
    nu = len(b[0])
    return SeriesResult(
        partial_sum=math.fsum(t for _, _, t in terms),
        n_max=n_max,
        rigorous_tail=_rigorous_semi_invariant_tail(nu, len(b), lam, n_max),
        empirical_tail=empirical_tail(terms) if lam != 0 else 0.0,
        terms=terms,
    )


def limiting_moment(T: Sequence[Point], lam: float, n_max: int) -> float:
    """f(Q_T): the moment E(prod_{t in T} Q_t) assembled from truncated
    limiting semi-invariants; 1 for empty T."""
    T = [tuple(p) for p in T]
    if not T:
        return 1.0

    def cum(S):
        return semi_invariant_series([T[i] for i in S], lam, n_max).partial_sum

    return float(moment_from_cumulants(cum, len(T)))


def cylinder_probability(T: Sequence[Point], A: Sequence[int], lam: float, n_max: int) -> float:
    """P_lambda(Q_t1 = a_1, ..., Q_tm = a_m) for distinct points T and signs A.

    ((-1)^k / 2^m) sum_{T' subset T} f(Q_T') prod_{t_i not in T'} a_i, with k
    the number of negative signs; the signs are paired with T by position.
    """
    T = [tuple(p) for p in T]
    if len(T) != len(A):
        raise ValueError("T and A must have the same length")
    if len(set(T)) != len(T):
        raise ValueError("points of T must be distinct")
    if any(a not in (-1, 1) for a in A):
        raise ValueError("signs must be -1 or +1")
    m = len(T)
    k = sum(1 for a in A if a == -1)
    total = 0.0
    for r in range(m + 1):
        for sub in itertools.combinations(range(m), r):
            rest = math.prod(A[i] for i in range(m) if i not in sub)
            total += limiting_moment([T[i] for i in sub], lam, n_max) * rest
    return (-1) ** k * total / 2**m
