"""Property suites run by ``isingclt verify <suite>``.

Each suite returns a list of :class:`Check` records. Random cases come from
a ``random.Random`` seeded per suite, so reports are reproducible.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from dataclasses import dataclass

import numpy as np

from .estimation import (bound_check_semi_invariant, estimation_check, random_family,
                         random_universe)
from .families import (Family, connects, enumerate_connected, enumerate_connected_bruteforce)
from .free_field import free_moment, free_semi_invariant, total_spin_multiset
from .gibbs import GibbsSpec, exact_moment, exact_semi_invariant, run_block_experiment
from .lattice import cube_points, neighbor_edges, shift
from .series import c3_lower_bound, coefficient_Vn, constants, semi_invariant_coefficient

log = logging.getLogger(__name__)

SUITES = ("parity", "estimation", "bounds", "enumeration", "taylor", "clt")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


# -- random lattice objects --------------------------------------------------

def random_points(rng: random.Random, nu: int, count: int, radius: int = 2) -> list:
    return [tuple(rng.randint(-radius, radius) for _ in range(nu)) for _ in range(count)]


def random_lattice_family(rng: random.Random, nu: int, length: int, radius: int = 2) -> Family:
    """``length`` random edges near the origin; repeats raise multiplicities."""
    edges = []
    for _ in range(length):
        p = random_points(rng, nu, 1, radius)[0]
        edges.append(rng.choice(neighbor_edges(p)))
    return Family.from_edges(edges)


def random_disconnected_case(rng: random.Random, nu: int, max_order: int = 8):
    """(b, gamma) whose associated graph has at least two components: two
    random clusters, the second translated far away."""
    while True:
        m1 = rng.randint(0, 2)
        m2 = rng.randint(0, 2)
        n1 = rng.randint(0, 3)
        n2 = rng.randint(0, 3)
        if m1 + m2 + n1 + n2 > max_order or m1 + n1 == 0 or m2 + n2 == 0 or m1 + m2 == 0:
            continue
        b1 = random_points(rng, nu, m1, 1)
        g1 = random_lattice_family(rng, nu, n1, 1)
        v = (50,) + (0,) * (nu - 1)
        b2 = [shift(p, v) for p in random_points(rng, nu, m2, 1)]
        g2 = random_lattice_family(rng, nu, n2, 1).shifted(v)
        merged = dict(g1.entries)
        for e, n in g2.entries:
            merged[e] = merged.get(e, 0) + n
        b = b1 + b2
        rng.shuffle(b)
        return b, Family(merged)


def random_odd_parity_case(rng: random.Random, nu: int, max_order: int = 8):
    """(b, gamma) with at least one spin of odd total multiplicity."""
    while True:
        m = rng.randint(1, 4)
        n = rng.randint(0, max_order - m)
        b = random_points(rng, nu, m, 1)
        g = random_lattice_family(rng, nu, n, 1)
        if any(c % 2 for c in total_spin_multiset(b, g).values()):
            return b, g


# -- suites ------------------------------------------------------------------

def suite_parity(cases: int = 500, seed: int = 1) -> list[Check]:
    rng = random.Random(seed)
    out = []
    bad = 0
    for _ in range(cases):
        nu = rng.choice((1, 2))
        b, g = random_odd_parity_case(rng, nu)
        if free_semi_invariant(b, g) != 0:
            bad += 1
    out.append(Check("odd total parity gives zero", bad == 0, f"{cases} cases, {bad} nonzero"))

    bad = 0
    for _ in range(cases):
        nu = rng.choice((1, 2))
        t = random_points(rng, nu, 1, 1)
        g = random_lattice_family(rng, nu, rng.randint(1, 7), 1)
        if free_semi_invariant(t, g) != 0:
            bad += 1
    out.append(Check("single spin with edges gives zero", bad == 0, f"{cases} cases, {bad} nonzero"))

    bad = 0
    for _ in range(cases):
        nu = rng.choice((1, 2))
        b, g = random_disconnected_case(rng, nu)
        if connects(b, g) or free_semi_invariant(b, g) != 0:
            bad += 1
    out.append(Check("disconnected (b, gamma) gives zero", bad == 0, f"{cases} cases, {bad} failures"))

    # exact Gibbs at lambda = 0 against the parity rule, every multiset with
    # multiplicities <= 2 on up to 3 sites of the cube
    mismatches = 0
    total = 0
    for nu, N in ((1, 1), (1, 2), (1, 3), (2, 1)):
        spec = GibbsSpec(nu, N, 0.0)
        pts = cube_points(N, nu)
        for r in range(1, 4):
            for sites in itertools.combinations(pts, r):
                for mults in itertools.product((1, 2), repeat=r):
                    ms = dict(zip(sites, mults))
                    total += 1
                    if abs(exact_moment(spec, ms) - float(free_moment(ms))) > 1e-12:
                        mismatches += 1
    out.append(Check("exact Gibbs at lambda=0 equals free moment", mismatches == 0,
                     f"{total} multisets, {mismatches} mismatches"))
    return out


def suite_estimation(cases: int = 1000, seed: int = 2) -> list[Check]:
    rng = random.Random(seed)
    failures = 0
    min_margin = math.inf
    for _ in range(cases):
        L = rng.randint(2, 10)
        u = random_universe(rng, rng.randint(1, 30), L)
        fam = random_family(rng, u, 20)
        r = estimation_check(u, fam)
        min_margin = min(min_margin, r.f - r.g)
        if not r.holds:
            failures += 1
    return [Check("estimation inequality holds", failures == 0,
                  f"{cases} random universes, {failures} failures, min margin {min_margin:.3f}")]


def _bound_cases(max_total: int = 8, nu: int = 1):
    """(b, gamma) over base sequences on sites {0, 1, 2} of the line, with
    every connecting family of admissible length."""
    sites = [(x,) + (0,) * (nu - 1) for x in range(3)]
    for m in range(1, max_total + 1):
        for b in itertools.combinations_with_replacement(sites, m):
            for n in range(0, max_total - m + 1):
                for g in enumerate_connected(list(b), n, cap=max_total):
                    yield list(b), g


def suite_bounds(max_total: int = 8) -> list[Check]:
    failures = 0
    count = 0
    for b, g in _bound_cases(max_total):
        count += 1
        if not bound_check_semi_invariant(b, g):
            failures += 1
    out = [Check("free semi-invariant bound (nu=1)", failures == 0,
                 f"{count} cases with m+|gamma| <= {max_total}, {failures} failures")]
    # exact comparison against a rational lower estimate of the bound
    c3 = c3_lower_bound(1)
    c2 = constants(1).C2
    ok = all(abs(coefficient_Vn(1, n)) <= 2 * c3**2 * n * (c2 * c3) ** n for n in range(1, 5))
    out.append(Check("|V_n| <= 2 C3^2 n (C2 C3)^n for n <= 4", ok))
    return out


def suite_enumeration(bases: int = 20, seed: int = 3) -> list[Check]:
    rng = random.Random(seed)
    out = []
    worst = 0.0
    failures = 0
    for nu in (1, 2):
        for _ in range(bases):
            b = random_points(rng, nu, rng.randint(1, 3), 1)
            for n in range(1, 5):
                count = len(enumerate_connected(b, n))
                worst = max(worst, count / (2 * nu) ** (2 * n))
                if count > (2 * nu) ** (2 * n):
                    failures += 1
    out.append(Check("count <= (2 nu)^(2n), nu in {1,2}, n <= 4", failures == 0,
                     f"max ratio {worst:.4f}"))
    mismatches = 0
    for _ in range(bases):
        b = random_points(rng, 1, rng.randint(1, 3), 1)
        for n in range(0, 4):
            if enumerate_connected(b, n) != enumerate_connected_bruteforce(b, n):
                mismatches += 1
    out.append(Check("enumeration equals brute-force filter (nu=1, n <= 3)", mismatches == 0,
                     f"{bases} bases, {mismatches} mismatches"))
    return out


TAYLOR_GRID = tuple(s * 0.01 * i for i in range(1, 7) for s in (-1, 1))
TAYLOR_DEGREE = 8


def taylor_coefficients(spec_for, b, grid=TAYLOR_GRID, degree=TAYLOR_DEGREE) -> np.ndarray:
    """Least-squares polynomial fit of lambda -> exact semi-invariant."""
    lams = np.array(sorted(grid))
    vals = np.array([exact_semi_invariant(spec_for(lam), b) for lam in lams])
    return np.polynomial.polynomial.polyfit(lams, vals, degree)


def suite_taylor(order: int = 3, tol: float = 1e-5) -> list[Check]:
    cases = [[(0,), (1,)], [(0,), (2,)], [(0,), (1,), (2,)], [(0,), (1,), (1,), (2,)],
             [(0,), (0,), (1,), (1,)], [(-1,), (0,), (1,), (2,)]]
    out = []
    for b in cases:
        N = order + max(abs(p[0]) for p in b)
        coeffs = taylor_coefficients(lambda lam: GibbsSpec(1, N, lam), b)
        worst = max(abs(coeffs[n] - float(semi_invariant_coefficient(b, n)))
                    for n in range(order + 1))
        out.append(Check(f"Taylor coefficients of b={[p[0] for p in b]} (N={N})", bool(worst <= tol),
                         f"max deviation {worst:.2e}"))
    return out


def suite_clt(seed: int = 1, N: int = 4096, sweeps: int = 2100, burn_in: int = 100,
              thin: int = 1) -> list[Check]:
    """Empirical block-spin checks at nu=1, lambda=0.1 with 3-SE tolerances."""
    lam = 0.1
    ks = (4, 16, 64)
    spec = GibbsSpec(1, N, lam)
    res = run_block_experiment(spec, ks, 1.0, seed, sweeps, burn_in, thin)
    target = math.exp(2 * lam)
    out = []
    var64 = res[64].cumulants[1]
    out.append(Check("Var(Y) at k=64 within 3 SE of e^(2 lambda)",
                     abs(var64.value - target) <= 3 * var64.std_error,
                     f"{var64.value:.4f} +- {var64.std_error:.4f} vs {target:.4f}"))
    for order in (3, 4):
        c64 = res[64].cumulants[order - 1]
        c4 = res[4].cumulants[order - 1]
        out.append(Check(f"order-{order} cumulant at k=64 within 3 SE of 0",
                         abs(c64.value) <= 3 * c64.std_error,
                         f"{c64.value:.4f} +- {c64.std_error:.4f}"))
        out.append(Check(f"|order-{order}| at k=64 <= half of k=4",
                         abs(c64.value) <= 0.5 * abs(c4.value),
                         f"{abs(c64.value):.4f} vs {abs(c4.value):.4f}"))
    adj = res[64].adjacent_cov
    out.append(Check("adjacent-block covariance at k=64 within 3 SE of 0",
                     abs(adj.value) <= 3 * adj.std_error,
                     f"{adj.value:.4f} +- {adj.std_error:.4f}"))
    res2 = run_block_experiment(spec, ks, 2.0, seed, sweeps, burn_in, thin, max_order=2)
    scaled = [res2[k].cumulants[1].value * k for k in ks]
    out.append(Check("alpha=2: Var(Y)*k within a factor 2 across k",
                     max(scaled) <= 2 * min(scaled),
                     ", ".join(f"k={k}: {s:.4f}" for k, s in zip(ks, scaled))))
    return out


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return globals()[f"suite_{name}"]()
