"""Executable forms of the link-counting inequality and of the bound on free
semi-invariants.

For a reflexive, symmetric relation in which every element is linked to at
most L elements, and any family {(T_i, n_i)}, with
upsilon_i = sum of n_j over T_j linked to T_i,

    C_L sum n_i + sum n_i ln n_i  >  sum n_i ln upsilon_i,  C_L = ln L + L^2.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .families import Family, family_factorial
from .free_field import free_semi_invariant
from .lattice import Point, neighbor_edges
from .series import c3_lower_bound

REL_SLACK = 1e-9


class UniverseError(ValueError):
    """The link relation is not reflexive, not symmetric or exceeds L."""


@dataclass
class LinkedUniverse:
    elements: list
    links: dict  # element -> set of linked elements, including itself
    L: int

    @classmethod
    def from_pairs(cls, elements: Iterable[Hashable], pairs: Iterable[tuple], L: int) -> "LinkedUniverse":
        """Build the reflexive, symmetric closure of ``pairs``."""
        elements = list(elements)
        links = {e: {e} for e in elements}
        for a, b in pairs:
            links[a].add(b)
            links[b].add(a)
        return cls(elements, links, L)

    def violations(self) -> list[str]:
        out = []
        if self.L < 1:
            out.append(f"L must be >= 1, got {self.L}")
        known = set(self.elements)
        for e in self.elements:
            linked = self.links.get(e, set())
            if e not in linked:
                out.append(f"{e!r} is not linked to itself")
            if len(linked) > self.L:
                out.append(f"{e!r} is linked to {len(linked)} > L = {self.L} elements")
            for f in linked:
                if f not in known:
                    out.append(f"{e!r} is linked to unknown element {f!r}")
                elif e not in self.links.get(f, set()):
                    out.append(f"link {e!r} -> {f!r} is not symmetric")
        return out

    def validate(self) -> None:
        problems = self.violations()
        if problems:
            raise UniverseError("; ".join(problems[:5]))


def upsilon(u: LinkedUniverse, fam: Mapping, i) -> int:
    """Sum of multiplicities in ``fam`` of the elements linked to ``i``."""
    if i not in fam:
        raise KeyError(f"{i!r} is not in the family")
    if i not in u.links:
        raise KeyError(f"{i!r} is not an element of the universe")
    return sum(n for j, n in fam.items() if j in u.links[i])


@dataclass(frozen=True)
class EstimationResult:
    f: float
    g: float
    holds: bool


def estimation_check(u: LinkedUniverse, fam: Mapping) -> EstimationResult:
    """Evaluate both sides of the link-counting inequality for ``fam``.

    ``holds`` requires f - g to exceed a relative rounding slack of 1e-9, so
    it never reports a tie or a rounding artefact as success.
    """
    u.validate()
    if not fam:
        raise ValueError("family must be nonempty")
    for e, n in fam.items():
        if n < 1:
            raise ValueError(f"multiplicity of {e!r} must be >= 1")
        if e not in u.links:
            raise KeyError(f"{e!r} is not an element of the universe")
    C_L = math.log(u.L) + u.L**2
    total = sum(fam.values())
    f = C_L * total + math.fsum(n * math.log(n) for n in fam.values())
    g = math.fsum(n * math.log(upsilon(u, fam, e)) for e, n in fam.items())
    holds = f - g > REL_SLACK * max(abs(f), abs(g), 1.0)
    return EstimationResult(f, g, holds)


def random_universe(rng: random.Random, n_elements: int, L: int,
                    attempts: int | None = None) -> LinkedUniverse:
    """Random bounded-degree relation: random pairs are added while both
    ends have fewer than L links (self-link included)."""
    elements = list(range(n_elements))
    links = {e: {e} for e in elements}
    for _ in range(attempts if attempts is not None else 3 * n_elements * L):
        a, b = rng.randrange(n_elements), rng.randrange(n_elements)
        if a == b or b in links[a]:
            continue
        if len(links[a]) < L and len(links[b]) < L:
            links[a].add(b)
            links[b].add(a)
    return LinkedUniverse(elements, links, L)


def random_family(rng: random.Random, u: LinkedUniverse, max_mult: int = 20) -> dict:
    size = rng.randint(1, len(u.elements))
    chosen = rng.sample(u.elements, size)
    return {e: rng.randint(1, max_mult) for e in chosen}


def lattice_universe(nu: int, radius: int) -> LinkedUniverse:
    """Sites {t} and edges {r, s} within a box, linked when they intersect.

    In the interior each element is linked to at most L = 4 nu + 1 elements.
    """
    pts = list(itertools.product(range(-radius, radius + 1), repeat=nu))
    box = set(pts)
    edges = sorted({e for p in pts for e in neighbor_edges(p) if e[0] in box and e[1] in box})
    elements = [frozenset([p]) for p in pts] + [frozenset(e) for e in edges]
    by_site: dict[Point, list] = {p: [] for p in pts}
    for el in elements:
        for p in el:
            by_site[p].append(el)
    links = {el: {x for p in el for x in by_site[p]} for el in elements}
    return LinkedUniverse(elements, links, 4 * nu + 1)


def semi_invariant_bound(b: Sequence[Point], gamma: Family) -> Fraction:
    """Exact lower estimate of C3^(m+|gamma|) m! gamma!, using a rational
    lower bound on C3; any value below it is below the true bound too."""
    nu = len(b[0]) if b else len(gamma.entries[0][0][0])
    m = len(b)
    return c3_lower_bound(nu) ** (m + len(gamma)) * math.factorial(m) * family_factorial(gamma)


def bound_check_semi_invariant(b: Sequence[Point], gamma: Family) -> bool:
    """|<Q_b, Phi_gamma>_0| <= C3^(m+|gamma|) m! gamma!, compared exactly."""
    return abs(free_semi_invariant(b, gamma)) <= semi_invariant_bound(b, gamma)
