"""Families of lattice edges with multiplicities and their enumeration.

A family gamma is a multiset of nearest-neighbour edges. Its length |gamma|
is the total multiplicity, gamma! the product of multiplicity factorials and
its support the set of edge endpoints. gamma *connects* a sequence of points
b when the graph with vertices b + support(gamma) and the edges of gamma is
connected.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Iterable, Mapping, Sequence

from .lattice import Edge, Point, distance, make_edge, neighbor_edges, shift_edge

log = logging.getLogger(__name__)

# default enumeration caps per dimension; other dimensions use the last entry
DEFAULT_CAPS = {1: 6, 2: 4}
_FALLBACK_CAP = 2


class EnumerationCapExceeded(ValueError):
    pass


class Family:
    """Immutable multiset of canonical edges."""

    __slots__ = ("entries", "_hash")

    def __init__(self, entries: Mapping[Edge, int] | Iterable[tuple[Edge, int]] = ()):
        items = dict(entries) if not isinstance(entries, dict) else entries
        clean = []
        for e, n in items.items():
            if n < 1:
                raise ValueError(f"multiplicity of {e} must be >= 1, got {n}")
            a, b = e
            clean.append((make_edge(tuple(a), tuple(b)), int(n)))
        self.entries: tuple[tuple[Edge, int], ...] = tuple(sorted(clean))
        self._hash = hash(self.entries)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> "Family":
        counts: dict[Edge, int] = {}
        for a, b in edges:
            e = make_edge(tuple(a), tuple(b))
            counts[e] = counts.get(e, 0) + 1
        return cls(counts)

    def __len__(self) -> int:
        return sum(n for _, n in self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, Family) and self.entries == other.entries

    def __lt__(self, other: "Family") -> bool:
        return self.entries < other.entries

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{a}-{b}: {n}" for (a, b), n in self.entries)
        return f"Family({{{inner}}})"

    def edge_sequence(self) -> list[Edge]:
        """Associated sequence: each edge repeated by its multiplicity."""
        return [e for e, n in self.entries for _ in range(n)]

    def distinct_edges(self) -> list[Edge]:
        return [e for e, _ in self.entries]

    def shifted(self, v: Sequence[int]) -> "Family":
        return Family({shift_edge(e, v): n for e, n in self.entries})


def family_length(g: Family) -> int:
    return len(g)


def family_factorial(g: Family) -> int:
    return math.prod(math.factorial(n) for _, n in g.entries)


def family_support(g: Family) -> set[Point]:
    return {p for e, _ in g.entries for p in e}


def _components(vertices: set[Point], edges: Iterable[Edge]) -> int:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = len(vertices)
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            count -= 1
    return count


def connects(b: Sequence[Point], g: Family) -> bool:
    """True iff the associated graph of ``b`` and ``g`` is connected."""
    if not b and not g.entries:
        raise ValueError("both the sequence and the family are empty")
    vertices = {tuple(p) for p in b} | family_support(g)
    return _components(vertices, g.distinct_edges()) == 1


def enumeration_cap(nu: int) -> int:
    return DEFAULT_CAPS.get(nu, _FALLBACK_CAP)


def set_enumeration_cap(nu: int, n: int) -> int:
    """Change the default length cap for dimension ``nu``; returns the old one.

    Enumeration cost grows roughly like (2 nu)^(2n): each extra unit of
    length multiplies the work by an order of magnitude or more.
    """
    if n < 0:
        raise ValueError("cap must be >= 0")
    old = enumeration_cap(nu)
    if n > old:
        log.warning("raising the enumeration cap for nu=%d from %d to %d; cost grows about "
                    "(2 nu)^(2n)", nu, old, n)
    DEFAULT_CAPS[nu] = n
    return old


def _compositions(n: int, parts: int):
    """Ordered tuples of ``parts`` positive ints summing to ``n``."""
    for cuts in itertools.combinations(range(1, n), parts - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def connected_supports(root: Point, max_edges: int) -> list[list[frozenset[Edge]]]:
    """Edge sets E with |E| <= max_edges such that root plus E is connected.

    Returned as levels: ``levels[e]`` holds every such set with e edges.
    Grown one incident edge at a time, deduplicated per level.
    """
    root = tuple(root)
    levels: list[list[frozenset[Edge]]] = [[frozenset()]]
    frontier = {frozenset(): frozenset({root})}
    for e in range(1, max_edges + 1):
        nxt: dict[frozenset[Edge], frozenset[Point]] = {}
        for edges, verts in frontier.items():
            for v in verts:
                for edge in neighbor_edges(v):
                    if edge in edges:
                        continue
                    grown = edges | {edge}
                    if grown not in nxt:
                        nxt[grown] = verts | set(edge)
        frontier = nxt
        levels.append(sorted(nxt, key=lambda s: sorted(s)))
        log.debug("supports rooted at %s with %d edges: %d", root, e, len(nxt))
    return levels


def enumerate_connected(b: Sequence[Point], n: int, cap: int | None = None) -> list[Family]:
    """All families of length exactly ``n`` that connect ``b``, sorted.

    Supports are grown as connected edge sets from the first point of ``b``
    (the locality bound is built in: such a set never reaches further than n
    from the root), kept when they reach every point of ``b``, and then
    multiplicities are distributed over the support.
    """
    b = [tuple(p) for p in b]
    if not b:
        raise ValueError("base sequence must be nonempty")
    if n < 0:
        raise ValueError("length must be >= 0")
    nu = len(b[0])
    cap = enumeration_cap(nu) if cap is None else cap
    if n > cap:
        raise EnumerationCapExceeded(
            f"family length {n} exceeds the enumeration cap {cap} for nu={nu}")
    targets = set(b)
    if n == 0:
        return [Family()] if len(targets) == 1 else []
    root = b[0]
    # every target must be reachable with n edges
    if any(distance(root, t) > n for t in targets):
        return []
    levels = connected_supports(root, n)
    out = []
    for e in range(1, n + 1):
        for support in levels[e]:
            verts = {p for edge in support for p in edge}
            if not targets <= verts:
                continue
            edges = sorted(support)
            for mult in _compositions(n, e):
                out.append(Family(dict(zip(edges, mult))))
    out.sort()
    return out


def candidate_edges(b: Sequence[Point], radius: int) -> list[Edge]:
    """Edges whose endpoints are both within l1 distance ``radius`` of b."""
    b = [tuple(p) for p in b]
    nu = len(b[0])
    pts = set()
    for p in b:
        for d in itertools.product(range(-radius, radius + 1), repeat=nu):
            if sum(abs(x) for x in d) <= radius:
                pts.add(tuple(a + x for a, x in zip(p, d)))
    edges = set()
    for p in pts:
        for e in neighbor_edges(p):
            if e[0] in pts and e[1] in pts:
                edges.add(e)
    return sorted(edges)


def enumerate_connected_bruteforce(b: Sequence[Point], n: int) -> list[Family]:
    """Filter every edge multiset of size n near b through :func:`connects`.

    Exponentially slow; exists as an independent check of
    :func:`enumerate_connected`.
    """
    b = [tuple(p) for p in b]
    if n == 0:
        return [Family()] if connects(b, Family()) else []
    pool = candidate_edges(b, n)
    out = []
    for combo in itertools.combinations_with_replacement(pool, n):
        g = Family.from_edges(combo)
        if connects(b, g):
            out.append(g)
    return sorted(out)


# -- line-oriented text form -------------------------------------------------

def _fmt_point(p: Point) -> str:
    return ",".join(str(c) for c in p)


def dumps_families(families: Iterable[Family]) -> str:
    """One edge per line as ``x1,..,xn y1,..,yn multiplicity``; families are
    separated by a line holding ``--``. The empty family is a bare ``--``."""
    blocks = []
    for g in families:
        lines = [f"{_fmt_point(a)} {_fmt_point(b)} {n}" for (a, b), n in g.entries]
        blocks.append("\n".join(lines + ["--"]))
    return "\n".join(blocks) + ("\n" if blocks else "")


def loads_families(text: str) -> list[Family]:
    out = []
    current: dict[Edge, int] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "--":
            out.append(Family(current))
            current = {}
            continue
        a, b, n = line.split()
        pa = tuple(int(c) for c in a.split(","))
        pb = tuple(int(c) for c in b.split(","))
        current[make_edge(pa, pb)] = int(n)
    if current:
        raise ValueError("unterminated family at end of input")
    return out
