"""Lattice geometry on Z^nu: points, the l1 metric, nearest-neighbour edges,
cubes Lambda_N and the block map of the renormalization group.

Points are plain tuples of ints. An edge is a pair of points at distance 1,
stored with the lexicographically smaller endpoint first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

Point = tuple[int, ...]
Edge = tuple[Point, Point]

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1


def _check_coords(*points: Sequence[int]) -> None:
    for p in points:
        for c in p:
            if not _INT64_MIN <= c <= _INT64_MAX:
                raise OverflowError(f"coordinate {c} outside the 64-bit range")


def point(*coords: int) -> Point:
    p = tuple(int(c) for c in coords)
    if not p:
        raise ValueError("a point needs at least one coordinate")
    _check_coords(p)
    return p


def origin(nu: int) -> Point:
    if nu < 1:
        raise ValueError("dimension must be >= 1")
    return (0,) * nu


def distance(s: Sequence[int], t: Sequence[int]) -> int:
    """l1 distance sum_i |s_i - t_i|."""
    if len(s) != len(t):
        raise ValueError(f"dimension mismatch: {len(s)} vs {len(t)}")
    return sum(abs(a - b) for a, b in zip(s, t))


def make_edge(a: Point, b: Point) -> Edge:
    """Canonical edge {a, b}; raises unless the points are neighbours."""
    if distance(a, b) != 1:
        raise ValueError(f"{a} and {b} are not nearest neighbours")
    return (a, b) if a < b else (b, a)


def shift(t: Point, v: Sequence[int]) -> Point:
    out = tuple(a + b for a, b in zip(t, v))
    _check_coords(out)
    return out


def shift_edge(e: Edge, v: Sequence[int]) -> Edge:
    # translation preserves lexicographic order
    return (shift(e[0], v), shift(e[1], v))


def neighbors(t: Point) -> list[Point]:
    out = []
    for i in range(len(t)):
        for d in (-1, 1):
            q = list(t)
            q[i] += d
            out.append(tuple(q))
    _check_coords(*out)
    return out


def neighbor_edges(t: Point) -> list[Edge]:
    """The 2*nu edges containing ``t``, in canonical order."""
    return sorted(make_edge(t, q) for q in neighbors(t))


def cube_points(N: int, nu: int = 1) -> list[Point]:
    """All points of Lambda_N = {t : |t_i| <= N}, lexicographically sorted."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if nu < 1:
        raise ValueError("dimension must be >= 1")
    return list(itertools.product(range(-N, N + 1), repeat=nu))


@dataclass(frozen=True)
class Cube:
    """The cube Lambda_N in Z^nu with free boundary.

    Sites are indexed in lexicographic order, which coincides with C order of a
    numpy array of shape ``(2N+1,) * nu`` addressed by ``t + N``.
    """

    nu: int
    N: int

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError("dimension must be >= 1")
        if self.N < 0:
            raise ValueError("N must be >= 0")

    @property
    def side(self) -> int:
        return 2 * self.N + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.nu

    @property
    def size(self) -> int:
        return self.side**self.nu

    def points(self) -> list[Point]:
        return cube_points(self.N, self.nu)

    def __contains__(self, t) -> bool:
        return len(t) == self.nu and all(abs(c) <= self.N for c in t)

    def index(self, t: Point) -> int:
        """Flat (lexicographic) index of a site."""
        if t not in self:
            raise ValueError(f"point {t} is outside the cube Lambda_{self.N}")
        idx = 0
        for c in t:
            idx = idx * self.side + (c + self.N)
        return idx

    def array_index(self, t: Point) -> tuple[int, ...]:
        if t not in self:
            raise ValueError(f"point {t} is outside the cube Lambda_{self.N}")
        return tuple(c + self.N for c in t)

    def edges(self) -> list[Edge]:
        """R_N: all nearest-neighbour pairs with both ends in the cube."""
        out = []
        for t in self.points():
            for i in range(self.nu):
                if t[i] < self.N:
                    q = t[:i] + (t[i] + 1,) + t[i + 1:]
                    out.append((t, q))
        return sorted(out)


@dataclass(frozen=True)
class BlockParams:
    k: int
    alpha: float

    def check(self, nu: int) -> None:
        if self.k <= 1:
            raise ValueError("block side k must be > 1")
        if self.alpha < nu:
            raise ValueError("alpha must be >= nu")


def block_map(t: Sequence[int], k: int) -> Point:
    """G_k(t): coordinate-wise floor division by ``k``.

    Floor (not truncation) gives every block exactly k^nu preimages.
    """
    if k <= 1:
        raise ValueError("block side k must be > 1")
    return tuple(c // k for c in t)


def block_preimage(tau: Sequence[int], k: int) -> list[Point]:
    """The k^nu sites t with block_map(t, k) == tau, lexicographically sorted."""
    if k <= 1:
        raise ValueError("block side k must be > 1")
    ranges = [range(k * c, k * c + k) for c in tau]
    out = list(itertools.product(*ranges))
    _check_coords(out[0], out[-1])
    return out


def full_blocks(cube: Cube, k: int) -> list[Point]:
    """Block labels tau whose whole preimage lies inside ``cube``."""
    if k <= 1:
        raise ValueError("block side k must be > 1")
    lo = -(cube.N // k)
    hi = (cube.N - k + 1) // k
    return list(itertools.product(range(lo, hi + 1), repeat=cube.nu))


def points_of(seq: Iterable[Sequence[int]]) -> list[Point]:
    return [tuple(int(c) for c in p) for p in seq]
