"""Finite-volume Ising measures: exact enumeration, the 1-D transfer matrix,
Metropolis sampling, the block-spin transform and empirical cumulants.

The Gibbs weight of a configuration on Lambda_N is exp(lambda * sum_{r~s}
w(r) w(s)) with free boundary (only edges inside the cube).
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .cumulants import _check_order, cumulant_from_table
from .lattice import Cube, Point, block_preimage, full_blocks

log = logging.getLogger(__name__)

MAX_EXACT_SITES = 25
_CHUNK = 1 << 18


@dataclass(frozen=True)
class GibbsSpec:
    nu: int
    N: int
    lam: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.nu < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def cube(self) -> Cube:
        return Cube(self.nu, self.N)


class SpinConfig:
    """A +-1 assignment to every site of a cube, stored as an int8 array of
    shape ``cube.shape`` addressed by ``t + N``."""

    __slots__ = ("cube", "spins")

    def __init__(self, cube: Cube, spins: np.ndarray):
        spins = np.asarray(spins, dtype=np.int8)
        if spins.shape != cube.shape:
            raise ValueError(f"spin array shape {spins.shape} does not match cube {cube.shape}")
        if not np.all(np.abs(spins) == 1):
            raise ValueError("spins must be +1 or -1")
        self.cube = cube
        self.spins = spins

    @classmethod
    def constant(cls, cube: Cube, value: int = 1) -> "SpinConfig":
        return cls(cube, np.full(cube.shape, value, dtype=np.int8))

    def __getitem__(self, t: Point) -> int:
        return int(self.spins[self.cube.array_index(t)])

    def flipped(self) -> "SpinConfig":
        return SpinConfig(self.cube, -self.spins)

    def copy(self) -> "SpinConfig":
        return SpinConfig(self.cube, self.spins.copy())


def _bond_sum(spins: np.ndarray) -> np.ndarray:
    """sum over in-cube nearest-neighbour pairs of s_r s_s."""
    total = 0
    for ax in range(spins.ndim):
        a = np.take(spins, range(0, spins.shape[ax] - 1), axis=ax).astype(np.int64)
        b = np.take(spins, range(1, spins.shape[ax]), axis=ax)
        total = total + int(np.sum(a * b))
    return total


def energy(spec: GibbsSpec, cfg: SpinConfig) -> float:
    """U_N = -lambda sum_{r~s in Lambda_N} w(r) w(s)."""
    if cfg.cube != spec.cube:
        raise ValueError("configuration does not live on the spec's cube")
    return -spec.lam * _bond_sum(cfg.spins)


# -- exact enumeration -------------------------------------------------------

def _odd_mask(cube: Cube, ms) -> int:
    counts = ms if isinstance(ms, Mapping) else Counter(tuple(p) for p in ms)
    mask = 0
    for p, n in counts.items():
        if n % 2:
            mask |= 1 << cube.index(tuple(p))
        elif tuple(p) not in cube:
            raise ValueError(f"point {p} is outside the cube Lambda_{cube.N}")
    return mask


def _exact_expectations(spec: GibbsSpec, masks: Sequence[int]) -> np.ndarray:
    """E[prod_{i in mask} s_i] for each site bitmask, by summing over all
    2^|Lambda_N| configurations. Bit i of a configuration integer set means
    spin -1 at flat site index i."""
    cube = spec.cube
    n_sites = cube.size
    if n_sites > MAX_EXACT_SITES:
        raise ValueError(
            f"{n_sites} sites exceed the full-enumeration guard of {MAX_EXACT_SITES}")
    index = {t: i for i, t in enumerate(cube.points())}
    edges = [(index[a], index[b]) for a, b in cube.edges()]
    n_edges = len(edges)
    lam = spec.lam
    masks_arr = np.array(masks, dtype=np.int64)
    Z = 0.0
    num = np.zeros(len(masks), dtype=np.float64)
    total = 1 << n_sites
    for start in range(0, total, _CHUNK):
        c = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        disagree = np.zeros(c.shape, dtype=np.int64)
        for i, j in edges:
            disagree += ((c >> i) ^ (c >> j)) & 1
        # sum s_r s_s = n_edges - 2 * disagreements; shift keeps exp <= 1
        w = np.exp(lam * (n_edges - 2 * disagree) - abs(lam) * n_edges)
        Z += w.sum()
        for k, mask in enumerate(masks_arr):
            sign = 1 - 2 * (np.bitwise_count(c & mask) & 1).astype(np.int64)
            num[k] += np.dot(w, sign)
    return num / Z


def exact_moment(spec: GibbsSpec, ms) -> float:
    """E_{lambda,N}[prod Q_t^mult] by full enumeration (<= 25 sites).

    ``ms`` is a point -> multiplicity mapping or an iterable of points.
    """
    mask = _odd_mask(spec.cube, ms)
    return float(_exact_expectations(spec, [mask])[0])


def exact_semi_invariant(spec: GibbsSpec, b: Sequence[Point]) -> float:
    """<Q_t1, ..., Q_tm>_{lambda,N} from exactly enumerated moments."""
    b = [tuple(p) for p in b]
    m = len(b)
    _check_order(m)
    cube = spec.cube
    site_masks = [1 << cube.index(t) for t in b]
    subset_masks = [0] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        subset_masks[mask] = subset_masks[mask ^ low] ^ site_masks[low.bit_length() - 1]
    distinct = sorted(set(subset_masks[1:]))
    values = dict(zip(distinct, _exact_expectations(spec, distinct)))
    table = [1.0] + [values[subset_masks[mask]] for mask in range(1, 1 << m)]
    return float(cumulant_from_table(table, m))


# -- one-dimensional transfer matrix -----------------------------------------

def _transfer(lam: float) -> np.ndarray:
    return np.array([[math.exp(lam), math.exp(-lam)], [math.exp(-lam), math.exp(lam)]])


def chain_moment(lam: float, N: int, ms) -> float:
    """E[prod Q_t^mult] on the free-boundary chain {-N..N} via 2x2 transfer
    matrices with sign insertions at odd-multiplicity sites."""
    counts = ms if isinstance(ms, Mapping) else Counter(tuple(p) for p in ms)
    odd = set()
    for p, n in counts.items():
        (x,) = tuple(p)
        if abs(x) > N:
            raise ValueError(f"site {x} outside the chain")
        if n % 2:
            odd.add(x)
    T = _transfer(lam)
    sign = np.array([1.0, -1.0])
    z = np.ones(2)
    w = np.ones(2)
    for x in range(-N, N + 1):
        if x > -N:
            z = z @ T
            w = w @ T
        if x in odd:
            w = w * sign
        scale = z.sum()
        z, w = z / scale, w / scale
    return float(w.sum() / z.sum())


def chain_semi_invariant(lam: float, N: int, b: Sequence[Point]) -> float:
    """<Q_t1, ..., Q_tm>_{lambda,N} on the chain from transfer-matrix moments."""
    b = [tuple(p) for p in b]
    m = len(b)
    _check_order(m)
    table = [1.0] * (1 << m)
    for mask in range(1, 1 << m):
        table[mask] = chain_moment(lam, N, [b[i] for i in range(m) if mask >> i & 1])
    return float(cumulant_from_table(table, m))


def transfer_pair_correlation(lam: float, d: int) -> float:
    """Infinite-chain <Q_0 Q_d> = (mu_2 / mu_1)^d from the transfer matrix
    eigenvalues mu_1 = 2 cosh(lambda) > mu_2 = 2 sinh(lambda)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    if d == 0:
        return 1.0
    vals, vecs = np.linalg.eigh(_transfer(lam))
    # eigenvectors (1,1) and (1,-1); spin operator swaps them
    order = np.argsort(np.abs(vecs[0] + vecs[1]))[::-1]
    mu_sym, mu_anti = vals[order[0]], vals[order[1]]
    return float((mu_anti / mu_sym) ** d)


def chain_block_distribution(lam: float, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact law of the sum of k consecutive spins of the infinite chain.

    The (1, 1) boundary vector is the leading eigenvector of the transfer
    matrix, so a free segment has the same marginal as the infinite chain.
    Returns the possible sums -k, -k+2, ..., k and their probabilities.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    e_same, e_diff = math.exp(lam), math.exp(-lam)
    # w[s, j]: weight of paths ending in spin s (0: +1, 1: -1) with sum 2j - i
    w = np.zeros((2, k + 1))
    w[0, 1] = 1.0
    w[1, 0] = 1.0
    for _ in range(k - 1):
        nxt = np.zeros_like(w)
        nxt[0, 1:] = e_same * w[0, :-1] + e_diff * w[1, :-1]
        nxt[1, :] = e_diff * w[0, :] + e_same * w[1, :]
        w = nxt / nxt.sum()
    p = w.sum(axis=0)
    return np.arange(-k, k + 1, 2, dtype=float), p / p.sum()


def chain_block_cumulants(lam: float, k: int, alpha: float = 1.0,
                          max_order: int = 4) -> list[float]:
    """Exact cumulants of orders 1..max_order of Y = k^(-alpha/2) * (sum of
    k consecutive spins) in the infinite one-dimensional chain."""
    values, probs = chain_block_distribution(lam, k)
    y = values * k ** (-alpha / 2)
    mean = float(np.dot(probs, y))
    yc = y - mean
    out = []
    for r in range(1, max_order + 1):
        table = [1.0] * (1 << r)
        for mask in range(1, 1 << r):
            table[mask] = float(np.dot(probs, yc ** bin(mask).count("1")))
        val = float(cumulant_from_table(table, r))
        out.append(val + mean if r == 1 else val)
    return out


# -- Metropolis --------------------------------------------------------------

class MetropolisSample(NamedTuple):
    sweep: int
    config: SpinConfig


def chain_seed(seed: int, chain: int) -> np.random.SeedSequence:
    """Deterministic child seed for parallel chain ``chain``."""
    return np.random.SeedSequence(seed, spawn_key=(chain,))


def _neighbor_field(spins: np.ndarray) -> np.ndarray:
    h = np.zeros(spins.shape, dtype=np.int16)
    for ax in range(spins.ndim):
        lo = [slice(None)] * spins.ndim
        hi = [slice(None)] * spins.ndim
        lo[ax] = slice(0, -1)
        hi[ax] = slice(1, None)
        h[tuple(lo)] += spins[tuple(hi)]
        h[tuple(hi)] += spins[tuple(lo)]
    return h


def _sublattices(shape: tuple[int, ...]) -> list[np.ndarray]:
    parity = sum(np.indices(shape)) % 2
    return [parity == 0, parity == 1]


def metropolis_run(spec: GibbsSpec, seed, sweeps: int, burn_in: int = 0,
                   thin: int = 1) -> Iterator[MetropolisSample]:
    """Single-site Metropolis chain targeting the Gibbs measure on Lambda_N.

    At each site the proposal is a uniformly random sign (so half the
    proposals leave the spin unchanged) accepted with probability
    min(1, exp(-dU)). A sweep updates the two checkerboard sublattices in
    turn; sites of one sublattice do not interact, so this equals a
    sequential sweep in that order. After ``burn_in`` sweeps every
    ``thin``-th sweep is emitted as a copy.
    """
    if not sweeps > burn_in >= 0:
        raise ValueError("need sweeps > burn_in >= 0")
    if thin < 1:
        raise ValueError("thin must be >= 1")
    rng = np.random.default_rng(seed)
    cube = spec.cube
    spins = np.where(rng.random(cube.shape) < 0.5, 1, -1).astype(np.int8)
    masks = _sublattices(cube.shape)
    lam = spec.lam
    for sweep in range(1, sweeps + 1):
        for mask in masks:
            h = _neighbor_field(spins)
            propose = rng.random(cube.shape) < 0.5
            accept = rng.random(cube.shape) < np.exp(-2.0 * lam * spins * h)
            spins[mask & propose & accept] *= -1
        if sweep > burn_in and (sweep - burn_in) % thin == 0:
            yield MetropolisSample(sweep, SpinConfig(cube, spins.copy()))


# -- block spins -------------------------------------------------------------

def block_transform(cfg: SpinConfig, k: int, alpha: float,
                    taus: Sequence[Point]) -> dict[Point, float]:
    """Y_tau = k^(-alpha/2) * sum of the spins in the block of tau."""
    out = {}
    scale = k ** (-alpha / 2)
    for tau in taus:
        tau = tuple(tau)
        pts = block_preimage(tau, k)
        if pts[0] not in cfg.cube or pts[-1] not in cfg.cube:
            raise ValueError(f"block {tau} is not inside the cube")
        lo = cfg.cube.array_index(pts[0])
        sl = tuple(slice(i, i + k) for i in lo)
        out[tau] = scale * float(cfg.spins[sl].sum(dtype=np.int64))
    return out


def block_field(spins: np.ndarray, cube: Cube, k: int, alpha: float):
    """Block variables for every block fully inside the cube.

    ``spins`` has shape ``batch + cube.shape``. Returns the sorted block
    labels and an array of shape ``batch + (n_blocks,) * nu``.
    """
    taus = full_blocks(cube, k)
    if not taus:
        raise ValueError(f"no block of side {k} fits in the cube")
    nu = cube.nu
    lo = taus[0][0] * k + cube.N
    nb = taus[-1][0] - taus[0][0] + 1
    batch = spins.shape[: spins.ndim - nu]
    sl = (Ellipsis,) + (slice(lo, lo + nb * k),) * nu
    sub = spins[sl].astype(np.int64)
    shape = batch + sum(((nb, k) for _ in range(nu)), ())
    sub = sub.reshape(shape)
    axes = tuple(len(batch) + 2 * i + 1 for i in range(nu))
    return taus, sub.sum(axis=axes) * k ** (-alpha / 2)


# -- empirical cumulants -----------------------------------------------------

@dataclass(frozen=True)
class CumulantEstimate:
    order: int
    value: float
    n_samples: int
    std_error: float


def _jackknife_cumulant(data: np.ndarray, cols: Sequence[int], n_bins: int) -> tuple[float, float]:
    """Plug-in joint cumulant of the given columns with a delete-one-bin
    jackknife error. Bins are contiguous runs of rows."""
    n = data.shape[0]
    m = len(cols)
    n_bins = min(n_bins, n)
    # cumulants of order >= 2 are shift invariant; centre for stability
    means = data.mean(axis=0)
    x = data - means
    bounds = np.linspace(0, n, n_bins + 1).astype(int)
    counts = np.diff(bounds).astype(float)
    table: list = [np.ones(n_bins + 1)] * (1 << m)
    prod_cache: dict[tuple[int, ...], np.ndarray] = {}
    for mask in range(1, 1 << m):
        key = tuple(sorted(cols[i] for i in range(m) if mask >> i & 1))
        if key not in prod_cache:
            p = np.ones(n)
            for c in key:
                p = p * x[:, c]
            sums = np.add.reduceat(p, bounds[:-1])
            total = p.sum()
            prod_cache[key] = np.concatenate(([total / n], (total - sums) / (n - counts)))
        table[mask] = prod_cache[key]
    vals = np.asarray(cumulant_from_table(table, m), dtype=float)
    if m == 1:
        vals = vals + means[cols[0]]
    full, reps = float(vals[0]), vals[1:]
    se = math.sqrt((n_bins - 1) / n_bins * np.sum((reps - reps.mean()) ** 2)) if n_bins > 1 else math.inf
    return full, se


def empirical_cumulants(samples, max_order: int = 4, n_bins: int = 50) -> list[CumulantEstimate]:
    """Plug-in estimates of the cumulants of orders 1..max_order of a scalar
    sample, each with a jackknife standard error over ``n_bins`` contiguous
    bins (so autocorrelated streams should be passed in time order)."""
    x = np.asarray(samples, dtype=float).reshape(-1)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    if not 1 <= max_order <= 4:
        raise ValueError("max_order must be between 1 and 4")
    data = x[:, None]
    out = []
    for r in range(1, max_order + 1):
        value, se = _jackknife_cumulant(data, [0] * r, n_bins)
        out.append(CumulantEstimate(r, value, x.size, se))
    return out


def empirical_joint_cumulant(samples, columns: Sequence[int], n_bins: int = 50) -> CumulantEstimate:
    """Plug-in joint cumulant <X_c1, ..., X_cr> of columns of a 2-D sample."""
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2:
        raise ValueError("samples must be 2-D (rows are draws)")
    if data.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    if not 1 <= len(columns) <= 4:
        raise ValueError("joint order must be between 1 and 4")
    value, se = _jackknife_cumulant(data, list(columns), n_bins)
    return CumulantEstimate(len(columns), value, data.shape[0], se)


# -- block-spin experiment ---------------------------------------------------

@dataclass
class BlockStats:
    k: int
    cumulants: list[CumulantEstimate]
    adjacent_cov: CumulantEstimate | None
    n_blocks: int
    n_emissions: int


def run_block_experiment(spec: GibbsSpec, ks: Sequence[int], alpha: float, seed: int,
                         sweeps: int, burn_in: int, thin: int, max_order: int = 4,
                         n_bins: int = 50, sample_sink=None) -> dict[int, BlockStats]:
    """Sample the Gibbs measure and estimate cumulants of block spins.

    Every block fully inside the cube contributes one sample per emission;
    samples are ordered emission-major so jackknife bins span whole sweeps.
    The adjacent-block covariance pairs each block with its neighbour along
    the first axis. ``sample_sink(sweep, {k: Y array})`` sees each emission.
    """
    cube = spec.cube
    for k in ks:
        if not full_blocks(cube, k):
            raise ValueError(f"cube Lambda_{spec.N} holds no block of side {k}")
    collected: dict[int, list[np.ndarray]] = {k: [] for k in ks}
    n_emit = 0
    for sample in metropolis_run(spec, seed, sweeps, burn_in, thin):
        per_k = {}
        for k in ks:
            _, Y = block_field(sample.config.spins, cube, k, alpha)
            collected[k].append(Y)
            per_k[k] = Y
        if sample_sink is not None:
            sample_sink(sample.sweep, per_k)
        n_emit += 1
        if n_emit % 500 == 0:
            log.info("emission %d (sweep %d)", n_emit, sample.sweep)
    if n_emit < 1:
        raise ValueError("no emissions; increase sweeps")
    out = {}
    for k in ks:
        Y = np.stack(collected[k])  # (n_emit,) + (nb,)*nu
        flat = Y.reshape(n_emit, -1).reshape(-1)
        cums = empirical_cumulants(flat, max_order, n_bins)
        adj = None
        if Y.shape[1] > 1:
            left = np.moveaxis(Y, 1, -1)[..., :-1].reshape(-1)
            right = np.moveaxis(Y, 1, -1)[..., 1:].reshape(-1)
            adj = empirical_joint_cumulant(np.column_stack([left, right]), [0, 1], n_bins)
        out[k] = BlockStats(k, cums, adj, int(np.prod(Y.shape[1:])), n_emit)
    return out
