import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isingclt.free_field import free_moment, free_semi_invariant
from isingclt.gibbs import (MAX_EXACT_SITES, GibbsSpec, SpinConfig, block_field, block_transform,
                            chain_block_cumulants, chain_block_distribution, chain_moment,
                            chain_seed, chain_semi_invariant, empirical_cumulants,
                            empirical_joint_cumulant, energy, exact_moment, exact_semi_invariant,
                            metropolis_run, run_block_experiment, transfer_pair_correlation)
from isingclt.lattice import Cube, full_blocks
from isingclt.verify import suite_taylor


def brute_gibbs_moment(spec, ms):
    """Direct sum over configurations with weights exp(-U)."""
    cube = spec.cube
    pts = cube.points()
    num = den = 0.0
    for signs in itertools.product((-1, 1), repeat=len(pts)):
        cfg = SpinConfig(cube, np.array(signs).reshape(cube.shape))
        w = math.exp(-energy(spec, cfg))
        den += w
        num += w * math.prod(cfg[p] ** n for p, n in ms.items())
    return num / den


# -- energy and exact enumeration -------------------------------------------

def test_energy_examples():
    cube = Cube(1, 1)
    up = SpinConfig.constant(cube)
    assert energy(GibbsSpec(1, 1, 0.0), up) == 0
    assert energy(GibbsSpec(1, 1, 0.3), up) == pytest.approx(-0.6)
    rng = np.random.default_rng(0)
    spec = GibbsSpec(2, 2, 0.7)
    for _ in range(10):
        cfg = SpinConfig(spec.cube, rng.choice([-1, 1], size=spec.cube.shape))
        assert energy(spec, cfg) == energy(spec, cfg.flipped())
        # direct count over the edge list
        direct = -0.7 * sum(cfg[a] * cfg[b] for a, b in spec.cube.edges())
        assert energy(spec, cfg) == pytest.approx(direct)


def test_spin_config_validation():
    cube = Cube(1, 1)
    with pytest.raises(ValueError):
        SpinConfig(cube, np.array([1, 0, 1]))
    with pytest.raises(ValueError):
        SpinConfig(cube, np.ones(4))
    assert SpinConfig.constant(cube, -1)[(1,)] == -1


def test_exact_moment_against_direct_sum():
    for spec in (GibbsSpec(1, 2, 0.4), GibbsSpec(2, 1, -0.3)):
        pts = spec.cube.points()
        for ms in ({pts[0]: 1, pts[1]: 1}, {pts[0]: 1, pts[-1]: 1}, {pts[1]: 2, pts[2]: 1, pts[3]: 1}):
            assert exact_moment(spec, ms) == pytest.approx(brute_gibbs_moment(spec, ms), abs=1e-12)


def test_exact_moment_examples():
    spec = GibbsSpec(1, 3, 0.2)
    assert exact_moment(spec, {(1,): 1}) == pytest.approx(0, abs=1e-15)
    assert exact_moment(spec, {(1,): 2}) == pytest.approx(1)
    assert exact_semi_invariant(spec, [(2,), (2,)]) == pytest.approx(1)


def test_lambda_zero_matches_free_measure():
    for nu, N in ((1, 1), (1, 2), (1, 3), (2, 1)):
        spec = GibbsSpec(nu, N, 0.0)
        pts = spec.cube.points()
        for r in (1, 2, 3):
            for sites in itertools.combinations(pts, r):
                for mults in itertools.product((1, 2, 3), repeat=r):
                    ms = dict(zip(sites, mults))
                    assert exact_moment(spec, ms) == float(free_moment(ms))
        b = [pts[0], pts[0], pts[1], pts[1]]
        assert exact_semi_invariant(spec, b) == pytest.approx(float(free_semi_invariant(b)))


def test_enumeration_guard():
    assert MAX_EXACT_SITES == 25
    with pytest.raises(ValueError):
        exact_moment(GibbsSpec(1, 13, 0.1), {(0,): 2})
    with pytest.raises(ValueError):
        exact_moment(GibbsSpec(1, 2, 0.1), {(3,): 1})


# -- transfer matrix ---------------------------------------------------------

def test_transfer_pair_correlation_examples():
    assert transfer_pair_correlation(0.3, 0) == 1.0
    assert transfer_pair_correlation(0.0, 3) == 0.0
    assert transfer_pair_correlation(0.1, 2) == pytest.approx(math.tanh(0.1) ** 2, rel=1e-12)
    # finite chain, far from the boundary, sees the same value
    assert chain_moment(0.1, 12, [(0,), (2,)]) == pytest.approx(math.tanh(0.1) ** 2, abs=1e-4)


@given(st.floats(-0.8, 0.8), st.integers(1, 6))
@settings(max_examples=40)
def test_chain_moment_matches_enumeration(lam, N):
    spec = GibbsSpec(1, N, lam)
    pts = spec.cube.points()
    for ms in ([pts[0], pts[-1]], [pts[0], pts[1], pts[1], pts[-1]], [pts[N], pts[-1]]):
        assert chain_moment(lam, N, ms) == pytest.approx(exact_moment(spec, ms), abs=1e-12)
    b = [pts[0], pts[N], pts[N], pts[-1]]
    assert chain_semi_invariant(lam, N, b) == pytest.approx(exact_semi_invariant(spec, b), abs=1e-11)


def test_free_chain_pair_is_tanh_power():
    # on the free-boundary chain <Q_s Q_t> = tanh^|s-t| exactly, at any N
    for d in range(1, 5):
        assert chain_moment(0.3, 6, [(-2,), (d - 2,)]) == pytest.approx(math.tanh(0.3) ** d)


def test_block_distribution():
    vals, probs = chain_block_distribution(0.0, 4)
    assert list(vals) == [-4, -2, 0, 2, 4]
    assert np.allclose(probs, [1 / 16, 4 / 16, 6 / 16, 4 / 16, 1 / 16])
    c = chain_block_cumulants(0.0, 4)
    assert c == pytest.approx([0, 1, 0, -2 / 4], abs=1e-12)
    # variance of k consecutive spins from pair correlations
    lam, k = 0.1, 16
    t = math.tanh(lam)
    var = sum(t ** abs(i - j) for i in range(k) for j in range(k)) / k
    assert chain_block_cumulants(lam, k)[1] == pytest.approx(var, rel=1e-12)


def test_block_cumulants_approach_gaussian():
    lam = 0.1
    vals = {k: chain_block_cumulants(lam, k) for k in (4, 16, 64, 256)}
    assert vals[256][1] == pytest.approx(math.exp(2 * lam), abs=0.01)
    assert abs(vals[256][3]) < abs(vals[64][3]) < abs(vals[16][3]) < abs(vals[4][3])


# -- Metropolis --------------------------------------------------------------

def test_metropolis_deterministic():
    spec = GibbsSpec(2, 3, 0.2)
    a = [s.config.spins for s in metropolis_run(spec, 7, 30, burn_in=5, thin=5)]
    b = [s.config.spins for s in metropolis_run(spec, 7, 30, burn_in=5, thin=5)]
    c = [s.config.spins for s in metropolis_run(spec, 8, 30, burn_in=5, thin=5)]
    assert len(a) == 5
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not all(np.array_equal(x, y) for x, y in zip(a, c))
    assert [s.sweep for s in metropolis_run(spec, 7, 30, burn_in=5, thin=5)] == [10, 15, 20, 25, 30]


def test_chain_seeds_differ():
    s0 = np.random.default_rng(chain_seed(1, 0)).integers(1 << 30)
    s1 = np.random.default_rng(chain_seed(1, 1)).integers(1 << 30)
    assert s0 != s1
    assert s0 == np.random.default_rng(chain_seed(1, 0)).integers(1 << 30)


def test_metropolis_free_mean():
    spec = GibbsSpec(1, 2, 0.0)
    q = np.array([s.config[(0,)] for s in metropolis_run(spec, 3, 100_000)])
    mean = empirical_cumulants(q, 1)[0]
    assert abs(mean.value) <= 4 * mean.std_error


def test_metropolis_pair_correlation():
    spec = GibbsSpec(1, 32, 0.1)
    prods = np.array([s.config[(0,)] * s.config[(1,)]
                      for s in metropolis_run(spec, 4, 20_000, burn_in=200)])
    est = empirical_cumulants(prods, 1)[0]
    exact = chain_moment(0.1, 32, [(0,), (1,)])
    assert abs(est.value - exact) <= 4 * est.std_error


def test_metropolis_two_dimensional_small_cube():
    # 3x3 cube, exact nearest-neighbour correlation by enumeration
    spec = GibbsSpec(2, 1, 0.3)
    prods = np.array([s.config[(0, 0)] * s.config[(1, 0)]
                      for s in metropolis_run(spec, 5, 40_000, burn_in=200)])
    est = empirical_cumulants(prods, 1)[0]
    exact = exact_moment(spec, {(0, 0): 1, (1, 0): 1})
    assert abs(est.value - exact) <= 4 * est.std_error


# -- block spins ---------------------------------------------------------------

def test_block_transform_examples():
    cube = Cube(2, 4)
    up = SpinConfig.constant(cube)
    assert block_transform(up, 2, 2.0, [(0, 0), (-1, 1)]) == {(0, 0): 2.0, (-1, 1): 2.0}
    alt = SpinConfig(Cube(1, 4), np.array([(-1) ** i for i in range(9)]))
    assert block_transform(alt, 2, 1.0, [(0,), (1,), (-1,)]) == {(0,): 0.0, (1,): 0.0, (-1,): 0.0}
    with pytest.raises(ValueError):
        block_transform(up, 2, 2.0, [(2, 0)])


def test_block_field_matches_block_transform():
    rng = np.random.default_rng(2)
    for nu, N, k in ((1, 9, 3), (2, 5, 2)):
        cube = Cube(nu, N)
        cfg = SpinConfig(cube, rng.choice([-1, 1], size=cube.shape))
        taus, Y = block_field(cfg.spins, cube, k, 1.3)
        assert taus == full_blocks(cube, k)
        ref = block_transform(cfg, k, 1.3, taus)
        assert np.allclose(Y.reshape(-1), [ref[t] for t in taus])
        batch = np.stack([cfg.spins, -cfg.spins])
        _, YB = block_field(batch, cube, k, 1.3)
        assert np.allclose(YB[0], Y) and np.allclose(YB[1], -Y)


def test_block_variance_at_zero_coupling():
    spec = GibbsSpec(1, 256, 0.0)
    res = run_block_experiment(spec, [4, 16], 1.0, 9, 400, 20, 1)
    for k in (4, 16):
        var = res[k].cumulants[1]
        assert abs(var.value - 1) <= 4 * var.std_error


def test_block_cumulants_match_exact_chain():
    lam = 0.1
    spec = GibbsSpec(1, 1024, lam)
    res = run_block_experiment(spec, [4, 16], 1.0, 11, 600, 100, 1)
    for k in (4, 16):
        exact = chain_block_cumulants(lam, k)
        for est, ref in zip(res[k].cumulants[1:], exact[1:]):
            assert abs(est.value - ref) <= 4 * est.std_error, (k, est, ref)


def test_block_translation_invariance():
    # cumulants of Y at two different block labels agree within 4 joint SE
    spec = GibbsSpec(1, 512, 0.1)
    k = 16
    cols = []
    taus = full_blocks(spec.cube, k)
    pick = [taus.index((0,)), taus.index((5,))]
    for s in metropolis_run(spec, 13, 3000, burn_in=100):
        _, Y = block_field(s.config.spins, spec.cube, k, 1.0)
        cols.append(Y[pick])
    data = np.array(cols)
    for order in (1, 2, 4):
        a = empirical_joint_cumulant(data, [0] * order)
        b = empirical_joint_cumulant(data, [1] * order)
        assert abs(a.value - b.value) <= 4 * math.hypot(a.std_error, b.std_error)


# -- empirical cumulants ---------------------------------------------------------

def test_empirical_cumulants_gaussian():
    x = np.random.default_rng(0).standard_normal(200_000)
    est = empirical_cumulants(x, 4)
    assert [e.order for e in est] == [1, 2, 3, 4]
    assert abs(est[1].value - 1) <= 4 * est[1].std_error
    for e in est[2:]:
        assert abs(e.value) <= 4 * e.std_error


def test_empirical_cumulants_constant_and_signs():
    est = empirical_cumulants(np.full(1000, 2.5), 2)
    assert est[0].value == pytest.approx(2.5)
    assert est[1].value == 0
    x = np.random.default_rng(1).choice([-1.0, 1.0], size=200_000)
    est = empirical_cumulants(x, 4)
    assert abs(est[1].value - 1) <= 4 * est[1].std_error
    assert abs(est[3].value + 2) <= 4 * est[3].std_error


def test_plugin_cumulants_match_closed_form():
    x = np.random.default_rng(2).exponential(size=5000)
    c = x - x.mean()
    m2, m3, m4 = (np.mean(c**r) for r in (2, 3, 4))
    est = empirical_cumulants(x, 4)
    assert est[1].value == pytest.approx(m2)
    assert est[2].value == pytest.approx(m3)
    assert est[3].value == pytest.approx(m4 - 3 * m2**2)


def test_joint_cumulant():
    rng = np.random.default_rng(3)
    z = rng.standard_normal((100_000, 2))
    data = np.column_stack([z[:, 0], 0.6 * z[:, 0] + 0.8 * z[:, 1]])
    cov = empirical_joint_cumulant(data, [0, 1])
    assert abs(cov.value - 0.6) <= 4 * cov.std_error
    assert cov.value == pytest.approx(np.cov(data.T, bias=True)[0, 1])
    with pytest.raises(ValueError):
        empirical_joint_cumulant(data[:, 0], [0])


def test_taylor_coefficients_match_series():
    for check in suite_taylor():
        assert check.passed, check
