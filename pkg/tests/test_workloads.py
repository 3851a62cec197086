from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from empirical_o import workloads as wl
from empirical_o.errors import InvalidParameterError
from oracles import chi_square_sf, heavy_tail_k_bruteforce, occupancy_expected

seeds = st.integers(min_value=0, max_value=2**64 - 1)


def test_single_point_support():
    assert wl.gen_uniform(wl.UniformKSpec(5, 1), 123).tolist() == [1, 1, 1, 1, 1]


def test_empty_sample():
    assert wl.gen_uniform(wl.UniformKSpec(0, 10), 0).tolist() == []
    assert wl.gen_heavy_tail(wl.HeavyTailSpec(0), 0).size == 0


def test_k_zero_rejected():
    with pytest.raises(InvalidParameterError):
        wl.UniformKSpec(5, 0)


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_range(seed):
    with pytest.raises(InvalidParameterError):
        wl.make_rng(seed)


def test_uniform_chi_square():
    K = 50
    x = wl.gen_uniform(wl.UniformKSpec(10**5, K), 20240101)
    counts = np.bincount(x, minlength=K + 1)[1:]
    expected = x.size / K
    stat = float(((counts - expected) ** 2 / expected).sum())
    assert chi_square_sf(stat, K - 1) > 0.001


@given(n=st.integers(0, 300), K=st.integers(1, 2**40), seed=seeds)
@settings(max_examples=60, deadline=None)
def test_uniform_range_and_determinism(n, K, seed):
    spec = wl.UniformKSpec(n, K)
    a = wl.gen_uniform(spec, seed)
    b = wl.gen_uniform(spec, seed)
    assert a.dtype == np.int64 and a.size == n
    assert np.array_equal(a, b)
    if n:
        assert a.min() >= 1 and a.max() <= K


def test_tied_all_equal():
    x = wl.gen_tied(wl.TieDensitySpec(1000, 1000), 7)
    assert set(x.tolist()) == {1}


def test_tied_occupancy():
    expected = occupancy_expected(1000, 1000)
    assert expected == pytest.approx(632.3, abs=0.1)
    distinct = [np.unique(wl.gen_tied(wl.TieDensitySpec(1000, 1), s)).size for s in range(200)]
    # sd of the occupancy count is about 8.6; the mean of 200 runs has sd about 0.6
    assert abs(np.mean(distinct) - expected) < 3.0


def test_tied_delegates_to_uniform():
    spec = wl.TieDensitySpec(500_000, 1000)
    assert spec.K == 500
    assert np.array_equal(wl.gen_tied(spec, 99), wl.gen_uniform(wl.UniformKSpec(500_000, 500), 99))


@pytest.mark.parametrize("t_d", [0.5, 1001])
def test_tied_range_rejected(t_d):
    with pytest.raises(InvalidParameterError):
        wl.TieDensitySpec(1000, t_d)


def test_tied_exact_multiset():
    x = wl.gen_tied(wl.TieDensitySpec(1000, 10, exact=True), 3)
    counts = np.bincount(x)[1:]
    assert counts.size == 100 and set(counts.tolist()) == {10}
    assert wl.realized_tie_density(x) == 10.0


@pytest.mark.parametrize("u, k, x", [(0.0, 1, -2.0), (0.4, 1, -2.0), (0.5, 1, -2.0), (0.75, 2, 2.0),
                                     (0.7500001, 3, -8 / 3), (0.875, 3, -8 / 3)])
def test_heavy_tail_inverse_cdf(u, k, x):
    ks, capped = wl.heavy_tail_k([u])
    assert ks[0] == k == heavy_tail_k_bruteforce(u)
    assert capped == 0
    assert wl.heavy_tail_value(ks)[0] == pytest.approx(x, rel=1e-15)


@given(u=st.floats(0.0, 1.0, exclude_max=True))
def test_heavy_tail_k_matches_bruteforce(u):
    ks, _ = wl.heavy_tail_k([u])
    assert ks[0] == heavy_tail_k_bruteforce(u)


def test_heavy_tail_cap():
    ks, capped = wl.heavy_tail_k([1 - 2.0**-53])
    assert ks[0] == 53 and capped == 0
    assert wl.HEAVY_TAIL_K_CAP == 1000


def test_heavy_tail_values_and_sign():
    x = wl.gen_heavy_tail(wl.HeavyTailSpec(10_000), 11)
    ks, _ = wl.heavy_tail_k(wl.make_rng(11).random(10_000))
    assert np.array_equal(x, wl.heavy_tail_value(ks))
    k = np.arange(1, 1001)
    v = wl.heavy_tail_value(k)
    assert np.all(np.isfinite(v))
    assert np.all((v < 0) == (k % 2 == 1))
    assert all(v[j - 1] == (-1) ** j * 2.0**j / j for j in range(1, 60))


def test_heavy_tail_frequencies():
    draws = 10**6
    ks, _ = wl.heavy_tail_k(wl.make_rng(5).random(draws))
    for k in range(1, 11):
        p = 2.0**-k
        sigma = np.sqrt(draws * p * (1 - p))
        assert abs(np.count_nonzero(ks == k) - draws * p) <= 4 * sigma


def test_heavy_tail_ks_statistic():
    draws = 10**6
    ks, _ = wl.heavy_tail_k(wl.make_rng(8).random(draws))
    top = int(ks.max())
    counts = np.bincount(ks, minlength=top + 1)[1:]
    ecdf = np.cumsum(counts) / draws
    cdf = 1 - 2.0 ** -np.arange(1, top + 1)
    assert np.max(np.abs(ecdf - cdf)) < 0.01


def test_heavy_tail_mean_unstable():
    means = [np.abs(wl.gen_heavy_tail(wl.HeavyTailSpec(10_000), s)).mean() for s in range(50)]
    assert np.std(means) / np.mean(means) > 1


def test_derive_seed_is_stable_and_keyed():
    a = wl.derive_seed(1, 1024, 0)
    assert a == wl.derive_seed(1, 1024, 0)
    assert len({a, wl.derive_seed(1, 1024, 1), wl.derive_seed(1, 2048, 0), wl.derive_seed(2, 1024, 0)}) == 4


def test_format_sample():
    assert wl.format_sample(np.int64(7)) == "7"
    assert wl.format_sample(-8 / 3) == repr(-8 / 3)
    assert float(wl.format_sample(0.1)) == 0.1
