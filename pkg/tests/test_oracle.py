import math

import numpy as np
import pytest

from qsm import machine as mach, oracle, zoo
from qsm.errors import InsufficientSamples, WindowTooLarge

from conftest import ALL_ZOO


def stationary(name):
    m = zoo.from_shorthand(name)
    return m, mach.stationary_distribution(m)


def padded(a, n):
    out = np.zeros(n)
    out[: a.size] = a
    return out


# -- enumeration -------------------------------------------------------------


def test_enumerate_biased_coin():
    p = 0.3
    m, pi = stationary("biased_coin{0.3}")
    d = oracle.enumerate_words(m, pi, 2)
    np.testing.assert_allclose(d.probs, [(1 - p) ** 2, p * (1 - p), p * (1 - p), p ** 2], atol=1e-15)
    assert d["01"] == pytest.approx(p * (1 - p))


def test_enumerate_golden_mean():
    m, pi = stationary("golden_mean{0.5}")
    d = oracle.enumerate_words(m, pi, 2).as_dict()
    assert d == pytest.approx({"00": 1 / 3, "01": 1 / 3, "10": 1 / 3, "11": 0.0}, abs=1e-14)


def test_enumerate_renewal_2():
    m, pi = stationary("renewal{2}")
    assert oracle.enumerate_words(m, pi, 1).as_dict() == pytest.approx({"0": 1 / 3, "1": 2 / 3}, abs=1e-14)


def test_enumerate_caps():
    m, pi = stationary("renewal{2}")
    with pytest.raises(WindowTooLarge):
        oracle.enumerate_words(m, pi, 13)
    tern = zoo.random_unifilar(2, 5, seed=0)
    with pytest.raises(WindowTooLarge):
        oracle.enumerate_words(tern, mach.stationary_distribution(tern), 11)


@pytest.mark.parametrize("name", ALL_ZOO)
def test_enumeration_self_consistent(name):
    m, pi = stationary(name)
    prev = oracle.enumerate_words(m, pi, 1).probs
    for L in range(2, 10):
        d = oracle.enumerate_words(m, pi, L).probs
        assert d.min() >= 0 and d.sum() == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(d.reshape(-1, m.n_symbols).sum(axis=1), prev, atol=1e-12)
        prev = d


# -- q-sample windows --------------------------------------------------------


def test_qsample_window_normalised():
    m, pi = stationary("renewal{4}")
    S = oracle.qsample_matrix(m, pi, 3, 4)
    assert S.shape == (8, 16)
    assert np.sum(S ** 2) == pytest.approx(1.0, abs=1e-14)


def test_qsample_coin_is_product():
    m, pi = stationary("biased_coin{0.3}")
    for lp, lf in ((1, 1), (3, 2), (5, 5)):
        s = oracle.qsample_schmidt_oracle(m, pi, lp, lf)
        assert s[0] == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(s[1:], 0.0, atol=1e-12)


def test_qsample_renewal_2():
    m, pi = stationary("renewal{2}")
    s = oracle.qsample_schmidt_oracle(m, pi, 10, 10)
    expected = np.sqrt([(3 + math.sqrt(5)) / 6, (3 - math.sqrt(5)) / 6])
    np.testing.assert_allclose(s[:2], expected, atol=1e-3)


def test_qsample_alternating():
    m, pi = stationary("alternating{}")
    s = oracle.qsample_schmidt_oracle(m, pi, 4, 4)
    np.testing.assert_allclose(s[:2], [math.sqrt(0.5)] * 2, atol=1e-15)
    np.testing.assert_allclose(s[2:], 0.0, atol=1e-15)


def test_qsample_cap():
    m, pi = stationary("renewal{2}")
    with pytest.raises(WindowTooLarge):
        oracle.qsample_matrix(m, pi, 15, 2)


@pytest.mark.parametrize("name", ALL_ZOO)
def test_window_spectrum_converges(name, analyses):
    """Distance to the canonical spectrum shrinks as windows grow, and is small at 10|10."""
    a = analyses(name)
    lam = a.cf.lam
    dist, last = [], None
    for L in range(2, 11):
        s = oracle.qsample_schmidt_oracle(a.machine, a.pi, L, L)
        n = max(s.size, lam.size)
        dist.append(np.linalg.norm(padded(s, n) - padded(lam, n)))
        last = padded(s, n)[: lam.size]
    assert np.all(np.diff(dist) <= 1e-12)
    assert np.max(np.abs(last - lam)) <= 1e-3


@pytest.mark.parametrize("name", ALL_ZOO)
def test_window_rank_floor(name, analyses):
    a = analyses(name)
    for L in range(2, 11):
        s = oracle.qsample_schmidt_oracle(a.machine, a.pi, L, L)
        assert np.count_nonzero(s > 1e-3) <= a.cf.rank


# -- empirical distances -----------------------------------------------------


def test_tv_of_exact_stream_is_zero():
    m, pi = stationary("alternating{}")
    stream = np.arange(802) % 2
    assert oracle.empirical_tv(stream, oracle.enumerate_words(m, pi, 3)) == 0.0


def test_tv_classical_sampler():
    m, pi = stationary("renewal{2}")
    symbols, _ = mach.sample_classical(m, pi, seed=2, length=100_000)
    assert oracle.empirical_tv(symbols, oracle.enumerate_words(m, pi, 3)) <= 0.01


def test_tv_insufficient_samples():
    m, pi = stationary("renewal{2}")
    with pytest.raises(InsufficientSamples):
        oracle.empirical_tv(np.zeros(700, dtype=int), oracle.enumerate_words(m, pi, 3))


def test_sliding_counts():
    counts = oracle.sliding_counts([0, 1, 1, 0, 1], 2, 2)
    np.testing.assert_array_equal(counts, [0, 2, 1, 1])
    assert oracle.total_variation([0.5, 0.5], [1.0, 0.0]) == 0.5
