import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsm import analysis, canonical, imps, oracle, zoo
from qsm.errors import ChiOutOfRange, NormalizationDrift, ZeroStationaryMass
from qsm.imps import FixedPointPair

from conftest import ALL_ZOO, ERGODIC_ZOO

S2 = 1 / math.sqrt(2)
RENEWAL2_LAM2 = np.array([(3 + math.sqrt(5)) / 6, (3 - math.sqrt(5)) / 6])
RENEWAL2_CQ1 = 0.55004775958274532


def pair(V_l, V_r):
    return FixedPointPair(1.0, 1.0, np.asarray(V_l, float), np.asarray(V_r, float), True)


# -- gauge factors -----------------------------------------------------------


def test_gauge_factors_renewal_2(analyses):
    fp = analyses("renewal{2}").fp
    W_l, W_r = canonical.gauge_factors(fp)
    np.testing.assert_allclose(W_l, np.diag(np.sqrt([2 / 3, 1 / 3])), atol=1e-12)
    np.testing.assert_allclose(W_r @ W_r.T, [[1, S2], [S2, 1]], atol=1e-12)


def test_gauge_factors_single_state():
    W_l, W_r = canonical.gauge_factors(pair([[1.0]], [[1.0]]))
    np.testing.assert_allclose(W_l, [[1.0]])
    np.testing.assert_allclose(W_r, [[1.0]])


def test_gauge_factors_rank_deficient():
    W_l, W_r = canonical.gauge_factors(pair(np.eye(3) / 3, np.ones((3, 3))))
    assert W_r.shape == (3, 1)
    np.testing.assert_allclose(W_r @ W_r.T, np.ones((3, 3)), atol=1e-12)
    assert W_r[0, 0] > 0


def test_gauge_factors_zero_mass():
    with pytest.raises(ZeroStationaryMass):
        canonical.gauge_factors(pair(np.diag([1.0, 0.0]), np.eye(2)))


def test_sign_convention_is_deterministic(analyses):
    cf = analyses("renewal{6}").cf
    for cols in (cf.W_r, cf.U):
        first = cols[np.argmax(np.abs(cols) > 1e-10, axis=0), np.arange(cols.shape[1])]
        assert np.all(first > 0)


# -- Schmidt spectrum --------------------------------------------------------


def test_schmidt_renewal_2(analyses):
    lam = analyses("renewal{2}").cf.lam
    np.testing.assert_allclose(lam ** 2, RENEWAL2_LAM2, atol=1e-12)


def test_schmidt_coin(analyses):
    np.testing.assert_allclose(analyses("biased_coin{0.3}").cf.lam, [1.0], atol=1e-14)


def test_schmidt_alternating(analyses):
    np.testing.assert_allclose(analyses("alternating{}").cf.lam, [S2, S2], atol=1e-12)


def test_schmidt_normalization_drift():
    with pytest.raises(NormalizationDrift):
        canonical.schmidt_spectrum(np.eye(2), np.eye(2))


def test_schmidt_even_process(analyses):
    np.testing.assert_allclose(analyses("even_process{0.5}").cf.lam ** 2, [2 / 3, 1 / 3], atol=1e-12)


# -- canonical tensors -------------------------------------------------------


def test_gammas_single_state():
    a = analysis.run(zoo.biased_coin(0.5))
    np.testing.assert_allclose(a.cf.Gamma.ravel(), [S2, S2], atol=1e-15)
    np.testing.assert_allclose(a.cf.lam, [1.0])


@pytest.mark.parametrize("name", ALL_ZOO)
def test_canonical_identities(name, analyses):
    left, right = canonical.canonical_identities(analyses(name).cf)
    assert left <= 1e-10 and right <= 1e-10


@pytest.mark.parametrize("name", ERGODIC_ZOO)
def test_factor_invariants(name, analyses):
    a = analyses(name)
    cf = a.cf
    np.testing.assert_allclose(cf.W_l.T @ cf.W_l, a.fp.V_l, atol=1e-12)
    np.testing.assert_allclose(cf.W_r @ cf.W_r.T, a.fp.V_r, atol=1e-10)
    assert np.sum(cf.lam ** 2) == pytest.approx(1.0, abs=1e-14)
    assert np.all(np.diff(cf.lam) <= 0) and np.all(cf.lam > 0)
    # image of W_r equals image of V_r
    assert np.linalg.matrix_rank(np.hstack([cf.W_r, a.fp.V_r]), tol=1e-8) == cf.rank


@pytest.mark.parametrize("name", ERGODIC_ZOO)
def test_three_way_spectrum(name, analyses):
    a = analyses(name)
    cf = a.cf
    from_svd = np.sort(cf.lam ** 2)
    rho_a = np.linalg.eigvalsh(cf.W_l @ a.fp.V_r @ cf.W_l.T)[-cf.rank:]
    sigma = cf.W_r.T
    phi = np.linalg.eigvalsh((sigma * a.pi) @ sigma.T)
    np.testing.assert_allclose(rho_a, from_svd, atol=1e-8)
    np.testing.assert_allclose(phi, from_svd, atol=1e-8)


@pytest.mark.parametrize("name", ["golden_mean{0.5}", "even_process{0.5}", "renewal{5}"])
def test_gauge_consistency(name, analyses):
    a = analyses(name)
    cf, A = a.cf, a.site.tensors
    lam = np.diag(cf.lam)
    left = cf.V @ cf.W_r_pinv
    right = cf.W_l_inv @ cf.U
    for L in range(1, 7):
        for w in itertools.product(range(A.shape[0]), repeat=L):
            canon = cf.Gamma[w[0]]
            prod = A[w[0]]
            for x in w[1:]:
                canon = canon @ lam @ cf.Gamma[x]
                prod = prod @ A[x]
            np.testing.assert_allclose(canon, left @ prod @ right, atol=1e-9)


@given(st.integers(1, 10), st.integers(2, 3), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_identities_on_random_machines(m, k, seed):
    machine = zoo.random_unifilar(m, k, seed=seed)
    site = imps.site_matrices_from_machine(machine)
    fp = imps.fixed_points(site, strict=False)
    cf = canonical.canonical_form(site, fp)
    left, right = canonical.canonical_identities(cf)
    assert left <= 1e-8 and right <= 1e-8
    assert cf.rank <= m


# -- complexities ------------------------------------------------------------


def test_quantum_complexity_values(analyses):
    lam = analyses("renewal{2}").cf.lam
    assert canonical.quantum_complexity(lam, 1) == pytest.approx(RENEWAL2_CQ1, abs=1e-12)
    assert canonical.quantum_complexity(lam, 0) == pytest.approx(1.0)
    for a in (0, 0.5, 1, 2):
        assert canonical.quantum_complexity([1.0], a) == 0.0


@pytest.mark.parametrize("name", ERGODIC_ZOO)
def test_summary_invariants(name, analyses):
    a = analyses(name)
    s = canonical.complexity_summary(a.pi, a.cf, a.fp.gap)
    assert s.c_q[0] == pytest.approx(math.log2(s.rank))
    values = [s.c_q[alpha] for alpha in canonical.ALPHA_GRID]
    assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))
    for alpha in canonical.ALPHA_GRID:
        assert s.c_q[alpha] <= s.c_mu[alpha] + 1e-9


# -- truncation --------------------------------------------------------------


def test_truncate_rejects_full_rank(analyses):
    a = analyses("renewal{8}")
    with pytest.raises(ChiOutOfRange):
        canonical.truncate(a.cf, a.site, a.cf.rank)
    with pytest.raises(ChiOutOfRange):
        canonical.truncate(a.cf, a.site, 0)


def test_truncate_renewal_8(analyses):
    a = analyses("renewal{8}")
    r = a.cf.rank
    t1, rep1 = canonical.truncate(a.cf, a.site, 1)
    _, rep_top = canonical.truncate(a.cf, a.site, r - 1)
    assert rep1.discarded_weight == pytest.approx(1 - a.cf.lam[0] ** 2, abs=1e-14)
    assert rep1.tv[-1] > 0
    assert rep_top.tv[5] < rep1.tv[5]
    assert t1.rank == 1 and t1.Gamma.shape == (2, 1, 1)
    assert np.sum(t1.lam ** 2) == pytest.approx(1.0)


def test_canonical_word_distribution_is_exact(analyses):
    a = analyses("renewal{4}")
    for L in (1, 3, 5):
        exact = oracle.enumerate_words(a.machine, a.pi, L).probs
        np.testing.assert_allclose(canonical.canonical_word_distribution(a.cf.lam, a.cf.Gamma, L), exact, atol=1e-12)
