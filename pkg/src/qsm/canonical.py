"""Canonical form of the iMPS, Schmidt spectrum and quantum memory.

Four steps: fixed points (see :mod:`qsm.imps`), gauge factors
``V_l = W_l^T W_l`` and ``V_r = W_r W_r^T``, an SVD ``W_l W_r = U diag(lam) V``
giving the Schmidt coefficients, and the canonical tensors
``Gamma^x = V W_r^+ A^x W_l^{-1} U``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ChiOutOfRange, NormalizationDrift, ZeroStationaryMass
from .imps import FixedPointPair, SiteMatrices
from .machine import renyi_entropy

RANK_CUTOFF = 1e-10
NORMALIZATION_DRIFT = 1e-8
ALPHA_GRID = (0.0, 0.5, 1.0, 2.0)


def _fix_signs(columns: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Sign per column making its first significant component positive."""
    signs = np.ones(columns.shape[1])
    for i in range(columns.shape[1]):
        col = columns[:, i]
        big = np.nonzero(np.abs(col) > tol * max(np.abs(col).max(), 1e-300))[0]
        if big.size and col[big[0]] < 0:
            signs[i] = -1.0
    return signs


@dataclass(frozen=True)
class CanonicalForm:
    """Gauge factors, Schmidt spectrum and canonical tensors.

    ``W_r`` is ``m x r``; ``U`` is ``m x r``; ``V`` is ``r x r`` and ``lam``
    holds the ``r`` Schmidt coefficients in descending order.
    """

    W_l: np.ndarray
    W_r: np.ndarray
    U: np.ndarray
    lam: np.ndarray
    V: np.ndarray
    V_r: np.ndarray = field(repr=False)
    Gamma: np.ndarray | None = None
    alphabet: tuple = ()

    @property
    def rank(self) -> int:
        return int(self.lam.size)

    @property
    def W_l_inv(self) -> np.ndarray:
        return np.diag(1.0 / np.diag(self.W_l))

    @property
    def W_r_pinv(self) -> np.ndarray:
        """Inverse of ``W_r`` on the image of ``V_r`` (Moore-Penrose)."""
        norms2 = np.sum(self.W_r ** 2, axis=0)
        return self.W_r.T / norms2[:, None]


def gauge_factors(fp: FixedPointPair, rank_cutoff: float = RANK_CUTOFF):
    """``W_l = diag(sqrt(pi))`` and ``W_r = U_+ sqrt(D_+)`` from ``V_r = U D U^T``.

    Eigenvalues of ``V_r`` at or below ``rank_cutoff * max eigenvalue`` are
    dropped, so ``W_r`` has one column per retained memory dimension.
    """
    d = np.diag(fp.V_l)
    if np.any(d <= 0):
        raise ZeroStationaryMass(f"V_l has non-positive diagonal entries at {np.nonzero(d <= 0)[0].tolist()}")
    W_l = np.diag(np.sqrt(d))

    evals, evecs = np.linalg.eigh(0.5 * (fp.V_r + fp.V_r.T))
    order = np.argsort(evals, kind="stable")[::-1]
    evals, evecs = evals[order], evecs[:, order]
    keep = evals > rank_cutoff * evals[0]
    evals, evecs = evals[keep], evecs[:, keep]
    evecs = evecs * _fix_signs(evecs)
    W_r = evecs * np.sqrt(evals)
    return W_l, W_r


def schmidt_spectrum(W_l, W_r):
    """Singular values of ``W_l @ W_r`` (descending, renormalised) with SVD factors.

    Returns
    -------
    lam : ndarray, shape (r,)
    U : ndarray, shape (m, r)
    V : ndarray, shape (r, r)
        Such that ``W_l @ W_r = U @ diag(lam_raw) @ V``.
    """
    U, s, V = np.linalg.svd(np.asarray(W_l) @ np.asarray(W_r), full_matrices=False)
    signs = _fix_signs(U)
    U = U * signs
    V = V * signs[:, None]
    total = float(np.sum(s ** 2))
    if abs(total - 1.0) >= NORMALIZATION_DRIFT:
        raise NormalizationDrift(f"sum of squared Schmidt coefficients is {total!r}")
    return s / np.sqrt(total), U, V


def canonical_gammas(site: SiteMatrices, cf: CanonicalForm) -> np.ndarray:
    """``Gamma^x = V W_r^+ A^x W_l^{-1} U`` for every symbol, shape ``(|A|, r, r)``."""
    if np.any(np.diag(cf.W_l) <= 0):
        raise ZeroStationaryMass("W_l is not invertible")
    left = cf.V @ cf.W_r_pinv
    right = cf.W_l_inv @ cf.U
    return np.stack([left @ A @ right for A in site.tensors])


def canonical_form(site: SiteMatrices, fp: FixedPointPair, rank_cutoff: float = RANK_CUTOFF) -> CanonicalForm:
    W_l, W_r = gauge_factors(fp, rank_cutoff)
    lam, U, V = schmidt_spectrum(W_l, W_r)
    cf = CanonicalForm(W_l=W_l, W_r=W_r, U=U, lam=lam, V=V, V_r=fp.V_r, alphabet=site.alphabet)
    return replace(cf, Gamma=canonical_gammas(site, cf))


def quantum_complexity(lam, alpha: float) -> float:
    """Renyi-alpha entropy (bits) of the squared Schmidt coefficients."""
    return renyi_entropy(np.asarray(lam) ** 2, alpha)


def canonical_identities(cf: CanonicalForm):
    """Residuals of ``sum Gamma^T lam^2 Gamma = I`` and ``sum Gamma lam^2 Gamma^T = I``."""
    L2 = np.diag(cf.lam ** 2)
    eye = np.eye(cf.rank)
    left = sum(G.T @ L2 @ G for G in cf.Gamma)
    right = sum(G @ L2 @ G.T for G in cf.Gamma)
    return float(np.max(np.abs(left - eye))), float(np.max(np.abs(right - eye)))


# ---------------------------------------------------------------------------
# summaries


@dataclass(frozen=True)
class ComplexitySummary:
    c_mu: dict
    c_q: dict
    schmidt: np.ndarray
    rank: int
    gap: float


def complexity_summary(pi, cf: CanonicalForm, gap: float, alphas=ALPHA_GRID) -> ComplexitySummary:
    alphas = tuple(float(a) for a in alphas)
    return ComplexitySummary(
        c_mu={a: renyi_entropy(pi, a) for a in alphas},
        c_q={a: quantum_complexity(cf.lam, a) for a in alphas},
        schmidt=np.array(cf.lam),
        rank=cf.rank,
        gap=float(gap),
    )


# ---------------------------------------------------------------------------
# truncation


def canonical_word_distribution(lam, Gamma, length: int) -> np.ndarray:
    """Unnormalised word weights ``||diag(lam) B_w||_F^2`` with ``B^x = Gamma^x diag(lam)``.

    Lexicographic word order, first symbol most significant. For an exact
    canonical form these are the word probabilities.
    """
    lam = np.asarray(lam)
    B = np.asarray(Gamma) * lam[None, None, :]
    X = np.diag(lam)[None]
    for _ in range(length):
        X = np.einsum("nab,xbc->nxac", X, B).reshape(-1, lam.size, lam.size)
    return np.sum(X ** 2, axis=(1, 2))


@dataclass(frozen=True)
class DistortionReport:
    """Fidelity of a truncated canonical form.

    ``tv[L-1]`` is the total-variation distance between the truncated and the
    exact length-``L`` word distributions, the truncated one renormalised to
    unit mass; ``mass[L-1]`` is its mass before renormalisation.
    """

    chi: int
    rank: int
    discarded_weight: float
    tv: tuple
    mass: tuple

    def rows(self):
        for L, (tv, mass) in enumerate(zip(self.tv, self.mass), start=1):
            yield L, tv, mass


def truncate(cf: CanonicalForm, site: SiteMatrices, chi: int, report_len: int = 6):
    """Keep the ``chi`` largest Schmidt coefficients.

    Returns the truncated :class:`CanonicalForm` (only ``lam``, ``Gamma``,
    ``U``, ``V`` are cut down; gauge factors are carried over) and a
    :class:`DistortionReport`.
    """
    r = cf.rank
    if not 1 <= chi < r:
        raise ChiOutOfRange(f"chi must satisfy 1 <= chi < {r}, got {chi}")
    if cf.Gamma is None:
        cf = replace(cf, Gamma=canonical_gammas(site, cf))
    lam2 = cf.lam ** 2
    discarded = float(lam2[chi:].sum() / lam2.sum())
    lam_t = cf.lam[:chi] / np.sqrt(lam2[:chi].sum())
    Gamma_t = cf.Gamma[:, :chi, :chi]
    truncated = replace(cf, lam=lam_t, Gamma=Gamma_t, U=cf.U[:, :chi], V=cf.V[:chi, :])

    tvs, masses = [], []
    for L in range(1, report_len + 1):
        exact = canonical_word_distribution(cf.lam, cf.Gamma, L)
        approx = canonical_word_distribution(lam_t, Gamma_t, L)
        mass = float(approx.sum())
        tvs.append(0.5 * float(np.abs(approx / mass - exact / exact.sum()).sum()))
        masses.append(mass)
    return truncated, DistortionReport(chi, r, discarded, tuple(tvs), tuple(masses))


def all_words(alphabet, length: int):
    """Words of a given length in lexicographic order (first symbol most significant)."""
    return [tuple(w) for w in itertools.product(alphabet, repeat=length)]
