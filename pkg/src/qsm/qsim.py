"""Quantum predictive model (q-simulator) built from the canonical form.

Memory states are the columns of ``W_r^T`` expressed in the ``r``-dimensional
memory basis, and the Kraus operators are ``B_x = (W_r^+ A^x W_r)^T``. Only
this first block column of the interaction unitary is kept; it is all a
measurement-driven simulation needs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import CanonicalForm
from .errors import GramMismatch, NormDrift
from .imps import SiteMatrices

GRAM_TOL = 1e-8
NORM_TOL = 1e-10
NORM_DRIFT = 1e-8


@dataclass(frozen=True)
class QSimulator:
    """Memory states, Kraus operators and stationary memory state.

    Attributes
    ----------
    alphabet : tuple of str
    sigma : ndarray, shape (r, m)
        Column ``k`` is the memory state for causal state ``k``.
    kraus : ndarray, shape (|A|, r, r)
    phi : ndarray, shape (r, r)
    """

    alphabet: tuple
    sigma: np.ndarray
    kraus: np.ndarray
    phi: np.ndarray

    @property
    def memory_dim(self) -> int:
        return self.sigma.shape[0]


def memory_state_phi(pi, sigma) -> np.ndarray:
    """``phi = sum_k pi_k |sigma_k><sigma_k|``."""
    sigma = np.asarray(sigma, dtype=float)
    pi = np.asarray(pi, dtype=float)
    phi = (sigma * pi[None, :]) @ sigma.T
    return 0.5 * (phi + phi.T)


def build_qsimulator(site: SiteMatrices, cf: CanonicalForm, pi) -> QSimulator:
    pinv = cf.W_r_pinv
    sigma = cf.W_r.T.copy()
    gram_err = float(np.max(np.abs(sigma.T @ sigma - cf.V_r)))
    if gram_err > GRAM_TOL:
        raise GramMismatch(f"memory-state overlaps deviate from V_r by {gram_err:.3g}")
    kraus = np.stack([(pinv @ A @ cf.W_r).T for A in site.tensors])
    phi = memory_state_phi(pi, sigma)
    for arr in (sigma, kraus, phi):
        arr.setflags(write=False)
    return QSimulator(site.alphabet, sigma, kraus, phi)


def kraus_completeness(qsim: QSimulator) -> float:
    """``max |sum_x B_x^T B_x - I|``."""
    total = sum(B.T @ B for B in qsim.kraus)
    return float(np.max(np.abs(total - np.eye(qsim.memory_dim))))


def step_quantum(qsim: QSimulator, v, rng: np.random.Generator):
    """One interaction-and-measurement step from pure memory state ``v``.

    Returns the emitted symbol index and the post-measurement state.
    """
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1) > NORM_TOL:
        raise NormDrift(f"memory vector has norm {np.linalg.norm(v)!r}")
    branches = qsim.kraus @ v
    p = np.einsum("xi,xi->x", branches, branches)
    total = p.sum()
    if abs(total - 1) > NORM_DRIFT:
        raise NormDrift(f"outcome probabilities sum to {total!r}")
    x = int(np.searchsorted(np.cumsum(p), rng.random() * total, side="right"))
    x = min(x, p.size - 1)
    return x, branches[x] / np.sqrt(p[x])


def sample_quantum(qsim: QSimulator, pi, seed: int, length: int) -> np.ndarray:
    """Symbol indices from repeated measurement, starting in ``sigma_k`` with ``k ~ pi``."""
    rng = np.random.default_rng(seed)
    pi = np.asarray(pi, dtype=float)
    k = int(rng.choice(pi.size, p=pi / pi.sum()))
    v = np.array(qsim.sigma[:, k])
    out = np.empty(length, dtype=np.int64)
    for t in range(length):
        out[t], v = step_quantum(qsim, v, rng)
    return out


def word_distribution_kraus(kraus, sigma, pi, length: int) -> np.ndarray:
    """Exact word probabilities from a Kraus set and a memory-state ensemble.

    ``P(w) = sum_k pi_k ||B_{x_L} ... B_{x_1} sigma_k||^2``, lexicographic order.
    """
    kraus = np.asarray(kraus)
    states = (np.asarray(sigma) * np.sqrt(np.asarray(pi))[None, :])[None]  # (n, r, m)
    for _ in range(length):
        states = np.einsum("xij,njk->nxik", kraus, states).reshape(-1, *states.shape[1:])
    return np.sum(states ** 2, axis=(1, 2))
