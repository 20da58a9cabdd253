"""Infinite matrix product state of an epsilon-machine.

The site tensors are the entrywise square roots of the transition tensor.
Because the machine is unifilar every row of every ``A^x`` holds at most
one nonzero entry, so both completely positive maps

    left:   rho -> sum_x A^x.T @ rho @ A^x
    right:  rho -> sum_x A^x @ rho @ A^x.T

reduce to a gather/scatter over the ``m x m`` entries of ``rho``: O(|A| m^2)
work per application and nothing of size ``m^2 x m^2`` is ever built.

Unifilarity also makes the transfer matrix block triangular. Writing a
matrix as its diagonal part D and off-diagonal part O, the right map sends
D to D through the classical chain ``M = sum_x T^x`` and the pair
``(k, l)`` to ``(succ_x(k), succ_x(l))`` with weight ``A^x_k A^x_l``.
The spectrum is therefore that of ``M`` together with that of ``Q``, the
nonnegative block acting on off-diagonal pairs. ``transfer_spectrum`` and
the ``direct`` fixed-point method rely on this.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatch, NoConvergence, NonErgodic
from .machine import (
    UNIFILAR_ZERO_TOL,
    EpsilonMachine,
    encode_word,
    require_valid,
    stationary_from_matrix,
)

log = logging.getLogger(__name__)

DEGENERACY_THRESHOLD = 1e-8
DENSE_SPECTRUM_LIMIT = 16
POWER_METHOD_LIMIT = 64
_DENSE_BLOCK_LIMIT = 400


@dataclass(frozen=True)
class SiteMatrices:
    """Site tensors ``A^x`` together with their unifilar sparsity pattern.

    Attributes
    ----------
    alphabet : tuple of str
    tensors : ndarray, shape (|A|, m, m)
    successor : ndarray of int, shape (|A|, m)
        Column of the nonzero entry in row ``k`` of ``A^x``; -1 if the row is zero.
    amplitude : ndarray, shape (|A|, m)
        Value of that entry (0 where ``successor`` is -1).
    """

    alphabet: tuple
    tensors: np.ndarray
    successor: np.ndarray
    amplitude: np.ndarray

    @property
    def bond_dim(self) -> int:
        return self.tensors.shape[1]

    @property
    def n_symbols(self) -> int:
        return self.tensors.shape[0]

    def state_matrix(self) -> np.ndarray:
        return (self.tensors ** 2).sum(axis=0)


def site_matrices_from_machine(machine: EpsilonMachine) -> SiteMatrices:
    require_valid(machine)
    T = np.clip(machine.transitions, 0.0, None)
    A = np.sqrt(T)
    present = A > np.sqrt(UNIFILAR_ZERO_TOL)
    successor = np.where(present.any(axis=2), A.argmax(axis=2), -1)
    amplitude = np.where(successor >= 0, A.max(axis=2), 0.0)
    for arr in (A, successor, amplitude):
        arr.setflags(write=False)
    return SiteMatrices(machine.alphabet, A, successor, amplitude)


def _check_square(site: SiteMatrices, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    m = site.bond_dim
    if rho.shape != (m, m):
        raise DimensionMismatch(f"expected a {m}x{m} matrix, got shape {rho.shape}")
    return rho


def apply_cp_left(site: SiteMatrices, rho) -> np.ndarray:
    """``sum_x A^x.T @ rho @ A^x`` by scatter-add over the successor map."""
    rho = _check_square(site, rho)
    m = site.bond_dim
    out = np.zeros(m * m)
    for succ, amp in zip(site.successor, site.amplitude):
        live = np.nonzero(succ >= 0)[0]
        if live.size == 0:
            continue
        s, a = succ[live], amp[live]
        weights = np.outer(a, a) * rho[np.ix_(live, live)]
        flat = (s[:, None] * m + s[None, :]).ravel()
        out += np.bincount(flat, weights=weights.ravel(), minlength=m * m)
    return out.reshape(m, m)


def apply_cp_right(site: SiteMatrices, rho) -> np.ndarray:
    """``sum_x A^x @ rho @ A^x.T`` by gathering entries at successor pairs."""
    rho = _check_square(site, rho)
    out = np.zeros_like(rho)
    for succ, amp in zip(site.successor, site.amplitude):
        s = np.where(succ >= 0, succ, 0)
        out += np.outer(amp, amp) * rho[np.ix_(s, s)]
    return out


def transfer_matrix(site: SiteMatrices) -> np.ndarray:
    """Dense ``sum_x A^x (x) A^x`` acting on row-major ``vec(rho)``.

    ``E @ vec(rho)`` is the right map and ``vec(rho) @ E`` the left map.
    Only meant for small bond dimension (tests, dense spectra).
    """
    return sum(np.kron(a, a) for a in site.tensors)


# ---------------------------------------------------------------------------
# spectrum


def _pair_block(site: SiteMatrices):
    """Off-diagonal block of the right map on unordered pairs ``k < l``.

    Returns ``(Q, b, rows, cols)`` where ``Q`` is sparse CSR, ``b[p]`` is
    the weight pair ``p`` sends onto the diagonal, and ``rows, cols`` list
    the pairs.
    """
    m = site.bond_dim
    rows, cols = np.triu_indices(m, k=1)
    n = rows.size
    index = np.full((m, m), -1, dtype=np.int64)
    index[rows, cols] = np.arange(n)
    index[cols, rows] = np.arange(n)

    b = np.zeros(n)
    q_rows, q_cols, q_data = [], [], []
    for succ, amp in zip(site.successor, site.amplitude):
        w = amp[rows] * amp[cols]
        sk, sl = succ[rows], succ[cols]
        live = w > 0
        merged = live & (sk == sl)
        b += np.where(merged, w, 0.0)
        split = np.nonzero(live & (sk != sl))[0]
        q_rows.append(split)
        q_cols.append(index[sk[split], sl[split]])
        q_data.append(w[split])
    Q = sp.csr_matrix(
        (np.concatenate(q_data), (np.concatenate(q_rows), np.concatenate(q_cols))),
        shape=(n, n),
    )
    return Q, b, rows, cols


def _perron_radius(B: sp.spmatrix, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Spectral radius of an irreducible nonnegative matrix.

    Collatz-Wielandt bounds on the primitive matrix ``I + B``; returns the
    midpoint of the bracket.
    """
    y = np.ones(B.shape[0])
    lo, hi = 0.0, np.inf
    for _ in range(max_iter):
        z = y + B @ y
        ratio = z / y
        lo, hi = ratio.min(), ratio.max()
        if hi - lo <= tol * hi:
            break
        y = z / z.max()
    else:
        log.warning("Perron radius bracket [%g, %g] did not close", lo - 1, hi - 1)
    return 0.5 * (lo + hi) - 1.0


def nonnegative_spectral_radius(Q: sp.spmatrix) -> float:
    """Spectral radius of a sparse nonnegative matrix via its strong components."""
    n = Q.shape[0]
    if n == 0 or Q.nnz == 0:
        return 0.0
    Q = sp.csr_matrix(Q)
    n_comp, labels = connected_components(Q, directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=n_comp)
    radius = float(Q.diagonal().max(initial=0.0))
    order = np.argsort(labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    for c in np.nonzero(sizes > 1)[0]:
        members = order[bounds[c]:bounds[c + 1]]
        block = Q[members][:, members]
        if members.size <= _DENSE_BLOCK_LIMIT:
            r = float(np.abs(np.linalg.eigvals(block.toarray())).max())
        else:
            r = _perron_radius(block)
        radius = max(radius, r)
    return radius


def transfer_spectrum(site: SiteMatrices, dense_limit: int = DENSE_SPECTRUM_LIMIT):
    """Leading eigenvalue and second-largest eigenvalue magnitude of the transfer matrix.

    Dense eigensolve of the ``m^2 x m^2`` matrix when ``m <= dense_limit``;
    otherwise the block-triangular split described in the module docstring.
    """
    m = site.bond_dim
    if m <= dense_limit:
        ev = np.linalg.eigvals(transfer_matrix(site))
        ev = ev[np.argsort(-np.abs(ev), kind="stable")]
        eta = float(ev[0].real)
        second = float(np.abs(ev[1])) if ev.size > 1 else 0.0
        return eta, second

    ev = np.linalg.eigvals(site.state_matrix())
    mags = np.sort(np.abs(ev))[::-1]
    Q, _, _, _ = _pair_block(site)
    rho_q = nonnegative_spectral_radius(Q)
    top = sorted([mags[0], mags[1] if m > 1 else 0.0, rho_q], reverse=True)
    eta = float(ev[np.argmax(np.abs(ev))].real)
    return eta, float(top[1])


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True)
class FixedPointPair:
    """Leading left/right fixed points of the transfer maps.

    Normalised so that ``trace(V_l) = 1`` and ``trace(V_l @ V_r) = 1``.
    """

    eta: float
    gap: float
    V_l: np.ndarray
    V_r: np.ndarray
    ergodic: bool
    second: float = 0.0
    residual_left: float = 0.0
    residual_right: float = 0.0
    method: str = ""
    iterations: int = 0


def _power_fixed_point(apply, m, tol, max_iter, lazy):
    V = np.eye(m) / m
    for it in range(1, max_iter + 1):
        W = apply(V)
        if lazy:
            W = 0.5 * (W + V)
        W = 0.5 * (W + W.T)
        W /= np.trace(W)
        diff = np.max(np.abs(W - V))
        V = W
        if diff <= tol * np.max(np.abs(V)):
            return V, it
    raise NoConvergence(f"fixed-point power iteration did not converge in {max_iter} iterations")


def _direct_fixed_points(site: SiteMatrices, tol, max_iter):
    m = site.bond_dim
    pi = stationary_from_matrix(site.state_matrix(), tol=tol, max_iter=max_iter)
    V_l = np.diag(pi)
    V_r = np.ones((m, m))
    if m > 1:
        Q, b, rows, cols = _pair_block(site)
        lhs = sp.identity(Q.shape[0], format="csc") - Q.tocsc()
        v = spla.splu(lhs).solve(b)
        V_r[rows, cols] = v
        V_r[cols, rows] = v
    return V_l, V_r


def fixed_points(
    site: SiteMatrices,
    tol: float = 1e-13,
    max_iter: int = 10**6,
    *,
    method: str = "auto",
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
    dense_limit: int = DENSE_SPECTRUM_LIMIT,
    strict: bool = True,
) -> FixedPointPair:
    """Compute ``V_l``, ``V_r``, the leading eigenvalue and the spectral gap.

    Parameters
    ----------
    method : {"auto", "power", "direct"}
        ``power`` iterates the CP maps from the unit-trace identity,
        re-symmetrising each step. ``direct`` takes ``V_l = diag(pi)`` and
        solves the sparse linear system for the off-diagonal entries of
        ``V_r`` (diagonal fixed to 1). ``auto`` uses power iteration up to
        bond dimension 64 and the direct solve beyond.
    strict : bool
        Raise :class:`NonErgodic` when the relative gap is at or below
        ``degeneracy_threshold``. With ``strict=False`` a flagged pair is
        returned instead, computed by lazy power iteration.
    """
    m = site.bond_dim
    eta_spec, second = transfer_spectrum(site, dense_limit)
    gap = abs(eta_spec) - second
    ergodic = gap > degeneracy_threshold * abs(eta_spec)
    if not ergodic and strict:
        raise NonErgodic(
            f"transfer matrix is degenerate: |eta|={abs(eta_spec):.6g}, "
            f"second magnitude={second:.6g}, gap={gap:.3g}",
            gap=gap,
        )

    if method == "auto":
        method = "power" if (m <= POWER_METHOD_LIMIT or not ergodic) else "direct"
    if method == "direct" and not ergodic:
        raise NonErgodic("direct fixed-point solve requires an ergodic machine", gap=gap)

    iterations = 0
    if method == "power":
        V_l, it_l = _power_fixed_point(lambda r: apply_cp_left(site, r), m, tol, max_iter, not ergodic)
        V_r, it_r = _power_fixed_point(lambda r: apply_cp_right(site, r), m, tol, max_iter, not ergodic)
        iterations = max(it_l, it_r)
    elif method == "direct":
        V_l, V_r = _direct_fixed_points(site, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")

    V_l = V_l / np.trace(V_l)
    V_r = V_r / np.sum(V_l * V_r)
    E_r = apply_cp_right(site, V_r)
    E_l = apply_cp_left(site, V_l)
    eta = float(np.sum(V_l * E_r) / np.sum(V_l * V_r))
    for arr in (V_l, V_r):
        arr.setflags(write=False)
    return FixedPointPair(
        eta=eta,
        gap=float(gap),
        V_l=V_l,
        V_r=V_r,
        ergodic=bool(ergodic),
        second=float(second),
        residual_left=float(np.max(np.abs(E_l - V_l))),
        residual_right=float(np.max(np.abs(E_r - V_r))),
        method=method,
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# word probabilities


def word_probability_mps(site: SiteMatrices, fp: FixedPointPair, word) -> float:
    """``Tr(A_w^T V_l A_w V_r)`` with ``A_w = A^{x_1} ... A^{x_L}``."""
    if not fp.ergodic:
        raise NonErgodic("word probabilities need a nondegenerate transfer matrix", gap=fp.gap)
    rho = np.array(fp.V_l)
    for x in encode_word(site.alphabet, word):
        A = site.tensors[x]
        rho = A.T @ rho @ A
    return float(np.sum(rho * fp.V_r))


def word_distribution_mps(site: SiteMatrices, fp: FixedPointPair, length: int) -> np.ndarray:
    """MPS probabilities of all words of a given length, lexicographic order."""
    if not fp.ergodic:
        raise NonErgodic("word probabilities need a nondegenerate transfer matrix", gap=fp.gap)
    rho = np.array(fp.V_l)[None]
    for _ in range(length):
        rho = np.stack(
            [np.einsum("ka,nkl,lb->nab", A, rho, A) for A in site.tensors], axis=1
        ).reshape(-1, site.bond_dim, site.bond_dim)
    return np.einsum("nab,ab->n", rho, fp.V_r)
