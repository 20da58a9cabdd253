"""Brute-force cross-checks independent of the iMPS machinery.

Everything here works from the transition tensor and the stationary
distribution alone: exhaustive word enumeration, the Schmidt spectrum of a
finite q-sample window, and empirical distances for samplers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import svdvals

from .errors import InsufficientSamples, WindowTooLarge
from .machine import EpsilonMachine

MAX_ENUMERATION = 2 ** 24
MAX_WORD_LENGTH = 12
MAX_WINDOW = 2 ** 14


@dataclass(frozen=True)
class WordDistribution:
    """Probabilities of all ``|A|^L`` words, first symbol most significant."""

    alphabet: tuple
    length: int
    probs: np.ndarray

    def words(self):
        return list(itertools.product(self.alphabet, repeat=self.length))

    def as_dict(self) -> dict:
        sep = "" if all(len(a) == 1 for a in self.alphabet) else " "
        return {sep.join(w): float(p) for w, p in zip(self.words(), self.probs)}

    def __getitem__(self, word) -> float:
        idx = 0
        lookup = {a: i for i, a in enumerate(self.alphabet)}
        symbols = list(word)
        if len(symbols) != self.length:
            raise KeyError(word)
        for s in symbols:
            idx = idx * len(self.alphabet) + lookup[str(s)]
        return float(self.probs[idx])


def _state_weights(T: np.ndarray, start: np.ndarray, length: int) -> np.ndarray:
    """Row ``w`` holds ``start @ T^{w_1} ... T^{w_L}`` for every word ``w``."""
    rows = start[None, :]
    for _ in range(length):
        rows = np.einsum("nk,xkj->nxj", rows, T).reshape(-1, T.shape[1])
    return rows


def enumerate_words(machine: EpsilonMachine, pi, length: int) -> WordDistribution:
    """Exact length-``L`` word distribution by prefix-sharing dynamic programming."""
    n = machine.n_symbols ** length
    if length > MAX_WORD_LENGTH or n > MAX_ENUMERATION:
        raise WindowTooLarge(f"|A|^L = {n} words at L = {length} exceeds the enumeration cap")
    rows = _state_weights(machine.transitions, np.asarray(pi, dtype=float), length)
    return WordDistribution(machine.alphabet, length, rows.sum(axis=1))


def qsample_matrix(machine: EpsilonMachine, pi, past: int, future: int) -> np.ndarray:
    """Amplitudes ``S[w_p, w_f] = sqrt(P(w_p w_f))`` of a finite q-sample window."""
    n = machine.n_symbols ** max(past, future)
    if n > MAX_WINDOW:
        raise WindowTooLarge(f"|A|^max(L_p, L_f) = {n} exceeds {MAX_WINDOW}")
    T = machine.transitions
    forward = _state_weights(T, np.asarray(pi, dtype=float), past)  # (|A|^Lp, m)
    # P(w_f | s_k) for every future word, built right to left
    backward = np.ones((1, machine.n_states))
    for _ in range(future):
        backward = np.einsum("xkj,nj->xnk", T, backward).reshape(-1, machine.n_states)
    joint = forward @ backward.T
    return np.sqrt(np.clip(joint, 0.0, None))


def qsample_schmidt_oracle(machine: EpsilonMachine, pi, past: int, future: int) -> np.ndarray:
    """Descending singular values of the finite q-sample window."""
    return svdvals(qsample_matrix(machine, pi, past, future))


def sliding_counts(symbols, n_symbols: int, length: int) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.int64)
    n_windows = symbols.size - length + 1
    if n_windows <= 0:
        return np.zeros(n_symbols ** length)
    code = np.zeros(n_windows, dtype=np.int64)
    for i in range(length):
        code = code * n_symbols + symbols[i:i + n_windows]
    return np.bincount(code, minlength=n_symbols ** length).astype(float)


def empirical_tv(symbols, exact: WordDistribution, length: int | None = None) -> float:
    """Total-variation distance between sliding-window frequencies and ``exact``.

    ``symbols`` are symbol indices; at least ``100 |A|^L`` windows are required.
    """
    L = exact.length if length is None else length
    if L != exact.length:
        raise ValueError(f"exact distribution has length {exact.length}, asked for {L}")
    k = len(exact.alphabet)
    n_windows = len(symbols) - L + 1
    if n_windows < 100 * k ** L:
        raise InsufficientSamples(f"{n_windows} windows < {100 * k ** L} required for L = {L}")
    counts = sliding_counts(symbols, k, L)
    return 0.5 * float(np.abs(counts / counts.sum() - exact.probs).sum())


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
