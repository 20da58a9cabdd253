"""Epsilon-machines: representation, validation and classical analysis.

An epsilon-machine is stored as a dense transition tensor ``T`` of shape
``(|A|, m, m)`` with ``T[x, k, j] = P(emit x, go to s_j | in s_k)``.

Words are sequences of symbol labels (strings) or symbol indices (ints);
a plain ``str`` is read character by character, which matches the
single-character alphabets used throughout the zoo.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import (
    InvalidMachine,
    NegativeAlpha,
    NoConvergence,
    NotIrreducible,
    ShapeMismatch,
    UnknownSymbol,
)

DEFAULT_VALIDATION_TOL = 1e-9
UNIFILAR_ZERO_TOL = 1e-12
DENSE_SOLVE_LIMIT = 1024


@dataclass(frozen=True)
class EpsilonMachine:
    """Unifilar hidden Markov model over causal states.

    Parameters
    ----------
    alphabet : sequence of str
        Ordered symbol labels.
    states : sequence of str
        Ordered causal-state labels.
    transitions : array_like, shape (len(alphabet), len(states), len(states))
        ``transitions[x, k, j] = P(x, s_j | s_k)``.
    name : str, optional
    """

    alphabet: tuple
    states: tuple
    transitions: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        alphabet = tuple(str(a) for a in self.alphabet)
        states = tuple(str(s) for s in self.states)
        T = np.array(self.transitions, dtype=float)
        if T.ndim != 3 or T.shape != (len(alphabet), len(states), len(states)):
            raise ShapeMismatch(
                f"transition tensor has shape {T.shape}, expected "
                f"({len(alphabet)}, {len(states)}, {len(states)})"
            )
        if len(set(alphabet)) != len(alphabet):
            raise ShapeMismatch("duplicate symbol labels")
        if len(set(states)) != len(states):
            raise ShapeMismatch("duplicate state labels")
        T.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transitions", T)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_symbols(self) -> int:
        return len(self.alphabet)

    @property
    def state_matrix(self) -> np.ndarray:
        """Symbol-marginalised transition matrix ``M = sum_x T^x``."""
        return self.transitions.sum(axis=0)

    def encode(self, word) -> np.ndarray:
        return encode_word(self.alphabet, word)

    def decode(self, indices: Iterable[int]) -> tuple:
        return tuple(self.alphabet[int(i)] for i in indices)

    def format_word(self, word) -> str:
        """Render a word for display; single-character alphabets are joined."""
        labels = self.decode(self.encode(word))
        sep = "" if all(len(a) == 1 for a in self.alphabet) else " "
        return sep.join(labels)


def encode_word(alphabet: Sequence[str], word) -> np.ndarray:
    lookup = {a: i for i, a in enumerate(alphabet)}
    out = []
    for s in word:
        if isinstance(s, (int, np.integer)) and not isinstance(s, bool):
            if not 0 <= s < len(alphabet):
                raise UnknownSymbol(f"symbol index {s} outside alphabet of size {len(alphabet)}")
            out.append(int(s))
        else:
            try:
                out.append(lookup[str(s)])
            except KeyError:
                raise UnknownSymbol(f"symbol {s!r} not in alphabet {list(alphabet)}") from None
    return np.asarray(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple
    magnitude: float

    def __str__(self):
        loc = ", ".join(f"{k}={v}" for k, v in zip(("k", "x", "j"), self.location) if v is not None)
        return f"{self.kind} at ({loc}): magnitude {self.magnitude:.3g}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    @property
    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def without(self, *kinds) -> "ValidationReport":
        return ValidationReport(tuple(v for v in self.violations if v.kind not in kinds))

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


def validate(
    machine: EpsilonMachine,
    tol: float = DEFAULT_VALIDATION_TOL,
    zero_tol: float = UNIFILAR_ZERO_TOL,
) -> ValidationReport:
    """Check probability range, row stochasticity, unifilarity and irreducibility.

    Locations are ``(k, x, j)`` index triples, with ``None`` where a
    coordinate does not apply (``(k, None, None)`` for a bad row sum).
    """
    T = machine.transitions
    n_sym, m, _ = T.shape
    found = []

    for x, k, j in zip(*np.nonzero((T < -tol) | (T > 1 + tol))):
        v = T[x, k, j]
        found.append(Violation("probability_range", (int(k), int(x), int(j)),
                               float(-v if v < 0 else v - 1)))

    row_sums = T.sum(axis=(0, 2))
    for k in np.nonzero(np.abs(row_sums - 1) > tol)[0]:
        found.append(Violation("row_stochasticity", (int(k), None, None),
                               float(abs(row_sums[k] - 1))))

    positive = T > zero_tol
    for x, k in zip(*np.nonzero(positive.sum(axis=2).T > 1)):
        succ = np.nonzero(positive[x, k])[0]
        # size of the smaller competing branch
        mag = float(np.sort(T[x, k, succ])[-2])
        found.append(Violation("unifilarity", (int(k), int(x), None), mag))

    if m > 0:
        n_comp, _ = connected_components(sp.csr_matrix(machine.state_matrix > zero_tol),
                                         directed=True, connection="strong")
        if n_comp > 1:
            found.append(Violation("irreducibility", (None, None, None), float(n_comp)))

    return ValidationReport(tuple(found))


def require_valid(machine: EpsilonMachine, allow=("irreducibility",), tol=DEFAULT_VALIDATION_TOL):
    """Raise :class:`InvalidMachine` unless the machine passes ``validate``.

    Violations whose kind is listed in ``allow`` are tolerated.
    """
    report = validate(machine, tol).without(*allow)
    if not report.ok:
        raise InvalidMachine(report)
    return machine


# ---------------------------------------------------------------------------
# stationary distribution and word probabilities


def is_irreducible(M: np.ndarray, zero_tol: float = UNIFILAR_ZERO_TOL) -> bool:
    n_comp, _ = connected_components(sp.csr_matrix(M > zero_tol), directed=True, connection="strong")
    return n_comp == 1


def stationary_from_matrix(M: np.ndarray, tol: float = 1e-13, max_iter: int = 10**6) -> np.ndarray:
    """Left Perron vector of a row-stochastic irreducible matrix.

    Power iteration runs on the lazy chain ``(I + M) / 2``, which has the
    same stationary vector but no periodic oscillation. Falls back to a
    dense linear solve for ``m <= 1024`` if the iteration budget runs out.
    """
    M = np.asarray(M, dtype=float)
    m = M.shape[0]
    if not is_irreducible(M):
        raise NotIrreducible("state transition graph has more than one strongly connected component")
    if m == 1:
        return np.ones(1)

    Mt = sp.csr_matrix(M.T)
    pi = np.full(m, 1.0 / m)
    converged = False
    for _ in range(max_iter):
        step = Mt @ pi
        if np.max(np.abs(step - pi)) <= tol:
            pi = step
            converged = True
            break
        pi = 0.5 * (pi + step)
        pi /= pi.sum()

    if not converged:
        if m > DENSE_SOLVE_LIMIT:
            raise NoConvergence(f"stationary distribution not converged after {max_iter} iterations")
        lhs = np.vstack([M.T - np.eye(m), np.ones((1, m))])
        rhs = np.zeros(m + 1)
        rhs[-1] = 1.0
        pi = np.linalg.lstsq(lhs, rhs, rcond=None)[0]

    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if np.any(pi <= 0):
        raise NotIrreducible("stationary distribution has zero entries")
    return pi


def stationary_distribution(machine: EpsilonMachine, tol: float = 1e-13, max_iter: int = 10**6) -> np.ndarray:
    """Stationary causal-state distribution ``pi`` with ``pi M = pi``."""
    return stationary_from_matrix(machine.state_matrix, tol, max_iter)


def word_probability_classical(machine: EpsilonMachine, pi, word) -> float:
    """``pi^T T^{x_1} ... T^{x_L} 1``; the empty word has probability 1."""
    v = np.asarray(pi, dtype=float)
    for x in machine.encode(word):
        v = v @ machine.transitions[x]
    return float(v.sum())


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy in bits of a probability vector.

    ``alpha = 0`` counts the support, ``alpha = 1`` is the Shannon limit and
    ``alpha = inf`` the min-entropy. Zero entries are dropped (0 log 0 = 0).
    """
    if alpha < 0:
        raise NegativeAlpha(f"alpha must be non-negative, got {alpha}")
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    if p.size == 0:
        return 0.0
    if alpha == 0:
        h = np.log2(p.size)
    elif alpha == 1:
        h = -np.sum(p * np.log2(p))
    elif np.isinf(alpha):
        h = -np.log2(p.max())
    else:
        # log sum p^a = log1p(sum p (p^(a-1) - 1)) stays accurate as a -> 1
        excess = np.sum(p * np.expm1((alpha - 1) * np.log(p)))
        h = np.log1p(excess) / ((1 - alpha) * np.log(2))
    # clip round-off below zero; adding 0.0 also turns -0.0 into 0.0
    return max(float(h), 0.0) + 0.0


def classical_complexity(pi, alpha: float) -> float:
    """Classical Renyi memory ``C_mu^alpha`` of the causal-state distribution."""
    return renyi_entropy(pi, alpha)


# ---------------------------------------------------------------------------
# sampling


def _successor_table(T: np.ndarray, zero_tol: float = UNIFILAR_ZERO_TOL):
    """Per (x, k): successor index (or -1) and emission probability."""
    prob = T.sum(axis=2)
    succ = np.where(prob > zero_tol, T.argmax(axis=2), -1)
    return succ, prob


def sample_classical(machine: EpsilonMachine, pi, seed: int, length: int):
    """Generate a trajectory of the machine.

    Returns
    -------
    symbols : ndarray of int, shape (length,)
        Emitted symbol indices (use ``machine.decode`` for labels).
    states : ndarray of int, shape (length + 1,)
        Visited causal states, starting with the initial state drawn from ``pi``.
    """
    rng = np.random.default_rng(seed)
    pi = np.asarray(pi, dtype=float)
    succ, prob = _successor_table(machine.transitions)
    cum = np.cumsum(prob.T, axis=1)  # (m, |A|)
    cum /= cum[:, -1:]

    k = int(rng.choice(len(pi), p=pi / pi.sum()))
    symbols = np.empty(length, dtype=np.int64)
    states = np.empty(length + 1, dtype=np.int64)
    states[0] = k
    u = rng.random(length)
    n_sym = machine.n_symbols
    for t in range(length):
        x = min(int(np.searchsorted(cum[k], u[t], side="right")), n_sym - 1)
        symbols[t] = x
        k = int(succ[x, k])
        states[t + 1] = k
    return symbols, states
