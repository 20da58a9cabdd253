"""Benchmark processes.

Families and their shorthand (accepted by the CLI wherever a machine file
is expected)::

    renewal{N}          discrete renewal process with uniform inter-event times
    biased_coin{p}      i.i.d. coin emitting "1" with probability p
    golden_mean{p}      no two consecutive 1s
    even_process{p}     1s come in blocks of even length
    alternating{}       deterministic period-2 sequence 0101...
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter
from .machine import EpsilonMachine

BINARY = ("0", "1")


@dataclass(frozen=True)
class ProcessSpec:
    family: str
    params: dict = field(default_factory=dict)

    def label(self) -> str:
        inner = ",".join(str(v) for v in self.params.values())
        return f"{self.family}{{{inner}}}"


def _prob(p, name="p"):
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise BadParameter(f"{name} must be a number, got {p!r}") from None
    if not 0 < p < 1:
        raise BadParameter(f"{name} must lie in (0, 1), got {p}")
    return p


def renewal(N: int) -> EpsilonMachine:
    """Renewal process whose inter-event time is uniform on ``1..N``.

    From ``s_k`` the machine emits 1 with probability ``1/(N-k)`` and resets
    to ``s_0``, otherwise emits 0 and moves to ``s_{k+1}``.
    """
    try:
        N_int = int(N)
    except (TypeError, ValueError):
        raise BadParameter(f"N must be an integer, got {N!r}") from None
    if N_int != float(N) or N_int < 2:
        raise BadParameter(f"N must be an integer >= 2, got {N!r}")
    N = N_int
    T = np.zeros((2, N, N))
    k = np.arange(N)
    T[0, k[:-1], k[:-1] + 1] = (N - k[:-1] - 1) / (N - k[:-1])
    T[1, k, 0] = 1.0 / (N - k)
    return EpsilonMachine(BINARY, tuple(f"s{i}" for i in range(N)), T, name=f"renewal{{{N}}}")


def biased_coin(p: float) -> EpsilonMachine:
    p = _prob(p)
    T = np.array([[[1 - p]], [[p]]])
    return EpsilonMachine(BINARY, ("s0",), T, name=f"biased_coin{{{p:g}}}")


def golden_mean(p: float = 0.5) -> EpsilonMachine:
    p = _prob(p)
    T = np.zeros((2, 2, 2))
    T[0, 0, 0] = 1 - p
    T[1, 0, 1] = p
    T[0, 1, 0] = 1.0
    return EpsilonMachine(BINARY, ("s0", "s1"), T, name=f"golden_mean{{{p:g}}}")


def even_process(p: float = 0.5) -> EpsilonMachine:
    p = _prob(p)
    T = np.zeros((2, 2, 2))
    T[0, 0, 0] = 1 - p
    T[1, 0, 1] = p
    T[1, 1, 0] = 1.0
    return EpsilonMachine(BINARY, ("s0", "s1"), T, name=f"even_process{{{p:g}}}")


def alternating() -> EpsilonMachine:
    T = np.zeros((2, 2, 2))
    T[0, 0, 1] = 1.0
    T[1, 1, 0] = 1.0
    return EpsilonMachine(BINARY, ("s0", "s1"), T, name="alternating{}")


def disjoint_union(a: EpsilonMachine, b: EpsilonMachine) -> EpsilonMachine:
    """Block-diagonal union of two machines over the same alphabet."""
    if a.alphabet != b.alphabet:
        raise BadParameter("machines must share an alphabet")
    ma, mb = a.n_states, b.n_states
    T = np.zeros((a.n_symbols, ma + mb, ma + mb))
    T[:, :ma, :ma] = a.transitions
    T[:, ma:, ma:] = b.transitions
    states = tuple(f"a.{s}" for s in a.states) + tuple(f"b.{s}" for s in b.states)
    return EpsilonMachine(a.alphabet, states, T, name=f"union({a.name},{b.name})")


def random_unifilar(n_states: int, n_symbols: int = 2, seed: int = 0,
                    min_prob: float = 0.05) -> EpsilonMachine:
    """Seeded random unifilar machine with a strongly connected state graph.

    Every state emits every symbol with probability at least ``min_prob``;
    successors are uniform, with a ring on symbol 0 guaranteeing
    irreducibility.
    """
    if n_states < 1 or n_symbols < 1:
        raise BadParameter("need at least one state and one symbol")
    rng = np.random.default_rng(seed)
    T = np.zeros((n_symbols, n_states, n_states))
    for k in range(n_states):
        w = rng.dirichlet(np.ones(n_symbols))
        w = min_prob + (1 - n_symbols * min_prob) * w
        for x in range(n_symbols):
            j = (k + 1) % n_states if x == 0 else int(rng.integers(n_states))
            T[x, k, j] = w[x]
    alphabet = tuple(str(x) for x in range(n_symbols))
    return EpsilonMachine(alphabet, tuple(f"s{i}" for i in range(n_states)), T,
                          name=f"random{{{n_states},{n_symbols},{seed}}}")


FAMILIES = {
    "renewal": (renewal, ("N",)),
    "biased_coin": (biased_coin, ("p",)),
    "golden_mean": (golden_mean, ("p",)),
    "even_process": (even_process, ("p",)),
    "alternating": (alternating, ()),
}

_SHORTHAND = re.compile(r"^\s*([A-Za-z_]\w*)\s*\{(.*)\}\s*$")


def make(spec: ProcessSpec) -> EpsilonMachine:
    try:
        ctor, keys = FAMILIES[spec.family]
    except KeyError:
        raise BadParameter(f"unknown family {spec.family!r}; known: {sorted(FAMILIES)}") from None
    extra = set(spec.params) - set(keys)
    if extra:
        raise BadParameter(f"{spec.family} takes parameters {keys}, got {sorted(extra)}")
    try:
        return ctor(**spec.params)
    except TypeError:
        raise BadParameter(f"{spec.family} requires parameter(s) {keys}") from None


def parse_shorthand(text: str) -> ProcessSpec:
    """Parse ``family{v}`` or ``family{key=v,...}`` into a :class:`ProcessSpec`."""
    match = _SHORTHAND.match(text)
    if match is None:
        if text.strip() in FAMILIES:
            return ProcessSpec(text.strip(), {})
        raise BadParameter(f"not a zoo shorthand: {text!r}")
    family, body = match.group(1), match.group(2).strip()
    if family not in FAMILIES:
        raise BadParameter(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    keys = FAMILIES[family][1]
    params = {}
    items = [s.strip() for s in body.split(",")] if body else []
    for i, item in enumerate(items):
        if "=" in item:
            key, value = (s.strip() for s in item.split("=", 1))
        elif i < len(keys):
            key, value = keys[i], item
        else:
            raise BadParameter(f"too many parameters for {family}: {body!r}")
        params[key] = _number(value)
    return ProcessSpec(family, params)


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            raise BadParameter(f"not a number: {text!r}") from None


def is_shorthand(text: str) -> bool:
    return bool(_SHORTHAND.match(text)) or text.strip() in FAMILIES


def from_shorthand(text: str) -> EpsilonMachine:
    return make(parse_shorthand(text))


def renewal_reference(N: int):
    """Closed-form q-simulator of the renewal process.

    Returns
    -------
    sigma : ndarray, shape (N, N)
        Column ``k`` is the memory state ``sigma_k``, uniform over basis
        vectors ``j >= k``.
    shift : ndarray, shape (N, N)
        Kraus block for symbol 0, ``|j+1><j|`` for ``j < N-1``.
    reset : ndarray, shape (N, N)
        Kraus block for symbol 1, ``|sigma_0><N-1|``.
    """
    renewal(N)  # parameter check
    sigma = np.zeros((N, N))
    for k in range(N):
        sigma[k:, k] = np.sqrt(1.0 / (N - k))
    shift = np.eye(N, k=-1)
    reset = np.zeros((N, N))
    reset[:, N - 1] = sigma[:, 0]
    return sigma, shift, reset


def standard_zoo():
    """The machines used by the acceptance checks, keyed by shorthand."""
    machines = {
        "biased_coin{0.3}": biased_coin(0.3),
        "golden_mean{0.5}": golden_mean(0.5),
        "even_process{0.5}": even_process(0.5),
        "alternating{}": alternating(),
    }
    for N in range(2, 11):
        machines[f"renewal{{{N}}}"] = renewal(N)
    return machines
