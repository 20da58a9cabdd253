"""End-to-end analysis of a machine and the renewal sweep."""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import canonical, imps, machine as mach, zoo

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ("N", "m", "rank", "gap", "c_mu_0", "c_mu_1", "c_q_0", "c_q_1", "seconds")


@dataclass
class Analysis:
    """Everything computed for one machine, kept for export and reporting."""

    machine: mach.EpsilonMachine
    pi: np.ndarray
    site: imps.SiteMatrices
    fp: imps.FixedPointPair
    cf: canonical.CanonicalForm


@dataclass(frozen=True)
class AnalysisReport:
    name: str
    m: int
    r: int
    gap: float
    ergodic: bool
    eta: float
    c_mu: dict
    c_q: dict
    schmidt: tuple
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "m": self.m,
            "r": self.r,
            "gap": self.gap,
            "ergodic": self.ergodic,
            "eta": self.eta,
            "c_mu": {_alpha_key(a): v for a, v in self.c_mu.items()},
            "c_q": {_alpha_key(a): v for a, v in self.c_q.items()},
            "schmidt": list(self.schmidt),
            "seconds": self.seconds,
        }


def _alpha_key(alpha: float) -> str:
    return format(alpha, "g")


def run(machine: mach.EpsilonMachine, rank_cutoff: float = canonical.RANK_CUTOFF,
        tol: float = 1e-13, strict: bool = True) -> Analysis:
    mach.require_valid(machine)
    site = imps.site_matrices_from_machine(machine)
    fp = imps.fixed_points(site, tol=tol, strict=strict)
    pi = np.diag(fp.V_l).copy() if not fp.ergodic else mach.stationary_distribution(machine, tol=tol)
    cf = canonical.canonical_form(site, fp, rank_cutoff)
    return Analysis(machine, pi, site, fp, cf)


def analyze(machine: mach.EpsilonMachine, alphas=canonical.ALPHA_GRID,
            rank_cutoff: float = canonical.RANK_CUTOFF, tol: float = 1e-13) -> AnalysisReport:
    """Fixed points, canonical form and classical/quantum Renyi memories."""
    start = time.perf_counter()
    res = run(machine, rank_cutoff, tol)
    summary = canonical.complexity_summary(res.pi, res.cf, res.fp.gap, alphas)
    return AnalysisReport(
        name=machine.name,
        m=machine.n_states,
        r=summary.rank,
        gap=summary.gap,
        ergodic=res.fp.ergodic,
        eta=res.fp.eta,
        c_mu=summary.c_mu,
        c_q=summary.c_q,
        schmidt=tuple(float(v) for v in summary.schmidt),
        seconds=time.perf_counter() - start,
    )


def _sweep_row(N: int):
    rep = analyze(zoo.renewal(N), alphas=(0.0, 1.0))
    return (N, rep.m, rep.r, rep.gap, rep.c_mu[0.0], rep.c_mu[1.0], rep.c_q[0.0], rep.c_q[1.0], rep.seconds)


def sweep_threads() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("QSM_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer QSM_THREADS=%r", cap)
    return n


def renewal_sweep(n_min: int, n_max: int, threads: int | None = None):
    """One row per ``N`` in ``n_min..n_max`` (columns :data:`SWEEP_COLUMNS`), in ``N`` order."""
    Ns = list(range(n_min, n_max + 1))
    threads = sweep_threads() if threads is None else threads
    if threads <= 1 or len(Ns) <= 1:
        return [_sweep_row(N) for N in Ns]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_sweep_row, Ns))
