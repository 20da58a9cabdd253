"""Static figures for sweep reports.

Figures go to files only (Agg backend). SVG output is made byte-stable by
fixing the hash salt and dropping the creation date.
"""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.family": "serif",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "svg.hashsalt": "qsm",
    "svg.fonttype": "path",
}


def figsize(scale: float = 1.0, width_pt: float = 345.0):
    golden = (math.sqrt(5) - 1) / 2
    width = width_pt / 72.27 * scale
    return width, width * golden


def _save(fig, path):
    kwargs = {}
    if str(path).lower().endswith(".svg"):
        kwargs["metadata"] = {"Date": None}
    elif str(path).lower().endswith(".png"):
        kwargs["metadata"] = {"Software": None}
    fig.savefig(path, bbox_inches="tight", **kwargs)
    plt.close(fig)


def plot_memory_sweep(rows, path):
    """Classical and quantum memory (bits) against the renewal parameter ``N``.

    ``rows`` are sweep rows ``(N, m, rank, gap, c_mu_0, c_mu_1, c_q_0, c_q_1, seconds)``.
    """
    N = [r[0] for r in rows]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize(1.0))
        ax.plot(N, [r[5] for r in rows], "-", color="k", label=r"$C_\mu$")
        ax.plot(N, [r[7] for r in rows], "--", color="tab:blue", label=r"$C_q$")
        ax.set_xscale("log", base=2)
        ax.set_xlabel(r"$N$")
        ax.set_ylabel("memory (bits)")
        ax.legend(frameon=False, loc="upper left")
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
        _save(fig, path)
    return path
