"""Figure rendering for the CLI report paths.

Every experiment subcommand can render a single summary figure next to its
delimited output.  Figures are written straight to file with the Agg
backend; nothing here opens a window.
"""

from __future__ import annotations

import math
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = [
    "plot_sweep",
    "plot_trajectory",
    "plot_gossip",
    "plot_spanner",
]

_FIGSIZE = (6.4, 4.0)


def plot_sweep(rows, path: str) -> None:
    """Estimate vs. grid factor for one property sweep."""
    rows = sorted(rows, key=lambda r: r.factor)
    xs = [r.factor for r in rows]
    ys = [r.estimate for r in rows]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(xs, ys, "o-", lw=1.5)
    ax.axhline(0.5, color="grey", lw=0.8, ls="--")
    r0 = rows[0]
    ax.set_xlabel(r"p as multiple of ln(n)/n")
    ax.set_ylabel("estimated probability")
    ax.set_ylim(-0.03, 1.03)
    ax.set_title(f"{r0.property.value} on {r0.model}, n={r0.n}, "
                 f"{r0.trials} trials/point")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_trajectory(exp, path: str, max_curves: int = 20) -> None:
    """Truncated trajectories of a few trials against the reference curve."""
    n = exp.n
    ks = range(1, n)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    shown = min(max_curves, exp.y_hat.shape[0])
    for t in range(shown):
        ax.plot(ks, exp.y_hat[t], color="steelblue", alpha=0.25, lw=0.7)
    ax.plot(ks, exp.reference, color="black", lw=1.5,
            label="reference sum 1/(i(n-i)+1)")
    ax.axhline(2.0 * math.log(n) / n, color="firebrick", lw=0.8, ls="--",
               label="2 ln(n)/n")
    ax.set_xlabel("k (tree edges)")
    ax.set_ylabel("truncated trajectory")
    ax.set_title(f"foremost-tree trajectories, n={n}, "
                 f"{exp.trials} trials (showing {shown})")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_gossip(results, n: int, model: str, path: str) -> None:
    """Milestone call counts per trial with the asymptotic reference lines."""
    names = ["pair_exchange", "first_expert", "fixed_expert", "all_experts"]
    refs = [0.5, 1.0, 1.0, 1.5]
    unit = n * math.log(n)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i, name in enumerate(names):
        vals = [getattr(m, name) for m in results if getattr(m, name) is not None]
        xs = [i + 1 + 0.08 * (j % 5 - 2) / 2 for j in range(len(vals))]
        ax.plot(xs, vals, ".", color="steelblue", alpha=0.5, ms=4)
        ax.hlines(refs[i] * unit, i + 0.7, i + 1.3, color="firebrick", lw=1.2)
    ax.set_xticks(range(1, len(names) + 1))
    ax.set_xticklabels(names, fontsize=8)
    ax.set_ylabel("calls")
    ax.set_title(f"gossip milestones, {model} model, n={n} "
                 f"(bars: 1/2, 1, 1, 3/2 times n ln n)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_spanner(found: Sequence[int], sizes: Sequence[int], n: int,
                 path: str) -> None:
    """Per-trial construction success and certificate sizes."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.5, 3.4))
    rate = sum(found) / len(found) if found else 0.0
    ax1.bar([0, 1], [len(found) - sum(found), sum(found)],
            color=["lightgrey", "seagreen"])
    ax1.set_xticks([0, 1])
    ax1.set_xticklabels(["failed", "found"])
    ax1.set_title(f"success rate {rate:.0%} over {len(found)} trials")
    if sizes:
        ax2.plot(sizes, ".", color="steelblue")
    ax2.axhline(2 * n - 4, color="firebrick", lw=1.0, ls="--",
                label="2n-4")
    ax2.set_xlabel("successful trial")
    ax2.set_ylabel("appearances")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
