"""Figures written next to the CSV/JSON reports."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

params = {
    "axes.labelsize": 11,
    "axes.titlesize": 12,
    "font.size": 10,
    "legend.fontsize": 9,
    "lines.linewidth": 1.5,
    "lines.markersize": 5,
    "figure.figsize": [6.4, 4.2],
    "savefig.dpi": 120,
}

# keeps PNG bytes identical across reruns
_PNG_METADATA = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_METADATA if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_tradeoff(rows, path) -> Path:
    """Measured log2 weight (solid) and the analytic curve (dashed) against h, one colour per k."""
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        by_k = defaultdict(list)
        for row in rows:
            by_k[row.k].append(row)
        for i, (k, group) in enumerate(sorted(by_k.items())):
            group.sort(key=lambda r: r.h)
            color = f"C{i}"
            hs = [r.h for r in group]
            ax.plot(hs, [r.log2_weight for r in group], "o-", color=color, label=f"k={k} measured")
            ax.plot(hs, [r.bound_log2_weight for r in group], "--", color=color, label=f"k={k} bound")
        ax.set_xlabel("block length h")
        ax.set_ylabel("log2 weight")
        ax.legend(ncol=2)
        ax.grid(alpha=0.3)
        return _save(fig, path)


def plot_mistakes(mistake_trials, trials, path, title="") -> Path:
    """Cumulative mistakes against trial index."""
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        xs = [0] + list(mistake_trials) + [max(trials, mistake_trials[-1] if mistake_trials else 0)]
        ys = [0] + list(range(1, len(mistake_trials) + 1)) + [len(mistake_trials)]
        ax.step(xs, ys, where="post")
        ax.set_xlabel("trial")
        ax.set_ylabel("cumulative mistakes")
        if title:
            ax.set_title(title)
        ax.grid(alpha=0.3)
        return _save(fig, path)


def plot_comparison(rows, path) -> Path:
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        names = [r["algorithm"] for r in rows]
        vals = [r["mistakes"] if r["mistakes"] is not None else 0 for r in rows]
        bars = ax.barh(range(len(rows)), vals, color=["C7" if r["mistakes"] is None else "C0" for r in rows])
        for bar, r in zip(bars, rows):
            label = "infeasible" if r["mistakes"] is None else str(r["mistakes"])
            ax.text(bar.get_width(), bar.get_y() + bar.get_height() / 2, f" {label}", va="center")
        ax.set_yticks(range(len(rows)))
        ax.set_yticklabels(names)
        ax.invert_yaxis()
        ax.set_xlabel("mistakes (adversarial teacher)")
        return _save(fig, path)
