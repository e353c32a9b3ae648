"""Matplotlib figures written next to the CSV/JSON reports.

Figures are built on a bare ``Figure`` (no pyplot state) and saved without
a software/date stamp so reruns produce identical PNG bytes.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Mapping, Sequence

from matplotlib.figure import Figure

from .evaluation import RocCurve
from .ioutil import atomic_write_bytes

STYLE = {
    "figsize": (5.0, 4.2),
    "dpi": 120,
}


def _save(fig: Figure, path: str | Path) -> None:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=STYLE["dpi"], metadata={"Software": None})
    atomic_write_bytes(path, buf.getvalue())


def plot_roc_curves(curves: Mapping[str, RocCurve], path: str | Path, title: str = "ROC") -> None:
    fig = Figure(figsize=STYLE["figsize"])
    ax = fig.add_subplot()
    ax.plot([0, 1], [0, 1], ls=":", color="0.6", lw=1, label="chance")
    for label, curve in curves.items():
        ax.plot(curve.fpr, curve.tpr, lw=1.5, label=label, drawstyle="default")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=7, frameon=False)
    fig.tight_layout()
    _save(fig, path)


def plot_comparison(rows: Sequence, path: str | Path, baseline: float | None = None) -> None:
    """Accuracy and AUC bars per technique, with the majority baseline as a line."""
    fig = Figure(figsize=(6.4, 3.8))
    ax = fig.add_subplot()
    names = [r.technique.replace(" ", "\n", 1) for r in rows]
    xs = range(len(rows))
    width = 0.38
    ax.bar([x - width / 2 for x in xs], [r.accuracy for r in rows], width, label="accuracy")
    ax.bar([x + width / 2 for x in xs], [r.auc or 0.0 for r in rows], width, label="AUC")
    if baseline is not None:
        ax.axhline(baseline, color="k", ls="--", lw=1, label=f"baseline {baseline:.3f}")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, fontsize=7)
    ax.set_ylim(0, 1)
    ax.legend(fontsize=7, frameon=False, ncol=3, loc="upper center")
    fig.tight_layout()
    _save(fig, path)
