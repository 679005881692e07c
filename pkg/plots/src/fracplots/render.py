"""Figure rendering from fracsource run artifacts.

Three overlay kinds:

* ``truth_vs_recon``  rho_true and rho_hat against t from one trace.csv
* ``first_iterates``  the iterates m = 1..4 (early_iterates.csv next to the
  trace) with the truth for reference
* ``sweep_panel``     one truth-vs-reconstruction tile per sweep entry,
  driven by a sweep index.csv

Rendering never writes to its inputs, and figure dimensions depend only on
the requested kind.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .schema import read_early_iterates, read_sweep_index, read_trace

FIG_DPI = 120
SINGLE_SIZE = (6.0, 4.0)


class OverlayKind(enum.Enum):
    TRUTH_VS_RECON = "truth_vs_recon"
    FIRST_ITERATES = "first_iterates"
    SWEEP_PANEL = "sweep_panel"


@dataclass(frozen=True)
class FigureSpec:
    trace: Path
    kind: OverlayKind
    out: Path


def _has_truth(col: list[float]) -> bool:
    return not all(math.isnan(v) for v in col)


def _axes_labels(ax):
    ax.set_xlabel("t")
    ax.set_ylabel("rho(t)")


def _render_truth_vs_recon(spec: FigureSpec) -> None:
    cols = read_trace(spec.trace)
    fig, ax = plt.subplots(figsize=SINGLE_SIZE, dpi=FIG_DPI)
    if _has_truth(cols["rho_true"]):
        ax.plot(cols["t"], cols["rho_true"], "k-", lw=1.8, label="true")
    ax.plot(cols["t"], cols["rho_hat"], "r--", lw=1.4, label="reconstruction")
    _axes_labels(ax)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out)
    plt.close(fig)


def _render_first_iterates(spec: FigureSpec) -> None:
    early = read_early_iterates(spec.trace.parent / "early_iterates.csv")
    fig, ax = plt.subplots(figsize=SINGLE_SIZE, dpi=FIG_DPI)
    try:
        cols = read_trace(spec.trace)
        if _has_truth(cols["rho_true"]):
            ax.plot(cols["t"], cols["rho_true"], "k-", lw=1.8, label="true")
    except FileNotFoundError:
        pass
    for m in range(1, 5):
        ax.plot(early["t"], early[f"rho_m{m}"], lw=1.2, label=f"iterate {m}")
    _axes_labels(ax)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out)
    plt.close(fig)


def _render_sweep_panel(spec: FigureSpec) -> None:
    rows = read_sweep_index(spec.trace)
    n = max(len(rows), 1)
    ncol = min(n, 3)
    nrow = (n + ncol - 1) // ncol
    fig, axes = plt.subplots(
        nrow, ncol, figsize=(4.0 * ncol, 3.0 * nrow), dpi=FIG_DPI, squeeze=False
    )
    param = None
    for ax in axes.flat:
        ax.set_visible(False)
    for i, row in enumerate(rows):
        ax = axes[i // ncol][i % ncol]
        ax.set_visible(True)
        cols = read_trace(spec.trace.parent / row["subdir"] / "trace.csv")
        if _has_truth(cols["rho_true"]):
            ax.plot(cols["t"], cols["rho_true"], "k-", lw=1.5)
        ax.plot(cols["t"], cols["rho_hat"], "r--", lw=1.2)
        if param is None:
            param = next(iter(row))
        ax.set_title(f"{param} = {row[param]}")
        _axes_labels(ax)
    fig.tight_layout()
    fig.savefig(spec.out)
    plt.close(fig)


_RENDERERS = {
    OverlayKind.TRUTH_VS_RECON: _render_truth_vs_recon,
    OverlayKind.FIRST_ITERATES: _render_first_iterates,
    OverlayKind.SWEEP_PANEL: _render_sweep_panel,
}


def render(spec: FigureSpec) -> Path:
    """Write the requested overlay image; returns the output path."""
    spec.out.parent.mkdir(parents=True, exist_ok=True)
    _RENDERERS[spec.kind](spec)
    return spec.out
