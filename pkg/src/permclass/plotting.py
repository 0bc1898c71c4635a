"""Figures for CLI reports: the class lattice with memberships, and per-stage resource changes."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .classifier import VerificationReport  # noqa: E402
from .core import LATTICE, Ancilla, ClassLabel, Phase, Waste  # noqa: E402

# Waste level sets the row, ancilla and phase set the column.
_ROW = {Waste.NON_WASTING: 0, Waste.WASTING_SEPARABLE: 1, Waste.WASTING_ENTANGLED: 2}


def _position(lab: ClassLabel) -> tuple[float, float]:
    if lab.waste is Waste.WASTING_ENTANGLED:
        x = 0.5 if lab.ancilla is Ancilla.DIRTY else 2.5
    else:
        x = (0 if lab.ancilla is Ancilla.DIRTY else 2) + (0 if lab.phase is Phase.STRICT else 1)
    return x, float(_ROW[lab.waste])


def plot_lattice(report: VerificationReport, path: str | Path, title: str | None = None) -> Path:
    """Draw the inclusion order, filling member classes and outlining minimal ones."""
    path = Path(path)
    members, minimal = report.members, set(report.minimal_classes)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for a, b in LATTICE.edges:
        (x0, y0), (x1, y1) = _position(a), _position(b)
        ax.plot([x0, x1], [y0, y1], color="0.7", lw=1, zorder=1)
    for lab in LATTICE.labels:
        x, y = _position(lab)
        face = "tab:green" if lab in members else "white"
        edge = "black" if lab in minimal else "0.5"
        ax.scatter([x], [y], s=1500, c=face, edgecolors=edge, linewidths=2.5 if lab in minimal else 1, zorder=2)
        ax.text(x, y, lab.name, ha="center", va="center", fontsize=8, zorder=3)
    ax.set_xlim(-0.6, 3.6)
    ax.set_ylim(-0.6, 2.6)
    ax.set_axis_off()
    ax.set_title(title or "class membership (filled) and minimal classes (bold)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_stage_deltas(stages: list[dict], path: str | Path, key: str = "expanded_delta") -> Path:
    """Grouped bars of the CNOT, T, H and gate-count change introduced by each pass."""
    path = Path(path)
    tallies = ("cnot_count", "t_count", "h_count", "gate_count")
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    width = 0.8 / len(tallies)
    for j, name in enumerate(tallies):
        xs = [i + (j - 1.5) * width for i in range(len(stages))]
        ax.bar(xs, [s[key][name] for s in stages], width, label=name.removesuffix("_count"))
    ax.axhline(0, color="black", lw=0.8)
    ax.set_xticks(range(len(stages)))
    ax.set_xticklabels([s["pass"].split("_")[0] for s in stages])
    ax.set_ylabel("change after expansion" if key == "expanded_delta" else "change")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
