"""Optional matplotlib rendering for the CLI's report paths.

Figures are a convenience layer over the delimited outputs: the CSV/JSON
files remain the contract, and nothing here is imported unless plots were
requested.  All rendering uses the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def plot_frontier(rows: Sequence[dict], targets: tuple[float, float, float],
                  path: str | Path) -> None:
    """Scatter the frontier's rate triples: R1 vs R2, R3 as color."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if rows:
        r1 = [row["R1"] for row in rows]
        r2 = [row["R2"] for row in rows]
        r3 = [row["R3"] for row in rows]
        sc = ax.scatter(r1, r2, c=r3, cmap="viridis", s=28)
        fig.colorbar(sc, ax=ax, label="R3 (bits)")
    ax.set_xlabel("R1 (bits)")
    ax.set_ylabel("R2 (bits)")
    ax.set_title(f"Rate frontier at D = ({targets[0]:g}, {targets[1]:g}, {targets[2]:g})")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_rate_distortion(pairs: Sequence[tuple[float, float]],
                         closed_form: Sequence[tuple[float, float]] | None,
                         path: str | Path) -> None:
    """Rate-distortion sweep with the closed-form curve overlaid when known."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if pairs:
        ax.plot([d for d, _ in pairs], [r for _, r in pairs],
                marker="o", ms=3.5, lw=1.2, label="grid sweep")
    if closed_form:
        ax.plot([d for d, _ in closed_form], [r for _, r in closed_form],
                lw=1.2, ls="--", label="closed form")
        ax.legend()
    ax.set_xlabel("distortion D")
    ax.set_ylabel("rate R (bits)")
    ax.set_title("Rate-distortion with decoder side information")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_simulation(per_class_rates: dict[str, float], path: str | Path) -> None:
    """Bar chart of outcome class frequencies for one simulation run."""
    order = ["success", "event1", "event2", "event3"]
    labels = {
        "success": "success",
        "event1": "no typical\ncodeword",
        "event2": "true triple\natypical",
        "event3": "non-unique\ndecoding",
    }
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    xs = range(len(order))
    vals = [per_class_rates.get(k, 0.0) for k in order]
    ax.bar(xs, vals, color=["#2a9d8f", "#e76f51", "#e9c46a", "#f4a261"])
    ax.set_xticks(list(xs))
    ax.set_xticklabels([labels[k] for k in order])
    ax.set_ylabel("fraction of trials")
    ax.set_ylim(0, 1)
    ax.set_title("Binning simulation outcomes")
    for x, v in zip(xs, vals):
        ax.text(x, v + 0.02, f"{v:.3f}", ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
