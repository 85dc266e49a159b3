"""Figure rendering for the CLI report paths.

All functions write a figure file next to the delimited output; nothing is
shown interactively.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .energy_functions import IdleEnergyFunction
from .furnace import BilinearFurnaceModel, Trajectory

if TYPE_CHECKING:  # pragma: no cover
    from .cli import BenchmarkRecord


def plot_trajectory(
    traj: Trajectory, model: BilinearFurnaceModel, path: str | Path
) -> None:
    """Temperature and applied power over one controlled idle period."""
    fig, (ax_t, ax_u) = plt.subplots(
        2, 1, sharex=True, figsize=(8, 6), height_ratios=[2, 1]
    )
    ax_t.plot(traj.times, traj.temperatures(model.ambient), color="tab:red")
    ax_t.axhline(model.operating_temperature, ls="--", lw=0.8, color="gray")
    ax_t.set_ylabel("temperature [°C]")
    ax_u.step(traj.times, traj.power, where="post", color="tab:blue")
    ax_u.set_ylabel("power [kW]")
    ax_u.set_xlabel("time [min]")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_energy_function(
    f: IdleEnergyFunction,
    path: str | Path,
    delta_max: float,
    bound: float | None = None,
) -> None:
    """Idle energy versus idle-period length."""
    grid = np.linspace(0.0, delta_max, 512)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(grid, f.eval_many(grid), color="tab:blue")
    if bound is not None:
        ax.axhline(bound, ls="--", lw=0.8, color="gray",
                   label="full reheat from ambient")
        ax.legend()
    ax.set_xlabel("idle period length [min]")
    ax.set_ylabel("energy [kW·min]")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_benchmark(records: Sequence["BenchmarkRecord"], path: str | Path) -> None:
    """Boxplots of the average idle power per utilisation bucket and model."""
    labels = sorted({rec.model for rec in records})
    buckets = sorted({rec.bucket for rec in records})
    fig, ax = plt.subplots(figsize=(max(7, 1.6 * len(buckets)), 4.5))
    width = 0.8 / max(len(labels), 1)
    colors = plt.cm.tab10.colors
    for li, label in enumerate(labels):
        positions, data = [], []
        for bi, bucket in enumerate(buckets):
            vals = [r.pbar for r in records if r.model == label and r.bucket == bucket]
            if vals:
                positions.append(bi + (li - (len(labels) - 1) / 2) * width)
                data.append(vals)
        box = ax.boxplot(data, positions=positions, widths=width * 0.9,
                         patch_artist=True, manage_ticks=False)
        for patch in box["boxes"]:
            patch.set_facecolor(colors[li % len(colors)])
    ax.set_xticks(range(len(buckets)))
    ax.set_xticklabels([f"({b - 0.1:.1f}, {b:.1f}]" for b in buckets])
    ax.set_xlabel("utilisation")
    ax.set_ylabel("average idle power [kW]")
    handles = [plt.Rectangle((0, 0), 1, 1, facecolor=colors[i % len(colors)])
               for i in range(len(labels))]
    ax.legend(handles, labels)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
