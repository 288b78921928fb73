"""Campaign reporting: delimited output plus rendered figures."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import CampaignRow

CSV_COLUMNS = [
    "family", "n", "m", "seed", "epsilon",
    "min_ratio_num", "min_ratio_den", "iterations", "failures", "reductions_fired",
]

TARGET = 7 / 9


def write_csv(rows: Sequence[CampaignRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            ratio = row.min_ratio
            writer.writerow([
                row.spec.family, row.spec.n, row.spec.m, row.spec.seed,
                str(row.epsilon) if row.epsilon is not None else "",
                ratio.numerator if ratio is not None else "",
                ratio.denominator if ratio is not None else "",
                row.iterations, row.failures, row.reductions_fired,
            ])
    return path


def render_figures(rows: Sequence[CampaignRow], out_dir) -> list[Path]:
    """Write summary figures next to the CSV; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    ratios = [float(r.min_ratio) for r in rows if r.min_ratio is not None]
    if ratios:
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        ax.hist(ratios, bins=40, color="#4878a8", edgecolor="white")
        ax.axvline(TARGET, color="#c44e52", linestyle="--", label="7/9 target")
        ax.set_xlabel("min bundle ratio")
        ax.set_ylabel("instances")
        ax.set_title("Worst per-agent ratio across the campaign")
        ax.legend()
        path = out_dir / "min_ratio_hist.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    iterations = [r.iterations for r in rows]
    if iterations:
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        top = max(iterations)
        ax.hist(iterations, bins=range(1, top + 2), align="left",
                color="#6aa84f", edgecolor="white")
        ax.set_xlabel("iterations to success")
        ax.set_ylabel("instances")
        ax.set_title("Threshold-descent iterations")
        ax.set_xticks(range(1, top + 1))
        path = out_dir / "iterations_hist.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    firings = [r.reductions_fired for r in rows]
    if firings:
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        top = max(firings)
        ax.hist(firings, bins=range(0, top + 2), align="left",
                color="#b08ccf", edgecolor="white")
        ax.set_xlabel("reduction firings per run")
        ax.set_ylabel("instances")
        ax.set_title("Prefix-reduction activity")
        ax.set_xticks(range(0, top + 1))
        path = out_dir / "reductions_hist.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    return written
