"""Timing report for candidate generation across target lengths.

Measures how long Part I takes on random targets of growing length,
writes a tab-separated table next to a log-log matplotlib figure, and
fits the growth exponent of time versus length by least squares on the
log values.  The candidate generator is called directly (not through
the memoized decision path) so repeated lengths stay honest timings.
"""

from __future__ import annotations

import random
import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .subgroup_search import generate_candidates
from .words import format_word, random_word


def measure(rank: int, lengths, seed: int) -> list:
    """One timing row per length, targets drawn from a seeded stream."""
    rng = random.Random(seed)
    rows = []
    for length in lengths:
        v = random_word(rng, rank, length)
        t0 = time.perf_counter()
        cands = generate_candidates(v, rank)
        dt = time.perf_counter() - t0
        rows.append({"length": length, "target": format_word(v),
                     "candidates": len(cands), "seconds": dt})
    return rows


def fit_slope(rows) -> float:
    """Least-squares slope of log(seconds) against log(length)."""
    xs = np.log([row["length"] for row in rows])
    ys = np.log([max(row["seconds"], 1e-9) for row in rows])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def step_factors(rows) -> list:
    """Ratio of consecutive timings, one entry per length step."""
    times = [max(row["seconds"], 1e-9) for row in rows]
    return [b / a for a, b in zip(times, times[1:])]


def write_table(rows, path: Path) -> None:
    lines = ["length\ttarget\tcandidates\tseconds"]
    for row in rows:
        lines.append(f"{row['length']}\t{row['target']}\t"
                     f"{row['candidates']}\t{row['seconds']:.6f}")
    path.write_text("\n".join(lines) + "\n")


def write_figure(rows, slope: float, path: Path) -> None:
    xs = [row["length"] for row in rows]
    ys = [max(row["seconds"], 1e-9) for row in rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(xs, ys, "o-", label="candidate generation")
    anchor = ys[0] / xs[0] ** slope
    ax.loglog(xs, [anchor * x ** slope for x in xs], "--",
              label=f"slope {slope:.2f} fit")
    ax.set_xlabel("|v|")
    ax.set_ylabel("seconds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def run_scaling(rank: int, lengths, seed: int, out_dir: Path) -> dict:
    """Measure, fit, and write the table and figure into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = measure(rank, lengths, seed)
    slope = fit_slope(rows)
    table = out_dir / "scaling.tsv"
    figure = out_dir / "scaling.png"
    write_table(rows, table)
    write_figure(rows, slope, figure)
    return {"rows": rows, "slope": slope,
            "steps": step_factors(rows),
            "table": str(table), "figure": str(figure)}
