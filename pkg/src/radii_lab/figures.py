"""File-output plotting for radius bound reports.

Kept separate from the CLI so matplotlib stays an optional import cost;
the Agg backend is forced so rendering works headless and deterministically.
"""

from __future__ import annotations

from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .radii_bounds import BoundReport, DIRECTIONS, QUANTITIES

_STYLE = {
    ("K_d", "lower"): ("tab:blue", "o", "-"),
    ("K_d", "upper"): ("tab:blue", "v", "--"),
    ("KA_d", "lower"): ("tab:orange", "o", "-"),
    ("KA_d", "upper"): ("tab:orange", "v", "--"),
    ("SA_d", "lower"): ("tab:green", "o", "-"),
    ("SA_d", "upper"): ("tab:green", "v", "--"),
}


def plot_radii(reports: Sequence[BoundReport], path: str) -> str:
    """Render best lower/upper bounds per quantity against d into a file.

    For each (quantity, direction) the strongest entry per report is shown:
    the largest lower bound and the smallest upper bound.  Returns the path
    written.
    """
    if not reports:
        raise ValueError("nothing to plot: empty report list")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for quantity in QUANTITIES:
        for direction in DIRECTIONS:
            xs: List[int] = []
            ys: List[float] = []
            for rep in reports:
                vals = [e.value for e in rep.entries if e.quantity == quantity and e.direction == direction]
                if not vals:
                    continue
                xs.append(rep.d)
                ys.append(max(vals) if direction == "lower" else min(vals))
            if not xs:
                continue
            color, marker, ls = _STYLE[(quantity, direction)]
            ax.plot(
                xs,
                ys,
                color=color,
                marker=marker,
                linestyle=ls,
                markersize=4,
                label=f"{quantity} {direction}",
            )
    ax.set_xlabel("d")
    ax.set_ylabel("radius bound")
    if len({rep.d for rep in reports}) > 1:
        ax.set_xscale("log")
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
