"""Assemble log-log convergence figures from loaded simulation rows.

The figure shows V * n against n, one panel per dimension and one series
per beta within a panel.  Two black reference lines accompany the data:
a solid horizontal line (the V proportional to 1/n rate) and a dashed
line of slope 2/3 (the V proportional to n**(-1/3) rate).  Both are
anchored at the first point of the lowest-beta series of the panel, so a
synthetic 1/n series lies exactly on the solid line and a synthetic
n**(-1/3) series lies exactly on the dashed one.

The renderer plots the variances exactly as given, never recomputing or
smoothing them, and every input row lands in exactly one series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .loader import RenderInputError, load_rows


@dataclass(frozen=True)
class PlotSpec:
    """Everything render() needs: input, output, and display options."""

    infile: str
    outfile: str
    dims: tuple | None = None
    references: bool = True
    x_range: tuple | None = None
    y_range: tuple | None = None


@dataclass
class RenderReport:
    """Accounting of one render, used to verify nothing was dropped."""

    rows_read: int = 0
    rows_filtered_out: int = 0
    points_plotted: int = 0
    panels: tuple = ()
    series_points: dict = field(default_factory=dict)


def _series_map(rows):
    by_panel = {}
    for row in rows:
        by_panel.setdefault(row.m, {}).setdefault(row.beta, []).append(row)
    for betas in by_panel.values():
        for cells in betas.values():
            cells.sort(key=lambda r: r.n)
    return by_panel


def build_figure(rows, spec: PlotSpec):
    """Build the matplotlib figure for rows; returns (figure, report).

    The data layer is a pure function of the rows and the spec: line
    ordering, coordinates, and styles are all deterministic.  Every line
    carries a gid of the form series:m=2:beta=-0.5, ref:solid:m=2, or
    ref:dashed:m=2 so the plot content can be inspected programmatically.
    """
    report = RenderReport(rows_read=len(rows))
    if spec.dims is not None:
        kept = [r for r in rows if r.m in spec.dims]
        report.rows_filtered_out = len(rows) - len(kept)
        rows = kept
    if not rows:
        raise RenderInputError("no rows left to plot after the dimension filter")
    by_panel = _series_map(rows)
    panels = tuple(sorted(by_panel))
    report.panels = panels

    fig, axes = plt.subplots(
        1, len(panels), figsize=(4.2 * len(panels), 3.6), squeeze=False
    )
    cmap = plt.get_cmap("viridis")
    for ax, m in zip(axes[0], panels):
        betas = sorted(by_panel[m])
        for k, beta in enumerate(betas):
            cells = by_panel[m][beta]
            x = np.array([r.n for r in cells], dtype=float)
            y = np.array([r.V * r.n for r in cells], dtype=float)
            color = cmap(k / max(1, len(betas) - 1))
            (line,) = ax.loglog(
                x, y, marker="o", markersize=3, color=color,
                label=rf"$\beta={beta:g}$",
            )
            line.set_gid(f"series:m={m}:beta={beta:g}")
            report.points_plotted += len(cells)
            report.series_points[(m, beta)] = len(cells)
        if spec.references:
            anchor = by_panel[m][betas[0]][0]
            x0, y0 = float(anchor.n), float(anchor.V * anchor.n)
            lo = min(r.n for r in rows if r.m == m)
            hi = max(r.n for r in rows if r.m == m)
            span = np.array([float(lo), float(hi)])
            (solid,) = ax.loglog(span, [y0, y0], color="black", linestyle="-")
            solid.set_gid(f"ref:solid:m={m}")
            (dashed,) = ax.loglog(
                span, y0 * (span / x0) ** (2.0 / 3.0),
                color="black", linestyle="--",
            )
            dashed.set_gid(f"ref:dashed:m={m}")
        if spec.x_range is not None:
            ax.set_xlim(*spec.x_range)
        if spec.y_range is not None:
            ax.set_ylim(*spec.y_range)
        ax.set_title(f"$m = {m}$")
        ax.set_xlabel("$n$")
        ax.legend(fontsize=8)
    axes[0][0].set_ylabel(r"$V \cdot n$")
    fig.tight_layout()
    return fig, report


def render(spec: PlotSpec) -> RenderReport:
    """Load the CSV named by spec, draw the figure, write the image file.

    The output format follows the file extension (png, pdf, svg, ...).
    """
    rows = load_rows(spec.infile)
    fig, report = build_figure(rows, spec)
    try:
        fig.savefig(spec.outfile, dpi=150)
    finally:
        plt.close(fig)
    return report
