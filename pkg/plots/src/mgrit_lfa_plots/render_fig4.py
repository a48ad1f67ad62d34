"""Rendering of the lower-bound comparison curves.

Reads fig4_curves.csv from the input directory and draws one panel per
value of p: the worst-case predicted factor as a solid curve per coarsening
ratio and the closed-form bound as a thicker dashed curve, with a filled
triangle on the unit line at the tabulated endpoint abscissa. Before any
drawing the rows are checked against the documented acceptance margin; a
violation aborts with exit code 2 rather than producing a misleading image.
"""

from __future__ import annotations

import argparse
import os
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csv_io import SchemaError, read_table, require_columns

FILE = "fig4_curves.csv"
COLUMNS = ["p", "m", "nu", "eps", "lfa_worst_rho", "rho_check",
           "endpoint_eps"]

# The CSV schema carries no slack column; this is the documented margin the
# producing suite enforces between the dashed bound and the solid curve.
SLACK = 0.05


def check_bound(table) -> None:
    """Assert, before drawing, that the bound never sits above the
    predicted curve by more than the margin."""
    p = table.column("p")
    m = table.column("m")
    eps = table.column("eps")
    worst = table.column("lfa_worst_rho")
    bound = table.column("rho_check")
    excess = bound - worst
    bad = np.flatnonzero(excess > SLACK)
    if bad.size:
        k = int(bad[np.argmax(excess[bad])])
        raise SchemaError(
            f"{table.path}: bound exceeds the predicted factor by "
            f"{excess[k]:.3g} (> {SLACK}) at p={int(p[k])}, m={int(m[k])}, "
            f"eps={eps[k]:.6g}")


def build_figure(path: str):
    table = read_table(path)
    require_columns(table, COLUMNS)
    check_bound(table)
    p_col = table.column("p").astype(int)
    m_col = table.column("m").astype(int)
    p_values = sorted(set(p_col.tolist()))
    fig, axes = plt.subplots(1, len(p_values),
                             figsize=(5.5 * len(p_values), 4.5),
                             layout="constrained", squeeze=False)
    aux = {}
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for ax, p in zip(axes[0], p_values):
        m_values = sorted(set(m_col[p_col == p].tolist()))
        for j, m in enumerate(m_values):
            rows = np.flatnonzero((p_col == p) & (m_col == m))
            rows = rows[np.argsort(table.column("eps")[rows])]
            eps = table.column("eps")[rows]
            color = colors[j % len(colors)]
            aux[f"lfa_p{p}_m{m}"], = ax.plot(
                eps, table.column("lfa_worst_rho")[rows], linestyle="-",
                linewidth=1.3, color=color, label=f"m={m} predicted")
            aux[f"bound_p{p}_m{m}"], = ax.plot(
                eps, table.column("rho_check")[rows], linestyle="--",
                linewidth=2.6, color=color, label=f"m={m} bound")
            endpoint = float(table.column("endpoint_eps")[rows[0]])
            aux[f"endpoint_p{p}_m{m}"], = ax.plot(
                [endpoint], [1.0], marker="^", linestyle="none",
                color=color, markeredgecolor="black", markersize=9)
        ax.axhline(1.0, color="0.6", linewidth=0.8)
        ax.set_title(f"order p={p}")
        ax.set_xlabel("eps")
        ax.set_ylabel("factor")
        ax.legend(loc="upper right", fontsize=8)
    return fig, aux


def render_fig4(in_dir: str, out_path: str) -> str:
    fig, _ = build_figure(os.path.join(in_dir, FILE))
    fig.savefig(out_path, dpi=140)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-fig4",
        description="Render the lower-bound curve CSV into one image")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory with fig4_curves.csv")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render_fig4(args.in_dir, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
