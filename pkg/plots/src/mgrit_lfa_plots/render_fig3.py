"""Multi-panel rendering of the space-time LFA sweep.

Input is a directory holding the four sweep CSV files; output is one image
with the two heatmaps, the predicted-factor contour with overlays, and the
cross-section curves. Every plotted series is a CSV column: the overlay
lines use the theta_characteristic / theta_dagger columns as written and
the markers sit on the rows the sweep flagged as its argmax cells.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csv_io import SchemaError, read_table, require_columns

FILES = {
    "deviation": "fig3_cgc_deviation.csv",
    "symbol": "fig3_coarse_symbol.csv",
    "rho": "fig3_rho.csv",
    "cross": "fig3_cross_sections.csv",
}

GRID_COLUMNS = ["omega_index", "theta_index", "omega", "theta", "value",
                "is_global_argmax"]
CROSS_COLUMNS = ["omega_index", "omega", "theta_characteristic",
                 "rho_characteristic", "is_argmax_characteristic",
                 "theta_dagger", "rho_dagger", "is_argmax_dagger"]


@dataclass
class GridData:
    omega: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    argmax_omega: float
    argmax_theta: float


def load_grid(path: str) -> GridData:
    table = read_table(path)
    require_columns(table, GRID_COLUMNS)
    wi = table.column("omega_index").astype(int)
    ti = table.column("theta_index").astype(int)
    n_w = int(wi.max()) + 1
    n_t = int(ti.max()) + 1
    if len(table) != n_w * n_t:
        raise SchemaError(f"{path}: {len(table)} rows for a {n_w} x {n_t} grid")
    omega = np.full(n_w, np.nan)
    theta = np.full(n_t, np.nan)
    values = np.full((n_w, n_t), np.nan)
    omega[wi] = table.column("omega")
    theta[ti] = table.column("theta")
    values[wi, ti] = table.column("value")
    flags = np.flatnonzero(table.column("is_global_argmax") == 1.0)
    if flags.size != 1:
        raise SchemaError(f"{path}: expected exactly one argmax flag, "
                          f"found {flags.size}")
    k = int(flags[0])
    return GridData(omega=omega, theta=theta, values=values,
                    argmax_omega=float(table.column("omega")[k]),
                    argmax_theta=float(table.column("theta")[k]))


def split_wraps(x, y, span: float):
    """Break a polyline where the value jumps across the periodic band so
    the wrap does not streak across the panel. Presentation only."""
    out_x: list = []
    out_y: list = []
    for k in range(len(x)):
        if k and abs(y[k] - y[k - 1]) > 0.5 * span:
            out_x.append(np.nan)
            out_y.append(np.nan)
        out_x.append(x[k])
        out_y.append(y[k])
    return np.asarray(out_x), np.asarray(out_y)


def _heatmap(ax, grid: GridData, title: str):
    mesh = ax.pcolormesh(grid.omega, grid.theta,
                         np.ma.masked_invalid(grid.values).T,
                         shading="nearest", cmap="viridis")
    ax.plot([grid.argmax_omega], [grid.argmax_theta], marker="D",
            linestyle="none", color="magenta", markeredgecolor="black",
            markersize=8)
    ax.set_title(title)
    ax.set_xlabel("omega")
    ax.set_ylabel("theta")
    return mesh


def build_figure(in_dir: str):
    """Assemble the four panels; returns the figure and the plotted artists
    keyed by name so tests can read back what was drawn."""
    paths = {key: os.path.join(in_dir, name) for key, name in FILES.items()}
    deviation = load_grid(paths["deviation"])
    symbol = load_grid(paths["symbol"])
    rho = load_grid(paths["rho"])
    cross = read_table(paths["cross"])
    require_columns(cross, CROSS_COLUMNS)
    for flag in ("is_argmax_characteristic", "is_argmax_dagger"):
        if np.count_nonzero(cross.column(flag) == 1.0) != 1:
            raise SchemaError(f"{paths['cross']}: expected exactly one "
                              f"{flag} flag")

    fig, axes = plt.subplots(2, 2, figsize=(11.5, 8.5), layout="constrained")
    aux = {}

    mesh = _heatmap(axes[0, 0], deviation, "coarse symbol deviation")
    fig.colorbar(mesh, ax=axes[0, 0])
    mesh = _heatmap(axes[0, 1], symbol, "coarse symbol magnitude")
    fig.colorbar(mesh, ax=axes[0, 1])

    ax = axes[1, 0]
    finite = np.ma.masked_invalid(rho.values).T
    contour = ax.contourf(rho.omega, rho.theta, finite, levels=16,
                          cmap="magma")
    fig.colorbar(contour, ax=ax)
    span = float(rho.theta.max() - rho.theta.min())
    cx, cy = split_wraps(cross.column("omega"),
                         cross.column("theta_characteristic"), span)
    aux["characteristic_overlay"], = ax.plot(
        cx, cy, linestyle="--", color="tab:green", linewidth=1.6,
        label="characteristic")
    dx, dy = split_wraps(cross.column("omega"),
                         cross.column("theta_dagger"), span)
    aux["dagger_overlay"], = ax.plot(
        dx, dy, linestyle="-.", color="tab:purple", linewidth=1.4,
        label="worst frequency")
    aux["rho_argmax_marker"], = ax.plot(
        [rho.argmax_omega], [rho.argmax_theta], marker="D", linestyle="none",
        color="magenta", markeredgecolor="black", markersize=8)
    ax.set_title("predicted convergence factor")
    ax.set_xlabel("omega")
    ax.set_ylabel("theta")
    # the overlays roam the full periodic band, wider than the sampled grid
    ax.set_ylim(float(rho.theta.min()), float(rho.theta.max()))
    ax.legend(loc="upper right", fontsize=8)

    ax = axes[1, 1]
    omega = cross.column("omega")
    aux["cross_characteristic"], = ax.plot(
        omega, cross.column("rho_characteristic"), linestyle="-",
        color="tab:green", label="along characteristic")
    aux["cross_dagger"], = ax.plot(
        omega, cross.column("rho_dagger"), linestyle="--",
        color="tab:purple", label="at worst frequency")
    for key, flag, series in (
            ("cross_argmax_characteristic", "is_argmax_characteristic",
             "rho_characteristic"),
            ("cross_argmax_dagger", "is_argmax_dagger", "rho_dagger")):
        k = int(np.flatnonzero(cross.column(flag) == 1.0)[0])
        aux[key], = ax.plot([omega[k]], [cross.column(series)[k]],
                            marker="D", linestyle="none", color="magenta",
                            markeredgecolor="black", markersize=8)
    ax.set_title("cross-sections")
    ax.set_xlabel("omega")
    ax.set_ylabel("factor")
    ax.legend(loc="upper right", fontsize=8)
    return fig, aux


def render_fig3(in_dir: str, out_path: str) -> str:
    fig, _ = build_figure(in_dir)
    fig.savefig(out_path, dpi=140)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-fig3",
        description="Render the space-time LFA sweep CSVs into one image")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory with the four fig3 CSV files")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render_fig3(args.in_dir, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
