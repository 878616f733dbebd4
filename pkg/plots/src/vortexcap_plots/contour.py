"""Sphere rendering of interface contours from a branch or trajectory row.

Reconstructs theta_k + f_k(phi) from the coefficient columns of the selected
row (branch files carry cosine coefficients f_1..f_M of cos(fold*n*phi);
trajectory files carry cos_n/sin_n pairs) and draws the curves in an
orthographic projection of the unit sphere.  Base colatitudes and the fold
are invocation options: the CSV contract does not carry them.
"""

from __future__ import annotations

import argparse
import math

import numpy as np
import matplotlib.pyplot as plt

from .common import FigureSpec, SchemaError, read_table, save_figure

TILT = 0.45  # viewing tilt about the x-axis


def _coeff_columns(header, prefix):
    names = [h for h in header if h.startswith(prefix)]
    return sorted(names, key=lambda h: int(h.rsplit("_", 1)[1]))


def interface_curves(table, row: int, fold: int) -> list[np.ndarray]:
    """f(phi) samples per interface for the selected row (periodic grid)."""
    phi = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
    header = table.header
    if "epsilon" in header:  # branch file
        cols = _coeff_columns(header, "f1_") or _coeff_columns(header, "f_")
        cols2 = _coeff_columns(header, "f2_")
        out = []
        for group in (cols, cols2):
            if not group:
                continue
            f = np.zeros_like(phi)
            for n, name in enumerate(group, start=1):
                f += float(table.columns[name][row]) * np.cos(fold * n * phi)
            out.append(f)
        return out
    if "interface" in header:  # trajectory file
        t_sel = table.columns["t"][row]
        out = []
        for r in range(table.n_rows):
            if table.columns["t"][r] != t_sel:
                continue
            f = np.zeros_like(phi)
            for n, name in enumerate(_coeff_columns(header, "cos_"), start=1):
                f += float(table.columns[name][r]) * np.cos(fold * n * phi)
            for n, name in enumerate(_coeff_columns(header, "sin_"), start=1):
                f += float(table.columns[name][r]) * np.sin(fold * n * phi)
            out.append(f)
        return out
    raise SchemaError("CSV is neither a branch nor a trajectory file")


def _project(theta, phi):
    x = np.sin(theta) * np.cos(phi)
    y = np.sin(theta) * np.sin(phi)
    z = np.cos(theta)
    yr = y * math.cos(TILT) - z * math.sin(TILT)
    zr = y * math.sin(TILT) + z * math.cos(TILT)
    return x, zr, yr  # screen-x, screen-y, depth


def plot_contour_sphere(
    spec: FigureSpec, row: int, fold: int, bases: list[float]
) -> list[str]:
    table = read_table(spec.csv_path, ())
    curves = interface_curves(table, row, fold)
    if len(bases) != len(curves):
        raise SchemaError(
            f"{len(curves)} interfaces in the row but {len(bases)} base angles given"
        )
    fig, ax = plt.subplots(figsize=(6, 6))
    outline = np.linspace(0.0, 2.0 * math.pi, 400)
    ax.plot(np.cos(outline), np.sin(outline), color="0.4", lw=1.0)
    phi = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
    phi = np.append(phi, 2.0 * math.pi)  # close the drawn curve
    colors = ("#cc2222", "#2244cc")
    for f, base, color in zip(curves, bases, colors):
        f = np.append(f, f[0])
        sx, sy, depth = _project(base + f, phi)
        front = depth >= 0.0
        for mask, style, alpha in ((front, "-", 1.0), (~front, "--", 0.45)):
            seg_x = np.where(mask, sx, np.nan)
            seg_y = np.where(mask, sy, np.nan)
            ax.plot(seg_x, seg_y, style, color=color, lw=1.6, alpha=alpha)
    ax.set_aspect("equal")
    ax.set_xlim(-1.1, 1.1)
    ax.set_ylim(-1.1, 1.1)
    ax.axis("off")
    if spec.title:
        ax.set_title(spec.title)
    paths = save_figure(fig, spec.output)
    plt.close(fig)
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="sphere contour rendering")
    parser.add_argument("csv")
    parser.add_argument("output")
    parser.add_argument("--row", type=int, default=-1)
    parser.add_argument("--fold", type=int, default=1)
    parser.add_argument(
        "--theta", type=float, action="append", required=True,
        help="base colatitude per interface (repeat for bands)",
    )
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    spec = FigureSpec(args.csv, "contour", args.output, args.title)
    row = args.row
    table = read_table(args.csv, ())
    if row < 0:
        row = table.n_rows + row
    for path in plot_contour_sphere(spec, row, args.fold, args.theta):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
