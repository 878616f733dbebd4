"""Admissible-region map from a region-scan CSV.

Renders the flagged (theta1, theta2) couples inside the triangle
0 < theta1 < theta2 < pi, one panel per condition, with the bounding curves
2 sin^2(theta2/2) = cos^2(theta1/2) and 2 cos^2(theta1/2) = sin^2(theta2/2)
overlaid for reference.
"""

from __future__ import annotations

import argparse
import math

import numpy as np
import matplotlib.pyplot as plt

from .common import FigureSpec, read_table, save_figure

REQUIRED = ("theta1", "theta2", "fig1a", "fig1b")


def boundary_curves(n: int = 400):
    """Reference curves bounding the two admissible regions.

    fig1a boundary: theta2 = 2 arcsin(cos(theta1/2)/sqrt(2));
    fig1b boundary: theta2 = 2 arcsin(sqrt(2) cos(theta1/2)) where defined.
    """
    t1 = np.linspace(1e-3, math.pi - 1e-3, n)
    curve_a = 2.0 * np.arcsin(np.cos(0.5 * t1) / math.sqrt(2.0))
    arg_b = math.sqrt(2.0) * np.cos(0.5 * t1)
    curve_b = np.where(arg_b <= 1.0, 2.0 * np.arcsin(np.minimum(arg_b, 1.0)), np.nan)
    return t1, curve_a, curve_b


def plot_region(spec: FigureSpec) -> list[str]:
    table = read_table(spec.csv_path, REQUIRED)
    t1 = table.floats("theta1")
    t2 = table.floats("theta2")
    in_a = table.floats("fig1a") > 0.5
    in_b = table.floats("fig1b") > 0.5

    fig, axes = plt.subplots(1, 2, figsize=(10, 5), sharex=True, sharey=True)
    curves_t1, curve_a, curve_b = boundary_curves()
    for ax, mask, curve, label in (
        (axes[0], in_a, curve_a, "2 sin$^2$($\\theta_2$/2) > cos$^2$($\\theta_1$/2)"),
        (axes[1], in_b, curve_b, "2 cos$^2$($\\theta_1$/2) > sin$^2$($\\theta_2$/2)"),
    ):
        if table.n_rows:
            ax.scatter(t1[mask], t2[mask], s=4, c="#2266aa", linewidths=0)
        ax.plot(curves_t1, curve, "k--", lw=1.2)
        ax.plot([0, math.pi], [0, math.pi], color="0.6", lw=0.8)
        ax.set_xlim(0, math.pi)
        ax.set_ylim(0, math.pi)
        ax.set_xlabel(r"$\theta_1$")
        ax.set_title(label, fontsize=10)
    axes[0].set_ylabel(r"$\theta_2$")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    paths = save_figure(fig, spec.output)
    plt.close(fig)
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="admissible-region map")
    parser.add_argument("csv")
    parser.add_argument("output")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    for path in plot_region(FigureSpec(args.csv, "region", args.output, args.title)):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
