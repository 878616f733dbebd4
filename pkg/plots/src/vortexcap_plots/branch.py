"""Branch diagram c(epsilon) from a branch CSV.

Shows the speed against the pinned amplitude for both signs when present,
marks the epsilon -> 0 intercept obtained by a quadratic fit of the smallest
recorded amplitudes, and overlays the Newton residuals on a twin log axis.
"""

from __future__ import annotations

import argparse

import numpy as np
import matplotlib.pyplot as plt

from .common import FigureSpec, read_table, save_figure

REQUIRED = ("epsilon", "c", "residual")


def fitted_intercept(eps: np.ndarray, c: np.ndarray, n_fit: int = 4) -> float:
    """c(0) from the even-in-epsilon quadratic model on the smallest points."""
    order = np.argsort(np.abs(eps))[: max(2, n_fit)]
    design = np.column_stack([np.ones(order.size), eps[order] ** 2])
    sol, *_ = np.linalg.lstsq(design, c[order], rcond=None)
    return float(sol[0])


def plot_branch(spec: FigureSpec) -> list[str]:
    table = read_table(spec.csv_path, REQUIRED)
    eps = table.floats("epsilon")
    c = table.floats("c")
    residual = table.floats("residual")

    fig, ax = plt.subplots(figsize=(7, 5))
    if table.n_rows:
        order = np.argsort(eps)
        ax.plot(eps[order], c[order], "o-", ms=4, color="#2266aa", label="branch")
        c0 = fitted_intercept(eps, c)
        ax.plot([0.0], [c0], "r*", ms=12, label=f"c(0) = {c0:.6f}")
        ax2 = ax.twinx()
        ax2.semilogy(eps[order], np.maximum(residual[order], 1e-18), "s--",
                     ms=3, color="0.6", lw=0.8)
        ax2.set_ylabel("residual sup-norm", color="0.45")
        ax.legend(loc="best")
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel("speed c")
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    paths = save_figure(fig, spec.output)
    plt.close(fig)
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="branch diagram c(epsilon)")
    parser.add_argument("csv")
    parser.add_argument("output")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    for path in plot_branch(FigureSpec(args.csv, "branch", args.output, args.title)):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
