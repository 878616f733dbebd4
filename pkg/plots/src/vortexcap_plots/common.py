"""Shared CSV contract plumbing for the figure scripts.

The scripts are read-only consumers of the solver's CSV files: every plotted
number originates in a CSV column.  Files start with a `# config-hash:`
comment and a header row; schema mismatches raise before any drawing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "vortexcap-plots"

FIGURE_KINDS = ("spectrum", "branch", "region", "contour")


class SchemaError(ValueError):
    """CSV header does not match the expected figure kind."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    kind: str
    output: str
    title: str = ""

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not Path(self.csv_path).exists():
            raise SchemaError(f"input CSV {self.csv_path} does not exist")


@dataclass(frozen=True)
class Table:
    config_hash: str
    header: list[str]
    columns: dict[str, list[str]]

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def floats(self, name: str):
        import numpy as np

        return np.array([float(v) for v in self.columns[name]])


def read_table(path, required: tuple[str, ...]) -> Table:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or not lines[0].startswith("# config-hash: "):
        raise SchemaError(f"{path}: missing config-hash comment")
    digest = lines[0].split(": ", 1)[1]
    header = lines[1].split(",")
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")
    columns: dict[str, list[str]] = {h: [] for h in header}
    for line in lines[2:]:
        for h, v in zip(header, line.split(",")):
            columns[h].append(v)
    if not lines[2:]:
        warnings.warn(f"{path}: no data rows")
    return Table(digest, header, columns)


def save_figure(fig, output: str) -> list[str]:
    """Emit both PNG and SVG next to the requested output stem."""
    out = Path(output)
    stem = out.with_suffix("")
    paths = []
    for suffix in (".png", ".svg"):
        target = stem.with_suffix(suffix)
        fig.savefig(target, dpi=150, metadata=None if suffix == ".png" else {"Date": None})
        paths.append(str(target))
    return paths
