"""CSV emission shared by the CLI commands.

Every file starts with a `# config-hash:` comment over the canonical JSON of
the resolved configuration, then a header row.  Floats print with 17
significant digits so values round-trip exactly and identical configs give
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence


def config_hash(config: dict) -> str:
    """Hash of the computational configuration (output paths excluded)."""
    payload = {k: v for k, v in config.items() if k != "output"}
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(
    path, header: Sequence[str], rows: Iterable[Sequence], config: dict
) -> None:
    lines = [f"# config-hash: {config_hash(config)}", ",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> tuple[str, list[str], list[list[str]]]:
    """Returns (config hash, header, rows) of a file written by write_csv."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or not text[0].startswith("# config-hash: "):
        raise ValueError(f"{path}: missing config-hash comment")
    digest = text[0].split(": ", 1)[1]
    header = text[1].split(",")
    rows = [line.split(",") for line in text[2:]]
    return digest, header, rows
