"""Deterministic CSV emission shared by trajectory, table, and sweep output.

Floats are written with 17 significant digits so that equal inputs give
byte-identical files; rows are newline-terminated.
"""

from __future__ import annotations

import io
from pathlib import Path


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, (int,)):
        return str(value)
    return str(value)


def write_csv(target, header: list[str], rows) -> None:
    """Write rows (iterables of cells) under a header line to a path or file."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            _write(fh, header, rows)
    else:
        _write(target, header, rows)


def _write(fh, header, rows) -> None:
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(fmt(c) for c in row) + "\n")


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    _write(buf, header, rows)
    return buf.getvalue()
