"""Shared helpers: deterministic sub-seeding and CSV output."""

from __future__ import annotations

import csv
import zlib
from pathlib import Path

import numpy as np


def subseed(master: int, *key) -> int:
    """Derive a child seed from a master seed and a structured key.

    Stable across runs and platforms.  String key parts are folded through
    CRC-32 so purposes ("clip", "train", ...) get distinct streams.
    """
    parts = [int(master) & 0xFFFFFFFF]
    for k in key:
        if isinstance(k, str):
            parts.append(zlib.crc32(k.encode("utf-8")))
        else:
            parts.append(int(k) & 0xFFFFFFFF)
    return int(np.random.SeedSequence(parts).generate_state(1)[0])


def format_cell(value) -> str:
    """Render one CSV cell; floats use shortest round-trip decimal form."""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, np.floating):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    """Write a UTF-8 CSV with a header row and '\\n' line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def write_matrix_csv(path, matrix, extra_first_row=None) -> None:
    """Dump a matrix row-major as CSV with columns named c1..cN.

    ``extra_first_row`` (e.g. eigenvalues) is emitted before the matrix rows.
    """
    matrix = np.asarray(matrix)
    header = [f"c{j + 1}" for j in range(matrix.shape[1])]
    rows = []
    if extra_first_row is not None:
        rows.append(list(extra_first_row))
    rows.extend(list(row) for row in matrix)
    write_csv(path, header, rows)


def read_csv_rows(path) -> tuple[list[str], list[list[str]]]:
    """Read a CSV written by :func:`write_csv`; returns (header, rows)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]
