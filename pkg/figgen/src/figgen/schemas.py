"""CSV schemas of the sweep files this package consumes.

These header lists are the interface contract with the simulator's sweep
output; figgen never imports the simulator, it only reads its files.
Input whose header does not match the figure's task schema is refused.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


class SchemaMismatch(Exception):
    """The CSV header does not match the expected task schema."""


class MissingInput(Exception):
    """An input CSV is absent or carries no data rows."""


SPECTRUM = [
    "eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im",
    "E1", "E2", "Y1", "Y2", "omega_re", "omega_im", "spacing", "width_sum",
    "error",
]
EFFICIENCY = [
    "eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im", "init",
    "t_final", "eta1", "eta2", "trace_final", "budget_err", "error",
]
ETA0 = [
    "eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im",
    "eta0", "valid", "error",
]
NOISY_EFFICIENCY = [
    "eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im", "init",
    "d", "gamma_noise", "t_final", "eta1", "eta2", "trace_final", "budget_err",
    "error",
]

#: task schema consumed by each figure
FIGURE_SCHEMAS = {
    3: SPECTRUM,
    4: SPECTRUM,
    5: SPECTRUM,
    6: EFFICIENCY,
    7: EFFICIENCY,
    8: ETA0,
    9: NOISY_EFFICIENCY,
}

_STRING_COLUMNS = {"init", "error"}
_BOOL_COLUMNS = {"valid"}


class Table:
    """Column-oriented view of one or more schema-validated CSV files."""

    def __init__(self, columns: dict):
        self.columns = columns
        self.n_rows = len(next(iter(columns.values()))) if columns else 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def unique(self, name: str) -> np.ndarray:
        return np.unique(self.columns[name])

    def where(self, **conditions) -> "Table":
        mask = np.ones(self.n_rows, dtype=bool)
        for name, value in conditions.items():
            mask &= self.columns[name] == value
        return Table({k: v[mask] for k, v in self.columns.items()})

    def mesh(self, x: str, y: str, z: str):
        """Regular (x, y) mesh of z values, NaN where a cell is absent."""
        xs, ys = self.unique(x), self.unique(y)
        grid = np.full((ys.size, xs.size), np.nan)
        xi = np.searchsorted(xs, self.columns[x])
        yi = np.searchsorted(ys, self.columns[y])
        grid[yi, xi] = self.columns[z]
        return xs, ys, grid


def read_table(paths, figure_id: int) -> Table:
    """Load and concatenate CSVs after validating them against the schema."""
    expected = FIGURE_SCHEMAS[figure_id]
    raw: dict[str, list] = {name: [] for name in expected}
    for path in paths:
        path = Path(path)
        if not path.exists():
            raise MissingInput(f"input CSV not found: {path}")
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise MissingInput(f"{path} is empty")
            if header != expected:
                raise SchemaMismatch(
                    f"{path}: header does not match the figure-{figure_id} task "
                    f"schema; expected {expected}, got {header}"
                )
            n_before = len(raw[expected[0]])
            for row in reader:
                if len(row) != len(expected):
                    raise SchemaMismatch(f"{path}: row width {len(row)} != header")
                if row[-1]:
                    continue  # flagged cell
                for name, cell in zip(expected, row):
                    raw[name].append(cell)
            if len(raw[expected[0]]) == n_before:
                raise MissingInput(f"{path} carries no usable data rows")
    columns = {}
    for name, cells in raw.items():
        if name in _STRING_COLUMNS:
            columns[name] = np.array(cells, dtype=object)
        elif name in _BOOL_COLUMNS:
            columns[name] = np.array([c == "true" for c in cells])
        else:
            columns[name] = np.array([float(c) for c in cells])
    return Table(columns)
