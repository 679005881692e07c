"""Readers for the fracsource CSV artifacts.

The runner's contract:
  trace.csv           t, rho_true, rho_hat, u_star, w_sigma, kernel_v
  early_iterates.csv  t, rho_m1, rho_m2, rho_m3, rho_m4
  index.csv           <param>, subdir, iterations_used, converged, relative_l2_error

Readers validate the header and report every missing column by name.
"""

from __future__ import annotations

import csv
from pathlib import Path

TRACE_COLUMNS = ["t", "rho_true", "rho_hat", "u_star", "w_sigma", "kernel_v"]
EARLY_COLUMNS = ["t", "rho_m1", "rho_m2", "rho_m3", "rho_m4"]


class SchemaError(ValueError):
    """A CSV does not conform to the runner's schema."""

    def __init__(self, path: Path, missing: list[str]):
        self.missing = missing
        super().__init__(
            f"{path}: missing column(s) {', '.join(missing)}"
        )


def _read_columns(path: Path, required: list[str]) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(path, missing)
        cols: dict[str, list[float]] = {c: [] for c in required}
        for row in reader:
            for c in required:
                raw = row[c]
                cols[c].append(float(raw) if raw != "" else float("nan"))
    return cols


def read_trace(path: Path) -> dict[str, list[float]]:
    return _read_columns(Path(path), TRACE_COLUMNS)


def read_early_iterates(path: Path) -> dict[str, list[float]]:
    return _read_columns(Path(path), EARLY_COLUMNS)


def read_sweep_index(path: Path) -> list[dict[str, str]]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if "subdir" not in header:
            raise SchemaError(path, ["subdir"])
        return [dict(row) for row in reader]
