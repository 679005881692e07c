"""Uniform time grids and sampled time series.

Every temporal object in the package lives on a :class:`TimeGrid`: a uniform
partition 0 = s_0 < s_1 < ... < s_L = T with spacing tau = T/L.  A
:class:`TimeSeries` is a function of time sampled at the L+1 nodes and is
treated as piecewise linear by all quadrature rules in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of [0, T] into L steps (L+1 nodes)."""

    T: float
    L: int

    def __post_init__(self):
        if not (self.T > 0):
            raise ValueError(f"horizon must be positive, got T={self.T}")
        if not (isinstance(self.L, (int, np.integer)) and self.L >= 1):
            raise ValueError(f"step count must be a positive integer, got L={self.L}")

    @property
    def tau(self) -> float:
        return self.T / self.L

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.L + 1)

    @property
    def n_nodes(self) -> int:
        return self.L + 1


@dataclass(frozen=True)
class TimeSeries:
    """Real-valued samples on a TimeGrid.  Values are immutable after construction."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"values must have length {self.grid.n_nodes}, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite (no NaN/inf)")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "TimeSeries":
        return TimeSeries(self.grid, values)

    def __len__(self) -> int:
        return self.grid.n_nodes


def series_from_callable(grid: TimeGrid, f) -> TimeSeries:
    """Sample a callable f(t) at the grid nodes."""
    return TimeSeries(grid, np.asarray([f(t) for t in grid.nodes], dtype=float))


def require_same_grid(a: TimeSeries, b: TimeSeries) -> None:
    if a.grid != b.grid:
        raise ValueError(f"time grids differ: {a.grid} vs {b.grid}")


def l2_norm(series: TimeSeries) -> float:
    """Trapezoid L2(0, T) norm of the piecewise-linear sample values."""
    v = series.values
    return float(np.sqrt(np.trapezoid(v * v, dx=series.grid.tau)))


def l2_norm_values(values: np.ndarray, tau: float) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.sqrt(np.trapezoid(v * v, dx=tau)))


def l1_norm_values(values: np.ndarray, tau: float) -> float:
    return float(np.trapezoid(np.abs(values), dx=tau))
