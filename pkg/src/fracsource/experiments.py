"""Config-driven experiment runner.

Reproduces the reference experimental setup: build the spatial source bump,
solve the homogeneous problem for the observation kernel, synthesise
observation data for a chosen true temporal factor, optionally perturb it
with uniform noise, reconstruct, and write CSV artifacts.

Config files are flat ``key = value`` text with ``#`` comments; every key is
optional and the defaults reproduce the reference setup (alpha = 0.9, T = 1,
64 x 128 mesh, x0 = 1/8, K = 0.2, stop_eps = 1e-5, mollifier radius 5/128).

CSV schema (fixed, 17 significant digits):
  trace.csv           t, rho_true, rho_hat, u_star, w_sigma, kernel_v
  iterations.csv      m, update_l2, error_l2
  summary.csv         one row of the run summary
  early_iterates.csv  t, rho_m1, rho_m2, rho_m3, rho_m4
"""

from __future__ import annotations

import dataclasses
import os
import time as _time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fraccalc import FractionalOrder, MollifierSpec
from .forward import (
    SpaceGrid,
    SpatialProfile,
    sine_bump_profile,
    probe,
    solve_homogeneous_l1,
    solve_inhomogeneous_l1,
)
from .grids import TimeGrid, TimeSeries, l2_norm_values
from .inverse import IterationConfig, ReconstructionTrace, Variant, add_noise, reconstruct

__all__ = [
    "ExperimentConfig",
    "RunSummary",
    "UsageError",
    "parse_config",
    "config_text",
    "rho_true_series",
    "run_experiment",
    "sweep",
    "OUTPUT_ROOT_ENV",
]

OUTPUT_ROOT_ENV = "FRACSOURCE_OUT"

SWEEPABLE = ("sigma", "alpha", "Nt", "mollifier_radius")


class UsageError(ValueError):
    """Bad configuration or CLI arguments."""


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float = 0.9
    T: float = 1.0
    Nx: int = 64
    Nt: int = 128
    x0: float = 0.125
    g_spec: str = "sine_bump"
    rho_true_spec: str = "smooth_sine_ramp"
    sigma: float = 0.0
    seed: int = 0
    K: float = 0.2
    stop_eps: float = 1e-5
    max_iters: int = 5000
    variant: str = "shifted"
    mollifier_radius: float = 5.0 / 128.0
    forward_startup: int = 0
    startup_grading: float = 5.0
    output_dir: str = ""
    g_values: tuple[float, ...] | None = None
    rho_true_values: tuple[float, ...] | None = None
    data_values: tuple[float, ...] | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise UsageError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.g_spec not in ("sine_bump", "custom_samples"):
            raise UsageError(f"unknown g_spec {self.g_spec!r}")
        if self.rho_true_spec not in (
            "smooth_sine_ramp",
            "piecewise_ramp",
            "custom_samples",
        ):
            raise UsageError(f"unknown rho_true_spec {self.rho_true_spec!r}")
        if self.variant not in ("plain", "shifted", "mollified"):
            raise UsageError(f"unknown variant {self.variant!r}")
        j = self.x0 * self.Nx
        if abs(j - round(j)) > 1e-9:
            raise UsageError(f"x0={self.x0} must lie on a node of the Nx={self.Nx} grid")
        if self.g_spec == "custom_samples" and self.g_values is None:
            raise UsageError("g_spec=custom_samples requires g_values")
        if self.rho_true_spec == "custom_samples" and (
            self.rho_true_values is None and self.data_values is None
        ):
            raise UsageError(
                "rho_true_spec=custom_samples requires rho_true_values or data_values"
            )

    @property
    def has_truth(self) -> bool:
        return self.rho_true_spec != "custom_samples" or self.rho_true_values is not None


@dataclass(frozen=True)
class RunSummary:
    iterations_used: int
    converged: bool
    relative_l2_error: float | None
    max_error: float | None
    wall_time: float
    config_echo: ExperimentConfig


_FIELD_TYPES = {
    "alpha": float,
    "T": float,
    "Nx": int,
    "Nt": int,
    "x0": float,
    "g_spec": str,
    "rho_true_spec": str,
    "sigma": float,
    "seed": int,
    "K": float,
    "stop_eps": float,
    "max_iters": int,
    "variant": str,
    "mollifier_radius": float,
    "forward_startup": int,
    "startup_grading": float,
    "output_dir": str,
    "g_values": "floats",
    "rho_true_values": "floats",
    "data_values": "floats",
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat key = value lines (``#`` starts a comment) into a config."""
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise UsageError(f"line {lineno}: unknown key {key!r}")
        kind = _FIELD_TYPES[key]
        try:
            if kind == "floats":
                kwargs[key] = tuple(float(v) for v in value.split(","))
            elif kind is int:
                kwargs[key] = int(value)
            elif kind is float:
                kwargs[key] = float(value)
            else:
                kwargs[key] = value
        except ValueError as exc:
            raise UsageError(f"line {lineno}: cannot parse {value!r} for {key}") from exc
    return ExperimentConfig(**kwargs)


def config_text(cfg: ExperimentConfig) -> str:
    """Render a config as parseable key = value lines (lossless round trip)."""
    lines = []
    for f in dataclasses.fields(cfg):
        val = getattr(cfg, f.name)
        if val is None:
            continue
        if isinstance(val, tuple):
            rendered = ",".join(repr(v) for v in val)
        elif isinstance(val, float):
            rendered = repr(val)
        else:
            rendered = str(val)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def rho_true_series(cfg: ExperimentConfig, grid: TimeGrid) -> TimeSeries | None:
    """The configured true temporal factor sampled on the grid, or None for
    custom runs supplying observation data without a truth."""
    t = grid.nodes
    if cfg.rho_true_spec == "smooth_sine_ramp":
        return TimeSeries(grid, np.sin(2.0 * np.pi * t) + 10.0 * t)
    if cfg.rho_true_spec == "piecewise_ramp":
        u = t / grid.T
        vals = np.where(u <= 1.0 / 3.0, 3.0 * u, np.where(u < 2.0 / 3.0, 1.0, 3.0 * u - 1.0))
        return TimeSeries(grid, vals)
    if cfg.rho_true_values is not None:
        if len(cfg.rho_true_values) != grid.n_nodes:
            raise UsageError(
                f"rho_true_values must have {grid.n_nodes} entries, got {len(cfg.rho_true_values)}"
            )
        return TimeSeries(grid, np.asarray(cfg.rho_true_values))
    return None


def _spatial_profile(cfg: ExperimentConfig, sgrid: SpaceGrid) -> SpatialProfile:
    if cfg.g_spec == "sine_bump":
        return sine_bump_profile(sgrid)
    if len(cfg.g_values) != sgrid.Nx + 1:
        raise UsageError(
            f"g_values must have {sgrid.Nx + 1} entries, got {len(cfg.g_values)}"
        )
    return SpatialProfile(sgrid, np.asarray(cfg.g_values))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def resolve_output_dir(cfg: ExperimentConfig, override: str | None = None) -> Path:
    if override:
        return Path(override)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    root = os.environ.get(OUTPUT_ROOT_ENV, "runs")
    return Path(root) / "run"


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> RunSummary:
    """Full pipeline: forward solves, data synthesis, noise, reconstruction,
    CSV artifacts.  Returns the run summary (wall time covers the
    reconstruction only)."""
    sgrid = SpaceGrid(cfg.Nx)
    tgrid = TimeGrid(cfg.T, cfg.Nt)
    alpha = FractionalOrder(cfg.alpha)
    g = _spatial_profile(cfg, sgrid)

    kernel_field = solve_homogeneous_l1(
        g, alpha, tgrid,
        startup_substeps=cfg.forward_startup,
        startup_grading=cfg.startup_grading,
    )
    kernel = probe(kernel_field, cfg.x0)

    rho_true = rho_true_series(cfg, tgrid)
    if rho_true is not None:
        field = solve_inhomogeneous_l1(
            g, rho_true, alpha, tgrid,
            startup_substeps=cfg.forward_startup,
            startup_grading=cfg.startup_grading,
        )
        data = probe(field, cfg.x0)
    else:
        if len(cfg.data_values) != tgrid.n_nodes:
            raise UsageError(
                f"data_values must have {tgrid.n_nodes} entries, got {len(cfg.data_values)}"
            )
        data = TimeSeries(tgrid, np.asarray(cfg.data_values))

    noisy = add_noise(data, cfg.sigma, cfg.seed) if cfg.sigma > 0 else data

    itcfg = IterationConfig(
        K=cfg.K,
        stop_eps=cfg.stop_eps,
        max_iters=cfg.max_iters,
        variant=Variant(cfg.variant),
        mollifier=MollifierSpec(cfg.mollifier_radius)
        if cfg.variant == "mollified"
        else None,
    )
    t0 = _time.perf_counter()
    trace = reconstruct(noisy, kernel, alpha, itcfg)
    wall = _time.perf_counter() - t0

    rho_hat = trace.final
    if rho_true is not None:
        diff = rho_hat.values - rho_true.values
        denom = l2_norm_values(rho_true.values, tgrid.tau)
        num = l2_norm_values(diff, tgrid.tau)
        rel = num / denom if denom > 0 else num  # absolute for a zero truth
        max_err = float(np.max(np.abs(diff)))
    else:
        rel = None
        max_err = None

    summary = RunSummary(
        iterations_used=trace.iterations_used,
        converged=trace.converged,
        relative_l2_error=rel,
        max_error=max_err,
        wall_time=wall,
        config_echo=cfg,
    )
    if out_dir is not None:
        write_artifacts(Path(out_dir), cfg, tgrid, rho_true, trace, data, noisy, kernel, summary)
    return summary


def write_artifacts(
    out: Path,
    cfg: ExperimentConfig,
    tgrid: TimeGrid,
    rho_true: TimeSeries | None,
    trace: ReconstructionTrace,
    data: TimeSeries,
    noisy: TimeSeries,
    kernel: TimeSeries,
    summary: RunSummary,
) -> None:
    out.mkdir(parents=True, exist_ok=True)
    t = tgrid.nodes
    truth = rho_true.values if rho_true is not None else np.full(tgrid.n_nodes, np.nan)
    _write_csv(
        out / "trace.csv",
        ["t", "rho_true", "rho_hat", "u_star", "w_sigma", "kernel_v"],
        [t, truth, trace.final.values, data.values, noisy.values, kernel.values],
    )
    m = np.arange(1, len(trace.update_norms) + 1, dtype=float)
    if rho_true is not None:
        tn = l2_norm_values(rho_true.values, tgrid.tau)
        tn = tn if tn > 0 else 1.0
        errs = np.array(
            [
                l2_norm_values(it.values - rho_true.values, tgrid.tau) / tn
                for it in trace.iterates[1:]
            ]
        )
    else:
        errs = np.full(len(m), np.nan)
    _write_csv(
        out / "iterations.csv",
        ["m", "update_l2", "error_l2"],
        [m, np.asarray(trace.update_norms), errs],
    )
    early = []
    for k in range(1, 5):
        idx = min(k, len(trace.iterates) - 1)
        early.append(trace.iterates[idx].values)
    _write_csv(
        out / "early_iterates.csv",
        ["t", "rho_m1", "rho_m2", "rho_m3", "rho_m4"],
        [t] + early,
    )
    with open(out / "summary.csv", "w", newline="") as fh:
        fh.write("iterations_used,converged,relative_l2_error,max_error,wall_time\n")
        rel = "" if summary.relative_l2_error is None else _fmt(summary.relative_l2_error)
        mx = "" if summary.max_error is None else _fmt(summary.max_error)
        fh.write(
            f"{summary.iterations_used},{summary.converged},{rel},{mx},{_fmt(summary.wall_time)}\n"
        )
    with open(out / "config.txt", "w", newline="") as fh:
        fh.write(config_text(cfg))


def sweep(
    cfg: ExperimentConfig,
    parameter: str,
    values: list,
    out_dir: str | Path | None = None,
) -> list[RunSummary]:
    """One experiment per value; seeds offset by index, one subdirectory per
    entry plus an index CSV when out_dir is given."""
    if parameter not in SWEEPABLE:
        raise UsageError(
            f"cannot sweep {parameter!r}; choose one of {', '.join(SWEEPABLE)}"
        )
    summaries = []
    index_rows = []
    base = Path(out_dir) if out_dir is not None else None
    for i, value in enumerate(values):
        try:
            typed = int(value) if parameter == "Nt" else float(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"cannot parse sweep value {value!r} for {parameter}") from exc
        sub_cfg = dataclasses.replace(cfg, **{parameter: typed, "seed": cfg.seed + i})
        sub_out = base / f"{parameter}_{i:03d}" if base is not None else None
        s = run_experiment(sub_cfg, sub_out)
        summaries.append(s)
        index_rows.append((typed, f"{parameter}_{i:03d}", s))
    if base is not None and index_rows:
        base.mkdir(parents=True, exist_ok=True)
        with open(base / "index.csv", "w", newline="") as fh:
            fh.write(f"{parameter},subdir,iterations_used,converged,relative_l2_error\n")
            for value, sub, s in index_rows:
                rel = "" if s.relative_l2_error is None else _fmt(s.relative_l2_error)
                fh.write(f"{_fmt(value)},{sub},{s.iterations_used},{s.converged},{rel}\n")
    return summaries
