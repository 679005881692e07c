"""Self-check suites behind the ``check`` CLI subcommand.

Each suite exercises one family of diagnostics at reduced scale and returns
(ok, report lines); the CLI exits nonzero when a suite reports a violation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .diagnostics import RciVariant, check_rci, duhamel_residual, random_rci_instance
from .fraccalc import FractionalOrder, caputo_derivative, mittag_leffler, rl_integral
from .forward import (
    SpaceGrid,
    sine_bump_profile,
    probe,
    solve_homogeneous_l1,
    solve_homogeneous_spectral,
    solve_inhomogeneous_l1,
)
from .grids import TimeGrid, TimeSeries

__all__ = ["run_suite", "SUITES"]


def _check_fraccalc() -> tuple[bool, list[str]]:
    ok = True
    lines = []
    # Caputo power rule t^2, alpha=0.5: refinement at rate >= 2 - alpha
    alpha = FractionalOrder(0.5)
    errs = []
    for L in (64, 128, 256):
        grid = TimeGrid(1.0, L)
        t = grid.nodes
        f = TimeSeries(grid, t**2)
        got = caputo_derivative(f, alpha).values
        want = special.gamma(3.0) / special.gamma(2.5) * t**1.5
        errs.append(np.abs(got[1:] - want[1:]).max())
    rate = math.log2(errs[0] / errs[-1]) / 2.0
    ok &= rate >= 1.4
    lines.append(f"caputo t^2 refinement rate {rate:.2f} (want >= 1.5-ish): errs {errs}")
    # Mittag-Leffler closed forms
    for z in (-1.0, 0.0, 1.0):
        d = abs(mittag_leffler(1.0, 1.0, z) - math.exp(z))
        ok &= d < 1e-12
    d = abs(mittag_leffler(2.0, 1.0, -0.49) - math.cos(0.7))
    ok &= d < 1e-12
    lines.append("mittag-leffler exp/cos identities within 1e-12")
    # semigroup J^0.3 J^0.4 = J^0.7 on smooth data
    grid = TimeGrid(1.0, 128)
    f = TimeSeries(grid, np.sin(grid.nodes))
    a = rl_integral(rl_integral(f, 0.3), 0.4).values
    b = rl_integral(f, 0.7).values
    d = np.abs(a - b).max()
    ok &= d < 5e-5
    lines.append(f"rl semigroup J^.3 J^.4 vs J^.7 max diff {d:.2e}")
    return ok, lines


def _check_forward() -> tuple[bool, list[str]]:
    sgrid = SpaceGrid(64)
    tgrid = TimeGrid(1.0, 128)
    g = sine_bump_profile(sgrid)
    alpha = FractionalOrder(0.9)
    l1 = solve_homogeneous_l1(g, alpha, tgrid)
    spec = solve_homogeneous_spectral(g, alpha, tgrid)
    d = np.abs(l1.values - spec.values).max()
    ok = d <= 1e-3
    return ok, [f"oracle agreement alpha=0.9 max nodal diff {d:.2e} (tol 1e-3)"]


def _check_rci() -> tuple[bool, list[str]]:
    rng = np.random.default_rng(7)
    worst = math.inf
    for variant in (RciVariant.A, RciVariant.B):
        for _ in range(200):
            rep = check_rci(random_rci_instance(rng, variant))
            worst = min(worst, rep.slack)
    ok = worst >= -1e-10
    return ok, [f"reverse convolution inequality worst slack {worst:.3e} over 400 draws"]


def _check_duhamel() -> tuple[bool, list[str]]:
    sgrid = SpaceGrid(64)
    tgrid = TimeGrid(1.0, 128)
    g = sine_bump_profile(sgrid)
    alpha = FractionalOrder(0.9)
    t = tgrid.nodes
    rho = TimeSeries(tgrid, np.sin(2.0 * np.pi * t) + 10.0 * t)
    kernel = probe(solve_homogeneous_l1(g, alpha, tgrid), 0.125)
    fld = solve_inhomogeneous_l1(g, rho, alpha, tgrid)
    r = duhamel_residual(rho, fld, kernel, alpha, 0.125)
    ok = r <= 5e-3
    return ok, [f"duhamel identity relative residual {r:.2e} (tol 5e-3)"]


SUITES = {
    "fraccalc": _check_fraccalc,
    "forward": _check_forward,
    "rci": _check_rci,
    "duhamel": _check_duhamel,
}


def run_suite(name: str) -> tuple[bool, list[str]]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
