"""Initial-boundary value solvers on the unit interval.

Two independent routes to the same problems:

* ``solve_homogeneous_l1`` / ``solve_inhomogeneous_l1`` march the L1 discrete
  Caputo derivative in time against second-order central differences in
  space, one implicit tridiagonal solve per step.  By default the time mesh
  is augmented with a graded startup cluster near t = 0 (the solution of the
  homogeneous problem has a t^alpha layer that a uniform mesh cannot
  resolve); ``startup_substeps=0`` recovers the plain uniform scheme.
* ``solve_homogeneous_spectral`` evaluates the eigenfunction series
  sum_n E_{alpha,1}(-lambda_n t^alpha) (g, phi_n) phi_n with exact
  eigenpairs lambda_n = (n pi)^2, phi_n = sqrt(2) sin(n pi x), entirely
  independent of the finite-difference machinery, and serves as the oracle
  for the L1 route.

At alpha = 1 the L1 weights degenerate to backward Euler; the startup-refined
branch instead uses Crank-Nicolson substeps with a damped (backward Euler)
start so the classical heat equation is resolved to second order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.linalg import solve_banded

from .fraccalc import FractionalOrder, mittag_leffler
from .grids import TimeGrid, TimeSeries

__all__ = [
    "SpaceGrid",
    "SpatialProfile",
    "SpaceTimeField",
    "SpectralBasis",
    "sine_bump_profile",
    "solve_homogeneous_l1",
    "solve_homogeneous_spectral",
    "solve_inhomogeneous_l1",
    "probe",
]


@dataclass(frozen=True)
class SpaceGrid:
    """Nodes x_j = j/Nx, j = 0..Nx, on the fixed domain (0, 1)."""

    Nx: int

    def __post_init__(self):
        if not (isinstance(self.Nx, (int, np.integer)) and self.Nx >= 2):
            raise ValueError(f"need at least 2 space cells, got Nx={self.Nx}")

    @property
    def h(self) -> float:
        return 1.0 / self.Nx

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.Nx + 1)

    def node_index(self, x0: float) -> int:
        """Index of the grid node at x0; raises if x0 is not a node."""
        j = x0 * self.Nx
        jr = round(j)
        if abs(j - jr) > 1e-9 or not (0 <= jr <= self.Nx):
            raise ValueError(f"x0={x0} is not a node of the {self.Nx}-cell grid")
        return int(jr)


@dataclass(frozen=True)
class SpatialProfile:
    """Spatial source factor g sampled at the grid nodes, zero on the boundary."""

    grid: SpaceGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.Nx + 1,):
            raise ValueError(
                f"profile must have {self.grid.Nx + 1} values, got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        scale = np.abs(v).max()
        if abs(v[0]) > 1e-12 * max(scale, 1.0) or abs(v[-1]) > 1e-12 * max(scale, 1.0):
            raise ValueError("profile must vanish on the boundary")
        v = v.copy()
        v[0] = 0.0
        v[-1] = 0.0
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def sine_bump_profile(grid: SpaceGrid) -> SpatialProfile:
    """The bump g(x) = sin(2 pi x - pi/2) on (1/4, 3/4), zero elsewhere."""
    x = grid.nodes
    vals = np.where(
        (x > 0.25) & (x < 0.75), np.sin(2.0 * np.pi * x - 0.5 * np.pi), 0.0
    )
    return SpatialProfile(grid, vals)


@dataclass(frozen=True)
class SpaceTimeField:
    """Solution samples values[ell, j] = u(x_j, t_ell)."""

    space: SpaceGrid
    time: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        expect = (self.time.L + 1, self.space.Nx + 1)
        if v.shape != expect:
            raise ValueError(f"field must have shape {expect}, got {v.shape}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def probe(fld: SpaceTimeField, x0: float) -> TimeSeries:
    """Observation series u(x0, t) at a grid node (no interpolation)."""
    j = fld.space.node_index(x0)
    return TimeSeries(fld.time, fld.values[:, j])


# ---------------------------------------------------------------------------
# L1 finite-difference route
# ---------------------------------------------------------------------------

def _startup_mesh(grid: TimeGrid, substeps: int, grading: float) -> np.ndarray:
    """Union of the uniform output nodes with a graded cluster T (k/M)^r.

    Every uniform node is kept exactly as given (the output rows are read
    back by index); graded points landing within 1e-12 T of a kept node are
    dropped instead.
    """
    uni = grid.nodes
    if substeps <= 0:
        return uni
    M = substeps * grid.L
    graded = grid.T * (np.arange(M + 1) / M) ** grading
    near = np.searchsorted(uni, graded)
    lo = np.clip(near - 1, 0, grid.L)
    hi = np.clip(near, 0, grid.L)
    close = np.minimum(np.abs(graded - uni[lo]), np.abs(graded - uni[hi]))
    mesh = np.unique(np.concatenate([uni, graded[close > 1e-12 * grid.T]]))
    return mesh


def _march_l1(
    gvals: np.ndarray,
    h: float,
    tmesh: np.ndarray,
    alpha: float,
    rho_mesh: np.ndarray | None,
) -> np.ndarray:
    """Nonuniform L1 + implicit central differences.  Homogeneous problem if
    rho_mesh is None (initial data g), else source rho(t) g(x) from zero."""
    Nx = len(gvals) - 1
    N = len(tmesh) - 1
    g2a = special.gamma(2.0 - alpha)
    V = np.zeros((N + 1, Nx + 1))
    DV = np.zeros((N, Nx - 1))
    if rho_mesh is None:
        V[0] = gvals
    inv_h2 = 1.0 / (h * h)
    ab = np.zeros((3, Nx - 1))
    for n in range(1, N + 1):
        tn = tmesh[n]
        dk = tmesh[1 : n + 1] - tmesh[:n]
        past = (tn - tmesh[:n]) ** (1.0 - alpha)
        fut = np.empty(n)
        fut[: n - 1] = (tn - tmesh[1:n]) ** (1.0 - alpha)
        fut[n - 1] = 0.0
        W = (past - fut) / (g2a * dk)
        mu = W[-1]
        hist = W[: n - 1] @ DV[: n - 1] if n > 1 else 0.0
        ab[0, 1:] = -inv_h2
        ab[1, :] = mu + 2.0 * inv_h2
        ab[2, :-1] = -inv_h2
        rhs = mu * V[n - 1, 1:-1] - hist
        if rho_mesh is not None:
            rhs = rhs + rho_mesh[n] * gvals[1:-1]
        V[n, 1:-1] = solve_banded((1, 1), ab, rhs)
        DV[n - 1] = V[n, 1:-1] - V[n - 1, 1:-1]
    return V


def _march_heat(
    gvals: np.ndarray,
    h: float,
    grid: TimeGrid,
    refine: int,
    rho_uniform: np.ndarray | None,
) -> np.ndarray:
    """alpha = 1 branch.  refine = 0: backward Euler on the output grid (the
    degenerate L1 weights).  refine > 0: Crank-Nicolson on a refine-times
    finer internal mesh, first two substeps backward Euler to damp rough
    initial data."""
    Nx = len(gvals) - 1
    L = grid.L
    inv_h2 = 1.0 / (h * h)
    if refine <= 0:
        tau = grid.tau
        V = np.zeros((L + 1, Nx + 1))
        if rho_uniform is None:
            V[0] = gvals
        ab = np.zeros((3, Nx - 1))
        ab[0, 1:] = -tau * inv_h2
        ab[1, :] = 1.0 + 2.0 * tau * inv_h2
        ab[2, :-1] = -tau * inv_h2
        for ell in range(1, L + 1):
            rhs = V[ell - 1, 1:-1].copy()
            if rho_uniform is not None:
                rhs += tau * rho_uniform[ell] * gvals[1:-1]
            V[ell, 1:-1] = solve_banded((1, 1), ab, rhs)
        return V
    tau = grid.tau / refine
    tfine = np.linspace(0.0, grid.T, L * refine + 1)
    rho_fine = (
        np.interp(tfine, grid.nodes, rho_uniform) if rho_uniform is not None else None
    )
    V = np.zeros((L + 1, Nx + 1))
    v = np.zeros(Nx + 1)
    if rho_uniform is None:
        V[0] = gvals
        v[:] = gvals
    ab_be = np.zeros((3, Nx - 1))
    ab_be[0, 1:] = -tau * inv_h2
    ab_be[1, :] = 1.0 + 2.0 * tau * inv_h2
    ab_be[2, :-1] = -tau * inv_h2
    ab_cn = np.zeros((3, Nx - 1))
    ab_cn[0, 1:] = -0.5 * tau * inv_h2
    ab_cn[1, :] = 1.0 + tau * inv_h2
    ab_cn[2, :-1] = -0.5 * tau * inv_h2
    out = 1
    for k in range(1, L * refine + 1):
        if k <= 2:
            rhs = v[1:-1].copy()
            if rho_fine is not None:
                rhs += tau * rho_fine[k] * gvals[1:-1]
            vn = solve_banded((1, 1), ab_be, rhs)
        else:
            lap = (v[:-2] - 2.0 * v[1:-1] + v[2:]) * inv_h2
            rhs = v[1:-1] + 0.5 * tau * lap
            if rho_fine is not None:
                rhs += 0.5 * tau * (rho_fine[k] + rho_fine[k - 1]) * gvals[1:-1]
            vn = solve_banded((1, 1), ab_cn, rhs)
        v = np.zeros(Nx + 1)
        v[1:-1] = vn
        if k % refine == 0:
            V[out] = v
            out += 1
    return V


def solve_homogeneous_l1(
    g: SpatialProfile,
    alpha: FractionalOrder,
    time: TimeGrid,
    *,
    startup_substeps: int = 16,
    startup_grading: float = 5.0,
) -> SpaceTimeField:
    """Solve (d_t^alpha - Lap) v = 0, v(., 0) = g, homogeneous Dirichlet.

    The default startup refinement adds a graded mesh of startup_substeps * L
    points clustered at t = 0 so that the initial layer is resolved; the
    returned field is sampled at exactly the nodes of ``time``.  Set
    startup_substeps=0 for the plain uniform-mesh scheme.
    """
    if alpha.is_classical:
        refine = 64 if startup_substeps > 0 else 0
        V = _march_heat(g.values, g.grid.h, time, refine, None)
        return SpaceTimeField(g.grid, time, V)
    mesh = _startup_mesh(time, startup_substeps, startup_grading)
    V = _march_l1(g.values, g.grid.h, mesh, alpha.alpha, None)
    idx = np.searchsorted(mesh, time.nodes)
    return SpaceTimeField(g.grid, time, V[idx])


def solve_inhomogeneous_l1(
    g: SpatialProfile,
    rho: TimeSeries,
    alpha: FractionalOrder,
    time: TimeGrid,
    *,
    startup_substeps: int = 16,
    startup_grading: float = 5.0,
) -> SpaceTimeField:
    """Solve (d_t^alpha - Lap) u = rho(t) g(x), u(., 0) = 0, Dirichlet.

    rho must live on ``time``; its piecewise-linear interpolant feeds any
    internal startup substeps.
    """
    if rho.grid != time:
        raise ValueError("rho must be sampled on the requested time grid")
    if alpha.is_classical:
        refine = 64 if startup_substeps > 0 else 0
        V = _march_heat(g.values, g.grid.h, time, refine, rho.values)
        return SpaceTimeField(g.grid, time, V)
    mesh = _startup_mesh(time, startup_substeps, startup_grading)
    rho_mesh = np.interp(mesh, time.nodes, rho.values)
    V = _march_l1(g.values, g.grid.h, mesh, alpha.alpha, rho_mesh)
    idx = np.searchsorted(mesh, time.nodes)
    return SpaceTimeField(g.grid, time, V[idx])


# ---------------------------------------------------------------------------
# Spectral oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralBasis:
    """Dirichlet eigenpairs of -d^2/dx^2 on (0,1) with source coefficients.

    lambda_n = (n pi)^2, phi_n(x) = sqrt(2) sin(n pi x); coefficients are
    (g, phi_n) computed by composite Simpson on a 4x refined grid of the
    piecewise-linear profile.
    """

    nmodes: int
    eigenvalues: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)

    @staticmethod
    def for_profile(g: SpatialProfile, nmodes: int = 64) -> "SpectralBasis":
        if nmodes < 1:
            raise ValueError("need at least one mode")
        x = g.grid.nodes
        xr = np.linspace(0.0, 1.0, 4 * g.grid.Nx + 1)
        gr = np.interp(xr, x, g.values)
        hr = xr[1] - xr[0]
        w = np.ones_like(xr)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w *= hr / 3.0
        n = np.arange(1, nmodes + 1)
        phis = np.sqrt(2.0) * np.sin(np.pi * np.outer(n, xr))
        coef = phis @ (w * gr)
        lam = (n * np.pi) ** 2
        return SpectralBasis(nmodes, lam, coef)

    def h1_energy(self) -> float:
        """Partial sum of lambda_n (g, phi_n)^2, finite for g in H_0^1."""
        return float(np.sum(self.eigenvalues * self.coefficients**2))

    def tail_fraction(self) -> float:
        """Share of the H1 energy carried by the last quarter of the modes."""
        e = self.eigenvalues * self.coefficients**2
        q = max(1, self.nmodes // 4)
        total = float(np.sum(e))
        return float(np.sum(e[-q:]) / total) if total > 0 else 0.0


def solve_homogeneous_spectral(
    g: SpatialProfile,
    alpha: FractionalOrder,
    time: TimeGrid,
    basis: SpectralBasis | None = None,
) -> SpaceTimeField:
    """Truncated eigenfunction series for the homogeneous problem.

    Independent of the L1 machinery: exact eigenvalues, t^alpha evaluated
    exactly at the nodes, Mittag-Leffler factors from :func:`mittag_leffler`.
    The t = 0 row is set to g itself (the field's initial-condition
    invariant); the series at t = 0 would reproduce g only up to the
    truncation tail.
    """
    if basis is None:
        basis = SpectralBasis.for_profile(g)
    x = g.grid.nodes
    n = np.arange(1, basis.nmodes + 1)
    phis = np.sqrt(2.0) * np.sin(np.pi * np.outer(n, x))
    a = alpha.alpha
    out = np.zeros((time.L + 1, g.grid.Nx + 1))
    out[0] = g.values
    for ell, t in enumerate(time.nodes):
        if ell == 0:
            continue
        ta = t**a
        E = np.array(
            [mittag_leffler(a, 1.0, -lam * ta) for lam in basis.eigenvalues]
        )
        out[ell] = (E * basis.coefficients) @ phis
    out[:, 0] = 0.0
    out[:, -1] = 0.0
    return SpaceTimeField(g.grid, time, out)
