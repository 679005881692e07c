"""Checkable numerical counterparts of the analytical machinery.

* ``check_rci``        the reverse convolution inequality on sampled data
* ``compute_b_delta``  reciprocal L1 mass of the kernel near t = 0 (the
  stability constant whose blow-up rate governs how ill-posed the problem is)
* ``duhamel_residual`` mismatch of J^(1-alpha) u(x0,.) against rho * v(x0,.)

All norms are trapezoid / max over the grid; the inequalities hold for the
piecewise-linear interpolants, so slack tolerances only need to absorb
floating-point roundoff and the |.| quadrature of the convolution.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .fraccalc import FractionalOrder, convolve_values, rl_integral
from .forward import SpaceTimeField, probe
from .grids import TimeSeries

__all__ = [
    "RciVariant",
    "RciInstance",
    "RciReport",
    "check_rci",
    "random_rci_instance",
    "compute_b_delta",
    "duhamel_residual",
]


class RciVariant(enum.Enum):
    A = "a"
    B = "b"


@dataclass(frozen=True)
class RciInstance:
    """Sampled data for the reverse convolution inequality.

    f1 lives on the uniform nodes of [eta, T0 + delta], f2 on those of
    [0, T0 + delta - eta]; both share the spacing tau, and T0 - eta and
    delta are integer multiples of tau.  f2 must be nonnegative; f1 must
    keep one sign on all of (eta, T0 + delta) for variant A, or at least on
    (eta, T0) for variant B.
    """

    eta: float
    T0: float
    delta: float
    tau: float
    f1: np.ndarray = field(repr=False)
    f2: np.ndarray = field(repr=False)
    variant: RciVariant = RciVariant.A

    def __post_init__(self):
        if not (0.0 <= self.eta < self.T0 and self.delta > 0):
            raise ValueError("markers must satisfy 0 <= eta < T0 and delta > 0")
        span = self.T0 + self.delta - self.eta
        n = round(span / self.tau)
        if abs(span - n * self.tau) > 1e-9 * max(1.0, span):
            raise ValueError("T0 + delta - eta must be a multiple of tau")
        f1 = np.asarray(self.f1, dtype=float)
        f2 = np.asarray(self.f2, dtype=float)
        if f1.shape != (n + 1,) or f2.shape != (n + 1,):
            raise ValueError(f"need {n + 1} samples on both factors")
        if f2.min() < 0.0:
            raise ValueError("f2 must be nonnegative")
        k_T0 = self._index_of(self.T0)
        sign_span = f1 if self.variant is RciVariant.A else f1[: k_T0 + 1]
        if sign_span.min() < 0.0 < sign_span.max():
            raise ValueError(
                f"f1 must keep one sign on its variant-{self.variant.value} range"
            )
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)

    def _index_of(self, t: float) -> int:
        k = round((t - self.eta) / self.tau)
        return int(k)


@dataclass(frozen=True)
class RciReport:
    lhs: float
    rhs: float
    variant: RciVariant

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def _trapz(vals: np.ndarray, tau: float) -> float:
    return float(np.trapezoid(vals, dx=tau))


def check_rci(instance: RciInstance) -> RciReport:
    """Evaluate both sides of the reverse convolution inequality.

    LHS: ||f1||_{L1(eta,T0)} ||f2||_{L1(0,delta)}.
    RHS: || int_eta^t f1(s) f2(t-s) ds ||_{L1(eta, T0+delta)}, plus
    2 ||f1||_{L1(T0,T0+delta)} ||f2||_{L1(0,delta)} for variant B.
    """
    tau = instance.tau
    k_T0 = instance._index_of(instance.T0)
    k_d = round(instance.delta / tau)
    lhs = _trapz(np.abs(instance.f1[: k_T0 + 1]), tau) * _trapz(
        instance.f2[: k_d + 1], tau
    )
    # shift s' = s - eta turns the running integral into a causal convolution
    F = convolve_values(instance.f1, instance.f2, tau)
    rhs = _trapz(np.abs(F), tau)
    if instance.variant is RciVariant.B:
        rhs += 2.0 * _trapz(np.abs(instance.f1[k_T0:]), tau) * _trapz(
            instance.f2[: k_d + 1], tau
        )
    return RciReport(lhs=lhs, rhs=rhs, variant=instance.variant)


def _random_poly(rng: np.random.Generator, t: np.ndarray) -> np.ndarray:
    coef = rng.uniform(-1.0, 1.0, 6)
    return np.polynomial.polynomial.polyval(t, coef)


def random_rci_instance(
    rng: np.random.Generator, variant: RciVariant = RciVariant.A
) -> RciInstance:
    """Degree-<=5 random polynomial factors satisfying the hypotheses:
    f2 = |poly|; f1 one-signed by absolute value (variant A) or one-signed
    only before T0 with a free tail (variant B)."""
    steps = 256
    eta = 0.0
    T0 = float(rng.uniform(0.4, 1.2))
    k_T0 = int(rng.integers(96, 224))
    tau = T0 / k_T0
    k_d = int(rng.integers(16, 96))
    delta = k_d * tau
    n = k_T0 + k_d
    t1 = eta + tau * np.arange(n + 1)
    t2 = tau * np.arange(n + 1)
    sgn = 1.0 if rng.uniform() < 0.5 else -1.0
    f2 = np.abs(_random_poly(rng, t2))
    if variant is RciVariant.A:
        f1 = sgn * np.abs(_random_poly(rng, t1))
    else:
        head = sgn * np.abs(_random_poly(rng, t1))
        tail = _random_poly(rng, t1)
        blend = np.clip((t1 - T0) / max(delta, 1e-12), 0.0, 1.0)
        f1 = (1.0 - blend) * head + blend * tail
    return RciInstance(eta, T0, delta, tau, f1, f2, variant)


def compute_b_delta(kernel: TimeSeries, delta: float) -> float:
    """1 / ||v(x0,.)||_{L1(0,delta)} by trapezoid with exact treatment of a
    partial final cell; nonincreasing in delta for nonnegative kernels."""
    T = kernel.grid.T
    if not (0.0 < delta <= T):
        raise ValueError(f"delta must lie in (0, T], got {delta}")
    kv = kernel.values
    if kv.min() < -1e-12:
        raise ValueError("kernel must be nonnegative")
    t = kernel.grid.nodes
    tau = kernel.grid.tau
    full = int(np.floor(delta / tau + 1e-12))
    integral = float(np.trapezoid(kv[: full + 1], dx=tau))
    rem = delta - full * tau
    if rem > 1e-12 * T and full < kernel.grid.L:
        left = kv[full]
        right = np.interp(delta, t, kv)
        integral += 0.5 * (left + right) * rem
    if integral <= 0.0:
        raise ValueError(
            "kernel has no mass on (0, delta); positivity of the homogeneous "
            "solution is violated"
        )
    return 1.0 / integral


def duhamel_residual(
    rho: TimeSeries,
    fld: SpaceTimeField,
    kernel: TimeSeries,
    alpha: FractionalOrder,
    x0: float,
) -> float:
    """sup-norm mismatch of J^(1-alpha) u(x0,.) against (rho * v(x0,.)),
    relative to the sup of the convolution (absolute if that is below 1e-14).
    """
    obs = probe(fld, x0)
    require = (rho.grid, kernel.grid, obs.grid)
    if not (require[0] == require[1] == require[2]):
        raise ValueError("rho, kernel and field must share one time grid")
    lhs = rl_integral(obs, 1.0 - alpha.alpha)
    rhs = convolve_values(rho.values, kernel.values, rho.grid.tau)
    diff = float(np.max(np.abs(lhs.values - rhs)))
    scale = float(np.max(np.abs(rhs)))
    if scale < 1e-14:
        return diff
    return diff / scale
