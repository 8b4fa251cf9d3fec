"""Right-hand sides of the active scalar equation and their flows.

The equation ``theta_t + u . grad(theta) + Lambda^alpha theta = 0`` is split
into a diffusion part ``A(theta) = -Lambda^alpha theta``, solved exactly by its
Fourier multiplier, and a transport part ``B(theta) = -u . grad(theta)`` with
``u = curl(Lambda^-beta theta)``, integrated with classical RK4.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import ConfigurationError, MeanZeroError, TransportGrowthWarning
from .spectral import SpectralField

#: default cap on a transport substep; one eighth of the coarsest studied step 0.1
DEFAULT_MAX_SUBSTEP = 0.1 / 8
DEFAULT_CFL_FRACTION = 0.5
#: H^3 growth factor within one transport call that triggers a warning
GROWTH_LIMIT = 10.0


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not 1.0 <= self.beta <= 2.0:
            raise ValueError(f"beta must lie in [1, 2], got {self.beta}")


@dataclass(frozen=True)
class SubstepPolicy:
    """How finely :func:`phi_B` subdivides a transport interval.

    The effective substep is ``min(max_substep, cfl_fraction * dx / max|u|)``.
    """

    max_substep: float = DEFAULT_MAX_SUBSTEP
    cfl_fraction: float = DEFAULT_CFL_FRACTION

    def __post_init__(self):
        if not self.max_substep > 0:
            raise ValueError(f"max_substep must be positive, got {self.max_substep}")
        if not 0.0 < self.cfl_fraction <= 1.0:
            raise ValueError(f"cfl_fraction must lie in (0, 1], got {self.cfl_fraction}")

    @classmethod
    def for_step(cls, dt: float, cfl_fraction: float = DEFAULT_CFL_FRACTION) -> SubstepPolicy:
        """Policy whose substep cap is an eighth of the splitting step."""
        return cls(max_substep=dt / 8.0, cfl_fraction=cfl_fraction)

    def substep(self, grid: spectral.Grid, max_speed: float) -> float:
        if max_speed <= 0.0:
            return self.max_substep
        return min(self.max_substep, self.cfl_fraction * grid.dx / max_speed)


def _require_mean_zero(theta: SpectralField):
    if not theta.is_mean_zero():
        raise MeanZeroError(f"transport needs a mean-zero field (zero mode {theta.mean:.3e})")


def apply_A(theta: SpectralField, p: ModelParams) -> SpectralField:
    return -spectral.fractional_laplacian(theta, p.alpha)


def apply_B(theta: SpectralField, p: ModelParams) -> SpectralField:
    """Dealiased transport tendency ``-u . grad(theta)``."""
    _require_mean_zero(theta)
    u = spectral.velocity(theta, p.beta)
    theta_x, theta_y = spectral.gradient(theta)
    advection = spectral.inverse_transform(u.u_x) * spectral.inverse_transform(theta_x)
    advection += spectral.inverse_transform(u.u_y) * spectral.inverse_transform(theta_y)
    return spectral.dealias(-spectral.forward_transform(advection, theta.grid))


def diffusion_factor(grid: spectral.Grid, t: float, alpha: float) -> np.ndarray:
    """Heat-kernel symbol ``exp(-t |k|^alpha)``; equals 1 at the zero mode."""
    return np.exp(-t * spectral.multiplier(grid, alpha))


def phi_A(t: float, theta: SpectralField, p: ModelParams) -> SpectralField:
    """Exact fractional diffusion flow over time ``t``."""
    if t < 0:
        raise ValueError(f"diffusion time must be nonnegative, got {t}")
    if t == 0:
        return theta
    return SpectralField(theta.grid, diffusion_factor(theta.grid, t, p.alpha) * theta.coeffs)


def _rk4_step(theta: SpectralField, h: float, p: ModelParams) -> SpectralField:
    k1 = apply_B(theta, p).coeffs
    k2 = apply_B(SpectralField(theta.grid, theta.coeffs + 0.5 * h * k1), p).coeffs
    k3 = apply_B(SpectralField(theta.grid, theta.coeffs + 0.5 * h * k2), p).coeffs
    k4 = apply_B(SpectralField(theta.grid, theta.coeffs + h * k3), p).coeffs
    return SpectralField(theta.grid, theta.coeffs + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4))


def phi_B(
    t: float,
    theta: SpectralField,
    p: ModelParams,
    policy: SubstepPolicy | None = None,
) -> SpectralField:
    """Inviscid transport flow over time ``t`` using uniform RK4 substeps.

    The substep count is fixed at entry from the policy and the initial
    velocity.  Warns with :class:`TransportGrowthWarning` if the ``H^3`` norm
    grows by more than a factor of ten over the call.
    """
    if t < 0:
        raise ValueError(f"transport time must be nonnegative, got {t}")
    _require_mean_zero(theta)
    if t == 0:
        return theta
    policy = policy or SubstepPolicy()
    speed = spectral.velocity(theta, p.beta).max_speed()
    h = policy.substep(theta.grid, speed)
    if h < 1e-12 * t:
        raise ConfigurationError(f"substep {h:.3e} underflows the interval {t:.3e}")
    nsub = max(1, math.ceil(t / h - 1e-9))
    h = t / nsub

    start = spectral.sobolev_norm(theta, 3.0)
    out = theta
    for _ in range(nsub):
        out = _rk4_step(out, h, p)
    end = spectral.sobolev_norm(out, 3.0)
    if start > 0 and end > GROWTH_LIMIT * start:
        warnings.warn(
            f"H^3 norm grew {end / start:.1f}x during one transport call of length {t:g}",
            TransportGrowthWarning,
            stacklevel=2,
        )
    return out


def lattice_steps(t: float, dt: float, what: str = "step") -> int:
    """Number of ``dt`` steps in ``t``; raises unless ``dt`` divides ``t`` within rounding."""
    if dt <= 0:
        raise ConfigurationError(f"{what} must be positive, got {dt}")
    steps = round(t / dt)
    if abs(steps * dt - t) > 1e-9 * max(abs(t), dt):
        raise ConfigurationError(f"{what} {dt!r} does not divide t = {t!r}: t must be a multiple of {what}")
    return steps


def reference_steps(
    t: float, theta0: SpectralField, p: ModelParams, dt_ref: float
) -> Iterator[SpectralField]:
    """Yield the unsplit integrating-factor RK4 solution after each step.

    The diffusion multiplier is applied exactly and only the transport term is
    time-stepped (Lawson form of classical RK4).
    """
    if t < 0:
        raise ValueError(f"final time must be nonnegative, got {t}")
    if t == 0:
        return
    steps = lattice_steps(t, dt_ref, "dt_ref")
    _require_mean_zero(theta0)
    grid = theta0.grid
    full = diffusion_factor(grid, dt_ref, p.alpha)
    half = diffusion_factor(grid, 0.5 * dt_ref, p.alpha)
    h = dt_ref
    c = theta0.coeffs
    for _ in range(steps):
        k1 = apply_B(SpectralField(grid, c), p).coeffs
        k2 = apply_B(SpectralField(grid, half * (c + 0.5 * h * k1)), p).coeffs
        k3 = apply_B(SpectralField(grid, half * c + 0.5 * h * k2), p).coeffs
        k4 = apply_B(SpectralField(grid, full * c + h * half * k3), p).coeffs
        c = full * c + (h / 6.0) * (full * k1 + 2.0 * half * (k2 + k3) + k4)
        yield SpectralField(grid, c)


def reference_solve(t: float, theta0: SpectralField, p: ModelParams, dt_ref: float) -> SpectralField:
    """Unsplit high-accuracy solution at time ``t``."""
    out = theta0
    for out in reference_steps(t, theta0, p, dt_ref):
        pass
    return out
