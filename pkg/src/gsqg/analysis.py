"""Fractional Leibniz commutator, error norms and convergence-order fits."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import spectral
from .dynamics import ModelParams, SubstepPolicy, lattice_steps, reference_solve
from .errors import AliasingError, DegenerateFitError
from .spectral import SpectralField
from .splitting import SchemeKind, evolve

log = logging.getLogger(__name__)

DEFAULT_NORM_ORDERS = (0.0, 1.0, 3.0)
#: reference step as a fraction of the smallest studied step
REFERENCE_REFINEMENT = 16
#: errors below this multiple of the reference norm are treated as round-off
ROUNDOFF_FLOOR = 1e-13


def _check_band(f: SpectralField, name: str):
    grid = f.grid
    k1, k2 = grid.wavenumbers
    outside = np.maximum(np.abs(k1), np.abs(k2)) > grid.n / 4
    if np.any(np.abs(f.coeffs[outside]) > 1e-12 * f.scale()):
        raise AliasingError(f"{name} has modes with max|k_i| > n/4 = {grid.n / 4:g}")


def commutator_G(f: SpectralField, g: SpectralField, alpha: float) -> SpectralField:
    """``Lambda^a(fg) - f Lambda^a g - g Lambda^a f`` with dealiased products.

    Both inputs must be band-limited to ``max|k_i| <= n/4``.  Symmetric in
    ``(f, g)`` to the last bit.
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    f._check_grid(g)
    _check_band(f, "f")
    _check_band(g, "g")
    lam = spectral.fractional_laplacian
    whole = lam(spectral.product(f, g), alpha)
    parts = spectral.product(f, lam(g, alpha)).coeffs + spectral.product(g, lam(f, alpha)).coeffs
    return SpectralField(f.grid, whole.coeffs - parts)


def gradient_dot(f: SpectralField, g: SpectralField) -> SpectralField:
    """Dealiased ``grad f . grad g``."""
    fx, fy = spectral.gradient(f)
    gx, gy = spectral.gradient(g)
    return spectral.product(fx, gx) + spectral.product(fy, gy)


def error_norm(approx: SpectralField, ref: SpectralField, s: float) -> float:
    return spectral.sobolev_norm(approx - ref, s)


@dataclass
class ErrorSample:
    dt: float
    errors: dict[float, float]

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        for s, e in self.errors.items():
            if not (math.isfinite(e) and e >= 0):
                raise ValueError(f"error at order {s} must be finite and nonnegative, got {e}")


def fit_order(samples: Sequence[ErrorSample], s: float, floor: float = 0.0) -> tuple[float, float]:
    """Least-squares slope of ``log(error)`` against ``log(dt)`` and its ``r^2``."""
    dts = [sample.dt for sample in samples]
    if len(samples) < 3 or len(set(dts)) != len(dts):
        raise ValueError(f"need at least 3 samples with distinct dt, got dt={dts}")
    errors = np.array([sample.errors[s] for sample in samples], dtype=float)
    bad = errors <= floor
    if np.any(bad):
        worst = ", ".join(f"dt={d:g}: {e:.3e}" for d, e, b in zip(dts, errors, bad) if b)
        raise DegenerateFitError(
            f"errors at norm order {s:g} at or below round-off floor {floor:.3e} ({worst})"
        )
    fit = stats.linregress(np.log(dts), np.log(errors))
    return float(fit.slope), float(fit.rvalue**2)


@dataclass
class ConvergenceReport:
    scheme: SchemeKind
    params: ModelParams
    samples: list[ErrorSample]
    fitted_order: dict[float, tuple[float, float]]
    dt_ref: float = 0.0
    warnings: list[str] = field(default_factory=list)
    trajectories: dict = field(default_factory=dict, repr=False, compare=False)

    def slope(self, s: float = 0.0) -> float:
        return self.fitted_order[s][0]

    def error_at(self, dt: float, s: float = 0.0) -> float:
        for sample in self.samples:
            if math.isclose(sample.dt, dt, rel_tol=1e-12):
                return sample.errors[s]
        raise KeyError(dt)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "params": {"alpha": self.params.alpha, "beta": self.params.beta},
            "dt_ref": self.dt_ref,
            "samples": [
                {"dt": x.dt, "errors": {repr(float(s)): e for s, e in x.errors.items()}}
                for x in self.samples
            ],
            "fitted_order": {
                repr(float(s)): {"slope": slope, "r_squared": r2}
                for s, (slope, r2) in self.fitted_order.items()
            },
            "warnings": list(self.warnings),
        }


PolicyChoice = SubstepPolicy | Callable[[float], SubstepPolicy] | None


def _policy_for(policy: PolicyChoice, dt: float) -> SubstepPolicy:
    if policy is None:
        return SubstepPolicy.for_step(dt)
    if isinstance(policy, SubstepPolicy):
        return policy
    return policy(dt)


def convergence_study(
    scheme: SchemeKind | str,
    theta0: SpectralField,
    T: float,
    dt_list: Sequence[float],
    p: ModelParams,
    policy: PolicyChoice = None,
    norm_orders: Sequence[float] = DEFAULT_NORM_ORDERS,
    *,
    reference: SpectralField | None = None,
    dt_ref: float | None = None,
    workers: int = 1,
    snapshot_times: Sequence[float] = (),
) -> ConvergenceReport:
    """Measure splitting errors at ``T`` against an unsplit reference and fit orders.

    The reference is computed once with step ``min(dt_list)/16`` unless one is
    passed in (with the ``dt_ref`` it was computed at).  Fits that hit the
    round-off floor are left out of ``fitted_order`` and noted in ``warnings``.
    """
    scheme = SchemeKind.parse(scheme)
    dt_list = sorted((float(dt) for dt in dt_list), reverse=True)
    if len(dt_list) < 3:
        raise ValueError(f"need at least 3 time steps, got {len(dt_list)}")
    for dt in dt_list:
        lattice_steps(T, dt, "dt")
    norm_orders = [float(s) for s in norm_orders]

    if reference is None:
        dt_ref = dt_list[-1] / REFERENCE_REFINEMENT
        reference = reference_solve(T, theta0, p, dt_ref)

    def run(dt: float):
        traj = evolve(scheme, theta0, T, dt, p, _policy_for(policy, dt), snapshot_times)
        return ErrorSample(dt, {s: error_norm(traj.final, reference, s) for s in norm_orders}), traj

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, dt_list))
    else:
        results = [run(dt) for dt in dt_list]
    samples = [sample for sample, _ in results]
    trajectories = {traj.dt: traj for _, traj in results} if snapshot_times else {}

    notes = []
    fitted = {}
    for s in norm_orders:
        errors = [x.errors[s] for x in samples]
        if any(a < b for a, b in zip(errors, errors[1:])):
            notes.append(f"non-monotone error vs dt at norm order {s:g}: {errors}")
        floor = ROUNDOFF_FLOOR * max(1.0, spectral.sobolev_norm(reference, s))
        try:
            fitted[s] = fit_order(samples, s, floor=floor)
        except DegenerateFitError as exc:
            notes.append(f"degenerate fit: {exc}")
    for note in notes:
        log.warning("%s %s: %s", scheme.value, p, note)
    return ConvergenceReport(
        scheme, p, samples, fitted, dt_ref=dt_ref or 0.0, warnings=notes, trajectories=trajectories
    )
