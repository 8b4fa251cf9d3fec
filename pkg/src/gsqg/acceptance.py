"""Acceptance checks behind ``gsqg verify``.

Each check returns one or more :class:`CheckResult` rows.  Thresholds are
fixed here; nothing is calibrated at run time.
"""

from __future__ import annotations

import json
import tempfile
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, dynamics, spectral, splitting
from .config import parse_config
from .dynamics import ModelParams, SubstepPolicy
from .harness import execute, write_outputs
from .presets import RandomBand, build_ic

ORDER_DT_LIST = [1 / 10, 1 / 20, 1 / 40, 1 / 80]
ORDER_PARAMS = [(1.0, 1.0), (2.0, 2.0)]


def acceptance_config(alpha: float = 1.0, beta: float = 1.0, output_dir: str = "results") -> str:
    """JSON text of the convergence experiment used for acceptance."""
    return json.dumps(
        {
            "alpha": alpha,
            "beta": beta,
            "T": 0.5,
            "dt_list": ORDER_DT_LIST,
            "ic": "classic_shear",
            "grid_n": 128,
            "scheme": "both",
            "norm_orders": [0, 1, 3],
            "output_dir": output_dir,
        }
    )


@dataclass
class CheckResult:
    name: str
    measured: float
    threshold: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status}  {self.name:<34} measured={self.measured:<12.4g} threshold {self.threshold}{extra}"


class ExperimentCache:
    """Runs each acceptance experiment at most once per verify session."""

    def __init__(self):
        self._results = {}

    def get(self, alpha: float, beta: float):
        key = (alpha, beta)
        if key not in self._results:
            self._results[key] = execute(parse_config(acceptance_config(alpha, beta)))
        return self._results[key]


def _reports(cache: ExperimentCache, alpha: float, beta: float) -> dict:
    return {r.scheme: r for r in cache.get(alpha, beta).reports}


def check_godunov_order(cache: ExperimentCache) -> list[CheckResult]:
    out = []
    for a, b in ORDER_PARAMS:
        report = _reports(cache, a, b)[splitting.SchemeKind.GODUNOV]
        slope, r2 = report.fitted_order[0.0]
        out.append(CheckResult(
            f"godunov_order[a={a:g},b={b:g}]", slope, "slope in [0.85, 1.15], r2 >= 0.99",
            0.85 <= slope <= 1.15 and r2 >= 0.99, f"r2={r2:.6f}",
        ))
    return out


def check_strang_order(cache: ExperimentCache) -> list[CheckResult]:
    out = []
    for a, b in ORDER_PARAMS:
        reports = _reports(cache, a, b)
        strang = reports[splitting.SchemeKind.STRANG]
        godunov = reports[splitting.SchemeKind.GODUNOV]
        slope, r2 = strang.fitted_order[0.0]
        out.append(CheckResult(
            f"strang_order[a={a:g},b={b:g}]", slope, "slope in [1.8, 2.2], r2 >= 0.99",
            1.8 <= slope <= 2.2 and r2 >= 0.99, f"r2={r2:.6f}",
        ))
        ratio = godunov.error_at(1 / 80) / strang.error_at(1 / 80)
        out.append(CheckResult(
            f"strang_gain_at_dt=1/80[a={a:g},b={b:g}]", ratio, ">= 5", ratio >= 5.0,
            "Godunov L2 error / Strang L2 error",
        ))
    return out


def check_diffusion_exact() -> list[CheckResult]:
    grid = spectral.Grid(32)
    worst = 0.0
    for alpha in (0.5, 1.0, 1.5, 2.0):
        p = ModelParams(alpha, 1.0)
        for k1, k2 in ((1, 0), (2, 1)):
            theta = spectral.SpectralField.from_modes(grid, {(k1, k2): 1.0, (-k1, -k2): 1.0})
            for t in (0.1, 1.0):
                expected = np.exp(-t * np.hypot(k1, k2) ** alpha)
                got = dynamics.phi_A(t, theta, p).coeff(k1, k2).real
                worst = max(worst, abs(got - expected) / expected)
    return [CheckResult("diffusion_flow_exact", worst, "rel err <= 1e-12", worst <= 1e-12)]


def check_transport_conservation() -> list[CheckResult]:
    grid = spectral.Grid(128)
    theta0 = build_ic("classic_shear", grid)
    out = dynamics.phi_B(1.0, theta0, ModelParams(1.0, 1.0), SubstepPolicy())
    l2_0 = spectral.l2_norm(theta0)
    drift = abs(spectral.l2_norm(out) - l2_0) / l2_0
    mean = abs(out.mean) / out.scale()
    return [
        CheckResult("transport_l2_drift", drift, "rel drift <= 1e-8", drift <= 1e-8),
        CheckResult("transport_mean", mean, "rel zero mode <= 1e-12", mean <= 1e-12),
    ]


def check_commutator_identity(pairs: int = 20, n: int = 64, band: int = 12) -> list[CheckResult]:
    grid = spectral.Grid(n)
    worst = 0.0
    for i in range(pairs):
        f = build_ic(RandomBand(seed=2 * i, decay_exponent=1.0, band=band), grid)
        g = build_ic(RandomBand(seed=2 * i + 1, decay_exponent=1.0, band=band), grid)
        residual = analysis.commutator_G(f, g, 2.0) + 2.0 * analysis.gradient_dot(f, g)
        scale = spectral.sobolev_norm(f, 1.0) * spectral.sobolev_norm(g, 1.0)
        worst = max(worst, spectral.l2_norm(residual) / scale)
    return [CheckResult(
        "commutator_alpha2_identity", worst, "||G2+2grad f.grad g|| <= 1e-10 |f|H1 |g|H1",
        worst <= 1e-10, f"{pairs} seeded pairs",
    )]


def check_lambda2_identity() -> list[CheckResult]:
    grid = spectral.Grid(64)
    f = build_ic(RandomBand(seed=7, decay_exponent=1.0, band=16), grid)
    fx, fy = spectral.gradient(f)
    minus_lap = -(spectral.gradient(fx)[0] + spectral.gradient(fy)[1])
    lam2 = spectral.fractional_laplacian(f, 2.0)
    rel = float(np.max(np.abs(lam2.coeffs - minus_lap.coeffs)) / minus_lap.scale())
    return [CheckResult("lambda2_equals_minus_laplacian", rel, "rel err <= 1e-12", rel <= 1e-12)]


def check_b_steady() -> list[CheckResult]:
    grid = spectral.Grid(32)
    theta0 = build_ic("steady_mode", grid)
    expected = np.exp(-1.0) * theta0
    worst = 0.0
    for alpha in (1.0, 1.5, 2.0):
        p = ModelParams(alpha, 1.0)
        for scheme in splitting.SchemeKind:
            final = splitting.evolve(scheme, theta0, 1.0, 0.1, p).final
            worst = max(worst, analysis.error_norm(final, expected, 0.0))
    return [CheckResult("b_steady_closed_form", worst, "L2 err <= 1e-10", worst <= 1e-10)]


def check_dissipation_monotone() -> list[CheckResult]:
    grid = spectral.Grid(128)
    theta = build_ic("classic_shear", grid)
    p = ModelParams(1.0, 1.0)
    previous = spectral.l2_norm(theta)
    worst = -np.inf
    for state in dynamics.reference_steps(0.5, theta, p, ORDER_DT_LIST[-1] / analysis.REFERENCE_REFINEMENT):
        current = spectral.l2_norm(state)
        worst = max(worst, current - previous)
        previous = current
    return [CheckResult(
        "reference_l2_nonincreasing", worst, "max step increase <= 1e-10", worst <= 1e-10,
    )]


def check_reference_order(dt_ref: float = 1 / 20, T: float = 0.5) -> list[CheckResult]:
    grid = spectral.Grid(128)
    theta0 = build_ic("classic_shear", grid)
    p = ModelParams(1.0, 1.0)
    sols = [dynamics.reference_solve(T, theta0, p, dt_ref / 2**j) for j in range(3)]
    ratio = spectral.l2_norm(sols[0] - sols[1]) / spectral.l2_norm(sols[1] - sols[2])
    return [CheckResult(
        "reference_fourth_order_ratio", ratio, "in [12, 20]", 12.0 <= ratio <= 20.0,
        f"dt_ref={dt_ref:g}, halvings 1 and 2",
    )]


def check_determinism(cache: ExperimentCache) -> list[CheckResult]:
    with tempfile.TemporaryDirectory() as tmp:
        first = write_outputs(cache.get(1.0, 1.0), Path(tmp) / "a") / "errors.csv"
        rerun = execute(parse_config(acceptance_config(1.0, 1.0)))
        second = write_outputs(rerun, Path(tmp) / "b") / "errors.csv"
        same = first.read_bytes() == second.read_bytes()
        rows = len(first.read_text().splitlines()) - 1
    return [CheckResult(
        "errors_csv_byte_identical", float(same), "== 1", same, f"{rows} data rows",
    )]


def check_smoke_n8() -> list[CheckResult]:
    grid = spectral.Grid(8)
    theta0 = build_ic("two_mode", grid)
    p = ModelParams(1.0, 1.0)
    report = analysis.convergence_study("strang", theta0, 0.2, [0.1, 0.05, 0.025], p)
    ok = all(np.isfinite(e) for s in report.samples for e in s.errors.values())
    return [CheckResult("smoke_n8", float(ok), "== 1", ok, "n=8 convergence study completes")]


CHECKS: dict[str, Callable[..., list[CheckResult]]] = {
    "godunov_order": check_godunov_order,
    "strang_order": check_strang_order,
    "diffusion_exact": check_diffusion_exact,
    "transport_conservation": check_transport_conservation,
    "commutator_identity": check_commutator_identity,
    "lambda2_identity": check_lambda2_identity,
    "b_steady": check_b_steady,
    "dissipation_monotone": check_dissipation_monotone,
    "reference_order": check_reference_order,
    "determinism": check_determinism,
    "smoke_n8": check_smoke_n8,
}
_NEEDS_CACHE = {"godunov_order", "strang_order", "determinism"}


def run_checks(only: Iterable[str] | None = None, echo: Callable[[str], None] | None = None):
    names = list(CHECKS) if only is None else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s) {unknown}; available: {', '.join(CHECKS)}")
    cache = ExperimentCache()
    results = []
    for name in names:
        started = time.perf_counter()
        rows = CHECKS[name](cache) if name in _NEEDS_CACHE else CHECKS[name]()
        for row in rows:
            if echo:
                echo(f"{row.line()}  [{time.perf_counter() - started:.1f}s]")
        results.extend(rows)
    return results


def verify_suite(only: Iterable[str] | None = None, echo: Callable[[str], None] = print) -> int:
    """Run the acceptance checks, print one line per check, return an exit status."""
    results = run_checks(only, echo)
    failed = [r.name for r in results if not r.passed]
    echo(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0
