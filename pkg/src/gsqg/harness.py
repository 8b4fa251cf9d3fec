"""Experiment orchestration and output files.

A run writes into ``config.output_dir``:

``report.json``
    ``{"reports": [...]}``, one convergence report per scheme.
``errors.csv``
    header ``scheme,dt,norm_order,error``; numbers at 17 significant digits.
``meta.json``
    config echo, library versions, wall-clock seconds.
``snapshots/``
    only when ``snapshot_times`` is set: one CSV matrix of physical samples
    per (scheme, dt, time), rows indexed by x.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import platform
import sys
import time
import warnings
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from . import spectral
from .analysis import REFERENCE_REFINEMENT, ConvergenceReport, convergence_study
from .config import ExperimentConfig
from .dynamics import reference_solve
from .errors import ConfigurationError, GSQGError, LargeStepWarning
from .presets import build_ic, max_dt_for

log = logging.getLogger(__name__)

THREADS_ENV = "GSQG_THREADS"


def worker_count(tasks: int) -> int:
    """Pool size: ``GSQG_THREADS`` if set, else the CPU count, never more than ``tasks``."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if cap < 1:
            raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return max(1, min(cap, tasks))


def fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    reports: list[ConvergenceReport]
    wall_clock: float


def execute(config: ExperimentConfig) -> ExperimentResult:
    """Run every requested scheme on the configured problem; no file output."""
    start = time.perf_counter()
    grid = spectral.Grid(config.grid_n)
    theta0 = build_ic(config.ic, grid)
    p = config.params
    max_dt = config.max_dt if config.max_dt is not None else max_dt_for(config.ic)
    for dt in config.dt_list:
        if dt > max_dt:
            warnings.warn(
                f"dt={dt:g} exceeds the small-step threshold {max_dt:g} for this initial condition",
                LargeStepWarning,
                stacklevel=2,
            )
    dt_ref = min(config.dt_list) / REFERENCE_REFINEMENT
    reference = reference_solve(config.T, theta0, p, dt_ref)
    workers = worker_count(len(config.dt_list))
    reports = [
        convergence_study(
            scheme,
            theta0,
            config.T,
            config.dt_list,
            p,
            config.substep.policy,
            config.norm_orders,
            reference=reference,
            dt_ref=dt_ref,
            workers=workers,
            snapshot_times=config.snapshot_times,
        )
        for scheme in config.schemes
    ]
    return ExperimentResult(config, reports, time.perf_counter() - start)


def _check_finite(reports: list[ConvergenceReport]):
    for report in reports:
        for sample in report.samples:
            if not all(np.isfinite(list(sample.errors.values()))):
                raise GSQGError(f"non-finite error in {report.scheme.value} run at dt={sample.dt}")


def write_outputs(result: ExperimentResult, output_dir: Path | None = None) -> Path:
    out = Path(output_dir or result.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _check_finite(result.reports)

    report_doc = {"reports": [r.to_dict() for r in result.reports]}
    (out / "report.json").write_text(json.dumps(report_doc, indent=2, sort_keys=True) + "\n")

    with open(out / "errors.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scheme", "dt", "norm_order", "error"])
        for report in result.reports:
            for sample in report.samples:
                for s, err in sample.errors.items():
                    writer.writerow([report.scheme.value, fmt(sample.dt), fmt(s), fmt(err)])

    meta = {
        "config": result.config.to_dict(),
        "versions": {
            "gsqg": _package_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_clock_seconds": result.wall_clock,
        "argv": sys.argv,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    if result.config.snapshot_times:
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        for report in result.reports:
            for dt, traj in report.trajectories.items():
                for t, state in zip(traj.times, traj.states):
                    name = f"{report.scheme.value}_dt{fmt(dt)}_t{fmt(t)}.csv"
                    write_matrix(snap_dir / name, spectral.inverse_transform(state))
    return out


def write_matrix(path, values: np.ndarray):
    np.savetxt(path, values, delimiter=",", fmt="%.17g")


def _package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def run_experiment(config: ExperimentConfig, output_dir: Path | None = None) -> int:
    """Run and write outputs; returns a process exit status."""
    try:
        result = execute(config)
        out = write_outputs(result, output_dir)
    except (GSQGError, OSError, ValueError) as exc:
        log.error("experiment failed: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    log.info("wrote %s in %.1fs", out, result.wall_clock)
    return 0
