"""Godunov and Strang splitting steps and the time-marching driver."""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable
from dataclasses import dataclass, field

from .dynamics import ModelParams, SubstepPolicy, phi_A, phi_B
from .errors import ConfigurationError
from .spectral import SpectralField

LATTICE_TOL = 1e-9


class SchemeKind(enum.Enum):
    GODUNOV = "godunov"
    STRANG = "strang"

    @classmethod
    def parse(cls, name: str | SchemeKind) -> SchemeKind:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown scheme {name!r}; expected 'godunov' or 'strang'") from None


@dataclass
class Trajectory:
    times: list[float]
    states: list[SpectralField]
    params: ModelParams
    scheme: SchemeKind
    dt: float
    steps: int = field(default=0)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")

    @property
    def final(self) -> SpectralField:
        return self.states[-1]


def godunov_step(
    theta: SpectralField, dt: float, p: ModelParams, policy: SubstepPolicy | None = None
) -> SpectralField:
    """Transport for ``dt``, then exact diffusion for ``dt``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return phi_A(dt, phi_B(dt, theta, p, policy), p)


def strang_step(
    theta: SpectralField, dt: float, p: ModelParams, policy: SubstepPolicy | None = None
) -> SpectralField:
    """Half transport, full diffusion, half transport."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    half = 0.5 * dt
    return phi_B(half, phi_A(dt, phi_B(half, theta, p, policy), p), p, policy)


_STEPPERS = {SchemeKind.GODUNOV: godunov_step, SchemeKind.STRANG: strang_step}


def step_function(scheme: SchemeKind):
    return _STEPPERS[SchemeKind.parse(scheme)]


def _snapshot_indices(snapshot_times: Iterable[float], T: float, dt: float) -> set[int]:
    indices = set()
    for t in snapshot_times:
        n = round(t / dt)
        if abs(n * dt - t) > LATTICE_TOL or t < -LATTICE_TOL or t > T + LATTICE_TOL:
            raise ConfigurationError(
                f"snapshot time {t!r} is not a multiple of dt={dt!r} within [0, {T!r}]"
            )
        indices.add(n)
    return indices


def evolve(
    scheme: SchemeKind | str,
    theta0: SpectralField,
    T: float,
    dt: float,
    p: ModelParams,
    policy: SubstepPolicy | None = None,
    snapshot_times: Iterable[float] = (),
) -> Trajectory:
    """March ``floor(T/dt)`` steps of ``scheme`` from ``theta0``.

    The trajectory always holds the initial state and the state at the last
    lattice time ``floor(T/dt)*dt``, plus any requested snapshot times.  With
    ``policy=None`` the transport substep cap is ``dt/8``.
    """
    scheme = SchemeKind.parse(scheme)
    if not T > 0:
        raise ValueError(f"final time must be positive, got {T}")
    if not 0 < dt <= T * (1 + LATTICE_TOL):
        raise ValueError(f"dt must lie in (0, T], got dt={dt}, T={T}")
    steps = math.floor(T / dt + LATTICE_TOL)
    wanted = _snapshot_indices(snapshot_times, T, dt) | {0, steps}
    policy = policy or SubstepPolicy.for_step(dt)
    advance = step_function(scheme)

    times, states = [0.0], [theta0]
    theta = theta0
    for n in range(1, steps + 1):
        theta = advance(theta, dt, p, policy)
        if n in wanted:
            times.append(n * dt)
            states.append(theta)
    return Trajectory(times=times, states=states, params=p, scheme=scheme, dt=dt, steps=steps)
