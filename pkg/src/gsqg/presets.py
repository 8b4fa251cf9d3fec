"""Initial-condition presets.

Every preset is real, mean-zero and band-limited to ``max|k_i| <= n/4``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandError
from .spectral import Grid, SpectralField

PRESET_NAMES = ("steady_mode", "two_mode", "classic_shear", "random_band")

#: largest splitting step considered "sufficiently small" for each preset
PRESET_MAX_DT = {
    "steady_mode": 1.0,
    "two_mode": 0.1,
    "classic_shear": 0.1,
    "random_band": 0.05,
}


@dataclass(frozen=True)
class RandomBand:
    """Seeded random field with modes ``1 <= |k| <= band`` and spectrum ``|k|^-decay_exponent``."""

    seed: int
    decay_exponent: float = 2.0
    band: int = 8

    name = "random_band"


def _random_band(spec: RandomBand, grid: Grid) -> SpectralField:
    if spec.band < 1:
        raise BandError(f"band must be at least 1, got {spec.band}")
    if spec.band > grid.n // 4:
        raise BandError(f"band {spec.band} exceeds n/4 = {grid.n // 4} for grid n={grid.n}")
    b = spec.band
    # Draws cover the fixed square [-b, b]^2 so the field does not depend on n.
    rng = np.random.default_rng(spec.seed)
    draws = rng.standard_normal((2 * b + 1, 2 * b + 1)) + 1j * rng.standard_normal((2 * b + 1, 2 * b + 1))
    k = np.arange(-b, b + 1)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    kmag = np.hypot(k1, k2)
    inside = (kmag >= 1) & (kmag <= b)
    amp = np.where(inside, draws * np.where(inside, kmag, 1.0) ** (-spec.decay_exponent), 0.0)
    # draws[::-1, ::-1] sits at -k on the symmetric square
    amp = 0.5 * (amp + np.conj(amp[::-1, ::-1]))
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    coeffs[np.ix_(k % grid.n, k % grid.n)] = amp
    return SpectralField(grid, coeffs)


def build_ic(preset: str | RandomBand, grid: Grid) -> SpectralField:
    """Spectral field for a named preset or a :class:`RandomBand` spec."""
    if isinstance(preset, RandomBand):
        return _random_band(preset, grid)
    if preset == "steady_mode":
        # cos x
        return SpectralField.from_modes(grid, {(1, 0): 0.5, (-1, 0): 0.5})
    if preset == "two_mode":
        # cos x + cos 2y
        return SpectralField.from_modes(grid, {(1, 0): 0.5, (-1, 0): 0.5, (0, 2): 0.5, (0, -2): 0.5})
    if preset == "classic_shear":
        # sin x sin y + cos y
        modes = {(0, 1): 0.5, (0, -1): 0.5}
        for s1 in (1, -1):
            for s2 in (1, -1):
                modes[(s1, s2)] = -0.25 * s1 * s2
        return SpectralField.from_modes(grid, modes)
    if preset == "random_band":
        raise ValueError("random_band needs a seed; pass a RandomBand spec")
    raise ValueError(f"unknown preset {preset!r}; expected one of {', '.join(PRESET_NAMES)}")


def max_dt_for(preset: str | RandomBand) -> float:
    name = preset.name if isinstance(preset, RandomBand) else preset
    return PRESET_MAX_DT[name]
