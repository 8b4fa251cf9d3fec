"""Fourier representation of real scalar fields on the periodic square [0, 2*pi)^2.

Conventions
-----------
Physical samples are stored as ``samples[i, j] = f(x_i, y_j)`` with
``x_i = 2*pi*i/n`` (``indexing='ij'``), so array axis 0 carries the first
wavenumber component ``k1`` and axis 1 carries ``k2``.  Coefficients are
normalised so that ``coeffs[k]`` is the coefficient of ``exp(i k.x)``; the
zero mode is the mean of the samples.  Norms carry the ``(2*pi)**2`` area
factor, so they agree with the continuum integrals of band-limited fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft

from .errors import (
    DimensionError,
    GridMismatchError,
    MeanZeroError,
    SymmetryError,
)

TWO_PI = 2.0 * np.pi

#: relative size of the zero mode below which a field counts as mean-zero
MEAN_ZERO_TOL = 1e-12
#: relative imaginary residue tolerated by :func:`inverse_transform`
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform ``n x n`` grid on the 2*pi-periodic torus."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError(f"grid size must be an integer, got {self.n!r}")
        if self.n < 8 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 8, got {self.n}")

    @property
    def length(self) -> float:
        return TWO_PI

    @property
    def dx(self) -> float:
        return TWO_PI / self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates ``(x, y)`` as 2-D arrays."""
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer wavenumbers ``(k1, k2)`` in FFT order, each in ``[-n/2, n/2)``."""
        k = scipy.fft.fftfreq(self.n, d=1.0 / self.n)
        k1, k2 = np.meshgrid(k, k, indexing="ij")
        k1.setflags(write=False)
        k2.setflags(write=False)
        return k1, k2

    @cached_property
    def kmag(self) -> np.ndarray:
        k1, k2 = self.wavenumbers
        out = np.hypot(k1, k2)
        out.setflags(write=False)
        return out

    @cached_property
    def derivative_wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        # The unpaired Nyquist wavenumber -n/2 is dropped from odd derivatives
        # so that derivatives of real fields stay real.
        k1, k2 = (np.where(np.abs(k) == self.n // 2, 0.0, k) for k in self.wavenumbers)
        k1.setflags(write=False)
        k2.setflags(write=False)
        return k1, k2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True where ``max(|k1|, |k2|) <= n/3`` (two-thirds rule)."""
        k1, k2 = self.wavenumbers
        mask = np.maximum(np.abs(k1), np.abs(k2)) <= self.n / 3.0
        mask.setflags(write=False)
        return mask

    def index(self, k1: int, k2: int) -> tuple[int, int]:
        """Array index of wavenumber ``(k1, k2)``."""
        half = self.n // 2
        if not (-half <= k1 < half and -half <= k2 < half):
            raise IndexError(f"wavenumber ({k1}, {k2}) outside [-{half}, {half})")
        return (k1 % self.n, k2 % self.n)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a real scalar field.

    The coefficient array is made read-only on construction; operations
    always return new fields.
    """

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        if coeffs.shape != self.grid.shape:
            raise DimensionError(
                f"coefficient array has shape {coeffs.shape}, grid expects {self.grid.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("spectral coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_modes(cls, grid: Grid, modes: dict[tuple[int, int], complex]) -> SpectralField:
        """Build a field from a sparse ``{(k1, k2): coefficient}`` mapping."""
        coeffs = np.zeros(grid.shape, dtype=np.complex128)
        for (k1, k2), value in modes.items():
            coeffs[grid.index(k1, k2)] += value
        return cls(grid, coeffs)

    def coeff(self, k1: int, k2: int) -> complex:
        return complex(self.coeffs[self.grid.index(k1, k2)])

    @property
    def mean(self) -> complex:
        return complex(self.coeffs[0, 0])

    def scale(self) -> float:
        """Largest coefficient magnitude, used as the reference for relative checks."""
        return float(np.max(np.abs(self.coeffs)))

    def is_mean_zero(self, tol: float = MEAN_ZERO_TOL) -> bool:
        return abs(self.coeffs[0, 0]) <= tol * self.scale()

    def hermitian_defect(self) -> float:
        """Max ``|c(-k) - conj(c(k))|`` relative to the largest coefficient."""
        flipped = np.roll(self.coeffs[::-1, ::-1], 1, axis=(0, 1))
        scale = self.scale()
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(flipped - np.conj(self.coeffs))) / scale)

    def _check_grid(self, other: SpectralField):
        if other.grid != self.grid:
            raise GridMismatchError(f"grid n={self.grid.n} vs n={other.grid.n}")

    def __add__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        self._check_grid(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        self._check_grid(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            return NotImplemented
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class VelocityField:
    u_x: SpectralField
    u_y: SpectralField

    def divergence(self) -> SpectralField:
        k1, k2 = self.u_x.grid.derivative_wavenumbers
        return SpectralField(self.u_x.grid, 1j * k1 * self.u_x.coeffs + 1j * k2 * self.u_y.coeffs)

    def max_speed(self) -> float:
        ux = inverse_transform(self.u_x)
        uy = inverse_transform(self.u_y)
        return float(np.sqrt(np.max(ux * ux + uy * uy)))


def forward_transform(samples: np.ndarray, grid: Grid) -> SpectralField:
    """Fourier coefficients of real physical samples."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != grid.shape:
        raise DimensionError(f"samples have shape {samples.shape}, grid expects {grid.shape}")
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    return SpectralField(grid, scipy.fft.fft2(samples, norm="forward"))


def inverse_transform(f: SpectralField) -> np.ndarray:
    """Physical samples of ``f``; raises :class:`SymmetryError` if ``f`` is not real."""
    values = scipy.fft.ifft2(f.coeffs, norm="forward")
    scale = float(np.max(np.abs(values)))
    if scale > 0.0:
        residue = float(np.max(np.abs(values.imag))) / scale
        if residue > IMAG_TOL:
            raise SymmetryError(
                f"imaginary residue {residue:.3e} exceeds {IMAG_TOL:.0e}: coefficients not Hermitian"
            )
    return np.ascontiguousarray(values.real)


def fractional_laplacian(f: SpectralField, exponent: float) -> SpectralField:
    """Apply the Fourier multiplier ``|k|**exponent``.

    The zero mode is annihilated for any nonzero exponent.  Negative exponents
    need a mean-zero input.
    """
    if not -2.0 <= exponent <= 2.0:
        raise ValueError(f"exponent must lie in [-2, 2], got {exponent}")
    if exponent == 0:
        return f
    if exponent < 0 and not f.is_mean_zero():
        raise MeanZeroError(
            f"negative exponent {exponent} needs a mean-zero field (zero mode {f.mean:.3e})"
        )
    return SpectralField(f.grid, multiplier(f.grid, exponent) * f.coeffs)


def multiplier(grid: Grid, exponent: float) -> np.ndarray:
    """Symbol ``|k|**exponent`` with the zero mode set to zero."""
    kmag = grid.kmag
    with np.errstate(divide="ignore"):
        symbol = np.where(kmag > 0, kmag, 1.0) ** exponent
    symbol[0, 0] = 0.0
    return symbol


def gradient(f: SpectralField) -> tuple[SpectralField, SpectralField]:
    k1, k2 = f.grid.derivative_wavenumbers
    return (
        SpectralField(f.grid, 1j * k1 * f.coeffs),
        SpectralField(f.grid, 1j * k2 * f.coeffs),
    )


def velocity(theta: SpectralField, beta: float) -> VelocityField:
    """Velocity ``curl(Lambda^-beta theta)`` with ``curl(psi) = (-psi_y, psi_x)``."""
    if not 1.0 <= beta <= 2.0:
        raise ValueError(f"beta must lie in [1, 2], got {beta}")
    psi = fractional_laplacian(theta, -beta)
    psi_x, psi_y = gradient(psi)
    return VelocityField(u_x=-psi_y, u_y=psi_x)


def dealias(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, np.where(f.grid.dealias_mask, f.coeffs, 0.0))


def product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Dealiased pointwise product, formed in physical space."""
    f._check_grid(g)
    return dealias(forward_transform(inverse_transform(f) * inverse_transform(g), f.grid))


def sobolev_norm(f: SpectralField, s: float) -> float:
    """``H^s`` norm with weight ``(1 + |k|^2)^(s/2)`` on each coefficient."""
    if not -4.0 <= s <= 12.0:
        raise ValueError(f"Sobolev order must lie in [-4, 12], got {s}")
    power = np.abs(f.coeffs) ** 2
    if s != 0:
        power = power * (1.0 + f.grid.kmag**2) ** s
    return TWO_PI * float(np.sqrt(np.sum(power)))


def derivative_sum_norm(f: SpectralField, k: int) -> float:
    """``H^k`` norm as the sum of squared ``L^2`` norms of all ``D^l f`` with ``|l| <= k``."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 0 <= k <= 12:
        raise ValueError(f"derivative order must be an integer in [0, 12], got {k!r}")
    k1, k2 = f.grid.wavenumbers
    sq1, sq2 = k1**2, k2**2
    weight = np.zeros(f.grid.shape)
    for l1 in range(k + 1):
        for l2 in range(k + 1 - l1):
            weight += sq1**l1 * sq2**l2
    return TWO_PI * float(np.sqrt(np.sum(weight * np.abs(f.coeffs) ** 2)))


def l2_norm(f: SpectralField) -> float:
    return sobolev_norm(f, 0.0)
