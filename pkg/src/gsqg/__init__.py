"""Pseudo-spectral operator-splitting solver for the generalized SQG family.

Solves ``theta_t + u . grad(theta) + Lambda^alpha theta = 0`` with
``u = curl(Lambda^-beta theta)`` on the 2*pi-periodic square using Godunov
or Strang splitting, and measures their convergence orders.
"""

from .analysis import ConvergenceReport, ErrorSample, commutator_G, convergence_study, error_norm, fit_order
from .dynamics import ModelParams, SubstepPolicy, apply_A, apply_B, phi_A, phi_B, reference_solve
from .spectral import (
    Grid,
    SpectralField,
    VelocityField,
    dealias,
    derivative_sum_norm,
    forward_transform,
    fractional_laplacian,
    gradient,
    inverse_transform,
    sobolev_norm,
    velocity,
)
from .splitting import SchemeKind, Trajectory, evolve, godunov_step, strang_step

__version__ = "0.1.0"
