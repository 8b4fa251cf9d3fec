"""Diffusion and transport operators and their flows."""

import warnings

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gsqg import dynamics, spectral
from gsqg.dynamics import ModelParams, SubstepPolicy
from gsqg.errors import ConfigurationError, MeanZeroError, TransportGrowthWarning
from gsqg.presets import build_ic
from gsqg.spectral import Grid, SpectralField

from .conftest import random_field
from .test_spectral import X, Y, symbolic_samples

COS_X = {(1, 0): 0.5, (-1, 0): 0.5}


@pytest.fixture
def cos_x(grid32):
    return SpectralField.from_modes(grid32, COS_X)


class TestParams:
    @pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (2.1, 1.0), (1.0, 0.9), (1.0, 2.5)])
    def test_ranges(self, alpha, beta):
        with pytest.raises(ValueError):
            ModelParams(alpha, beta)

    def test_policy_substep(self, grid32):
        policy = SubstepPolicy(max_substep=0.1, cfl_fraction=0.5)
        assert policy.substep(grid32, 0.0) == 0.1
        assert policy.substep(grid32, 100.0) == pytest.approx(0.5 * grid32.dx / 100.0)

    @pytest.mark.parametrize("kwargs", [{"max_substep": 0.0}, {"cfl_fraction": 0.0}, {"cfl_fraction": 1.5}])
    def test_policy_ranges(self, kwargs):
        with pytest.raises(ValueError):
            SubstepPolicy(**kwargs)

    def test_for_step(self):
        assert SubstepPolicy.for_step(0.08).max_substep == pytest.approx(0.01)


class TestApplyA:
    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0])
    def test_cos_x(self, cos_x, alpha):
        assert np.array_equal(dynamics.apply_A(cos_x, ModelParams(alpha, 1)).coeffs, -cos_x.coeffs)

    def test_constant(self, grid32):
        out = dynamics.apply_A(SpectralField.from_modes(grid32, {(0, 0): 3.0}), ModelParams(1, 1))
        assert not out.coeffs.any()

    def test_cos_2x_laplacian(self, grid32):
        f = SpectralField.from_modes(grid32, {(2, 0): 0.5, (-2, 0): 0.5})
        out = dynamics.apply_A(f, ModelParams(2, 1))
        np.testing.assert_allclose(out.coeffs, -4 * f.coeffs, rtol=1e-15)


class TestApplyB:
    def symbolic_B(self, theta, beta_one_psi):
        """Oracle for -u.grad(theta) given the streamfunction psi."""
        u = (-sp.diff(beta_one_psi, Y), sp.diff(beta_one_psi, X))
        return -(u[0] * sp.diff(theta, X) + u[1] * sp.diff(theta, Y))

    def test_cos_x(self, cos_x):
        out = dynamics.apply_B(cos_x, ModelParams(1, 1))
        assert np.max(np.abs(out.coeffs)) < 1e-15

    def test_unit_shell(self, grid32):
        theta = sp.cos(X) + sp.cos(Y)
        assert sp.simplify(self.symbolic_B(theta, theta)) == 0
        f = spectral.forward_transform(symbolic_samples(grid32, theta), grid32)
        assert np.max(np.abs(dynamics.apply_B(f, ModelParams(1, 1.7)).coeffs)) < 1e-14

    def test_two_mode(self, grid32):
        theta = sp.cos(X) + sp.cos(2 * Y)
        psi = sp.cos(X) + sp.cos(2 * Y) / 2
        expected = sp.simplify(self.symbolic_B(theta, psi))
        assert sp.simplify(expected + sp.sin(X) * sp.sin(2 * Y)) == 0
        out = dynamics.apply_B(build_ic("two_mode", grid32), ModelParams(1, 1))
        np.testing.assert_allclose(spectral.inverse_transform(out), symbolic_samples(grid32, expected), atol=1e-14)

    @pytest.mark.parametrize("beta", [1.0, 1.5, 2.0])
    def test_mean_zero_output(self, grid64, beta):
        out = dynamics.apply_B(random_field(grid64, 4), ModelParams(1, beta))
        assert abs(out.mean) <= 1e-12 * out.scale()

    def test_output_dealiased(self, grid64):
        out = dynamics.apply_B(random_field(grid64, 4), ModelParams(1, 1))
        assert not out.coeffs[~grid64.dealias_mask].any()

    def test_requires_mean_zero(self, grid32):
        f = SpectralField.from_modes(grid32, {(0, 0): 1.0, **COS_X})
        with pytest.raises(MeanZeroError):
            dynamics.apply_B(f, ModelParams(1, 1))


class TestPhiA:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_cos_x(self, cos_x, alpha):
        out = dynamics.phi_A(0.7, cos_x, ModelParams(alpha, 1))
        np.testing.assert_allclose(out.coeffs, np.exp(-0.7) * cos_x.coeffs, rtol=1e-15)

    def test_identity_at_zero(self, grid32):
        f = random_field(grid32, 0)
        assert dynamics.phi_A(0.0, f, ModelParams(1, 1)) is f

    def test_cos_2x(self, grid32):
        f = SpectralField.from_modes(grid32, {(2, 0): 0.5, (-2, 0): 0.5})
        out = dynamics.phi_A(0.5, f, ModelParams(2, 1))
        assert out.coeff(2, 0).real == pytest.approx(0.5 * np.exp(-2.0), rel=1e-15)

    def test_negative_time(self, cos_x):
        with pytest.raises(ValueError):
            dynamics.phi_A(-0.1, cos_x, ModelParams(1, 1))

    def test_keeps_mean(self, grid32):
        f = SpectralField.from_modes(grid32, {(0, 0): 2.0, **COS_X})
        assert dynamics.phi_A(1.0, f, ModelParams(1, 1)).mean == 2.0

    @settings(max_examples=30, deadline=None)
    @given(s=st.floats(0, 2), t=st.floats(0, 2), alpha=st.floats(0.1, 2.0), seed=st.integers(0, 1000))
    def test_semigroup(self, s, t, alpha, seed):
        f = random_field(Grid(16), seed)
        p = ModelParams(alpha, 1)
        lhs = dynamics.phi_A(s, dynamics.phi_A(t, f, p), p)
        rhs = dynamics.phi_A(s + t, f, p)
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-13 * f.scale()

    @pytest.mark.parametrize("s", [-2.0, 0.0, 1.0, 3.0])
    def test_norms_nonincreasing(self, grid32, s):
        f = random_field(grid32, 8)
        p = ModelParams(1.3, 1)
        norms = [spectral.sobolev_norm(dynamics.phi_A(t, f, p), s) for t in np.linspace(0, 2, 21)]
        assert all(b <= a for a, b in zip(norms, norms[1:]))


class TestPhiB:
    def test_steady(self, cos_x):
        out = dynamics.phi_B(2.0, cos_x, ModelParams(1, 1))
        assert np.max(np.abs(out.coeffs - cos_x.coeffs)) < 1e-15

    def test_zero_time(self, grid32):
        f = random_field(grid32, 1)
        assert dynamics.phi_B(0.0, f, ModelParams(1, 1)) is f

    def test_l2_conserved_classic_shear(self):
        theta0 = build_ic("classic_shear", Grid(128))
        out = dynamics.phi_B(1.0, theta0, ModelParams(1, 1), SubstepPolicy())
        l2 = spectral.l2_norm(theta0)
        assert abs(spectral.l2_norm(out) - l2) <= 1e-8 * l2
        assert abs(out.mean) <= 1e-12 * out.scale()

    @pytest.mark.parametrize("beta", [1.0, 2.0])
    def test_l2_conserved_random(self, grid32, beta):
        theta0 = random_field(grid32, 3, band=6, decay=2.0)
        out = dynamics.phi_B(0.5, theta0, ModelParams(1, beta), SubstepPolicy(0.01))
        l2 = spectral.l2_norm(theta0)
        assert abs(spectral.l2_norm(out) - l2) <= 1e-8 * l2

    def test_substep_underflow(self, grid32):
        f = build_ic("classic_shear", grid32)
        with pytest.raises(ConfigurationError):
            dynamics.phi_B(1.0, f, ModelParams(1, 1), SubstepPolicy(max_substep=1e-14))

    def test_requires_mean_zero(self, grid32):
        f = SpectralField.from_modes(grid32, {(0, 0): 1.0, **COS_X})
        with pytest.raises(MeanZeroError):
            dynamics.phi_B(0.1, f, ModelParams(1, 1))

    def test_growth_diagnostic(self, grid32, monkeypatch):
        f = build_ic("classic_shear", grid32)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            dynamics.phi_B(0.1, f, ModelParams(1, 1))
        monkeypatch.setattr(dynamics, "GROWTH_LIMIT", 0.0)
        with pytest.warns(TransportGrowthWarning):
            dynamics.phi_B(0.1, f, ModelParams(1, 1))


class TestReference:
    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_steady_mode(self, cos_x, alpha):
        out = dynamics.reference_solve(1.0, cos_x, ModelParams(alpha, 1), 0.05)
        assert spectral.l2_norm(out - np.exp(-1.0) * cos_x) <= 1e-10

    def test_zero_time(self, grid32):
        f = random_field(grid32, 2)
        assert dynamics.reference_solve(0.0, f, ModelParams(1, 1), 0.1) is f

    def test_non_divisible(self, cos_x):
        with pytest.raises(ConfigurationError, match="multiple"):
            dynamics.reference_solve(1.0, cos_x, ModelParams(1, 1), 0.3)

    def test_richardson_fourth_order(self, grid32):
        theta0 = build_ic("classic_shear", grid32)
        p = ModelParams(1, 1)
        sols = [dynamics.reference_solve(0.5, theta0, p, 0.05 / 2**j) for j in range(3)]
        ratio = spectral.l2_norm(sols[0] - sols[1]) / spectral.l2_norm(sols[1] - sols[2])
        assert 12 <= ratio <= 20

    def test_l2_nonincreasing(self, grid32):
        theta = random_field(grid32, 6, band=6, decay=1.5)
        p = ModelParams(0.7, 1.2)
        norms = [spectral.l2_norm(theta)]
        norms += [spectral.l2_norm(s) for s in dynamics.reference_steps(0.5, theta, p, 0.01)]
        assert max(np.diff(norms)) <= 1e-10

    def test_mean_preserved(self, grid32):
        out = dynamics.reference_solve(0.2, random_field(grid32, 7), ModelParams(1, 1), 0.01)
        assert abs(out.mean) <= 1e-12 * out.scale()
