import math

import numpy as np
import pytest

from sqreadout.core import (OracleConvergenceError, QubitState, ReadoutParams,
                            StabilityError)
from sqreadout import combined, ics, ies, oracle


def make_params(kappa_tau=1.0, chi=0.5, alpha_in=1.0, phi_in=0.0,
                phi_h=math.pi / 2.0):
    return ReadoutParams(1.0, chi, alpha_in, phi_in, phi_h, kappa_tau)


class TestStandardReadout:
    def test_vacuum_variance(self):
        system = oracle.build_system(make_params(), ies.IesConfig(0.0, 0.0),
                                     QubitState.UP)
        result = oracle.oracle_moments(system, steps=8192)
        assert result.var_M == pytest.approx(1.0, rel=1e-4)
        assert result.richardson[1] == pytest.approx(1.0, rel=1e-6)

    def test_zero_tone_mean(self):
        p = make_params(alpha_in=0.0)
        system = oracle.build_system(p, ies.IesConfig(0.7, 0.4), QubitState.DOWN)
        result = oracle.oracle_moments(system, steps=4096)
        assert result.mean_M == 0.0


class TestConvergence:
    def test_first_order_doubling(self):
        p = make_params(chi=0.8)
        cfg = ies.IesConfig(0.9, 1.1)
        system = oracle.build_system(p, cfg, QubitState.UP)
        r1 = oracle.oracle_moments(system, steps=2048)   # residual over (2048, 4096)
        r2 = oracle.oracle_moments(system, steps=4096)   # residual over (4096, 8192)
        factor = abs(r1.residual[1]) / abs(r2.residual[1])
        assert factor >= 1.8

    def test_residual_certifies_error(self):
        # the reported K -> 2K residual bounds both the raw and the
        # extrapolated error against the exact value
        p = make_params(chi=0.7)
        cfg = ies.IesConfig(0.6, 0.9)
        analytic = ies.ies_noise(p, cfg, QubitState.UP)
        system = oracle.build_system(p, cfg, QubitState.UP)
        res = oracle.oracle_moments(system, steps=4096)
        certificate = 2.0 * abs(res.residual[1])
        assert abs(res.var_M - analytic) < certificate
        assert abs(res.richardson[1] - analytic) < certificate

    def test_constant_tone_mean_is_exact(self):
        # a flat bin mode represents a constant drive exactly, so the mean
        # carries no discretization error even at coarse K
        p = make_params(chi=0.7, phi_h=0.3)
        cfg = ies.IesConfig(0.6, 0.9)
        analytic = ies.ies_signal(p, QubitState.UP)
        system = oracle.build_system(p, cfg, QubitState.UP)
        res = oracle.oracle_moments(system, steps=128)
        assert res.mean_M == pytest.approx(analytic, abs=1e-10)

    def test_auto_mode_converges(self):
        p = make_params()
        system = oracle.build_system(p, ies.IesConfig(0.5, 0.3), QubitState.UP)
        res = oracle.oracle_moments_auto(system, tol=1e-5, start_steps=1024)
        assert res.steps >= 1024

    def test_auto_mode_failure(self):
        p = make_params()
        system = oracle.build_system(p, ies.IesConfig(0.5, 0.3), QubitState.UP)
        with pytest.raises(OracleConvergenceError):
            oracle.oracle_moments_auto(system, tol=1e-14, start_steps=2 ** 16)


class TestInvariants:
    def test_variance_nonnegative_and_phase_invariant(self):
        rng = np.random.default_rng(4)
        p = make_params(chi=0.6, alpha_in=1.4)
        cfg = ies.IesConfig(0.8, 0.5)
        base = oracle.oracle_moments(
            oracle.build_system(p, cfg, QubitState.UP), steps=2048)
        assert base.var_M >= 0.0
        for _ in range(3):
            shift = rng.uniform(-math.pi, math.pi)
            shifted = oracle.oracle_moments(
                oracle.build_system(p.with_(phi_in=p.phi_in + shift), cfg,
                                    QubitState.UP), steps=2048)
            assert shifted.var_M == pytest.approx(base.var_M, rel=1e-12)

    @pytest.mark.parametrize("scheme,steps", [("ies", 8192), ("ics", 8192),
                                              ("combined", 65536)])
    def test_commutator_preserved(self, scheme, steps):
        # the defect scales as (|drift| tau)^3 / K^2, so the fast-rotating
        # combined frame needs more bins for the same 1e-9 budget
        p = make_params()
        if scheme == "ies":
            system = oracle.build_system(p, ies.IesConfig(0.5, 0.2), QubitState.UP)
        elif scheme == "ics":
            system = oracle.build_system(p, ics.IcsConfig(0.2, 0.4), QubitState.UP)
        else:
            cfg = combined.CombinedConfig(r=1.0, omega_sq=4.0)
            system = oracle.build_system(combined.operating_params(p, cfg), cfg,
                                         QubitState.UP)
        assert oracle.commutator_defect(system, steps=steps) < 1e-9


class TestBuildSystem:
    def test_ies_vacuum(self):
        system = oracle.build_system(make_params(), ies.IesConfig(0.0, 0.0),
                                     QubitState.UP)
        assert system.input_corr == (0.0, 0.0)
        assert system.init_cov == (0.0, 0.0)

    def test_ics_initial_covariance(self):
        system = oracle.build_system(make_params(), ics.IcsConfig(0.125, 0.0),
                                     QubitState.UP)
        assert system.init_cov[0] == pytest.approx(1.0 / 6.0, rel=1e-12)

    def test_combined_matched_vacuum_input(self):
        cfg = combined.CombinedConfig(r=1.3, omega_sq=4.0)
        p = combined.operating_params(make_params(), cfg)
        system = oracle.build_system(p, cfg, QubitState.DOWN)
        assert system.input_corr[0] == 0.0
        assert system.input_corr[1] == 0.0
        assert system.init_cov == (0.0, 0.0)

    def test_unstable_ics_raises(self):
        with pytest.raises(StabilityError):
            oracle.build_system(make_params(chi=0.0), ics.IcsConfig(0.3, 0.0),
                                QubitState.UP)

    def test_minimum_steps(self):
        system = oracle.build_system(make_params(), ies.IesConfig(0.0, 0.0),
                                     QubitState.UP)
        with pytest.raises(ValueError):
            oracle.oracle_moments(system, steps=32)

    def test_default_steps_scale_with_rotation(self):
        p = make_params()
        slow = oracle.build_system(p, ies.IesConfig(0.0, 0.0), QubitState.UP)
        cfg = combined.CombinedConfig(r=1.0, omega_sq=200.0)
        fast = oracle.build_system(combined.operating_params(p, cfg), cfg,
                                   QubitState.UP)
        assert oracle.default_steps(fast) > oracle.default_steps(slow)
        assert oracle.default_steps(slow) == 4096


class TestNegativeControl:
    def test_corrupted_noise_fails(self):
        p = make_params()
        cfg = ies.IesConfig(0.5, 0.3)
        good = ies.ies_moments(p, cfg)
        bad = type(good)(signal_up=good.signal_up, signal_down=good.signal_down,
                         noise_up=good.noise_up * 1.01, noise_down=good.noise_down)
        assert oracle.oracle_check(p, cfg, good, steps=4096)["passed"]
        assert not oracle.oracle_check(p, cfg, bad, steps=4096)["passed"]

    def test_unphysical_moments_rejected(self):
        with pytest.raises(ValueError):
            oracle.LinearReadoutSystem(
                drift=np.diag([-0.5, -0.5]), input_mean=0.0,
                input_corr=(0.1, 1.0), init_mean=0.0, init_cov=(0.0, 0.0),
                output_transform=np.eye(2), homodyne_angle=0.0, kappa=1.0, tau=1.0)

    def test_non_symplectic_transform_rejected(self):
        with pytest.raises(ValueError):
            oracle.LinearReadoutSystem(
                drift=np.diag([-0.5, -0.5]), input_mean=0.0,
                input_corr=(0.0, 0.0), init_mean=0.0, init_cov=(0.0, 0.0),
                output_transform=2.0 * np.eye(2), homodyne_angle=0.0,
                kappa=1.0, tau=1.0)


class TestExtremeCorners:
    """Domain corners where the closed forms are most fragile."""

    def test_large_chi_long_time(self):
        p = make_params(chi=5.0, kappa_tau=20.0, phi_in=0.3, phi_h=1.2)
        cfg = ies.IesConfig(1.2, 0.7)
        assert oracle.oracle_check(p, cfg, ies.ies_moments(p, cfg))["passed"]

    def test_near_marginal_imaginary_lambda(self):
        # |lambda| = 0.479 kappa, just inside the kappa/2 stability edge
        p = make_params(chi=0.03, kappa_tau=3.0, phi_in=0.1, phi_h=0.9)
        cfg = ics.IcsConfig(0.24, 1.7)
        assert ics.ics_stability(p, cfg).stable
        assert oracle.oracle_check(p, cfg, ics.ics_moments(p, cfg),
                                   steps=16384)["passed"]

    def test_fast_bogoliubov_rotation(self):
        p = make_params(kappa_tau=5.0)
        cfg = combined.CombinedConfig(r=math.log(10.0), omega_sq=50.0, theta=2.5)
        op = combined.operating_params(p, cfg)
        assert oracle.oracle_check(op, cfg, combined.combined_moments(p, cfg))["passed"]

    def test_negative_mismatches(self):
        p = make_params(kappa_tau=5.0)
        cfg = combined.CombinedConfig(r=1.8, omega_sq=3.0, theta=-3.0,
                                      delta_r=-0.15, delta_p=-0.12)
        op = combined.operating_params(p, cfg)
        assert oracle.oracle_check(op, cfg, combined.combined_moments(p, cfg),
                                   steps=16384)["passed"]


class TestTimeDependentMean:
    def test_callable_input_mean(self):
        # a tone switched off half way: the oracle integrates whatever it is given
        p = make_params()
        base = oracle.build_system(p, ies.IesConfig(0.0, 0.0), QubitState.UP)
        gated = oracle.LinearReadoutSystem(
            drift=base.drift, input_mean=lambda t: 1.0 if t < 0.5 else 0.0,
            input_corr=base.input_corr, init_mean=base.init_mean,
            init_cov=base.init_cov, output_transform=base.output_transform,
            homodyne_angle=base.homodyne_angle, kappa=base.kappa, tau=base.tau)
        full = oracle.oracle_moments(base, steps=4096)
        part = oracle.oracle_moments(gated, steps=4096)
        assert 0 < abs(part.mean_M) < abs(full.mean_M)
        assert part.var_M == pytest.approx(full.var_M, rel=1e-12)
