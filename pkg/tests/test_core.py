import math

import numpy as np
import pytest

from sqreadout.core import (DegenerateNoiseError, MeasurementMoments, QubitState,
                            ReadoutParams, ZeroSignalError, fidelity_and_error,
                            psi_from_rate, reduce_angle, required_tone_amplitude,
                            snr, standard_readout_moments, summarize)
from sqreadout import combined


def make_params(kappa_tau=1.0, chi=0.5, alpha_in=1.0, phi_in=0.0,
                phi_h=math.pi / 2.0, kappa=1.0):
    return ReadoutParams(kappa, chi * kappa, alpha_in * math.sqrt(kappa),
                         phi_in, phi_h, kappa_tau / kappa)


class TestPsiFromRate:
    def test_zero_rate(self):
        assert psi_from_rate(0.0, 1.0) == 0.0

    def test_forced_by_definition(self):
        assert psi_from_rate(0.5, 1.0) == pytest.approx(math.pi / 4.0, abs=1e-15)

    def test_odd(self):
        for x in (0.1, 0.5, 2.0, 17.0):
            assert psi_from_rate(-x, 1.0) == -psi_from_rate(x, 1.0)

    def test_strictly_increasing(self):
        xs = np.linspace(-5, 5, 101)
        vals = [psi_from_rate(x, 1.0) for x in xs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_invalid_kappa(self):
        with pytest.raises(ValueError):
            psi_from_rate(1.0, 0.0)


class TestSnr:
    def test_simple(self):
        m = MeasurementMoments(1.0, -1.0, 2.0, 2.0)
        assert snr(m) == pytest.approx(1.0, abs=1e-15)

    def test_identical_pointer_states(self):
        m = MeasurementMoments(0.7, 0.7, 1.0, 3.0)
        assert snr(m) == 0.0

    def test_degenerate_noise(self):
        with pytest.raises(ValueError):
            MeasurementMoments(1.0, 0.0, -1.0, 0.5)
        with pytest.raises(DegenerateNoiseError):
            snr(MeasurementMoments(1.0, 0.0, 0.0, 0.0))

    @pytest.mark.parametrize("seed", range(5))
    def test_scale_invariance(self, seed):
        rng = np.random.default_rng(seed)
        su, sd, nu, nd = rng.uniform(0.1, 3.0, 4)
        c = rng.uniform(0.1, 10.0)
        base = snr(MeasurementMoments(su, -sd, nu, nd))
        scaled = snr(MeasurementMoments(c * su, -c * sd, c * c * nu, c * c * nd))
        assert scaled == pytest.approx(base, rel=1e-12)


class TestFidelity:
    def test_zero(self):
        assert fidelity_and_error(0.0) == (0.5, 0.5)

    def test_monotone_and_limit(self):
        grid = np.linspace(0.0, 20.0, 200)
        fids = [fidelity_and_error(s)[0] for s in grid]
        assert all(b >= a for a, b in zip(fids, fids[1:]))
        assert fids[-1] == pytest.approx(1.0, abs=1e-15)

    def test_erf_accuracy(self):
        # tabulated erf values
        assert math.erf(1.0) == pytest.approx(0.84270079294971486934, abs=1e-14)
        assert math.erf(2.0) == pytest.approx(0.99532226501895273416, abs=1e-14)
        assert math.erf(0.5) == pytest.approx(0.52049987781304653768, abs=1e-14)

    def test_reference_errors(self):
        assert fidelity_and_error(5.5)[1] == pytest.approx(4.4e-5, abs=0.7e-5)
        assert fidelity_and_error(0.18)[1] == pytest.approx(0.45, abs=0.005)

    def test_error_complements_fidelity(self):
        fid, err = fidelity_and_error(2.3)
        assert fid + err == pytest.approx(1.0, abs=1e-15)


class TestRequiredToneAmplitude:
    def test_zero_target(self):
        assert required_tone_amplitude(0.5, 0.0) == 0.0

    def test_zero_signal(self):
        with pytest.raises(ZeroSignalError):
            required_tone_amplitude(0.0, 1.0)

    @pytest.mark.parametrize("target", [0.3, 1.0, 4.0])
    def test_round_trip_standard(self, target):
        p = make_params()
        unit = snr(standard_readout_moments(p))
        a = required_tone_amplitude(unit, target)
        achieved = snr(standard_readout_moments(p.with_(alpha_in=a)))
        assert achieved == pytest.approx(target, rel=1e-9)

    def test_round_trip_combined(self):
        p = make_params(kappa_tau=0.2)
        cfg = combined.CombinedConfig(r=math.log(10.0))
        unit = snr(combined.combined_moments(p, cfg))
        a = required_tone_amplitude(unit, 1.0)
        achieved = snr(combined.combined_moments(p.with_(alpha_in=a), cfg))
        assert achieved == pytest.approx(1.0, rel=1e-9)


class TestStandardReadout:
    @pytest.mark.parametrize("kappa_tau", [0.3, 1.0, 4.0])
    def test_vacuum_noise(self, kappa_tau):
        m = standard_readout_moments(make_params(kappa_tau=kappa_tau))
        assert m.noise_up == pytest.approx(kappa_tau, rel=1e-15)
        assert m.noise_down == pytest.approx(kappa_tau, rel=1e-15)

    def test_headline_snr(self):
        assert snr(standard_readout_moments(make_params())) == pytest.approx(0.18, abs=0.005)

    def test_no_dispersive_shift(self):
        m = standard_readout_moments(make_params(chi=0.0))
        assert m.separation == 0.0

    def test_kappa_rescaling_invariance(self):
        base = standard_readout_moments(make_params())
        other = standard_readout_moments(make_params(kappa=3.7))
        assert other.signal_up == pytest.approx(base.signal_up, rel=1e-12)
        assert other.noise_up == pytest.approx(base.noise_up, rel=1e-12)


class TestParams:
    def test_angle_reduction(self):
        p = ReadoutParams(1.0, 0.5, 1.0, 3.5 * math.pi, -math.pi, 1.0)
        assert -math.pi < p.phi_in <= math.pi
        assert p.phi_in == pytest.approx(-0.5 * math.pi)
        assert p.phi_h == pytest.approx(math.pi)

    def test_reduce_angle_halfopen(self):
        assert reduce_angle(-math.pi) == pytest.approx(math.pi)
        assert reduce_angle(math.pi) == pytest.approx(math.pi)

    @pytest.mark.parametrize("kwargs", [
        {"kappa": 0.0}, {"kappa": -1.0}, {"tau": 0.0}, {"alpha_in": -0.1},
    ])
    def test_validation(self, kwargs):
        base = dict(kappa=1.0, chi=0.5, alpha_in=1.0, phi_in=0.0, phi_h=0.0, tau=1.0)
        base.update(kwargs)
        with pytest.raises(ValueError):
            ReadoutParams(**base)

    def test_summary_consistency(self):
        m = standard_readout_moments(make_params())
        s = summarize(m)
        assert s.snr == pytest.approx(s.separation / math.sqrt(s.noise_sum), rel=1e-15)
        assert s.error == pytest.approx(1.0 - s.fidelity, abs=1e-15)
        assert 0.5 <= s.fidelity <= 1.0


def test_qubit_state_values():
    assert int(QubitState.UP) == 1
    assert int(QubitState.DOWN) == -1
    assert len(list(QubitState)) == 2
