"""Readout with intracavity squeezing from a two-photon (parametric) drive.

The cavity obeys
    da/dt = -(i sigma chi + kappa/2) a - 2i Omega e^{i theta} a^dag - sqrt(kappa) a_in
with vacuum input, starting from the stationary state of the driven cavity.
All closed forms are evaluated in complex arithmetic so that the degenerate-
parametric branch lambda = sqrt(chi^2 - 4 Omega^2) imaginary needs no rewrites;
results are projected back to the real axis with a residue check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .core import (MeasurementMoments, QubitState, ReadoutParams, StabilityError,
                   reduce_angle)

# formulas are analytic in lambda^2; a tiny offset removes the removable
# singularity of the cot(psi)/csc(psi) groupings at chi = 2 Omega
_LAMBDA_FLOOR = 1e-7
_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class IcsConfig:
    """Two-photon drive setting: amplitude Omega >= 0 (rate units) and phase theta."""

    omega_2ph: float
    theta: float = 0.0

    def __post_init__(self):
        if self.omega_2ph < 0:
            raise ValueError(f"two-photon amplitude must be non-negative, got {self.omega_2ph}")
        object.__setattr__(self, "theta", reduce_angle(self.theta))


@dataclass(frozen=True)
class StabilityReport:
    """Verdict on the two-photon-driven cavity operating point."""

    stable: bool
    steady_state_ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.stable and self.steady_state_ok


def ics_lambda(chi: float, omega_2ph: float) -> complex:
    """Oscillation rate lambda = sqrt(chi^2 - 4 Omega^2), principal branch."""
    return cmath.sqrt(complex(chi * chi - 4.0 * omega_2ph * omega_2ph, 0.0))


def _lambda_safe(chi: float, omega_2ph: float, kappa: float) -> complex:
    lam = ics_lambda(chi, omega_2ph)
    if abs(lam) < _LAMBDA_FLOOR * kappa:
        return complex(_LAMBDA_FLOOR * kappa, 0.0)
    return lam


def _real(value: complex, scale: float = 1.0) -> float:
    residue = abs(value.imag)
    if residue > _IMAG_TOL * max(1.0, abs(value.real), scale):
        raise ArithmeticError(f"imaginary residue {residue:g} too large in ICS evaluation")
    return value.real


def ics_stability(params: ReadoutParams, cfg: IcsConfig) -> StabilityReport:
    """Check mean-field stability and existence of the stationary fluctuation state."""
    lam = ics_lambda(params.chi, cfg.omega_2ph)
    if abs(lam.imag) > 0 and abs(lam) >= params.kappa / 2.0:
        stable, reason = False, (f"imaginary lambda with |lambda|={abs(lam):g} "
                                 f">= kappa/2={params.kappa / 2:g}")
    else:
        stable, reason = True, "lambda real" if lam.imag == 0 else "imaginary lambda below kappa/2"
    steady = 4.0 * cfg.omega_2ph < params.kappa
    if not steady:
        reason += "; no stationary state: 4*Omega >= kappa"
    return StabilityReport(stable, steady, reason)


def _require_stable(params: ReadoutParams, cfg: IcsConfig) -> None:
    verdict = ics_stability(params, cfg)
    if not verdict:
        raise StabilityError(verdict.reason)


@dataclass(frozen=True)
class IcsPropagators:
    """Time-domain propagators of the two-photon-driven cavity.

    a(t) = Lambda(t) a(0) - Gamma(t) a^dag(0) + input terms; Lambda(0) = 1,
    Gamma(0) = 0, both decaying as exp(-kappa t / 2) on stable points.
    """

    lam: complex
    Lambda_t: Callable[[float], complex]
    Gamma_t: Callable[[float], complex]


def _sinc(z: complex) -> complex:
    """sin(z)/z, regular at z = 0."""
    if abs(z) < 1e-6:
        return 1.0 - z * z / 6.0
    return cmath.sin(z) / z


def ics_propagators(params: ReadoutParams, cfg: IcsConfig, state: QubitState) -> IcsPropagators:
    """Closed-form Lambda(t), Gamma(t) for one qubit state."""
    k = params.kappa
    s = int(state)
    chi = params.chi
    lam = ics_lambda(chi, cfg.omega_2ph)
    phase = cmath.exp(1j * cfg.theta)

    def Lambda_t(t: float) -> complex:
        return (cmath.cos(lam * t) - 1j * s * chi * t * _sinc(lam * t)) * math.exp(-k * t / 2.0)

    def Gamma_t(t: float) -> complex:
        return 2j * phase * cfg.omega_2ph * t * _sinc(lam * t) * math.exp(-k * t / 2.0)

    return IcsPropagators(lam, Lambda_t, Gamma_t)


def ics_mean_field(params: ReadoutParams, cfg: IcsConfig, state: QubitState,
                   t: float) -> complex:
    """Coherent cavity amplitude <a(t)> under the tone, from <a(0)> = 0."""
    _require_stable(params, cfg)
    if t < 0:
        raise ValueError("t must be non-negative")
    k = params.kappa
    s = int(state)
    chi, om = params.chi, cfg.omega_2ph
    lam = _lambda_safe(chi, om, k)
    pref = 2.0 * math.sqrt(k) * params.alpha_in / (k * k + 4.0 * lam * lam)
    e_in = cmath.exp(1j * params.phi_in)
    e_out = cmath.exp(1j * (cfg.theta - params.phi_in))
    t0 = 4j * om * e_out - (k - 2j * s * chi) * e_in
    ts = -((2.0 * lam * lam + 1j * k * s * chi) * e_in + 2j * om * k * e_out) / lam
    tc = (k - 2j * s * chi) * e_in - 4j * om * e_out
    decay = math.exp(-k * t / 2.0)
    return pref * (t0 + ts * cmath.sin(lam * t) * decay + tc * cmath.cos(lam * t) * decay)


def _integrated_output_mean(params: ReadoutParams, cfg: IcsConfig, sigma: int) -> complex:
    """sqrt(kappa) * integral of <a_out(t)> dt over [0, tau], term-by-term closed form."""
    k, tau = params.kappa, params.tau
    chi, om = params.chi, cfg.omega_2ph
    lam = _lambda_safe(chi, om, k)
    pref = 2.0 * math.sqrt(k) * params.alpha_in / (k * k + 4.0 * lam * lam)
    e_in = cmath.exp(1j * params.phi_in)
    e_out = cmath.exp(1j * (cfg.theta - params.phi_in))
    t0 = 4j * om * e_out - (k - 2j * sigma * chi) * e_in
    ts = -((2.0 * lam * lam + 1j * k * sigma * chi) * e_in + 2j * om * k * e_out)
    tc = (k - 2j * sigma * chi) * e_in - 4j * om * e_out
    half_k = k / 2.0
    den = lam * lam + half_k * half_k
    decay = cmath.exp(-k * tau / 2.0)
    # int sin(lam t)/lam e^{-kt/2} dt  and  int cos(lam t) e^{-kt/2} dt
    int_s = (1.0 - decay * (cmath.cos(lam * tau) + half_k * tau * _sinc(lam * tau))) / den
    int_c = (half_k + decay * (lam * cmath.sin(lam * tau) - half_k * cmath.cos(lam * tau))) / den
    integral = t0 * tau + ts * int_s + tc * int_c
    a_bar = params.alpha_in * e_in
    return math.sqrt(k) * (a_bar * tau + math.sqrt(k) * pref * integral)


def ics_signal(params: ReadoutParams, cfg: IcsConfig, state: QubitState) -> float:
    """Mean homodyne record <M> for one qubit state."""
    _require_stable(params, cfg)
    p = params.normalized()
    cfg_n = IcsConfig(cfg.omega_2ph / params.kappa, cfg.theta)
    j = _integrated_output_mean(p, cfg_n, int(state))
    return 2.0 * (j * cmath.exp(-1j * p.phi_h)).real


def ics_signal_separation(params: ReadoutParams, cfg: IcsConfig) -> float:
    """Pointer-state separation <M>_up - <M>_down.

    Equals the factored closed form
    (16 (chi/kappa) a / sqrt(kappa)) cos^2 psi sin(phi_h - phi_in) {kappa tau - ...}
    with tan(psi) = 2 lambda / kappa, evaluated here through the per-state means
    so it stays regular at sin(2 psi) = 0.
    """
    return ics_signal(params, cfg, QubitState.UP) - ics_signal(params, cfg, QubitState.DOWN)


def ics_noise_components(params: ReadoutParams, cfg: IcsConfig) -> tuple[float, float, float]:
    """Noise decomposition (G0, Gs, Gc):

    <M_N^2> = G0 - sin(2 phi_h - theta) Gs + (sigma chi / kappa) cos(2 phi_h - theta) Gc.
    """
    _require_stable(params, cfg)
    p = params.normalized()
    k = 1.0
    kt = p.tau
    om = cfg.omega_2ph / params.kappa
    lam = _lambda_safe(p.chi, om, k)
    psi = cmath.atan(2.0 * lam / k)
    r = ics_squeeze_param(k, om)
    lt = lam * p.tau
    cs, sn = cmath.cos, cmath.sin
    cot = cs(psi) / sn(psi)
    th2 = math.tanh(r / 2.0)
    ch = math.cosh(r)
    ekt = math.exp(-kt)
    ek2 = math.exp(-kt / 2.0)

    g0 = (0.5 * kt * (1.0 + ch + (5.0 + 8.0 * cs(2 * psi) + 2.0 * cs(4 * psi) - ch) * th2 ** 2)
          - 2.0 * cs(psi) ** 2 * (5.0 + 3.0 * cs(4 * psi) + cs(2 * psi) * (9.0 - 2.0 * ch)
                                  - 3.0 * ch) * th2 ** 2
          - ekt * (2.0 - cs(2 * psi + 2 * lt) - cs(4 * psi + 2 * lt))
          * (cs(2 * psi) - ch) * cot ** 2 * th2 ** 2
          - 8.0 * ek2 * cs(psi) ** 2 * th2 ** 2 * (
              (cs(lt) - cot * sn(4 * psi + lt)) * math.cosh(r / 2.0) ** 2
              + 4.0 * cs(psi) ** 2 * cot * sn(2 * psi + lt) * math.sinh(r / 2.0) ** 2))

    gs = (2.0 * cs(psi) ** 2 * (-1.0 - 3.0 * cs(4 * psi) + ch
                                + cs(2 * psi) * (-3.0 + 2.0 * kt + 2.0 * ch)) * th2
          - 2.0 * ekt * cs(psi) * cot * sn(3 * psi + 2 * lt) * (cs(2 * psi) - ch) * th2
          - 4.0 * ek2 * cs(psi) * cot * (sn(3 * psi + lt) * math.sinh(r)
                                         - 2.0 * cs(psi) * sn(4 * psi + lt) * th2))

    # sinh^2(r/2) coth(r/2) is rewritten as sinh(r)/2 so that r -> 0 stays finite
    gc = (8.0 * cs(psi) ** 4 * (3.0 - 2.0 * kt + 6.0 * cs(2 * psi) - 2.0 * ch) * th2
          - 16.0 * ek2 * cs(psi) ** 4 * cot * (
              0.5 * math.sinh(r) / cs(psi) ** 2 * sn(4 * psi + lt)
              - 4.0 * math.sinh(r / 2.0) ** 2 * th2 * sn(2 * psi + lt))
          + 8.0 * ekt * cs(psi) ** 2 * math.sinh(r / 2.0) * (
              cs(psi) * cs(3 * psi + 2 * lt) * math.cosh(r / 2.0)
              - (1.0 - cs(psi) * cs(3 * psi + 2 * lt)) * cot ** 2
              * math.sinh(r / 2.0) * th2))

    scale = kt * math.cosh(r) + 1.0
    return _real(g0, scale), _real(gs, scale), _real(gc, scale)


def ics_noise(params: ReadoutParams, cfg: IcsConfig, state: QubitState) -> float:
    """Homodyne noise <M_N^2> for one qubit state under the two-photon drive."""
    g0, gs, gc = ics_noise_components(params, cfg)
    p = params.normalized()
    d = 2.0 * p.phi_h - cfg.theta
    return g0 - math.sin(d) * gs + int(state) * p.chi * math.cos(d) * gc


def ics_squeeze_param(kappa: float, omega_2ph: float) -> float:
    """Output-field squeeze parameter r = ln[(kappa + 4 Omega)/(kappa - 4 Omega)]."""
    if not 0 <= 4.0 * omega_2ph < kappa:
        raise ValueError(f"need 0 <= 4*Omega < kappa, got Omega={omega_2ph}, kappa={kappa}")
    return math.log((kappa + 4.0 * omega_2ph) / (kappa - 4.0 * omega_2ph))


def ics_omega_from_r(kappa: float, r: float) -> float:
    """Inverse map: two-photon amplitude giving output squeeze parameter r."""
    if r < 0:
        raise ValueError("squeeze parameter must be non-negative")
    return 0.25 * kappa * (math.exp(r) - 1.0) / (math.exp(r) + 1.0)


def ics_photon_number(params: ReadoutParams, cfg: IcsConfig, t: float) -> float:
    """Intracavity photon number n(t) = fluctuation part + |<a(t)>|^2.

    The fluctuation part is drive-independent; the coherent part carries the
    full dependence on the tone phase relative to the two-photon drive (the
    parametric interaction amplifies or deamplifies the displacement).
    """
    _require_stable(params, cfg)
    if t < 0:
        raise ValueError("t must be non-negative")
    k = params.kappa
    om = cfg.omega_2ph
    lam = _lambda_safe(params.chi, om, k)
    psi = cmath.atan(2.0 * lam / k)
    r = ics_squeeze_param(k, om)
    lt = lam * t
    q0 = ((2.0 - cmath.cos(2 * lt) - cmath.cos(2 * psi + 2 * lt))
          * (cmath.cos(2 * psi) - math.cosh(r)) / cmath.sin(psi) ** 2)
    fluct = _real((4.0 * cmath.cos(psi) ** 2 - math.exp(-k * t) * q0)
                  * math.tanh(r / 2.0) ** 2 / 8.0)
    mean = ics_mean_field(params, cfg, QubitState.UP, t)
    return fluct + abs(mean) ** 2


def ics_initial_correlations(kappa: float, cfg: IcsConfig) -> tuple[float, complex]:
    """Stationary cavity-fluctuation moments (<A^dag A>, <A A>) before the tone."""
    if not 4.0 * cfg.omega_2ph < kappa:
        raise StabilityError("no stationary state: 4*Omega >= kappa")
    den = kappa * kappa - 16.0 * cfg.omega_2ph ** 2
    n0 = 8.0 * cfg.omega_2ph ** 2 / den
    m0 = -1j * cmath.exp(1j * cfg.theta) * 2.0 * kappa * cfg.omega_2ph / den
    return n0, m0


def ics_moments(params: ReadoutParams, cfg: IcsConfig) -> MeasurementMoments:
    """Signal and noise for both qubit states."""
    return MeasurementMoments(
        signal_up=ics_signal(params, cfg, QubitState.UP),
        signal_down=ics_signal(params, cfg, QubitState.DOWN),
        noise_up=ics_noise(params, cfg, QubitState.UP),
        noise_down=ics_noise(params, cfg, QubitState.DOWN),
    )


def optimal_theta(params: ReadoutParams, cfg_omega: float) -> float:
    """Noise-minimizing drive phase: 2 phi_h - theta = pi/2 on the Gs > 0 branch."""
    probe = IcsConfig(cfg_omega, 0.0)
    _, gs, _ = ics_noise_components(params, probe)
    shift = math.pi / 2.0 if gs >= 0 else -math.pi / 2.0
    return reduce_angle(2.0 * params.phi_h - shift)
