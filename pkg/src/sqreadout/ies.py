"""Readout with an injected squeezed-vacuum reservoir (and the unsqueezed limit).

The cavity obeys  da/dt = -(i sigma chi + kappa/2) a - sqrt(kappa) a_in  with a
white squeezed input of parameter r and reference phase varphi; the cavity
fluctuations start in the corresponding stationary squeezed state while the
coherent tone switches on at t = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .core import (MeasurementMoments, QubitState, ReadoutParams, reduce_angle,
                   psi_from_rate)


@dataclass(frozen=True)
class IesConfig:
    """Injected-squeezing setting: squeeze parameter r >= 0 and reference phase."""

    r: float
    varphi: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeeze parameter must be non-negative, got {self.r}")
        object.__setattr__(self, "varphi", reduce_angle(self.varphi))


def _integrated_output_mean(params: ReadoutParams, sigma: int) -> complex:
    """sqrt(kappa) * integral of <a_out(t)> over [0, tau], from the exact mean field.

    <a(t)> = i sqrt(k) a_bar / z * (1 - exp(-izt)) with z = sigma chi - i kappa/2,
    so the integral has a closed form that stays regular for every chi.
    """
    k, tau = params.kappa, params.tau
    a_bar = params.alpha_in * cmath.exp(1j * params.phi_in)
    z = sigma * params.chi - 0.5j * k
    cavity = 1j * math.sqrt(k) * a_bar / z * (tau - (1.0 - cmath.exp(-1j * z * tau)) / (1j * z))
    return math.sqrt(k) * (a_bar * tau + math.sqrt(k) * cavity)


def ies_signal(params: ReadoutParams, state: QubitState) -> float:
    """Mean homodyne record <M> for one qubit state.

    Independent of the injected squeezing; the pointer-state difference equals
    the factored closed form
    (4 a/sqrt(k)) sin(2 psi) sin(phi_h - phi_in) {k tau - 4 cos^2 psi [1 - ...]}
    but is evaluated unfactored so sin(2 psi) = 0 needs no special casing.
    """
    p = params.normalized()
    j = _integrated_output_mean(p, int(state))
    return 2.0 * (j * cmath.exp(-1j * p.phi_h)).real


def ies_noise(params: ReadoutParams, cfg: IesConfig, state: QubitState) -> float:
    """Homodyne noise <M_N^2> for one qubit state under injected squeezing.

    The sigma-dependent rotation enters every phase as sigma*psi and
    sigma*chi*tau; at r = 0 the result is exactly kappa*tau.
    """
    p = params.normalized()
    kt = p.tau
    s = int(state)
    psi = s * psi_from_rate(p.chi, 1.0)
    ct = s * p.chi * p.tau
    d = cfg.varphi - 2.0 * p.phi_h
    bracket = (3.0 * math.cos(d)
               - (3.0 - 2.0 * kt) * math.cos(4.0 * psi - d)
               + 6.0 * math.sin(2.0 * psi) * math.sin(4.0 * psi - d)
               - 16.0 * math.exp(-kt / 2.0) * math.cos(psi) * math.sin(2.0 * psi)
               * math.sin(3.0 * psi - d + ct)
               + 4.0 * math.exp(-kt) * math.cos(psi) * math.sin(2.0 * psi)
               * math.sin(3.0 * psi - d + 2.0 * ct))
    return kt * math.cosh(2.0 * cfg.r) + 0.5 * bracket * math.sinh(2.0 * cfg.r)


def ies_noise_shape(params: ReadoutParams) -> float:
    """Shape factor F(tau) of the squeezing-sensitive part of the summed noise.

    The two-state noise sum equals
    2 kappa tau [cosh 2r + cos(varphi - 2 phi_h) sinh 2r * F(tau)],
    so the phase-optimal choice is varphi - 2 phi_h = pi when F > 0 and 0 when F < 0.
    """
    p = params.normalized()
    kt = p.tau
    if not kt > 0:
        raise ValueError("kappa*tau must be positive")
    psi = psi_from_rate(p.chi, 1.0)
    ct = p.chi * p.tau
    return (1.0 / (2.0 * kt)) * (
        3.0 + 3.0 * math.cos(2.0 * psi) - (3.0 - 2.0 * kt) * math.cos(4.0 * psi)
        - 3.0 * math.cos(6.0 * psi)
        + 4.0 * math.cos(psi) * math.sin(2.0 * psi)
        * (math.exp(-kt) * math.sin(3.0 * psi + 2.0 * ct)
           - 4.0 * math.exp(-kt / 2.0) * math.sin(3.0 * psi + ct)))


def ies_photon_number(params: ReadoutParams, cfg: IesConfig, t: float) -> float:
    """Intracavity photon number n(t) for the injected-squeezing readout."""
    if t < 0:
        raise ValueError("t must be non-negative")
    kt = params.kappa * t
    psi = psi_from_rate(params.chi, params.kappa)
    drive = (4.0 * params.alpha_in ** 2 / params.kappa) * math.cos(psi) ** 2 * (
        1.0 + math.exp(-kt) - 2.0 * math.cos(params.chi * t) * math.exp(-kt / 2.0))
    return math.sinh(cfg.r) ** 2 + drive


def ies_moments(params: ReadoutParams, cfg: IesConfig) -> MeasurementMoments:
    """Signal and noise for both qubit states."""
    return MeasurementMoments(
        signal_up=ies_signal(params, QubitState.UP),
        signal_down=ies_signal(params, QubitState.DOWN),
        noise_up=ies_noise(params, cfg, QubitState.UP),
        noise_down=ies_noise(params, cfg, QubitState.DOWN),
    )


def optimal_varphi(params: ReadoutParams) -> float:
    """Noise-minimizing squeeze phase: varphi = 2 phi_h + pi if F > 0, else 2 phi_h."""
    shift = math.pi if ies_noise_shape(params) > 0 else 0.0
    return reduce_angle(2.0 * params.phi_h + shift)
