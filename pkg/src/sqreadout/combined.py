"""Readout with simultaneous injected and intracavity squeezing.

The qubit information lives on the Bogoliubov mode
beta = cosh(r_c) a + e^{i theta} sinh(r_c) a^dag of the two-photon-driven
cavity, whose frequency is omega_sq and whose dispersive shift chi_sq is
squeezing-enhanced.  Matching the injected squeezing to the drive
(r_c = r, theta - varphi = pi) turns the beta input into plain vacuum, so the
measurement noise is kappa*tau*exp(-2r) on the squeezed quadrature while the
signal rides the antisqueezed tone amplitude alpha_in*exp(r).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .core import (MeasurementMoments, QubitState, ReadoutParams, BracketError,
                   psi_from_rate, reduce_angle)
from .optimize import bisect

#: dispersive-approximation accuracy parameter used in the reference figures
DEFAULT_EPSILON = 0.05


def chi_sq(g: float, r: float, omega_sq: float, epsilon: float) -> float:
    """Squeezing-enhanced dispersive coupling of the Bogoliubov mode.

    chi_sq = chi [cosh r + sinh^2 r / (cosh r + 2 omega_sq epsilon / g)]
    with chi = g*epsilon; approaches chi*exp(r) for epsilon -> 0.
    """
    if not g > 0:
        raise ValueError("coupling g must be positive")
    if not epsilon >= 0 or not math.isfinite(epsilon):
        raise ValueError("epsilon must be a finite non-negative number")
    if epsilon > 0.25:
        warnings.warn(f"epsilon={epsilon:g} is large; the dispersive picture is dubious",
                      stacklevel=2)
    chi = g * epsilon
    return chi * (math.cosh(r) + math.sinh(r) ** 2
                  / (math.cosh(r) + 2.0 * omega_sq * epsilon / g))


def input_noise_budget(r_c: float, r: float, theta: float,
                       varphi: float) -> tuple[float, complex]:
    """Thermal and two-photon noise (N, M) seen by the Bogoliubov-mode input.

    Both vanish at the matched point r_c = r, theta - varphi = pi; residues
    below the rounding floor of the cancellation are returned as exact zeros.
    """
    chc, shc = math.cosh(r_c), math.sinh(r_c)
    ch, sh = math.cosh(r), math.sinh(r)
    n = (chc ** 2 * sh ** 2 + shc ** 2 * ch ** 2
         + 0.5 * math.cos(theta - varphi) * math.sinh(2 * r_c) * math.sinh(2 * r))
    m = 0.5 * (cmath.exp(1j * varphi) * chc ** 2 * math.sinh(2 * r)
               + cmath.exp(1j * theta) * math.sinh(2 * r_c) * sh ** 2
               + cmath.exp(1j * theta) * math.sinh(2 * r_c) * ch ** 2
               + cmath.exp(1j * (2 * theta - varphi)) * shc ** 2 * math.sinh(2 * r))
    floor = 1e-12 * (chc * ch) ** 2
    if abs(n) < floor and abs(m) < floor:
        return 0.0, 0j
    return max(n, 0.0), m


@dataclass(frozen=True)
class BogoliubovFrame:
    """Pump-frame cavity parameters that diagonalize to the Bogoliubov mode."""

    delta_c: float
    omega_2ph: float
    r_c: float
    omega_sq: float
    theta: float

    def __post_init__(self):
        if not self.delta_c ** 2 > 4.0 * self.omega_2ph ** 2:
            raise ValueError("need delta_c^2 > 4 Omega^2 for a real mode frequency")
        if self.r_c < 0:
            raise ValueError("frame squeeze parameter must be non-negative")
        object.__setattr__(self, "theta", reduce_angle(self.theta))

    @classmethod
    def from_squeeze(cls, omega_sq: float, r_c: float, theta: float = 0.0) -> "BogoliubovFrame":
        """Build the frame from the mode frequency and squeeze parameter.

        tanh(2 r_c) = 2 Omega / delta_c and omega_sq = sqrt(delta_c^2 - 4 Omega^2).
        """
        if not omega_sq > 0:
            raise ValueError("omega_sq must be positive")
        delta_c = omega_sq * math.cosh(2.0 * r_c)
        omega_2ph = 0.5 * omega_sq * math.sinh(2.0 * r_c)
        return cls(delta_c, omega_2ph, r_c, omega_sq, theta)


@dataclass(frozen=True)
class DispersiveParams:
    """Derived dispersive-frame quantities for one operating point."""

    g: float
    delta_q: float
    epsilon: float
    chi: float
    chi_sq: float
    psi_sq: float
    omega_sq: float
    omega_sigma_up: float
    omega_sigma_down: float
    psi_sigma_up: float
    psi_sigma_down: float

    @classmethod
    def derive(cls, kappa: float, chi: float, r: float, omega_sq: float,
               epsilon: float = DEFAULT_EPSILON) -> "DispersiveParams":
        """Fix (g, delta_q) from (chi, epsilon, omega_sq, r) and derive the rest."""
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        g = chi / epsilon
        delta_q = omega_sq + g * math.cosh(r) / epsilon
        csq = chi_sq(g, r, omega_sq, epsilon)
        om_up = omega_sq + csq
        om_down = omega_sq - csq
        return cls(g=g, delta_q=delta_q, epsilon=epsilon, chi=chi, chi_sq=csq,
                   psi_sq=psi_from_rate(csq, kappa), omega_sq=omega_sq,
                   omega_sigma_up=om_up, omega_sigma_down=om_down,
                   psi_sigma_up=psi_from_rate(om_up, kappa),
                   psi_sigma_down=psi_from_rate(om_down, kappa))

    def omega_sigma(self, state: QubitState) -> float:
        return self.omega_sigma_up if state == QubitState.UP else self.omega_sigma_down

    def psi_sigma(self, state: QubitState) -> float:
        return self.psi_sigma_up if state == QubitState.UP else self.psi_sigma_down

    @property
    def critical_photon_number(self) -> float:
        """n_c = 1/(4 epsilon^2), the dispersive-approximation budget."""
        return 1.0 / (4.0 * self.epsilon ** 2)


@dataclass(frozen=True)
class MismatchParams:
    """Imperfect matching r_c = r + delta_r, theta - varphi = pi + delta_p."""

    delta_r: float
    delta_p: float
    n_thermal: float
    m_corr: complex
    r0: float
    phi0: float

    @classmethod
    def derive(cls, r: float, theta: float, delta_r: float, delta_p: float) -> "MismatchParams":
        r_c = r + delta_r
        varphi = theta - math.pi - delta_p
        n, m = input_noise_budget(r_c, r, theta, varphi)
        # the transformed pure squeezed input keeps |M| = sinh(2 r0)/2 with
        # N = sinh^2(r0); near the matched point N is quadratically small and
        # rounding-fragile, so r0 is anchored on |M| instead
        r0 = 0.5 * math.asinh(2.0 * abs(m))
        phi0 = cmath.phase(m) if abs(m) > 0 else 0.0
        rounding = 1e-8 * math.cosh(r_c) ** 2 * math.cosh(r) ** 2
        if abs(n - math.sinh(r0) ** 2) > rounding * (1.0 + n):
            raise ValueError("input correlations lost purity; inconsistent (N, M) pair")
        return cls(delta_r, delta_p, math.sinh(r0) ** 2, m, r0, reduce_angle(phi0))

    @property
    def matched(self) -> bool:
        return self.delta_r == 0.0 and self.delta_p == 0.0


def _stable_squeeze_mix(r: float, c: float) -> float:
    """cosh(2r) - c*sinh(2r) without cancellation: ((1-c)e^{2r} + (1+c)e^{-2r})/2."""
    return 0.5 * ((1.0 - c) * math.exp(2.0 * r) + (1.0 + c) * math.exp(-2.0 * r))


def combined_noise(params: ReadoutParams, r: float, theta: float = 0.0) -> float:
    """Matched-scheme homodyne noise kappa*tau*[cosh 2r - cos(2 phi_h - theta) sinh 2r].

    Qubit-state independent; equals kappa*tau*exp(-2r) exactly at 2 phi_h = theta.
    """
    c = math.cos(reduce_angle(2.0 * params.phi_h - theta))
    return params.kappa_tau * _stable_squeeze_mix(r, c)


def combined_signal(params: ReadoutParams, disp: DispersiveParams, r: float,
                    theta: float, state: QubitState) -> float:
    """Mean homodyne record <M> of the matched scheme for one qubit state.

    Assumes the tone phase maximizes the Bogoliubov drive, 2 phi_in = theta,
    so the effective tone amplitude is alpha_in * e^r.
    """
    if abs(reduce_angle(2.0 * params.phi_in - theta)) > 1e-9:
        raise ValueError("combined signal requires the tone phase choice 2*phi_in = theta")
    p = params.normalized()
    kt = p.tau
    om = disp.omega_sigma(state) / params.kappa
    psi = disp.psi_sigma(state)
    thp = 2.0 * psi + p.phi_h - p.phi_in
    thm = 2.0 * psi - p.phi_h - p.phi_in
    c2 = math.cos(psi) ** 2
    ch, sh = math.cosh(r), math.sinh(r)
    pref = 2.0 * p.alpha_in * math.exp(r)
    return pref * ((2.0 - kt + 2.0 * math.cos(2.0 * psi))
                   * (math.cos(thp) * ch - math.cos(thm + theta) * sh)
                   - 4.0 * math.exp(-kt / 2.0) * c2
                   * (math.cos(thp + om * kt) * ch - math.cos(thm + theta + om * kt) * sh))


def _separation_components_signed(params: ReadoutParams,
                                  disp: DispersiveParams) -> tuple[float, float]:
    """Signed (parallel, perpendicular/e^{2r}) separations in units alpha_in/sqrt(kappa)."""
    p = params.normalized()
    kt = p.tau
    pp, pm = disp.psi_sigma_up, disp.psi_sigma_down
    vp = disp.omega_sigma_up / params.kappa * kt
    vm = disp.omega_sigma_down / params.kappa * kt
    decay = math.exp(-kt / 2.0)
    par = ((2.0 - kt + 2.0 * math.cos(2 * pm) + 2.0 * math.cos(2 * pp))
           * (math.cos(2 * pm) - math.cos(2 * pp))
           - decay * (math.cos(vm) + 2.0 * math.cos(2 * pm + vm) + math.cos(4 * pm + vm)
                      - 4.0 * math.cos(pp) ** 2 * math.cos(2 * pp + vp)))
    perp = ((2.0 - kt + 2.0 * math.cos(2 * pm)) * math.sin(2 * pm)
            - (2.0 - kt + 2.0 * math.cos(2 * pp)) * math.sin(2 * pp)
            - decay * (math.sin(vm) + 2.0 * math.sin(2 * pm + vm) + math.sin(4 * pm + vm)
                       - 4.0 * math.cos(pp) ** 2 * math.sin(2 * pp + vp)))
    return 2.0 * p.alpha_in * par, 2.0 * p.alpha_in * perp


def separation_components(params: ReadoutParams, disp: DispersiveParams,
                          r: float) -> tuple[float, float]:
    """|<M>_up - <M>_down| along and perpendicular to the measurement direction.

    The parallel component (phases 2 phi_h = theta, phi_in = phi_h) carries no
    net squeezing factor; the perpendicular one (theta - 2 phi_h = pi,
    phi_in - phi_h = pi/2) is amplified by e^{2r}.
    """
    par, perp = _separation_components_signed(params, disp)
    return abs(par), math.exp(2.0 * r) * abs(perp)


def solve_omega_sq(params: ReadoutParams, r: float,
                   epsilon: float = DEFAULT_EPSILON,
                   grid_points: int = 4096) -> float:
    """Bogoliubov-mode frequency that nulls the perpendicular separation.

    Scans a geometric grid from just below (kappa/2)sec(psi_sq) up to
    max(10, 5/(kappa tau))*kappa and bisects the first sign change to
    1e-10*kappa.  The root runs from ~pi/tau at short times to the
    time-independent (kappa/2)sec(psi_sq) at long times.
    """
    k = params.kappa
    chi = params.chi

    def perp_at(w: float) -> float:
        disp = DispersiveParams.derive(k, chi, r, w, epsilon)
        return _separation_components_signed(params, disp)[1]

    # lower edge: self-consistent long-time frequency (kappa/2)sec(psi_sq)
    w = 0.5 * k
    for _ in range(8):
        csq = chi_sq(chi / epsilon, r, w, epsilon)
        w = 0.5 * k * math.sqrt(1.0 + (2.0 * csq / k) ** 2)
    lo = 0.99 * w
    hi = max(10.0, 5.0 / params.kappa_tau) * k

    ratio = (hi / lo) ** (1.0 / grid_points)
    a = lo
    fa = perp_at(a)
    for _ in range(grid_points):
        b = a * ratio
        fb = perp_at(b)
        if fa == 0.0:
            return a
        if fa * fb < 0:
            return bisect(perp_at, a, b, tol=1e-10 * k)
        a, fa = b, fb
    raise BracketError(
        f"no perpendicular-separation sign change in omega_sq/kappa "
        f"in [{lo / k:g}, {hi / k:g}]")


def beta_photon_number(params: ReadoutParams, disp: DispersiveParams, r: float,
                       state: QubitState, t: float) -> float:
    """Photon number of the Bogoliubov mode at time t (beta-vacuum start).

    The drive seen by the mode is alpha_in * e^r, so
    n(t) = 4 (alpha_in e^r)^2/kappa cos^2(psi_sigma) [1 + e^{-kt} - 2 e^{-kt/2} cos(omega_sigma t)].
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    kt = params.kappa * t
    om = disp.omega_sigma(state)
    psi = disp.psi_sigma(state)
    amp2 = (params.alpha_in * math.exp(r)) ** 2 / params.kappa
    return 4.0 * amp2 * math.cos(psi) ** 2 * (
        1.0 + math.exp(-kt) - 2.0 * math.exp(-kt / 2.0) * math.cos(om * t))


def asymptotic_snr(limit: str, params: ReadoutParams, disp: DispersiveParams,
                   r: float, snr_std: float) -> float:
    """Short- and long-time SNR of the matched scheme relative to the standard one.

    short: 0.81 e^{2r} SNR_std;  long: (sin psi_sq / sin 2 psi) e^r SNR_std,
    with tan(psi) = 2 chi / kappa for the unsqueezed readout.
    """
    if limit == "short":
        return 0.81 * math.exp(2.0 * r) * snr_std
    if limit == "long":
        psi = psi_from_rate(params.chi, params.kappa)
        return math.sin(disp.psi_sq) / math.sin(2.0 * psi) * math.exp(r) * snr_std
    raise ValueError(f"limit must be 'short' or 'long', got {limit!r}")


def mismatch_noise(params: ReadoutParams, disp: DispersiveParams, r: float,
                   mismatch: MismatchParams, theta: float,
                   state: QubitState) -> float:
    """Homodyne noise with imperfect matching, at the squeezed angle 2 phi_h = theta.

    Sum of the white-noise floor R0, a transient filtered through the cavity R1,
    and the two-photon correlation contribution R2; collapses to
    kappa*tau*exp(-2r) when both mismatches vanish.
    """
    p = params.normalized()
    kt = p.tau
    r_c = r + mismatch.delta_r
    varphi = theta - math.pi - mismatch.delta_p
    psi = disp.psi_sigma(state)
    om_t = disp.omega_sigma(state) / params.kappa * kt

    r0_term = kt * _stable_squeeze_mix(r, -math.cos(varphi - theta))
    r1_term = (8.0 * math.exp(-2.0 * r_c - kt / 2.0) * math.cos(psi) ** 2
               * (math.cosh(kt / 2.0) - math.cos(om_t))
               * (1.0 - math.cosh(2.0 * r_c) * math.cosh(2.0 * r)
                  - math.cos(theta - varphi) * math.sinh(2.0 * r_c) * math.sinh(2.0 * r)))

    def ang(n: int) -> float:
        return n * psi + theta - mismatch.phi0

    r2_term = (math.exp(-2.0 * r_c - kt) * math.sinh(2.0 * mismatch.r0) * math.cos(psi)
               * (math.exp(kt) * ((1.0 - 2.0 * kt) * math.cos(ang(1))
                                  - 2.0 * (1.0 - kt) * math.cos(ang(3))
                                  - 3.0 * math.cos(ang(5)))
                  + 8.0 * math.exp(kt / 2.0) * math.cos(psi) * math.cos(ang(4) + om_t)
                  - 4.0 * math.cos(psi) ** 2 * math.cos(ang(3) + 2.0 * om_t)))
    return r0_term + r1_term + r2_term


@dataclass(frozen=True)
class CombinedConfig:
    """Operating point of the combined scheme.

    omega_sq = None requests the perpendicular-separation root solve.  The
    injected-squeezing phase is tied to the drive by theta - varphi = pi + delta_p.
    """

    r: float
    theta: float = 0.0
    omega_sq: Optional[float] = None
    epsilon: float = DEFAULT_EPSILON
    delta_r: float = 0.0
    delta_p: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeeze parameter must be non-negative")
        object.__setattr__(self, "theta", reduce_angle(self.theta))

    @property
    def r_c(self) -> float:
        return self.r + self.delta_r

    @property
    def varphi(self) -> float:
        return reduce_angle(self.theta - math.pi - self.delta_p)

    @property
    def matched(self) -> bool:
        return self.delta_r == 0.0 and self.delta_p == 0.0


def resolve_operating_point(params: ReadoutParams,
                            cfg: CombinedConfig) -> tuple[float, DispersiveParams]:
    """Resolve omega_sq (solving the root if unset) and the dispersive parameters.

    All signal-side quantities use the frame squeeze parameter r_c.
    """
    w = cfg.omega_sq
    if w is None:
        w = solve_omega_sq(params, cfg.r_c, cfg.epsilon)
    disp = DispersiveParams.derive(params.kappa, params.chi, cfg.r_c, w, cfg.epsilon)
    return w, disp


def operating_params(params: ReadoutParams, cfg: CombinedConfig) -> ReadoutParams:
    """Parameters with the scheme's phase convention applied (phi_h = phi_in = theta/2)."""
    half = reduce_angle(cfg.theta / 2.0)
    return params.with_(phi_h=half, phi_in=half)


def combined_moments(params: ReadoutParams, cfg: CombinedConfig,
                     disp: Optional[DispersiveParams] = None) -> MeasurementMoments:
    """Signal and noise for both qubit states, matched or mismatched.

    The measurement runs on the squeezed quadrature (phi_h = theta/2) with the
    tone along it (phi_in = phi_h); caller-supplied phi_h/phi_in are overridden
    by this operating convention.
    """
    if disp is None:
        _, disp = resolve_operating_point(params, cfg)
    op = operating_params(params, cfg)
    signals = {s: combined_signal(op, disp, cfg.r_c, cfg.theta, s) for s in QubitState}
    if cfg.matched:
        noise = combined_noise(op, cfg.r, cfg.theta)
        noises = {QubitState.UP: noise, QubitState.DOWN: noise}
    else:
        mm = MismatchParams.derive(cfg.r, cfg.theta, cfg.delta_r, cfg.delta_p)
        noises = {s: mismatch_noise(op, disp, cfg.r, mm, cfg.theta, s) for s in QubitState}
    return MeasurementMoments(signal_up=signals[QubitState.UP],
                              signal_down=signals[QubitState.DOWN],
                              noise_up=noises[QubitState.UP],
                              noise_down=noises[QubitState.DOWN])
