"""Reference-figure data sets (CSV rows) for the readout schemes.

Conventions follow the fixed-coupling reference curves: chi = kappa/2,
alpha_in = sqrt(kappa), e^r = 10 and epsilon = 1/20 for the combined scheme,
with the injected/intracavity curves optimized over the squeeze parameter in
1 <= e^r <= 10 at that same coupling.  The figS1/figS3 "optimal" data sets
additionally free the cavity response angle psi.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .core import (QubitState, ReadoutParams, fidelity_and_error,
                   required_tone_amplitude, snr, standard_readout_moments)
from . import combined, ics, ies, optimize, phasespace

R_DEFAULT = math.log(10.0)
CHI_DEFAULT = 0.5
EPS_DEFAULT = 0.05
MISMATCH_SET = (0.1, 0.05, 0.01)

FIGURES = ("fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b",
           "figS1", "figS2", "figS3", "figS4", "figS5")


def _params(kappa_tau: float, chi: float = CHI_DEFAULT, alpha_in: float = 1.0,
            phi_h: float = math.pi / 2.0) -> ReadoutParams:
    return ReadoutParams(1.0, chi, alpha_in, 0.0, phi_h, kappa_tau)


def _std_snr(kappa_tau: float, chi: float = CHI_DEFAULT) -> float:
    return snr(standard_readout_moments(_params(kappa_tau, chi)))


def combined_snr(kappa_tau: float, r: float = R_DEFAULT, chi: float = CHI_DEFAULT,
                 epsilon: float = EPS_DEFAULT, delta_r: float = 0.0,
                 delta_p: float = 0.0, alpha_in: float = 1.0) -> float:
    cfg = combined.CombinedConfig(r=r, epsilon=epsilon, delta_r=delta_r, delta_p=delta_p)
    return snr(combined.combined_moments(_params(kappa_tau, chi, alpha_in), cfg))


def kappa_tau_grid(start: float = 1e-2, stop: float = 1e2, count: int = 25) -> np.ndarray:
    return np.geomspace(start, stop, count)


def fig2a_rows(r: float = R_DEFAULT, chi: float = CHI_DEFAULT) -> list[dict]:
    """Dispersive-coupling enhancement chi_sq/chi versus omega_sq."""
    rows = []
    for w in np.linspace(0.0, 50.0, 201):
        row = {"omega_sq_over_kappa": w}
        for eps in (0.1, 0.05):
            tag = f"enhancement_eps_{eps:g}".replace(".", "_")
            row[tag] = combined.chi_sq(chi / eps, r, w, eps) / chi
        rows.append(row)
    return rows


def fig2a_inset_rows(r: float = R_DEFAULT, chi: float = CHI_DEFAULT,
                     epsilon: float = EPS_DEFAULT,
                     grid: Iterable[float] | None = None) -> list[dict]:
    """omega_sq nulling the perpendicular separation, versus kappa*tau."""
    kts = kappa_tau_grid(1e-3, 1e3, 25) if grid is None else np.asarray(list(grid))
    rows = []
    for kt in kts:
        w = combined.solve_omega_sq(_params(kt, chi), r, epsilon)
        rows.append({"kappa_tau": kt, "omega_sq_over_kappa": w,
                     "omega_sq_tau": w * kt})
    return rows


def _scheme_snrs(kt: float, r: float, chi: float, epsilon: float) -> dict:
    std = _std_snr(kt, chi)
    ies_opt = optimize.maximize_snr("ies", kt, fix_chi=chi)
    ics_opt = optimize.maximize_snr("ics", kt, fix_chi=chi)
    return {
        "kappa_tau": kt,
        "snr_combined": combined_snr(kt, r, chi, epsilon),
        "snr_ies_opt": ies_opt.best_snr,
        "snr_ics_opt": ics_opt.best_snr,
        "snr_std": std,
        "snr_std_e_r": math.exp(r) * std,
        "snr_std_e_2r": math.exp(2.0 * r) * std,
        "r_opt_ies": ies_opt.argmax["r"],
        "r_opt_ics": ics_opt.argmax["r"],
    }


def fig2b_rows(r: float = R_DEFAULT, chi: float = CHI_DEFAULT,
               epsilon: float = EPS_DEFAULT,
               grid: Iterable[float] | None = None) -> list[dict]:
    """SNR versus kappa*tau for all schemes plus the reference curves."""
    kts = kappa_tau_grid() if grid is None else np.asarray(list(grid))
    return [_scheme_snrs(kt, r, chi, epsilon) for kt in kts]


def fig2c_rows(r: float = R_DEFAULT, chi: float = CHI_DEFAULT,
               epsilon: float = EPS_DEFAULT,
               grid: Iterable[float] | None = None) -> list[dict]:
    """Measurement error versus kappa*tau for all schemes."""
    rows = []
    for base in fig2b_rows(r, chi, epsilon, grid):
        rows.append({
            "kappa_tau": base["kappa_tau"],
            "error_combined": fidelity_and_error(base["snr_combined"])[1],
            "error_ies_opt": fidelity_and_error(base["snr_ies_opt"])[1],
            "error_ics_opt": fidelity_and_error(base["snr_ics_opt"])[1],
            "error_std": fidelity_and_error(base["snr_std"])[1],
        })
    return rows


def _fig3_point(kt: float, r: float, chi: float, epsilon: float) -> dict:
    """Required tone amplitude for SNR = 1 and the implied photon numbers."""
    row = {"kappa_tau": kt}
    tau = kt

    a_comb = required_tone_amplitude(combined_snr(kt, r, chi, epsilon), 1.0)
    cfg = combined.CombinedConfig(r=r, epsilon=epsilon)
    p = _params(kt, chi, a_comb)
    _, disp = combined.resolve_operating_point(p, cfg)
    n_comb = max(combined.beta_photon_number(p, disp, r, s, tau) for s in QubitState)
    row["alpha_combined"] = a_comb
    row["n_combined"] = n_comb

    ies_opt = optimize.maximize_snr("ies", kt, fix_chi=chi)
    a_ies = required_tone_amplitude(ies_opt.best_snr, 1.0)
    cfg_i = ies.IesConfig(ies_opt.argmax["r"], 0.0)
    row["alpha_ies"] = a_ies
    row["n_ies"] = ies.ies_photon_number(_params(kt, chi, a_ies), cfg_i, tau)

    ics_opt = optimize.maximize_snr("ics", kt, fix_chi=chi)
    a_ics = required_tone_amplitude(ics_opt.best_snr, 1.0)
    p_ics = _params(kt, chi, a_ics)
    omega = ics.ics_omega_from_r(1.0, ics_opt.argmax["r"])
    cfg_c = ics.IcsConfig(omega, ics.optimal_theta(p_ics, omega))
    row["alpha_ics"] = a_ics
    row["n_ics"] = ics.ics_photon_number(p_ics, cfg_c, tau)

    a_std = required_tone_amplitude(_std_snr(kt, chi), 1.0)
    row["alpha_std"] = a_std
    row["n_std"] = ies.ies_photon_number(_params(kt, chi, a_std),
                                         ies.IesConfig(0.0, 0.0), tau)
    row["n_critical"] = 1.0 / (4.0 * epsilon ** 2)
    return row


def fig3_rows(r: float = R_DEFAULT, chi: float = CHI_DEFAULT,
              epsilon: float = EPS_DEFAULT,
              grid: Iterable[float] | None = None) -> list[dict]:
    if grid is None:
        # keep the reference points kappa*tau = 0.2 and 1 on the grid
        kts = np.unique(np.concatenate([kappa_tau_grid(0.05, 10.0, 20), [0.2, 1.0]]))
    else:
        kts = np.asarray(list(grid))
    return [_fig3_point(kt, r, chi, epsilon) for kt in kts]


def fig4a_rows(r: float = R_DEFAULT, chi: float = CHI_DEFAULT,
               epsilon: float = EPS_DEFAULT, delta_r: float = 0.1,
               grid: Iterable[float] | None = None) -> list[dict]:
    """Mismatched-scheme SNR versus kappa*tau for the standard mismatch set."""
    kts = kappa_tau_grid() if grid is None else np.asarray(list(grid))
    rows = []
    for kt in kts:
        std = _std_snr(kt, chi)
        row = {"kappa_tau": kt, "snr_std": std,
               "snr_std_e_r": math.exp(r) * std,
               "snr_std_e_2r": math.exp(2.0 * r) * std}
        for dp in MISMATCH_SET:
            tag = f"snr_dp_{dp:g}".replace(".", "_")
            row[tag] = combined_snr(kt, r, chi, epsilon, delta_r=delta_r, delta_p=dp)
        rows.append(row)
    return rows


def fig4b_rows(r: float = R_DEFAULT, chi: float = CHI_DEFAULT,
               epsilon: float = EPS_DEFAULT, kappa_tau: float = 1.0,
               count: int = 41) -> list[dict]:
    """SNR versus the mismatch magnitude at fixed kappa*tau."""
    rows = []
    for d in np.linspace(0.0, 0.2, count):
        rows.append({
            "delta": d,
            "snr_vs_delta_p": combined_snr(kappa_tau, r, chi, epsilon,
                                           delta_r=0.1, delta_p=d),
            "snr_vs_delta_r": combined_snr(kappa_tau, r, chi, epsilon,
                                           delta_r=d, delta_p=0.05),
        })
    return rows


def figS1_rows(grid: Iterable[float] | None = None) -> list[dict]:
    """Free (psi, r) optimum of the injected-squeezing readout versus kappa*tau."""
    kts = kappa_tau_grid() if grid is None else np.asarray(list(grid))
    rows = []
    for kt in kts:
        best = optimize.maximize_snr("ies", kt)
        std = optimize.maximize_snr("standard", kt)
        rows.append({"kappa_tau": kt, "snr_ies_opt": best.best_snr,
                     "psi_opt": best.argmax["psi"], "r_opt": best.argmax["r"],
                     "chi_opt_over_kappa": best.argmax["chi_over_kappa"],
                     "snr_std_opt": std.best_snr, "psi_std_opt": std.argmax["psi"]})
    return rows


def figS3_rows(grid: Iterable[float] | None = None) -> list[dict]:
    """Free (psi, r) optimum of the intracavity-squeezing readout versus kappa*tau."""
    kts = kappa_tau_grid() if grid is None else np.asarray(list(grid))
    rows = []
    for kt in kts:
        best = optimize.maximize_snr("ics", kt)
        std = optimize.maximize_snr("standard", kt)
        rows.append({"kappa_tau": kt, "snr_ics_opt": best.best_snr,
                     "psi_opt": best.argmax["psi"], "r_opt": best.argmax["r"],
                     "lambda_opt_over_kappa": best.argmax["lambda_over_kappa"],
                     "snr_std_opt": std.best_snr, "psi_std_opt": std.argmax["psi"]})
    return rows


def ies_optimal_setting(kappa_tau: float) -> tuple[ReadoutParams, ies.IesConfig]:
    """Operating point of the free IES optimum, in the mirror-symmetric frame.

    The measurement axis is phi_h = 0 and the squeeze phase is 0 or pi, so the
    two pointer-state noise ellipses are mirror images about the X axis.
    """
    best = optimize.maximize_snr("ies", kappa_tau)
    chi = best.argmax["chi_over_kappa"]
    p = ReadoutParams(1.0, chi, 1.0, -math.pi / 2.0, 0.0, kappa_tau)
    return p, ies.IesConfig(best.argmax["r"], ies.optimal_varphi(p))


def ics_optimal_setting(kappa_tau: float) -> tuple[ReadoutParams, ics.IcsConfig]:
    """Operating point of the free ICS optimum with its noise-optimal drive phase."""
    best = optimize.maximize_snr("ics", kappa_tau)
    omega = best.argmax["omega_2ph_over_kappa"]
    lam = best.argmax["lambda_over_kappa"]
    chi = math.sqrt(lam * lam + 4.0 * omega * omega)
    p = ReadoutParams(1.0, chi, 1.0, -math.pi / 2.0, 0.0, kappa_tau)
    return p, ics.IcsConfig(omega, ics.optimal_theta(p, omega))


def _ellipse_rows(setting_fn, grid: Iterable[float] | None) -> list[dict]:
    kts = kappa_tau_grid(0.1, 10.0, 17) if grid is None else np.asarray(list(grid))
    rows = []
    for kt in kts:
        p, cfg = setting_fn(kt)
        row = {"kappa_tau": kt}
        for state in QubitState:
            st = phasespace.pointer_state(p, cfg, state)
            diag = phasespace.ellipse(st)
            tag = state.name.lower()
            row[f"theta_N_{tag}"] = diag.theta_N
            row[f"xi2_{tag}"] = diag.xi2_N
            row[f"xi2_dB_{tag}"] = diag.xi2_dB
        rows.append(row)
    return rows


def figS2_rows(grid: Iterable[float] | None = None) -> list[dict]:
    """Squeeze direction and degree of the optimal-IES pointer states."""
    return _ellipse_rows(ies_optimal_setting, grid)


def figS4_rows(grid: Iterable[float] | None = None) -> list[dict]:
    """Squeeze direction and degree of the optimal-ICS pointer states."""
    return _ellipse_rows(ics_optimal_setting, grid)


def figS5_rows(chi: float = CHI_DEFAULT, r: float = 1.0,
               epsilon: float = EPS_DEFAULT) -> list[dict]:
    """Combined-scheme pointer-state diagnostics at kappa*tau in {1, 2, 5}."""
    rows = []
    for kt in (1.0, 2.0, 5.0):
        p = _params(kt, chi)
        cfg = combined.CombinedConfig(r=r, epsilon=epsilon)
        row = {"kappa_tau": kt}
        for state in QubitState:
            st = phasespace.pointer_state(p, cfg, state)
            diag = phasespace.ellipse(st)
            tag = state.name.lower()
            row[f"mean_x_{tag}"] = st.mean[0]
            row[f"mean_y_{tag}"] = st.mean[1]
            row[f"theta_N_{tag}"] = diag.theta_N
            row[f"xi2_dB_{tag}"] = diag.xi2_dB
        rows.append(row)
    return rows


_FIGURE_BUILDERS = {
    "fig2a": lambda: {"fig2a": fig2a_rows(), "fig2a_inset": fig2a_inset_rows()},
    "fig2b": lambda: {"fig2b": fig2b_rows()},
    "fig2c": lambda: {"fig2c": fig2c_rows()},
    "fig3a": lambda: {"fig3a": fig3_rows()},
    "fig3b": lambda: {"fig3b": fig3_rows()},
    "fig4a": lambda: {"fig4a": fig4a_rows()},
    "fig4b": lambda: {"fig4b": fig4b_rows()},
    "figS1": lambda: {"figS1": figS1_rows()},
    "figS2": lambda: {"figS2": figS2_rows()},
    "figS3": lambda: {"figS3": figS3_rows()},
    "figS4": lambda: {"figS4": figS4_rows()},
    "figS5": lambda: {"figS5": figS5_rows()},
}


def figure_tables(name: str) -> dict[str, list[dict]]:
    """All CSV tables for one figure, keyed by file stem."""
    if name not in _FIGURE_BUILDERS:
        raise KeyError(f"unknown figure {name!r}; expected one of {FIGURES}")
    return _FIGURE_BUILDERS[name]()
