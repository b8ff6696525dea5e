"""Gaussian phase space of the integrated output mode.

The record M at homodyne angle phi relates to the quadratures of the
time-integrated output mode A through M = 2 sqrt(kappa tau) (X cos phi + Y sin phi),
so three noise probes and two signal probes reconstruct the full Gaussian
state (mean, 2x2 covariance) without any new integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (IndefiniteCovarianceError, QubitState, ReadoutParams)
from . import combined, ics, ies

DEFAULT_PROBE_ANGLES = (0.0, math.pi / 4.0, math.pi / 2.0)
VACUUM_VARIANCE = 0.25


@dataclass(frozen=True)
class GaussianState2D:
    """Mean and covariance of (X_out, Y_out) with [X, Y] = i."""

    mean: tuple[float, float]
    cov: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        object.__setattr__(self, "cov", cov)
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * (1.0 + abs(cov[0, 1])):
            raise ValueError("covariance must be symmetric")
        eigs = np.linalg.eigvalsh(cov)
        if eigs[0] <= 0:
            raise IndefiniteCovarianceError(
                f"covariance not positive definite (eigenvalues {eigs})")

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.cov))


@dataclass(frozen=True)
class EllipseDiagnostics:
    """Noise-ellipse orientation and squeezing measures.

    theta_N : angle of the minor-variance axis from the measurement direction,
              folded into [-pi/2, pi/2]
    xi2_N   : normalized noise <M_N^2>/(kappa tau) at the measurement angle
    xi2_dB  : 10 log10 of the minor variance over the vacuum variance 1/4
    """

    theta_N: float
    xi2_N: float
    xi2_dB: float


def reconstruct_state(signal: Callable[[float], float],
                      noise: Callable[[float], float],
                      kappa: float, tau: float,
                      angles: Sequence[float] = DEFAULT_PROBE_ANGLES) -> GaussianState2D:
    """Build the Gaussian state of A from signal(phi) and noise(phi) probes.

    The probe angles are measured from the scheme's measurement direction;
    any three pairwise distinct angles (mod pi) determine the covariance.
    """
    kt = kappa * tau
    if len(angles) != 3:
        raise ValueError("exactly three probe angles are required")
    scale = 2.0 * math.sqrt(kt)
    mean = (signal(0.0) / scale, signal(math.pi / 2.0) / scale)

    rows = []
    rhs = []
    for phi in angles:
        c, s = math.cos(phi), math.sin(phi)
        rows.append([c * c, 2.0 * c * s, s * s])
        rhs.append(noise(phi) / (4.0 * kt))
    matrix = np.asarray(rows)
    if np.linalg.cond(matrix) > 1e9:
        raise ValueError(f"probe angles {angles} are degenerate (mod pi)")
    dxx, dxy, dyy = np.linalg.solve(matrix, np.asarray(rhs))
    return GaussianState2D(mean, np.array([[dxx, dxy], [dxy, dyy]]))


def ellipse(state: GaussianState2D, measurement_angle: float = 0.0) -> EllipseDiagnostics:
    """Eigen-analysis of the covariance into squeeze direction and degree."""
    cov = state.cov
    eigvals, eigvecs = np.linalg.eigh(cov)
    lam_min = float(eigvals[0])
    lam_max = float(eigvals[-1])
    if lam_max - lam_min <= 1e-12 * lam_max:
        theta = 0.0
    else:
        vx, vy = eigvecs[:, 0]
        theta = math.atan2(vy, vx)
        if theta > math.pi / 2.0:
            theta -= math.pi
        elif theta <= -math.pi / 2.0:
            theta += math.pi
    c, s = math.cos(measurement_angle), math.sin(measurement_angle)
    xi2 = 4.0 * float(np.array([c, s]) @ cov @ np.array([c, s]))
    return EllipseDiagnostics(theta_N=theta, xi2_N=xi2,
                              xi2_dB=10.0 * math.log10(lam_min / VACUUM_VARIANCE))


def wigner_grid(state: GaussianState2D, window: tuple[float, float],
                resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample W(X, Y) on a square grid; returns (x, y, W) with W[iy, ix].

    W = exp(-G^T D^-1 G / 2) / (2 pi sqrt(det D)); the grid sum times the cell
    area approaches 1 once the window covers the state.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    det = state.det
    if det <= 0:
        raise IndefiniteCovarianceError("singular covariance")
    inv = np.linalg.inv(state.cov)
    x = np.linspace(window[0], window[1], resolution)
    y = np.linspace(window[0], window[1], resolution)
    gx = x[None, :] - state.mean[0]
    gy = y[:, None] - state.mean[1]
    quad = inv[0, 0] * gx ** 2 + 2.0 * inv[0, 1] * gx * gy + inv[1, 1] * gy ** 2
    w = np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))
    return x, y, w


def pointer_state(params: ReadoutParams, cfg, state: QubitState,
                  angles: Sequence[float] = DEFAULT_PROBE_ANGLES) -> GaussianState2D:
    """Gaussian pointer state of a scheme, probed around its measurement angle.

    The X axis of the returned state is the scheme's measurement direction
    (params.phi_h for injected/intracavity squeezing, theta/2 for the combined
    scheme).
    """
    if isinstance(cfg, ies.IesConfig):
        base = params.phi_h

        def signal(phi):
            return ies.ies_signal(params.with_(phi_h=base + phi), state)

        def noise(phi):
            return ies.ies_noise(params.with_(phi_h=base + phi), cfg, state)

    elif isinstance(cfg, ics.IcsConfig):
        base = params.phi_h

        def signal(phi):
            return ics.ics_signal(params.with_(phi_h=base + phi), cfg, state)

        def noise(phi):
            return ics.ics_noise(params.with_(phi_h=base + phi), cfg, state)

    elif isinstance(cfg, combined.CombinedConfig):
        _, disp = combined.resolve_operating_point(params, cfg)
        base = cfg.theta / 2.0
        op = params.with_(phi_in=base, phi_h=base)
        if not cfg.matched:
            raise ValueError("phase-space reconstruction supports the matched scheme only")

        def signal(phi):
            return combined.combined_signal(op.with_(phi_h=base + phi), disp,
                                            cfg.r_c, cfg.theta, state)

        def noise(phi):
            return combined.combined_noise(op.with_(phi_h=base + phi), cfg.r, cfg.theta)

    else:
        raise TypeError(f"unsupported scheme config {type(cfg).__name__}")

    return reconstruct_state(signal, noise, params.kappa, params.tau, angles)
