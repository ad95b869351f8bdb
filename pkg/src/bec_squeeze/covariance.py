"""Spin moments, covariance, transverse squeezing and loss-induced diffusion.

Functions accept leading batch axes (time) wherever that comes for free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlators import CorrelatorSet
from .errors import NonRealMoment, ZeroMeanSpin

IMAG_TOL = 1e-8
ZERO_MEAN_TOL = 1e-6


@dataclass
class SpinMoments:
    Jx: np.ndarray
    Jy: np.ndarray
    Jz: np.ndarray
    Jx2: np.ndarray
    Jy2: np.ndarray
    Jz2: np.ndarray
    sym_xy: np.ndarray
    sym_xz: np.ndarray
    sym_yz: np.ndarray
    J_stored: np.ndarray

    @property
    def mean(self) -> np.ndarray:
        return np.stack([self.Jx, self.Jy, self.Jz], axis=-1)

    def second(self) -> np.ndarray:
        rows = [[self.Jx2, self.sym_xy, self.sym_xz],
                [self.sym_xy, self.Jy2, self.sym_yz],
                [self.sym_xz, self.sym_yz, self.Jz2]]
        return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def _real(z, scale, what):
    z = np.asarray(z)
    resid = np.abs(z.imag)
    if np.any(resid > IMAG_TOL * scale):
        raise NonRealMoment(f"{what}: imaginary residue {float(np.max(resid / scale)):.3g} (relative)")
    return z.real


def assemble_moments(E: CorrelatorSet, Jz_mean, Jz2_mean, J_stored) -> SpinMoments:
    """First and symmetrized second moments from the twelve correlators."""
    e = E.E
    Js = np.asarray(J_stored, dtype=float)
    iso = 0.5 * (Js * (Js + 1.0) - Jz2_mean)
    scale = np.maximum(Js * (Js + 1.0), 1.0)
    s34 = _real(e[3] + e[2], scale, "Jx2/Jy2")
    Cxz = (e[11] - e[10]) + (e[9] - e[8]) + (e[6] - e[4]) + (e[7] - e[5])
    Cyz = (e[10] - e[11]) + (e[9] - e[8]) + (e[6] - e[4]) + (e[5] - e[7])
    return SpinMoments(
        Jx=e[0].real,
        Jy=e[0].imag,
        Jz=np.asarray(Jz_mean, dtype=float),
        Jx2=s34 / 4.0 + iso,
        Jy2=-s34 / 4.0 + iso,
        Jz2=np.asarray(Jz2_mean, dtype=float),
        sym_xy=_real((e[2] - e[3]) / 4j, scale, "sym_xy"),
        sym_xz=_real(Cxz / 8.0, scale, "sym_xz"),
        sym_yz=_real(Cyz / 8j, scale, "sym_yz"),
        J_stored=Js,
    )


def covariance_matrix(m: SpinMoments) -> np.ndarray:
    mean = m.mean
    return m.second() - mean[..., :, None] * mean[..., None, :]


def transverse_projection(Gamma, mean, J=None):
    """Orthonormal transverse basis (e1, e2) and the 2x2 projected covariance.

    e1 is the projection of x (or y when the mean is within 1e-6 of the x
    axis) and e2 = n x e1.
    """
    Gamma = np.asarray(Gamma, dtype=float)
    mean = np.asarray(mean, dtype=float)
    norm = np.linalg.norm(mean, axis=-1)
    ref = J if J is not None else np.maximum(norm, 1.0)
    if np.any(norm < ZERO_MEAN_TOL * ref) or np.any(norm == 0):
        raise ZeroMeanSpin("mean spin vanishes; transverse plane undefined")
    n = mean / norm[..., None]
    xhat = np.zeros_like(n)
    xhat[..., 0] = 1.0
    yhat = np.zeros_like(n)
    yhat[..., 1] = 1.0
    ref_axis = np.where((np.abs(n[..., 0]) > 1.0 - 1e-6)[..., None], yhat, xhat)
    e1 = ref_axis - np.sum(ref_axis * n, axis=-1, keepdims=True) * n
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(n, e1)
    B = np.stack([e1, e2], axis=-1)  # (..., 3, 2)
    Gp = np.swapaxes(B, -1, -2) @ Gamma @ B
    Gp = 0.5 * (Gp + np.swapaxes(Gp, -1, -2))
    return e1, e2, Gp


def min_transverse_variance(Gamma_perp):
    """Closed-form eigenvalues of a symmetric 2x2 and the minor-axis angle in [0, pi)."""
    G = np.asarray(Gamma_perp, dtype=float)
    a, b, c = G[..., 0, 0], G[..., 0, 1], G[..., 1, 1]
    half = 0.5 * (a + c)
    r = np.hypot(0.5 * (a - c), b)
    lam_min, lam_max = half - r, half + r
    degenerate = r <= 1e-14 * np.maximum(np.abs(a) + np.abs(c), np.finfo(float).tiny)
    angle = 0.5 * np.arctan2(-2.0 * b, c - a)
    angle = np.where(degenerate, 0.0, np.mod(angle, np.pi))
    if angle.ndim == 0:
        return float(lam_min), float(lam_max), float(angle)
    return lam_min, lam_max, angle


def squeezing_parameter(lambda_min, mean_norm):
    mean_norm = np.asarray(mean_norm, dtype=float)
    if np.any(mean_norm <= 0):
        raise ZeroMeanSpin("squeezing parameter needs a non-zero mean spin")
    v = np.asarray(lambda_min) / (mean_norm / 2.0)
    return float(v) if v.ndim == 0 else v


def diffusion_increment(mean, N_e, s_q, dt):
    """(|<J>|^2 / N_e) (s_q / 3) dt P, with P the transverse projector."""
    mean = np.asarray(mean, dtype=float)
    norm2 = np.sum(mean * mean, axis=-1)
    n = mean / np.sqrt(norm2)[..., None]
    P = np.eye(3) - n[..., :, None] * n[..., None, :]
    coef = norm2 / np.asarray(N_e, dtype=float) * np.asarray(s_q, dtype=float) / 3.0 * dt
    return np.asarray(coef)[..., None, None] * P


def accumulate_diffusion(Gamma_noise, mean, N_e, s_q, dt):
    return np.asarray(Gamma_noise, dtype=float) + diffusion_increment(mean, N_e, s_q, dt)


def quadrature_variance(Gamma_perp, phi, mean_norm):
    """Normalized variance of cos(phi) e1 + sin(phi) e2; period pi in phi."""
    if mean_norm <= 0:
        raise ZeroMeanSpin("quadrature variance needs a non-zero mean spin")
    G = np.asarray(Gamma_perp, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    var = c * c * G[0, 0] + 2.0 * c * s * G[0, 1] + s * s * G[1, 1]
    return var / (mean_norm / 2.0)


@dataclass
class SpinSnapshot:
    t: float
    mean: np.ndarray
    Gamma: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    Gamma_perp: np.ndarray
    lambda_min: float
    lambda_max: float
    axis_angle: float
    v_A_min: float
    V_opt: float

    @property
    def mean_norm(self) -> float:
        return float(np.linalg.norm(self.mean))

    def v_A(self, phi):
        return quadrature_variance(self.Gamma_perp, phi, self.mean_norm)
