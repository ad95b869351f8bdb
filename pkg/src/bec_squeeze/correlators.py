"""Heisenberg correlators of one-axis twisting as finite Dicke-basis sums.

Under H = hbar chi Jz^2 the ladder matrix elements only pick up m-dependent
phases, so every correlator is a sum over neighbouring coefficient pairs
c_m^* c_{m-k}. ``brute_force_moments`` is the dense-matrix reference for small J.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .errors import OutOfRange, TooLarge
from .write import CssState

TWO_PI = 2.0 * math.pi
BRUTE_FORCE_MAX_J = 25

# conjugate partner of each correlator (0-based): E2=E1*, E4=E3*, E9=E6*, ...
CONJUGATE_PAIRS = ((0, 1), (2, 3), (5, 8), (7, 9), (4, 10), (6, 11))


def ladder_factor(J, m, sign):
    """L+(m) = sqrt(J(J+1) - m(m-1)) for sign=+1, L-(m) = sqrt(J(J+1) - m(m+1)) for sign=-1."""
    m = np.asarray(m, dtype=float)
    if np.any(np.abs(m) > J):
        raise OutOfRange(f"|m| > J={J}")
    s = 1.0 if sign > 0 else -1.0
    val = np.sqrt(np.maximum(J * (J + 1.0) - m * (m - s), 0.0))
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class CorrelatorSet:
    """E[k-1] holds E_k; trailing axes (if any) index time."""

    E: np.ndarray
    tau: np.ndarray | float
    Jz_mean: float
    Jz2_mean: float
    discarded_weight: float = 0.0

    def __getitem__(self, k: int):
        """1-based access, ``cs[1]`` is E_1."""
        return self.E[k - 1]

    def conjugacy_error(self) -> float:
        """Largest relative violation of the six conjugate pairs."""
        worst = 0.0
        for a, b in CONJUGATE_PAIRS:
            scale = np.maximum(np.abs(self.E[a]), np.abs(self.E[b]))
            diff = np.abs(self.E[b] - np.conj(self.E[a]))
            with np.errstate(invalid="ignore", divide="ignore"):
                rel = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), 0.0)
            worst = max(worst, float(np.max(rel)))
        return worst


def _phase_sum(mag, base_phase, freq, tau, compensated):
    """sum_j mag_j exp(i (base_phase_j + freq_j tau)) for each tau, phases folded mod 2 pi."""
    arg = np.mod(base_phase[None, :] + np.outer(tau, freq), TWO_PI)
    terms = mag[None, :] * np.exp(1j * arg)
    if not compensated:
        return terms.sum(axis=1)
    return np.array([complex(math.fsum(row.real), math.fsum(row.imag)) for row in terms])


def unitary_correlators(css: CssState, chi, t, *, cutoff_log: float = 60.0,
                        ladder=ladder_factor, compensated: bool = False,
                        chunk: int = 256) -> CorrelatorSet:
    """All twelve correlators at time(s) ``t`` under unitary twisting.

    ``t`` may be a scalar or a 1-d array; in the latter case ``E`` has shape
    (12, len(t)). Coefficients below ``max - cutoff_log`` (in log|c|) are
    dropped. ``ladder`` is injectable so the oracle suite can be mutation-tested.
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    tau = chi * t
    J = css.J
    sl = css.support(cutoff_log)
    lm = css.log_mag[sl]
    ph = css.phase[sl]
    m = css.m[sl]
    p = np.exp(2.0 * lm)
    Jz_mean = float(np.sum(m * p))
    Jz2_mean = float(np.sum(m * m * p))
    discarded = css.discarded_weight(cutoff_log)

    terms = []  # (magnitude, base phase, tau-frequency, weight list)
    if m.size >= 2:
        # raising pairs: index m (upper) with c_{m-1}
        mu = m[1:]
        mag_up = np.exp(lm[1:] + lm[:-1]) * ladder(J, mu, +1)
        ph_up = ph[:-1] - ph[1:]
        f_up = 2.0 * mu - 1.0
        # lowering pairs: index m (lower) with c_{m+1}
        md = m[:-1]
        mag_dn = np.exp(lm[:-1] + lm[1:]) * ladder(J, md, -1)
        ph_dn = ph[1:] - ph[:-1]
        f_dn = -(2.0 * md + 1.0)
    if m.size >= 3:
        mu2 = m[2:]
        mag_up2 = np.exp(lm[2:] + lm[:-2]) * ladder(J, mu2, +1) * ladder(J, mu2 - 1.0, +1)
        ph_up2 = ph[:-2] - ph[2:]
        f_up2 = 4.0 * mu2 - 4.0
        md2 = m[:-2]
        mag_dn2 = np.exp(lm[:-2] + lm[2:]) * ladder(J, md2, -1) * ladder(J, md2 + 1.0, -1)
        ph_dn2 = ph[2:] - ph[:-2]
        f_dn2 = -(4.0 * md2 + 4.0)

    E = np.zeros((12, t.size), dtype=complex)
    for start in range(0, t.size, chunk):
        tt = tau[start:start + chunk]
        blk = E[:, start:start + chunk]
        if m.size >= 2:
            up = lambda w: _phase_sum(mag_up * w, ph_up, f_up, tt, compensated)
            dn = lambda w: _phase_sum(mag_dn * w, ph_dn, f_dn, tt, compensated)
            one_u = np.ones_like(mu)
            one_d = np.ones_like(md)
            blk[0] = up(one_u)
            blk[1] = dn(one_d)
            blk[4] = up(J - mu)
            blk[5] = dn(J - md)
            blk[6] = up(J + mu)
            blk[7] = dn(J + md)
            blk[8] = up(J - mu + 1.0)
            blk[9] = up(J + mu - 1.0)
            blk[10] = dn(J - md - 1.0)
            blk[11] = dn(J + md + 1.0)
        if m.size >= 3:
            blk[2] = _phase_sum(mag_up2, ph_up2, f_up2, tt, compensated)
            blk[3] = _phase_sum(mag_dn2, ph_dn2, f_dn2, tt, compensated)

    if scalar:
        return CorrelatorSet(E[:, 0], float(tau[0]), Jz_mean, Jz2_mean, discarded)
    return CorrelatorSet(E, tau, Jz_mean, Jz2_mean, discarded)


def raising_correlator(css: CssState, chi, t, *, cutoff_log: float = 60.0, chunk: int = 256):
    """E_1 alone, for cheap evaluation of the mean spin on a fine grid."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    J = css.J
    sl = css.support(cutoff_log)
    lm, ph, m = css.log_mag[sl], css.phase[sl], css.m[sl]
    if m.size < 2:
        return np.zeros(t.size, dtype=complex)
    mu = m[1:]
    mag = np.exp(lm[1:] + lm[:-1]) * ladder_factor(J, mu, +1)
    tau = chi * t
    out = np.empty(t.size, dtype=complex)
    for s in range(0, t.size, chunk):
        out[s:s + chunk] = _phase_sum(mag, ph[:-1] - ph[1:], 2.0 * mu - 1.0, tau[s:s + chunk], False)
    return out


@dataclass(frozen=True)
class BruteForceMoments:
    E: np.ndarray  # (12,)
    mean: np.ndarray  # (3,)
    second: np.ndarray  # (3, 3) symmetrized <{Ji, Jj}>/2
    cov: np.ndarray  # (3, 3)
    Jz_mean: float
    Jz2_mean: float


def spin_matrices(J):
    """Dense Jx, Jy, Jz, J+ in the basis m = -J..J (ascending)."""
    n = int(round(2 * J)) + 1
    m = np.arange(n) - J
    # <m+1| J+ |m> = sqrt((J - m)(J + m + 1))
    Jp = np.diag(np.sqrt((J - m[:-1]) * (J + m[:-1] + 1.0)), -1).astype(complex)
    Jm = Jp.conj().T
    Jz = np.diag(m).astype(complex)
    return (Jp + Jm) / 2.0, (Jp - Jm) / 2.0j, Jz, Jp


def brute_force_moments(J, theta, phi0, chi, t) -> BruteForceMoments:
    """Dense-vector ground truth for small J; used only as a test oracle."""
    if J > BRUTE_FORCE_MAX_J:
        raise TooLarge(f"J={J} exceeds dense limit {BRUTE_FORCE_MAX_J}")
    n = int(round(2 * J))
    k = np.arange(n + 1)
    m = k - J
    c = (np.sqrt(comb(n, k)) * math.cos(theta / 2) ** (n - k) * math.sin(theta / 2) ** k
         * np.exp(-1j * m * phi0))
    psi = c * np.exp(-1j * chi * t * m * m)
    Jx, Jy, Jz, Jp = spin_matrices(J)
    Jm = Jp.conj().T
    eye = np.eye(n + 1)
    n1 = J * eye - Jz
    n2 = J * eye + Jz
    ev = lambda A: np.vdot(psi, A @ psi)
    ops = [Jp, Jm, Jp @ Jp, Jm @ Jm, n1 @ Jp, n1 @ Jm, n2 @ Jp, n2 @ Jm,
           Jp @ n1, Jp @ n2, Jm @ n1, Jm @ n2]
    E = np.array([ev(A) for A in ops])
    J3 = (Jx, Jy, Jz)
    mean = np.array([ev(A).real for A in J3])
    second = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            second[i, j] = (0.5 * ev(J3[i] @ J3[j] + J3[j] @ J3[i])).real
    cov = second - np.outer(mean, mean)
    return BruteForceMoments(E, mean, second, cov, float(mean[2]), float(second[2, 2]))
