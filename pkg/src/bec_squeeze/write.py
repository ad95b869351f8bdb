"""Write-in: stored coherent amplitude and the initial coherent spin state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp


@dataclass(frozen=True)
class StoredAmplitude:
    beta_mag: float
    beta_phase: float
    mu_stored: float


def stored_amplitude(mu_in, eta_write, zeta_spatial, phi0) -> StoredAmplitude:
    mu = eta_write * zeta_spatial * mu_in
    return StoredAmplitude(beta_mag=math.sqrt(mu), beta_phase=phi0, mu_stored=mu)


@dataclass(frozen=True)
class CssState:
    """Dicke-basis coefficients of a coherent spin state.

    ``log_mag[k]`` is log|c_m| and ``phase[k]`` is arg c_m for m = k - J.
    Exact zeros (pole states) carry ``-inf``.
    """

    J: float
    theta: float
    phi0: float
    log_mag: np.ndarray
    phase: np.ndarray

    @property
    def m(self) -> np.ndarray:
        return np.arange(self.log_mag.size) - self.J

    def amplitudes(self) -> np.ndarray:
        return np.exp(self.log_mag + 1j * self.phase)

    def probabilities(self) -> np.ndarray:
        return np.exp(2.0 * self.log_mag)

    def support(self, cutoff_log: float = 60.0) -> slice:
        """Contiguous index window where log|c_m| >= max - cutoff_log."""
        keep = np.flatnonzero(self.log_mag >= self.log_mag.max() - cutoff_log)
        return slice(int(keep[0]), int(keep[-1]) + 1)

    def discarded_weight(self, cutoff_log: float = 60.0) -> float:
        w = self.probabilities()
        return float(w.sum() - w[self.support(cutoff_log)].sum())


def css_coefficients(J, theta, phi0=0.0) -> CssState:
    """Coefficients c_m = sqrt(C(2J, J+m)) cos(theta/2)^(J-m) sin(theta/2)^(J+m) e^(-i m phi0).

    Magnitudes are kept in log space (binomials via log-gamma) and
    renormalized with a log-sum-exp, which holds the norm to round-off even
    for 2J ~ 1e5.
    """
    n = 2.0 * J
    if n < 1 or round(n) != n:
        raise ValueError("J must be a positive multiple of 1/2")
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    n = int(round(n))
    k = np.arange(n + 1, dtype=float)  # k = J + m, atoms in state 2
    m = k - J
    phase = -m * phi0
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if theta == math.pi:
        c = 0.0
    if s == 0.0 or c == 0.0:  # exact pole, or a tilt that underflows to one
        log_mag = np.full(n + 1, -np.inf)
        log_mag[0 if s == 0.0 else n] = 0.0
        return CssState(J, theta, phi0, log_mag, phase)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    log_mag = 0.5 * log_binom + (n - k) * math.log(c) + k * math.log(s)
    log_mag -= 0.5 * logsumexp(2.0 * log_mag)
    return CssState(J, theta, phi0, log_mag, phase)
