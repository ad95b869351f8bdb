"""Linear (Bogoliubov) stability of the uniform two-component mixture.

Answers whether spin demixing can set in before the squeezing optimum, for the
minority density produced by the stored pulse.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .params import HBAR


def free_energy(k, m):
    return HBAR**2 * np.asarray(k, dtype=float) ** 2 / (2.0 * m)


def bogoliubov_branches(k, n1, n2, g11, g22, g12, m):
    """Squared branch energies eps_k [eps_k + A +/- D] (units J^2; divide by hbar^2 for rad^2/s^2)."""
    eps = free_energy(k, m)
    A = g11 * n1 + g22 * n2
    D = math.sqrt((g11 * n1 - g22 * n2) ** 2 + 4.0 * g12**2 * n1 * n2)
    return eps * (eps + A + D), eps * (eps + A - D)


def growth_rate(k, n1, n2, g11, g22, g12, m):
    """Gamma(k) = sqrt(eps_k (Delta - eps_k)) / hbar inside the unstable band, else 0."""
    _, minus = bogoliubov_branches(k, n1, n2, g11, g22, g12, m)
    return np.sqrt(np.maximum(-minus, 0.0)) / HBAR


@dataclass(frozen=True)
class StabilityReport:
    miscibility_ratio: float
    n1: float
    n2: float
    Delta_bar: float
    eps_min: float
    unstable: bool
    finite_size_suppressed: bool
    Gamma_max: float | None = None
    tau_MI: float | None = None
    k_star: float | None = None
    lambda_star: float | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def demixing_summary(n1, n2, g11, g22, g12, m, R) -> StabilityReport:
    if n1 < 0 or n2 < 0 or R <= 0:
        raise ValueError("densities must be non-negative and R positive")
    A = g11 * n1 + g22 * n2
    D = math.sqrt((g11 * n1 - g22 * n2) ** 2 + 4.0 * g12**2 * n1 * n2)
    delta = D - A
    eps_min = HBAR**2 * (math.pi / R) ** 2 / (2.0 * m)
    ratio = g12**2 / (g11 * g22)
    if not delta > 0:
        return StabilityReport(ratio, n1, n2, delta, eps_min, False, True)
    k_star = math.sqrt(m * delta) / HBAR
    return StabilityReport(
        miscibility_ratio=ratio, n1=n1, n2=n2, Delta_bar=delta, eps_min=eps_min,
        unstable=True, finite_size_suppressed=eps_min >= delta,
        Gamma_max=delta / (2.0 * HBAR), tau_MI=2.0 * HBAR / delta,
        k_star=k_star, lambda_star=2.0 * math.pi / k_star,
    )


def weak_excitation_estimates(n1, n2, g11, g22, g12):
    """First order in the minority density: (Delta_bar, Gamma_max)."""
    slope = g12**2 / g11 - g22
    return 2.0 * n2 * slope, n2 * slope / HBAR


def thomas_fermi_densities(N1, N2, R, convention="mean"):
    """Per-species densities from a shared Thomas-Fermi cloud.

    ``peak`` uses n0 = 15 N / (8 pi R^3); ``mean`` the density-weighted mean 4/7 n0.
    """
    N = N1 + N2
    peak = 15.0 * N / (8.0 * math.pi * R**3)
    n = peak if convention == "peak" else 4.0 / 7.0 * peak
    if N == 0:
        return 0.0, 0.0
    return n * N1 / N, n * N2 / N


def stability_for_config(cfg, derived=None) -> StabilityReport:
    from .params import derive_constants

    d = derived or derive_constants(cfg)
    N2 = d.mu_stored
    n1, n2 = thomas_fermi_densities(cfg.N0 - N2, N2, d.R_TF, cfg.density_convention)
    return demixing_summary(n1, n2, d.g11, d.g22, d.g12, cfg.mass, d.R_TF)
