"""Mean-population loss model and the loss-induced rescaling of correlators.

Populations follow

    dN_i/dt = -K1_i N_i - sum_j K2_ij I2 N_i N_j - sum_jk K3_ijk I3 N_i N_j N_k

with symmetric K tensors. The overlap integrals I2, I3 carry the mode volume
so that K2 (m^3/s) and K3 (m^6/s) produce rates.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .correlators import CorrelatorSet
from .errors import NegativePopulation

MAX_HALVINGS = 20


@dataclass(frozen=True)
class OverlapIntegrals:
    I2: float
    I3: float
    profile: str = "ThomasFermi"


def thomas_fermi_closed_form(R: float) -> tuple[float, float]:
    return 15.0 / (14.0 * math.pi * R**3), 75.0 / (56.0 * math.pi**2 * R**6)


def overlap_integrals(R_TF: float) -> OverlapIntegrals:
    """Integrals of |phi|^4 and |phi|^6 for a normalized Thomas-Fermi density.

    Computed by radial quadrature in the scaled variable x = r/R and checked
    against the closed forms.
    """
    if not R_TF > 0:
        raise ValueError("R_TF must be positive")
    shell = lambda x, p: 4.0 * math.pi * x**2 * (1.0 - x**2) ** p
    norm = integrate.quad(shell, 0.0, 1.0, args=(1,), epsabs=0, epsrel=1e-13)[0]
    i2 = integrate.quad(shell, 0.0, 1.0, args=(2,), epsabs=0, epsrel=1e-13)[0] / norm**2
    i3 = integrate.quad(shell, 0.0, 1.0, args=(3,), epsabs=0, epsrel=1e-13)[0] / norm**3
    I2, I3 = i2 / R_TF**3, i3 / R_TF**6
    c2, c3 = thomas_fermi_closed_form(R_TF)
    assert abs(I2 / c2 - 1) < 1e-12 and abs(I3 / c3 - 1) < 1e-12
    return OverlapIntegrals(I2=I2, I3=I3)


@dataclass(frozen=True)
class LossCoefficients:
    """One- (1/s), two- (m^3/s) and three-body (m^6/s) loss coefficients."""

    K1_1: float = 0.0
    K1_2: float = 0.0
    K2_11: float = 0.0
    K2_22: float = 0.0
    K2_12: float = 0.0
    K3_111: float = 0.0
    K3_222: float = 0.0
    K3_112: float = 0.0
    K3_122: float = 0.0

    def is_zero(self) -> bool:
        return not any(dataclasses.astuple(self))


def population_rates(N1, N2, K: LossCoefficients, I2: float, I3: float):
    """Right-hand side of the population ODE (works on arrays)."""
    d1 = (-K.K1_1 * N1
          - I2 * (K.K2_11 * N1 * N1 + K.K2_12 * N1 * N2)
          - I3 * (K.K3_111 * N1**3 + 2.0 * K.K3_112 * N1 * N1 * N2 + K.K3_122 * N1 * N2 * N2))
    d2 = (-K.K1_2 * N2
          - I2 * (K.K2_22 * N2 * N2 + K.K2_12 * N1 * N2)
          - I3 * (K.K3_222 * N2**3 + K.K3_112 * N1 * N1 * N2 + 2.0 * K.K3_122 * N1 * N2 * N2))
    return d1, d2


def effective_rates(N1, N2, K: LossCoefficients, I2: float, I3: float):
    """Per-atom loss rates gamma1..3 and the diffusion strength s_q."""
    N1 = np.asarray(N1, dtype=float)
    N2 = np.asarray(N2, dtype=float)
    N = N1 + N2
    with np.errstate(invalid="ignore", divide="ignore"):
        g1 = np.where(N > 0, (K.K1_1 * N1 + K.K1_2 * N2) / N, 0.0)
    g2 = I2 * (K.K2_11 * N1 + K.K2_22 * N2 + 0.5 * K.K2_12 * N)
    g3 = I3 * (K.K3_111 * N1**2 + K.K3_222 * N2**2 + (K.K3_112 + K.K3_122) * N1 * N2)
    return g1, g2, g3, g1 + 2.0 * g2 + 3.0 * g3


def _rk4_step(y, h, K, I2, I3):
    def f(v):
        return np.array(population_rates(v[0], v[1], K, I2, I3))

    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(y, h, K, I2, I3):
    # retry the interval with 2^k substeps until no population goes negative
    for level in range(MAX_HALVINGS + 1):
        n_sub = 2**level
        z = y
        ok = True
        for _ in range(n_sub):
            with np.errstate(over="ignore", invalid="ignore"):
                z = _rk4_step(z, h / n_sub, K, I2, I3)
            if not np.all(z >= 0):  # also rejects nan from overflow
                ok = False
                break
        if ok:
            return z
    raise NegativePopulation(f"population went negative after {MAX_HALVINGS} halvings")


@dataclass
class PopulationTrajectory:
    t_grid: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    eta_coh: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray
    s_q: np.ndarray

    @property
    def N(self):
        return self.N1 + self.N2


def integrate_populations(N1_0, N2_0, K: LossCoefficients, I2, I3, t_grid) -> PopulationTrajectory:
    """Fixed-step RK4 on ``t_grid``; every derived factor is evaluated per grid point."""
    t_grid = np.asarray(t_grid, dtype=float)
    if N1_0 < 0 or N2_0 < 0:
        raise ValueError("initial populations must be non-negative")
    if t_grid.ndim != 1 or t_grid.size == 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    Y = np.empty((t_grid.size, 2))
    Y[0] = (N1_0, N2_0)
    for i in range(1, t_grid.size):
        Y[i] = _advance(Y[i - 1], t_grid[i] - t_grid[i - 1], K, I2, I3)
    N1, N2 = Y[:, 0], Y[:, 1]
    # an initially empty species has nothing to lose; its ratio is pinned to 1
    f1 = N1 / N1_0 if N1_0 > 0 else np.ones_like(N1)
    f2 = N2 / N2_0 if N2_0 > 0 else np.ones_like(N2)
    R2 = f1 * f2
    R1 = np.sqrt(R2)
    g1, g2, g3, sq = effective_rates(N1, N2, K, I2, I3)
    return PopulationTrajectory(t_grid, N1, N2, f1, f2, R1, R2, R2.copy(), g1, g2, g3, sq)


@dataclass(frozen=True)
class RescaleFactors:
    """Twelve real factors S_1..S_12 (array shape (12, ...))."""

    S: np.ndarray


def rescale_factors(f1, f2, R1) -> RescaleFactors:
    f1, f2, R1 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (f1, f2, R1)))
    R2 = R1 * R1
    a, b = f1 * R1, f2 * R1
    # one-ladder: R1; two-ladder: R2; n1-weighted: f1 R1; n2-weighted: f2 R1
    S = np.stack([R1, R1, R2, R2, a, a, b, b, a, b, a, b])
    return RescaleFactors(S)


def factors_at(traj: PopulationTrajectory, index) -> RescaleFactors:
    return rescale_factors(traj.f1[index], traj.f2[index], traj.R1[index])


def rescale_correlators(E_unitary: CorrelatorSet, factors: RescaleFactors) -> CorrelatorSet:
    return dataclasses.replace(E_unitary, E=E_unitary.E * factors.S)
