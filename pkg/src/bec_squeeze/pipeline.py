"""End-to-end runs: time series, optimal readout time and mu_in sweeps.

The population ODE and the diffusion fold run on the fine grid (step ``dt``);
the full correlator set is evaluated every ``output_stride`` steps.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .correlators import raising_correlator, unitary_correlators
from .covariance import (SpinSnapshot, assemble_moments, covariance_matrix, diffusion_increment,
                         min_transverse_variance, squeezing_parameter, transverse_projection)
from .homodyne import optical_variance
from .loss import PopulationTrajectory, integrate_populations, rescale_correlators, rescale_factors
from .params import DerivedParams, SimConfig, derive_constants, loss_coefficients
from .stability import StabilityReport, stability_for_config
from .write import CssState, css_coefficients

log = logging.getLogger(__name__)


def to_db(x):
    return 10.0 * np.log10(x)


@dataclass
class TimeSeries:
    t: np.ndarray
    mean: np.ndarray  # (n, 3)
    Gamma: np.ndarray  # (n, 3, 3), rescaled-moment covariance plus diffusion
    Gamma_noise: np.ndarray  # (n, 3, 3)
    e1: np.ndarray
    e2: np.ndarray
    Gamma_perp: np.ndarray  # (n, 2, 2)
    lambda_min: np.ndarray
    lambda_max: np.ndarray
    axis_angle: np.ndarray
    v_A_min: np.ndarray
    V_opt: np.ndarray
    eta_coh: np.ndarray
    eta_tot: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    E1: np.ndarray
    cfg: SimConfig
    derived: DerivedParams
    populations: PopulationTrajectory
    stability: StabilityReport
    warnings: list = field(default_factory=list)

    def __len__(self):
        return self.t.size

    @property
    def V_opt_dB(self):
        return to_db(self.V_opt)

    @property
    def v_A_min_dB(self):
        return to_db(self.v_A_min)

    def index_of(self, t: float) -> int:
        return int(np.argmin(np.abs(self.t - t)))

    def snapshot(self, i: int) -> SpinSnapshot:
        return SpinSnapshot(
            t=float(self.t[i]), mean=self.mean[i], Gamma=self.Gamma[i], e1=self.e1[i], e2=self.e2[i],
            Gamma_perp=self.Gamma_perp[i], lambda_min=float(self.lambda_min[i]),
            lambda_max=float(self.lambda_max[i]), axis_angle=float(self.axis_angle[i]),
            v_A_min=float(self.v_A_min[i]), V_opt=float(self.V_opt[i]),
        )

    def columns(self) -> dict:
        return {
            "t_s": self.t,
            "Jx": self.mean[:, 0], "Jy": self.mean[:, 1], "Jz": self.mean[:, 2],
            "lambda_min": self.lambda_min,
            "v_A_min": self.v_A_min, "v_A_min_dB": self.v_A_min_dB,
            "V_opt_dB": self.V_opt_dB,
            "eta_coh": self.eta_coh, "eta_tot": self.eta_tot,
            "N1": self.N1, "N2": self.N2,
        }


def _output_indices(n_steps: int, stride: int, dt: float, extra_times) -> np.ndarray:
    idx = set(range(0, n_steps + 1, stride))
    idx.add(n_steps)
    for t in extra_times or ():
        idx.add(int(min(max(round(t / dt), 0), n_steps)))
    return np.array(sorted(idx))


def run_simulation(cfg: SimConfig, *, extra_times=None, css: CssState | None = None) -> TimeSeries:
    """Write-in, twisting with loss and readout on the configured time grid."""
    d = derive_constants(cfg)
    if css is None:
        css = css_coefficients(d.J, d.theta, cfg.phi0)
    K = loss_coefficients(cfg, d)
    n_steps = int(round(cfg.t_max / cfg.dt))
    t_fine = np.arange(n_steps + 1) * cfg.dt
    N2_0 = d.mu_stored
    N1_0 = cfg.N0 - N2_0
    pops = integrate_populations(N1_0, N2_0, K, d.I2, d.I3, t_fine)

    out = _output_indices(n_steps, cfg.output_stride, cfg.dt, extra_times)
    t_out = t_fine[out]
    E_u = unitary_correlators(css, d.chi, t_out, cutoff_log=cfg.coeff_cutoff_log)
    Jz_u, Jz2_u = E_u.Jz_mean, E_u.Jz2_mean
    var0 = Jz2_u - Jz_u**2

    def longitudinal(N1, N2):
        # shifts are exactly zero when populations do not move
        dJz = 0.5 * ((N2 - N2_0) - (N1 - N1_0))
        Jz = Jz_u + dJz
        dNe = (N1 - N1_0) + (N2 - N2_0)
        Jz2 = Jz2_u + var0 * (dNe / cfg.N0) + (Jz * Jz - Jz_u * Jz_u)
        return Jz, Jz2, d.J + 0.5 * dNe

    N1o, N2o = pops.N1[out], pops.N2[out]
    Jz, Jz2, J_s = longitudinal(N1o, N2o)
    E = rescale_correlators(E_u, rescale_factors(pops.f1[out], pops.f2[out], pops.R1[out]))
    moments = assemble_moments(E, Jz, Jz2, J_s)

    if K.is_zero():
        noise = np.zeros((t_out.size, 3, 3))
    else:
        E1f = raising_correlator(css, d.chi, t_fine, cutoff_log=cfg.coeff_cutoff_log) * pops.R1
        Jzf, _, _ = longitudinal(pops.N1, pops.N2)
        mean_f = np.stack([E1f.real, E1f.imag, Jzf], axis=-1)
        inc = diffusion_increment(mean_f[:-1], pops.N[:-1], pops.s_q[:-1], cfg.dt)
        cum = np.concatenate([np.zeros((1, 3, 3)), np.cumsum(inc, axis=0)])
        noise = cum[out]

    Gamma = covariance_matrix(moments) + noise
    mean = moments.mean
    e1, e2, Gp = transverse_projection(Gamma, mean, d.J)
    lam_min, lam_max, angle = min_transverse_variance(Gp)
    norm = np.linalg.norm(mean, axis=-1)
    v = squeezing_parameter(lam_min, norm)
    V = optical_variance(v, cfg.eta_read)
    eta_coh = pops.eta_coh[out]

    ts = TimeSeries(
        t=t_out, mean=mean, Gamma=Gamma, Gamma_noise=noise, e1=e1, e2=e2, Gamma_perp=Gp,
        lambda_min=lam_min, lambda_max=lam_max, axis_angle=angle, v_A_min=v, V_opt=V,
        eta_coh=eta_coh, eta_tot=eta_coh * cfg.eta_write * cfg.eta_read,
        N1=N1o, N2=N2o, E1=E.E[0], cfg=cfg, derived=d, populations=pops,
        stability=stability_for_config(cfg, d),
    )
    opt = find_optimum(ts)
    st = ts.stability
    if st.unstable and not st.finite_size_suppressed and st.tau_MI < opt.t_star:
        msg = f"demixing time {st.tau_MI:.3g} s shorter than optimum {opt.t_star:.3g} s"
        log.warning(msg)
        ts.warnings.append(msg)
    return ts


@dataclass(frozen=True)
class Optimum:
    t_star: float
    V_min: float
    index: int
    boundary: bool

    @property
    def V_min_dB(self) -> float:
        return float(to_db(self.V_min))


def find_optimum(ts, V=None) -> Optimum:
    """Grid minimum of V_opt refined by the parabola through the bracketing points.

    Accepts a :class:`TimeSeries` or ``(t, V)`` arrays. The first minimum wins ties.
    """
    if V is None:
        t, V = ts.t, ts.V_opt
    else:
        t = ts
    t = np.asarray(t, dtype=float)
    V = np.asarray(V, dtype=float)
    if t.size == 0:
        raise ValueError("empty series")
    i = int(np.argmin(V))
    if i == 0 or i == t.size - 1:
        return Optimum(float(t[i]), float(V[i]), i, True)
    x0, x1, x2 = t[i - 1:i + 2]
    y0, y1, y2 = V[i - 1:i + 2]
    # Newton divided differences
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    curv = (d12 - d01) / (x2 - x0)
    if not curv > 0:
        return Optimum(float(x1), float(y1), i, False)
    xv = 0.5 * (x0 + x1) - d01 / (2.0 * curv)
    yv = y0 + d01 * (xv - x0) + curv * (xv - x0) * (xv - x1)
    return Optimum(float(xv), float(min(yv, y1)), i, False)


@dataclass
class SweepRow:
    mu_in: float
    theta: float
    t_star: float
    best_V_opt_dB: float
    loss_enabled: bool
    boundary: bool = False
    t_max: float = float("nan")
    error: str = ""

    @property
    def theta_over_pi(self) -> float:
        return self.theta / math.pi


@dataclass
class SweepResult:
    rows: list

    def select(self, loss_enabled: bool) -> list:
        return sorted((r for r in self.rows if r.loss_enabled == loss_enabled and not r.error),
                      key=lambda r: r.mu_in)

    def columns(self, loss_enabled: bool) -> dict:
        rows = self.select(loss_enabled)
        return {
            "mu_in": np.array([r.mu_in for r in rows]),
            "theta": np.array([r.theta for r in rows]),
            "t_star": np.array([r.t_star for r in rows]),
            "best_V_opt_dB": np.array([r.best_V_opt_dB for r in rows]),
        }


def optimize_readout(cfg: SimConfig, max_extensions: int = 3):
    """Run and locate the optimum, doubling t_max while the optimum sits on the end of the grid."""
    for _ in range(max_extensions + 1):
        ts = run_simulation(cfg)
        opt = find_optimum(ts)
        if not (opt.boundary and opt.index == len(ts) - 1):
            break
        cfg = cfg.replace(t_max=2.0 * cfg.t_max)
    return ts, opt


def _sweep_one(args) -> SweepRow:
    cfg, mu, loss, extend = args
    c = cfg.replace(mu_in=float(mu), loss_enabled=loss)
    theta = derive_constants(c).theta
    try:
        ts, opt = optimize_readout(c, max_extensions=3 if extend else 0)
    except Exception as exc:  # recorded per row, the sweep goes on
        return SweepRow(float(mu), theta, float("nan"), float("nan"), loss, error=repr(exc))
    return SweepRow(float(mu), theta, opt.t_star, opt.V_min_dB, loss, opt.boundary, ts.cfg.t_max)


def sweep_mu(cfg: SimConfig, mu_list, *, both: bool = True, threads: int = 1,
             extend: bool = True) -> SweepResult:
    """Best retrieved squeezing and its time versus mu_in, lossy and (optionally) lossless."""
    if any(mu <= 0 for mu in mu_list):
        raise ValueError("mu values must be positive")
    flags = [True, False] if both else [cfg.loss_enabled]
    jobs = [(cfg, mu, flag, extend) for flag in flags for mu in mu_list]
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    return SweepResult(rows)


def power_law_exponent(x, y) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
