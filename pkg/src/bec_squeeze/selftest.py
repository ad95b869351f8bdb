"""Built-in verification suite (the ``selftest`` subcommand)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .correlators import brute_force_moments, ladder_factor, unitary_correlators
from .covariance import assemble_moments, covariance_matrix
from .homodyne import HomodyneScan, homodyne_heatmap
from .loss import integrate_populations
from .output import manifest
from .params import baseline_config, derive_constants, loss_coefficients
from .pipeline import power_law_exponent, run_simulation, sweep_mu
from .write import css_coefficients

ORACLE_TOL = 1e-10


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SelfTestReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list:
        return [f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}" for c in self.checks]


def rel_dev(a, b, floor=1.0) -> float:
    """max |a - b| / max(|b|, floor), elementwise."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def sum_pipeline_moments(J, theta, phi0, chi, t, ladder=ladder_factor):
    """Correlators, mean and covariance from the sum formulas (unitary, no cutoff)."""
    css = css_coefficients(J, theta, phi0)
    E = unitary_correlators(css, chi, t, cutoff_log=np.inf, ladder=ladder)
    mom = assemble_moments(E, E.Jz_mean, E.Jz2_mean, J)
    return E, mom.mean, covariance_matrix(mom)


def oracle_deviation(J, theta, phi0, chi, t, ladder=ladder_factor) -> float:
    E, mean, cov = sum_pipeline_moments(J, theta, phi0, chi, t, ladder)
    bf = brute_force_moments(J, theta, phi0, chi, t)
    return max(rel_dev(E.E, bf.E), rel_dev(mean, bf.mean), rel_dev(cov, bf.cov))


def random_oracle_tuples(n, seed=2024, J_max=20):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        J = rng.integers(1, 2 * J_max + 1) / 2.0
        yield J, rng.uniform(0.01, math.pi - 0.01), rng.uniform(0, 2 * math.pi), rng.uniform(0.1, 3.0), rng.uniform(0, 2.0)


def _check(name, fn) -> Check:
    try:
        passed, detail = fn()
    except Exception as exc:
        return Check(name, False, f"raised {exc!r}")
    return Check(name, bool(passed), detail)


def check_oracle(n=25, ladder=ladder_factor):
    worst = max(oracle_deviation(J, th, ph, chi, t, ladder)
                for J, th, ph, chi, t in random_oracle_tuples(n))
    return worst < ORACLE_TOL, f"max rel dev {worst:.2e} over {n} tuples"


def check_conjugacy(ts_times=np.linspace(0, 0.15, 7)):
    d = derive_constants(baseline_config())
    css = css_coefficients(d.J, d.theta)
    err = unitary_correlators(css, d.chi, ts_times).conjugacy_error()
    return err < 1e-10, f"max conjugacy violation {err:.2e}"


def check_revival(ladder=ladder_factor):
    worst = 0.0
    for J in range(1, 21):
        css = css_coefficients(float(J), 0.9, 0.4)
        e0 = unitary_correlators(css, 1.0, 0.0, cutoff_log=np.inf, ladder=ladder)
        ep = unitary_correlators(css, 1.0, math.pi, cutoff_log=np.inf, ladder=ladder)
        worst = max(worst, rel_dev(ep[1], -e0[1]), rel_dev(ep[3], e0[3]))
    return worst < 1e-10, f"max revival deviation {worst:.2e}"


def check_covariance_geometry(cfg=None):
    cfg = cfg or baseline_config(t_max=0.06)
    ts = run_simulation(cfg)
    J = ts.derived.J
    eig_min = float(np.min(np.linalg.eigvalsh(ts.Gamma)))
    n = ts.mean / np.linalg.norm(ts.mean, axis=-1, keepdims=True)
    B = np.stack([ts.e1, ts.e2], axis=-1)
    P = B @ np.swapaxes(B, -1, -2)
    Gperp3 = P @ ts.Gamma @ P
    null = float(np.max(np.linalg.norm(np.einsum("nij,nj->ni", Gperp3, n), axis=-1)
                        / np.trace(ts.Gamma, axis1=1, axis2=2)))
    ok = eig_min >= -1e-9 * J**2 and null < 1e-8
    return ok, f"min eigenvalue {eig_min:.3g}, projection nullity {null:.2e}"


def scan_minimum(f, n=3600):
    """Minimum of a pi-periodic f: grid scan over n angles, then a bounded 1-d polish."""
    phi = np.linspace(0, 2 * math.pi, n, endpoint=False)
    v = f(phi)
    i = int(np.argmin(v))
    h = 2 * math.pi / n
    res = optimize.minimize_scalar(lambda x: float(f(x)), bounds=(phi[i] - h, phi[i] + h),
                                   method="bounded", options={"xatol": 1e-12})
    return min(float(res.fun), float(v[i]))


def check_quadrature_scan():
    ts = run_simulation(baseline_config(loss_enabled=False, t_max=0.04))
    s = ts.snapshot(len(ts) - 1)
    phi = np.linspace(0, 2 * math.pi, 3600, endpoint=False)
    period = float(np.max(np.abs(s.v_A(phi + math.pi) - s.v_A(phi))))
    dev = abs(scan_minimum(s.v_A) - s.v_A_min) / s.v_A_min
    ok = dev < 1e-9 and period < 1e-9
    return ok, f"scan-vs-eigenvalue {dev:.1e}, period-pi {period:.1e}"


def check_rk4_halving():
    cfg = baseline_config()
    d = derive_constants(cfg)
    K = loss_coefficients(cfg, d)
    n = int(round(cfg.t_max / cfg.dt))
    a = integrate_populations(cfg.N0 - d.mu_stored, d.mu_stored, K, d.I2, d.I3, np.arange(n + 1) * cfg.dt)
    b = integrate_populations(cfg.N0 - d.mu_stored, d.mu_stored, K, d.I2, d.I3,
                              np.arange(2 * n + 1) * cfg.dt / 2)
    dev = max(abs(a.N1[-1] / b.N1[-1] - 1), abs(a.N2[-1] / b.N2[-1] - 1))
    return dev < 1e-8, f"relative change on halving dt {dev:.1e}"


def check_scaling(mus=(100, 200, 400, 1000)):
    cfg = baseline_config(t_max=0.3, dt=2e-4, output_stride=1)
    res = sweep_mu(cfg.replace(loss_enabled=False), mus, both=False)
    cols = res.columns(False)
    slope = power_law_exponent(cols["mu_in"], 10 ** (cols["best_V_opt_dB"] / 10))
    return abs(slope + 1 / 3) <= 0.07, f"fit exponent {slope:.4f}"


def check_determinism():
    cfg = baseline_config(t_max=0.02)
    a, b = run_simulation(cfg), run_simulation(cfg)
    ma = manifest(cfg, a.derived, timestamp=False)
    mb = manifest(cfg, b.derived, timestamp=False)
    same_series = all(np.array_equal(a.columns()[k], b.columns()[k]) for k in a.columns())
    scan = HomodyneScan(np.linspace(0, 2 * math.pi, 8, endpoint=False), 3.0, 0.2,
                        np.linspace(0.5, 2.0, 8), 2000, cfg.seed)
    ha, hb = homodyne_heatmap(scan), homodyne_heatmap(scan, threads=2)
    ok = json.dumps(ma, sort_keys=True) == json.dumps(mb, sort_keys=True) and same_series \
        and np.array_equal(ha.counts, hb.counts)
    return ok, "manifests, series and heatmaps identical" if ok else "runs differ"


def selftest(*, ladder=ladder_factor, quick=False) -> SelfTestReport:
    """Run every check; ``ladder`` lets a caller inject a mutated ladder factor."""
    checks = [
        _check("brute-force oracle (J <= 20)", lambda: check_oracle(ladder=ladder)),
        _check("OAT revival E1(pi) = -E1(0)", lambda: check_revival(ladder=ladder)),
        _check("conjugacy sextet", check_conjugacy),
        _check("PSD covariance and transverse nullity", check_covariance_geometry),
        _check("quadrature scan vs eigenvalue", check_quadrature_scan),
        _check("RK4 halving convergence", check_rk4_halving),
        _check("determinism", check_determinism),
    ]
    if not quick:
        checks.append(_check("lossless mu^(-1/3) scaling", check_scaling))
    return SelfTestReport(checks)
