import math

import numpy as np
import pytest

from bec_squeeze.params import HBAR, baseline_config, derive_constants
from bec_squeeze.stability import (bogoliubov_branches, demixing_summary, free_energy,
                                   growth_rate, stability_for_config, thomas_fermi_densities,
                                   weak_excitation_estimates)

D = derive_constants(baseline_config())
M = baseline_config().mass
K = np.logspace(4, 7, 60)


def test_single_component_limit():
    n1 = 1e20
    plus, minus = bogoliubov_branches(K, n1, 0.0, D.g11, D.g22, D.g12, M)
    eps = free_energy(K, M)
    assert plus == pytest.approx(eps * (eps + 2 * D.g11 * n1), rel=1e-12)
    assert minus == pytest.approx(eps**2, rel=1e-9)


def test_miscible_branch_positive():
    g12 = 0.9 * math.sqrt(D.g11 * D.g22)
    _, minus = bogoliubov_branches(K, 1e20, 1e20, D.g11, D.g22, g12, M)
    assert np.all(minus > 0)


def test_sodium_immiscible_at_long_wavelength():
    _, minus = bogoliubov_branches(K[:5], 1e20, 1e20, D.g11, D.g22, D.g12, M)
    assert np.all(minus < 0)
    assert np.all(growth_rate(K[:5], 1e20, 1e20, D.g11, D.g22, D.g12, M) > 0)


def test_growth_peak_matches_summary():
    n1, n2 = 2.7e20, 2.7e18
    rep = demixing_summary(n1, n2, D.g11, D.g22, D.g12, M, 5e-6)
    k = np.linspace(0.2, 2.0, 4001) * rep.k_star
    g = growth_rate(k, n1, n2, D.g11, D.g22, D.g12, M)
    assert g.max() == pytest.approx(rep.Gamma_max, rel=1e-6)
    assert k[np.argmax(g)] == pytest.approx(rep.k_star, rel=1e-3)


def test_baseline_report():
    rep = stability_for_config(baseline_config())
    assert rep.miscibility_ratio == pytest.approx(3.4 / 2.8, abs=1e-3)
    assert rep.unstable
    assert 7.5e-3 <= rep.tau_MI <= 30e-3
    assert 15e-6 <= rep.lambda_star <= 60e-6
    assert rep.finite_size_suppressed


def test_no_minority_is_stable():
    rep = demixing_summary(1e20, 0.0, D.g11, D.g22, D.g12, M, 5e-6)
    assert rep.Delta_bar <= 0 and not rep.unstable


def test_weak_excitation_agrees_with_exact():
    n1 = 2.7e20
    n2 = 1e-3 * n1
    approx, gamma = weak_excitation_estimates(n1, n2, D.g11, D.g22, D.g12)
    exact = demixing_summary(n1, n2, D.g11, D.g22, D.g12, M, 5e-6)
    assert approx == pytest.approx(exact.Delta_bar, rel=0.01)
    assert gamma == pytest.approx(approx / (2 * HBAR))


def test_weak_excitation_linear_in_minority():
    a, _ = weak_excitation_estimates(1e20, 1e17, D.g11, D.g22, D.g12)
    b, _ = weak_excitation_estimates(1e20, 5e16, D.g11, D.g22, D.g12)
    assert b == pytest.approx(a / 2)


def test_marginal_miscibility_gives_zero():
    g12 = math.sqrt(D.g11 * D.g22)
    a, _ = weak_excitation_estimates(1e20, 1e17, D.g11, D.g22, g12)
    assert a == pytest.approx(0.0, abs=1e-12 * D.g22 * 1e17)


def test_density_conventions():
    R = 5e-6
    p1, p2 = thomas_fermi_densities(9e4, 1e4, R, "peak")
    m1, m2 = thomas_fermi_densities(9e4, 1e4, R, "mean")
    assert p1 + p2 == pytest.approx(15 * 1e5 / (8 * math.pi * R**3))
    assert m1 / p1 == pytest.approx(4 / 7) and p2 / p1 == pytest.approx(1 / 9)
