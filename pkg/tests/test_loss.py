import numpy as np
import pytest

from bec_squeeze.correlators import unitary_correlators
from bec_squeeze.errors import NegativePopulation
from bec_squeeze.loss import (LossCoefficients, effective_rates, integrate_populations,
                              overlap_integrals, rescale_correlators, rescale_factors,
                              thomas_fermi_closed_form)
from bec_squeeze.params import baseline_config, derive_constants, loss_coefficients
from bec_squeeze.write import css_coefficients

# radial quadrature values recorded for R = 5 um
I2_5UM = 2.72837045300392e15
I3_5UM = 8.68467288362895e30


def test_overlap_integrals_at_5um():
    ov = overlap_integrals(5e-6)
    assert ov.I2 == pytest.approx(I2_5UM, rel=1e-12)
    assert ov.I3 == pytest.approx(I3_5UM, rel=1e-12)
    assert (ov.I2, ov.I3) == pytest.approx(thomas_fermi_closed_form(5e-6), rel=1e-12)


def test_overlap_scaling():
    a, b = overlap_integrals(3e-6), overlap_integrals(6e-6)
    assert a.I2 / b.I2 == pytest.approx(8, rel=1e-12)
    assert a.I3 / b.I3 == pytest.approx(64, rel=1e-12)


def test_overlap_rejects_bad_radius():
    with pytest.raises(ValueError):
        overlap_integrals(0.0)


def test_no_loss_is_constant():
    t = np.linspace(0, 0.1, 101)
    tr = integrate_populations(99_000, 1000, LossCoefficients(), I2_5UM, I3_5UM, t)
    assert np.all(tr.N1 == 99_000) and np.all(tr.N2 == 1000)
    assert np.all(tr.eta_coh == 1) and np.all(tr.s_q == 0)


def test_one_body_closed_form():
    t = np.linspace(0, 0.15, 1501)
    K = LossCoefficients(K1_1=0.029, K1_2=0.029)
    tr = integrate_populations(99_000, 1000, K, I2_5UM, I3_5UM, t)
    assert np.allclose(tr.N1, 99_000 * np.exp(-0.029 * t), rtol=1e-12)
    assert np.allclose(tr.N2, 1000 * np.exp(-0.029 * t), rtol=1e-12)
    assert np.allclose(tr.eta_coh, np.exp(-0.058 * t), rtol=1e-12)
    assert np.allclose(tr.s_q, 0.029)


def test_baseline_eta_at_125ms():
    cfg = baseline_config()
    d = derive_constants(cfg)
    t = np.arange(0, 1251) * 1e-4
    tr = integrate_populations(cfg.N0 - d.mu_stored, d.mu_stored, loss_coefficients(cfg, d), d.I2, d.I3, t)
    assert tr.eta_coh[-1] == pytest.approx(0.82, abs=0.05)
    assert np.all(np.diff(tr.eta_coh) <= 0)


def test_empty_species_ratio_pinned():
    t = np.linspace(0, 0.05, 51)
    tr = integrate_populations(1e5, 0.0, LossCoefficients(K1_1=0.1, K1_2=0.1), I2_5UM, I3_5UM, t)
    assert np.all(tr.f2 == 1.0) and np.all(tr.N2 == 0)


def test_stiff_decay_halving_or_failure():
    # one giant step on a huge rate: either the halving rescues it or we get a clean error
    K = LossCoefficients(K1_1=1e7, K1_2=1e7)
    try:
        tr = integrate_populations(100.0, 100.0, K, 1.0, 1.0, np.array([0.0, 1.0]))
    except NegativePopulation:
        return
    assert np.all(tr.N1 >= 0)


def test_effective_rates_pair_weighting():
    K = LossCoefficients(K2_12=2.0)
    g1, g2, g3, sq = effective_rates(30.0, 10.0, K, 1.0, 1.0)
    assert g2 == pytest.approx(0.5 * 2.0 * 40.0)
    assert sq == pytest.approx(2 * g2)


def test_unit_factors_are_identity():
    E = unitary_correlators(css_coefficients(10, 0.5, 0.2), 1.0, 0.3)
    out = rescale_correlators(E, rescale_factors(1.0, 1.0, 1.0))
    assert np.array_equal(out.E, E.E)


def test_half_R1():
    E = unitary_correlators(css_coefficients(10, 0.5, 0.2), 1.0, 0.3)
    out = rescale_correlators(E, rescale_factors(1.0, 1.0, 0.5))
    assert out[1] == pytest.approx(E[1] / 2)
    assert out[3] == pytest.approx(E[3] / 4)


def test_halved_populations():
    f1 = f2 = 0.5
    R1 = np.sqrt(f1 * f2)
    S = rescale_factors(f1, f2, R1).S
    assert R1**2 == pytest.approx(0.25)
    assert S[0] == pytest.approx(0.5) and S[4] == pytest.approx(0.25)
