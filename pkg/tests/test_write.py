import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bec_squeeze.write import css_coefficients, stored_amplitude


def test_stored_amplitude_unit_efficiencies():
    s = stored_amplitude(1000, 1, 1, 0)
    assert s.beta_mag == pytest.approx(31.6227766)
    assert s.mu_stored == 1000


def test_stored_amplitude_product_rule():
    assert stored_amplitude(1000, 0.5, 0.8, 0).mu_stored == pytest.approx(400)


def test_vacuum_amplitude():
    assert stored_amplitude(0, 1, 1, 1.234).beta_mag == 0


@pytest.mark.parametrize("theta,index", [(0.0, 0), (math.pi, -1)])
def test_poles_are_one_hot(theta, index):
    p = css_coefficients(7.5, theta).probabilities()
    expect = np.zeros(16)
    expect[index] = 1.0
    assert np.array_equal(p, expect)


def test_large_j_norm_and_mean():
    J, theta = 1e4, 0.2
    css = css_coefficients(J, theta)
    p = css.probabilities()
    assert abs(p.sum() - 1) < 1e-12
    n2 = np.sum((J + css.m) * p)
    assert n2 == pytest.approx(2 * J * math.sin(theta / 2) ** 2, rel=1e-8)


def test_phase_convention():
    css = css_coefficients(3, 0.9, 0.4)
    assert np.allclose(css.phase, -css.m * 0.4)


def test_cutoff_window_drops_negligible_weight():
    css = css_coefficients(5e4, 0.2)
    sl = css.support(60.0)
    assert sl.stop - sl.start < css.log_mag.size
    assert css.discarded_weight(60.0) < 1e-40


@pytest.mark.parametrize("J", [0.0, 1.25])
def test_bad_spin_rejected(J):
    with pytest.raises(ValueError):
        css_coefficients(J, 0.3)


@settings(max_examples=40, deadline=None)
@given(twoJ=st.integers(1, 4000), theta=st.floats(0, math.pi), phi0=st.floats(0, 2 * math.pi))
def test_css_normalized(twoJ, theta, phi0):
    p = css_coefficients(twoJ / 2, theta, phi0).probabilities()
    assert abs(p.sum() - 1) < 1e-12
