import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bec_squeeze.correlators import (brute_force_moments, ladder_factor, raising_correlator,
                                     unitary_correlators)
from bec_squeeze.errors import OutOfRange, TooLarge
from bec_squeeze.write import css_coefficients


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1.0)))


def test_ladder_values():
    assert ladder_factor(1, 0, +1) == pytest.approx(math.sqrt(2))
    assert ladder_factor(0.5, 0.5, +1) == pytest.approx(1.0)
    assert ladder_factor(1, 1, +1) == pytest.approx(math.sqrt(2))
    for J in (0.5, 3, 7.5, 20):
        assert ladder_factor(J, -J + 1, +1) == pytest.approx(math.sqrt(2 * J))
        assert ladder_factor(J, -J, +1) == 0.0
        assert ladder_factor(J, J, -1) == 0.0


def test_ladder_out_of_range():
    with pytest.raises(OutOfRange):
        ladder_factor(1, 2, +1)


@pytest.mark.parametrize("J,theta,phi0", [(2, 0.7, 0.3), (10, 0.2, 0.0), (7.5, 2.5, 5.0), (200, 1.1, 0.4)])
def test_initial_raising_correlator(J, theta, phi0):
    E = unitary_correlators(css_coefficients(J, theta, phi0), 1.0, 0.0)
    expect = J * math.sin(theta) * np.exp(1j * phi0)
    assert abs(E[1] - expect) / abs(expect) < 1e-10


def test_single_spin_does_not_twist():
    css = css_coefficients(0.5, 1.0, 0.2)
    E = unitary_correlators(css, 1.0, np.linspace(0, 10, 11))
    assert np.allclose(E[1], E[1][0], rtol=0, atol=1e-14)


@pytest.mark.parametrize("J", range(1, 21))
def test_revival_at_tau_pi(J):
    css = css_coefficients(float(J), 0.9, 0.4)
    e0 = unitary_correlators(css, 1.0, 0.0, cutoff_log=np.inf)
    ep = unitary_correlators(css, 1.0, math.pi, cutoff_log=np.inf)
    assert rel(ep[1], -e0[1]) < 1e-10
    assert rel(ep[3], e0[3]) < 1e-10


def test_brute_force_fixture():
    css = css_coefficients(2, 0.7, 0.3)
    E = unitary_correlators(css, 1.0, 0.5, cutoff_log=np.inf)
    bf = brute_force_moments(2, 0.7, 0.3, 1.0, 0.5)
    assert rel(E.E, bf.E) < 1e-10


def test_pole_state_annihilated():
    css = css_coefficients(5, 0.0)
    E = unitary_correlators(css, 1.0, 0.3, cutoff_log=np.inf)
    assert np.all(E.E == 0)
    assert E.Jz_mean == -5 and E.Jz2_mean == 25


def test_single_spin_brute_force():
    theta, phi0 = 1.1, 0.8
    bf = brute_force_moments(0.5, theta, phi0, 3.0, 2.0)
    assert bf.mean == pytest.approx([0.5 * math.sin(theta) * math.cos(phi0),
                                     0.5 * math.sin(theta) * math.sin(phi0),
                                     -0.5 * math.cos(theta)])
    assert abs(bf.E[2]) == 0


def test_brute_force_size_limit():
    with pytest.raises(TooLarge):
        brute_force_moments(30, 0.1, 0, 1, 1)


def test_conjugate_pairs_baseline():
    css = css_coefficients(5e4, 0.2)
    E = unitary_correlators(css, -0.0284, np.linspace(0, 0.15, 5))
    assert E.conjugacy_error() < 1e-10


def test_raising_correlator_matches_full_set():
    css = css_coefficients(500, 0.3, 0.1)
    t = np.linspace(0, 0.2, 9)
    assert rel(raising_correlator(css, -0.03, t), unitary_correlators(css, -0.03, t)[1]) < 1e-13


def test_compensated_sum_agrees():
    css = css_coefficients(2000, 0.4)
    a = unitary_correlators(css, 0.01, 3.0)
    b = unitary_correlators(css, 0.01, 3.0, compensated=True)
    assert rel(a.E, b.E) < 1e-10


def test_cutoff_is_harmless():
    css = css_coefficients(5e4, 0.2)
    a = unitary_correlators(css, -0.0284, 0.03)
    b = unitary_correlators(css, -0.0284, 0.03, cutoff_log=np.inf)
    assert rel(a.E, b.E) < 1e-12


@settings(max_examples=30, deadline=None)
@given(twoJ=st.integers(1, 40), theta=st.floats(0.01, math.pi - 0.01),
       phi0=st.floats(0, 2 * math.pi), chi=st.floats(0.1, 3.0), t=st.floats(0, 2.0))
def test_matches_dense_oracle(twoJ, theta, phi0, chi, t):
    J = twoJ / 2
    E = unitary_correlators(css_coefficients(J, theta, phi0), chi, t, cutoff_log=np.inf)
    bf = brute_force_moments(J, theta, phi0, chi, t)
    assert rel(E.E, bf.E) < 1e-10
    assert E.Jz_mean == pytest.approx(bf.Jz_mean, abs=1e-10 * max(J, 1))
