import math

import numpy as np
import pytest

from bec_squeeze.errors import EmptyRange
from bec_squeeze.homodyne import (HomodyneScan, build_heatmap, coherent_fringe, column_normals,
                                  homodyne_heatmap, optical_variance, phi_bin_centers,
                                  sample_quadratures, scan_from_snapshot)


@pytest.mark.parametrize("eta,v,expect", [(1.0, 0.3, 0.3), (0.0, 0.3, 1.0), (0.5, 0.5, 0.75)])
def test_optical_variance(eta, v, expect):
    assert optical_variance(v, eta) == pytest.approx(expect)


def test_fringe_amplitude():
    A, mu = coherent_fringe(1.0, 1.0, 1000, 1e5)
    assert A == pytest.approx(63.2455532)
    assert mu(0.0) == pytest.approx(A)
    assert coherent_fringe(1.0, 1.0, 0.0, 1e5)[0] == 0.0
    assert coherent_fringe(1.0, 0.25, 1000, 1e5)[0] == pytest.approx(A / 2)


def test_pure_noise_column_means():
    n = 40_000
    scan = HomodyneScan(phi_bin_centers(31), 0.0, 0.0, 0.7, n, 3)
    s = sample_quadratures(scan)
    assert np.all(np.abs(s.mean(axis=1)) < 5 * math.sqrt(0.7 / n))


def test_normals_are_standard():
    x = column_normals(42, 0, 200_000)
    assert abs(x.mean()) < 5 / math.sqrt(x.size)
    assert x.var() == pytest.approx(1.0, abs=0.02)
    assert np.all(np.isfinite(x))


def test_columns_independent_of_order_and_threads():
    scan = HomodyneScan(phi_bin_centers(12), 2.0, 0.3, np.linspace(0.2, 3, 12), 5000, 42)
    a = homodyne_heatmap(scan)
    b = homodyne_heatmap(scan, threads=4)
    assert np.array_equal(a.counts, b.counts)
    assert np.array_equal(a.counts.sum(axis=0), np.full(12, 5000))


def test_seed_changes_output():
    mk = lambda seed: HomodyneScan(phi_bin_centers(4), 1.0, 0.0, 1.0, 1000, seed)
    assert not np.array_equal(homodyne_heatmap(mk(1)).counts, homodyne_heatmap(mk(2)).counts)


def test_column_sums_and_clipping():
    rng = np.random.default_rng(0)
    samples = rng.normal(size=(9, 777)) * 10
    hm = build_heatmap(samples, 9, 21, eps_range=(-1, 1))
    assert np.all(hm.counts.sum(axis=0) == 777)
    unclipped = build_heatmap(samples, 9, 21, eps_range=(-1, 1), clip=False)
    assert unclipped.counts.sum() < 9 * 777


def test_empty_samples():
    hm = build_heatmap(np.zeros((5, 0)), 5, 7)
    assert hm.counts.shape == (7, 5)
    assert np.all(hm.counts == 0) and np.all(hm.transform == 0)


def test_all_outside_range():
    with pytest.raises(EmptyRange):
        build_heatmap(np.full((3, 10), 100.0), 3, 5, eps_range=(-1, 1), clip=False)


def test_phi_offset_moves_edges_only():
    rng = np.random.default_rng(1)
    s = rng.normal(size=(6, 100))
    a = build_heatmap(s, 6, 11, eps_range=(-3, 3))
    b = build_heatmap(s, 6, 11, eps_range=(-3, 3), phi_offset=math.pi / 2)
    assert np.array_equal(a.counts, b.counts)
    assert b.phi_edges == pytest.approx(a.phi_edges + math.pi / 2)


def test_narrowest_band_tracks_squeezed_quadrature(lossless_run):
    ts = lossless_run
    i = int(np.argmin(ts.V_opt))
    snap = ts.snapshot(i)
    scan = scan_from_snapshot(snap, 1.0, float(ts.eta_coh[i]), ts.derived.mu_stored, ts.cfg.N0,
                              samples_per_phi=50_000, n_phi=91)
    hm = homodyne_heatmap(scan)
    sd = np.sqrt(hm.column_variance)
    k_min, k_max = int(np.argmin(scan.V_det)), int(np.argmax(scan.V_det))
    assert abs(int(np.argmin(sd)) - k_min) <= 1
    expect = math.sqrt(scan.V_det.max() / scan.V_det.min())
    assert sd[k_max] / sd[k_min] == pytest.approx(expect, rel=0.03)
