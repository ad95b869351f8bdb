"""Optical readout and simulated balanced-homodyne LO-phase scans.

Random numbers: column ``i`` of a scan draws from a Philox generator keyed by
``SeedSequence(seed, spawn_key=(i,))``; normal deviates come from the inverse
normal CDF applied to 53-bit uniforms on the open interval (0, 1). Columns are
therefore independent of evaluation order and thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .errors import EmptyRange

GENERATOR_ID = "numpy.Philox(SeedSequence(seed, spawn_key=(column,))) + ndtri((k + 0.5) / 2**53)"
N_PHI_DEFAULT = 181
N_EPS_DEFAULT = 201


def optical_variance(v_A, eta_read):
    """Beam-splitter mixing of the atomic variance with vacuum."""
    return (1.0 - eta_read) + eta_read * np.asarray(v_A)


def coherent_fringe(eta_read, eta_coh_t, mu_stored, N0, phi_coh=0.0):
    """Fringe amplitude A_coh and the callable mu(phi) = A_coh cos(phi - phi_coh)."""
    mu = min(mu_stored, N0)
    A = 2.0 * math.sqrt(eta_read * eta_coh_t * mu)
    return A, (lambda phi: A * np.cos(np.asarray(phi) - phi_coh))


def phi_bin_centers(n_bins: int = N_PHI_DEFAULT) -> np.ndarray:
    return (np.arange(n_bins) + 0.5) * (2.0 * math.pi / n_bins)


@dataclass
class HomodyneScan:
    phi_grid: np.ndarray
    A_coh: float
    phi_coh: float
    V_det: np.ndarray
    samples_per_phi: int
    seed: int

    def __post_init__(self):
        self.phi_grid = np.asarray(self.phi_grid, dtype=float)
        self.V_det = np.broadcast_to(np.asarray(self.V_det, dtype=float), self.phi_grid.shape).copy()
        if np.any(self.V_det <= 0):
            raise ValueError("V_det must be positive")

    def fringe(self, phi=None):
        phi = self.phi_grid if phi is None else phi
        return self.A_coh * np.cos(np.asarray(phi) - self.phi_coh)


def scan_from_snapshot(snapshot, eta_read, eta_coh_t, mu_stored, N0, *,
                       samples_per_phi=10**6, seed=42, n_phi=N_PHI_DEFAULT) -> HomodyneScan:
    """Scan at one storage time; fringe origin is the azimuth of the mean transverse spin."""
    phi = phi_bin_centers(n_phi)
    phi_coh = float(np.arctan2(snapshot.mean[1], snapshot.mean[0]))
    A, _ = coherent_fringe(eta_read, eta_coh_t, mu_stored, N0, phi_coh)
    V = optical_variance(snapshot.v_A(phi), eta_read)
    return HomodyneScan(phi, A, phi_coh, V, int(samples_per_phi), int(seed))


def column_normals(seed: int, column: int, n: int) -> np.ndarray:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(column),))
    rng = np.random.Generator(np.random.Philox(ss))
    k = rng.integers(0, 2**53, size=n, dtype=np.int64)
    return ndtri((k + 0.5) * 2.0**-53)


def sample_column(scan: HomodyneScan, i: int) -> np.ndarray:
    xi = column_normals(scan.seed, i, scan.samples_per_phi)
    return scan.fringe(scan.phi_grid[i]) + math.sqrt(scan.V_det[i]) * xi


def sample_quadratures(scan: HomodyneScan) -> np.ndarray:
    """All samples, shape (n_phi, samples_per_phi). Use :func:`homodyne_heatmap` for big scans."""
    return np.stack([sample_column(scan, i) for i in range(scan.phi_grid.size)])


@dataclass
class HomodyneHeatmap:
    counts: np.ndarray  # (n_eps, n_phi) int64; rows = epsilon bins
    phi_edges: np.ndarray
    eps_edges: np.ndarray
    column_variance: np.ndarray = field(default=None)

    @property
    def transform(self) -> np.ndarray:
        return np.log10(self.counts + 1.0)


def default_eps_range(scan: HomodyneScan, n_sigma: float = 5.0):
    mu = scan.fringe()
    sig = math.sqrt(float(np.max(scan.V_det)))
    return float(mu.min() - n_sigma * sig), float(mu.max() + n_sigma * sig)


def _bin_column(eps, lo, hi, n_eps, clip):
    width = (hi - lo) / n_eps
    idx = np.floor((eps - lo) / width).astype(np.int64)
    if clip:
        np.clip(idx, 0, n_eps - 1, out=idx)
    else:
        idx = idx[(idx >= 0) & (idx < n_eps)]
    return np.bincount(idx, minlength=n_eps)


def _phi_edges(n_phi, phi_offset):
    return np.linspace(0.0, 2.0 * math.pi, n_phi + 1) + phi_offset


def build_heatmap(samples, phi_bins=N_PHI_DEFAULT, eps_bins=N_EPS_DEFAULT, *,
                  eps_range=None, phi_offset=0.0, clip=True) -> HomodyneHeatmap:
    """Bin pre-drawn samples (one row per phi grid point, one column per bin).

    ``phi_offset`` shifts only the phi axis labels (the pi/2 overlay trick);
    outliers land in the edge epsilon bins unless ``clip`` is False.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] != phi_bins:
        raise ValueError("samples must have one row per phi bin")
    if phi_bins < 2 or eps_bins < 2:
        raise ValueError("need at least 2 bins per axis")
    if eps_range is None:
        if samples.size == 0:
            eps_range = (-1.0, 1.0)
        else:
            eps_range = (float(samples.min()), float(samples.max()))
            if eps_range[0] == eps_range[1]:
                eps_range = (eps_range[0] - 0.5, eps_range[1] + 0.5)
    lo, hi = eps_range
    counts = np.zeros((eps_bins, phi_bins), dtype=np.int64)
    for i in range(phi_bins):
        if samples.shape[1]:
            counts[:, i] = _bin_column(samples[i], lo, hi, eps_bins, clip)
    if samples.size and counts.sum() == 0:
        raise EmptyRange("no samples fall inside the epsilon bins")
    var = samples.var(axis=1, ddof=1) if samples.shape[1] > 1 else None
    return HomodyneHeatmap(counts, _phi_edges(phi_bins, phi_offset),
                           np.linspace(lo, hi, eps_bins + 1), var)


def homodyne_heatmap(scan: HomodyneScan, eps_bins=N_EPS_DEFAULT, *, eps_range=None,
                     phi_offset=0.0, threads=1) -> HomodyneHeatmap:
    """Draw and bin column by column without materializing all samples."""
    n_phi = scan.phi_grid.size
    lo, hi = eps_range if eps_range is not None else default_eps_range(scan)

    def work(i):
        eps = sample_column(scan, i)
        return _bin_column(eps, lo, hi, eps_bins, True), eps.var(ddof=1)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(work, range(n_phi)))
    else:
        results = [work(i) for i in range(n_phi)]
    counts = np.stack([r[0] for r in results], axis=1)
    var = np.array([r[1] for r in results])
    return HomodyneHeatmap(counts, _phi_edges(n_phi, phi_offset),
                           np.linspace(lo, hi, eps_bins + 1), var)
