"""CSV/JSON writers and run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .homodyne import GENERATOR_ID


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def run_id(cfg) -> str:
    blob = json.dumps(_jsonable(cfg.to_dict()), sort_keys=True)
    return hashlib.sha256(f"{blob}|{cfg.seed}".encode()).hexdigest()[:16]


def manifest(cfg, derived, *, extra=None, timestamp=True) -> dict:
    m = {
        "code_version": __version__,
        "run_id": run_id(cfg),
        "seed": cfg.seed,
        "generator": GENERATOR_ID,
        "config_si": cfg.to_dict(),
        "derived": derived.to_dict(),
        "conventions": {
            "frame": "rotating frame of the linear Jz term (Omega_lin = 0)",
            "overlap_profile": "Thomas-Fermi, I2 = 15/(14 pi R^3), I3 = 75/(56 pi^2 R^6)",
            "stability_density": cfg.density_convention,
        },
    }
    if extra:
        m.update(extra)
    if timestamp:
        m["created"] = datetime.now(timezone.utc).isoformat()
    return _jsonable(m)


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def write_columns(path, columns: dict) -> Path:
    """CSV with one column per dict entry; floats written with repr precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*data):
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def write_timeseries(path, ts) -> Path:
    return write_columns(path, ts.columns())


def write_populations(path, pops) -> Path:
    return write_columns(path, {
        "t": pops.t_grid, "N1": pops.N1, "N2": pops.N2, "eta_coh": pops.eta_coh,
        "gamma1": pops.gamma1, "gamma2": pops.gamma2, "gamma3": pops.gamma3, "s_q": pops.s_q,
    })


def write_css(path, css, cutoff_log=None) -> Path:
    sl = slice(None) if cutoff_log is None else css.support(cutoff_log)
    return write_columns(path, {"m": css.m[sl], "log_abs_c": css.log_mag[sl], "phase": css.phase[sl]})


def write_sweep(path, result) -> Path:
    rows = sorted(result.rows, key=lambda r: (not r.loss_enabled, r.mu_in))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mu_in", "theta", "theta_over_pi", "t_star", "best_V_opt_dB",
                    "loss_enabled", "boundary", "t_max", "error"])
        for r in rows:
            w.writerow([repr(r.mu_in), repr(r.theta), repr(r.theta_over_pi), repr(r.t_star),
                        repr(r.best_V_opt_dB), str(r.loss_enabled).lower(),
                        str(r.boundary).lower(), repr(r.t_max), r.error])
    return path


def write_heatmap(path, heatmap, scan) -> tuple[Path, Path]:
    """Counts grid (rows = epsilon bins, columns = phi bins) plus a JSON sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, heatmap.counts, fmt="%d", delimiter=",")
    side = path.with_suffix(".json")
    write_json(side, {
        "phi_edges": heatmap.phi_edges, "eps_edges": heatmap.eps_edges,
        "A_coh": scan.A_coh, "phi_coh": scan.phi_coh, "seed": scan.seed,
        "samples_per_phi": scan.samples_per_phi, "generator": GENERATOR_ID,
        "transform": "log10(counts + 1)", "V_det": scan.V_det,
    })
    return path, side
