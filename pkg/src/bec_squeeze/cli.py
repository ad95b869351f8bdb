"""Command line entry point: ``bec-squeeze <subcommand> --config FILE``.

Exit codes: 0 success, 1 stability gate failed, 2 config error,
3 numerical failure, 4 selftest failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .errors import ConfigError, NumericalError
from .homodyne import homodyne_heatmap, scan_from_snapshot
from .output import (manifest, run_id, write_css, write_heatmap, write_json, write_populations,
                     write_sweep, write_timeseries)
from .params import baseline_config, derive_constants, load_config
from .pipeline import find_optimum, optimize_readout, run_simulation, sweep_mu
from .selftest import selftest
from .stability import stability_for_config
from .write import css_coefficients

EXIT_GATE, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_SELFTEST = 1, 2, 3, 4
DEFAULT_MU = "100,200,300,500,700,1000,1500,2000"


def _global_options(p: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    p.add_argument("--config", default=s, help="key = value parameter file (default: 23Na baseline)")
    p.add_argument("--out", default=s, help="output root directory (default: out)")
    p.add_argument("--seed", type=int, default=s)
    p.add_argument("--no-loss", action="store_true", default=s)
    p.add_argument("--threads", type=int, default=s)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bec-squeeze", description=__doc__.splitlines()[0])
    _global_options(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="time series, optimum and manifest")
    _global_options(p)
    p.add_argument("--dump-populations", action="store_true")

    p = sub.add_parser("sweep", help="best squeezing and t* versus mu_in")
    _global_options(p)
    p.add_argument("--mu", default=DEFAULT_MU, help="comma-separated mu_in values")
    p.add_argument("--lossy-only", action="store_true", help="skip the lossless reference")

    p = sub.add_parser("homodyne", help="LO-phase scan heatmap at a readout time")
    _global_options(p)
    p.add_argument("--t-read", default="auto", help="readout time in ms, or 'auto' for t*")
    p.add_argument("--samples", type=int, default=10**6, help="samples per LO phase")
    p.add_argument("--phi-bins", type=int, default=181)
    p.add_argument("--eps-bins", type=int, default=201)
    p.add_argument("--phi-offset", action="store_true", help="shift the phi axis by pi/2")

    p = sub.add_parser("stability", help="demixing estimate as JSON")
    _global_options(p)

    p = sub.add_parser("selftest", help="run the oracle and invariant suite")
    _global_options(p)
    p.add_argument("--quick", action="store_true", help="skip the mu-scaling sweep")

    p = sub.add_parser("dump-css", help="write (m, log|c_m|, phase) of the initial state")
    _global_options(p)
    p.add_argument("--full", action="store_true", help="all 2J+1 coefficients, no cutoff")
    return parser


def _resolve_config(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else baseline_config()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    if getattr(args, "no_loss", False):
        cfg = cfg.replace(loss_enabled=False)
    return cfg


def _out_dir(args, cfg) -> Path:
    d = Path(getattr(args, "out", "out")) / run_id(cfg)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_simulate(args, cfg, out):
    ts = run_simulation(cfg)
    opt = find_optimum(ts)
    write_timeseries(out / "timeseries.csv", ts)
    if args.dump_populations:
        write_populations(out / "populations.csv", ts.populations)
    write_json(out / "stability.json", ts.stability.to_dict())
    write_json(out / "manifest.json", manifest(cfg, ts.derived, extra={
        "optimum": {"t_star": opt.t_star, "V_opt_min_dB": opt.V_min_dB, "boundary": opt.boundary},
        "warnings": ts.warnings,
    }))
    print(f"t* = {opt.t_star * 1e3:.2f} ms, min V_opt = {opt.V_min_dB:.2f} dB -> {out}")
    return 0


def cmd_sweep(args, cfg, out):
    mus = [float(x) for x in args.mu.split(",") if x.strip()]
    threads = getattr(args, "threads", 1)
    res = sweep_mu(cfg, mus, both=not args.lossy_only, threads=threads)
    write_sweep(out / "sweep.csv", res)
    write_json(out / "manifest.json", manifest(cfg, derive_constants(cfg), extra={"sweep_mu": mus}))
    for r in sorted(res.rows, key=lambda r: (not r.loss_enabled, r.mu_in)):
        tag = "lossy   " if r.loss_enabled else "lossless"
        print(f"{tag} mu_in={r.mu_in:8.1f}  theta={r.theta_over_pi:.4f} pi  "
              f"t*={r.t_star * 1e3:8.2f} ms  best={r.best_V_opt_dB:7.2f} dB {r.error}")
    return 0


def cmd_homodyne(args, cfg, out):
    if args.t_read == "auto":
        ts, opt = optimize_readout(cfg)
        t_read = opt.t_star
    else:
        t_read = float(args.t_read) * 1e-3
        if t_read > cfg.t_max:
            cfg = cfg.replace(t_max=t_read)
        ts = run_simulation(cfg, extra_times=[t_read])
    i = ts.index_of(t_read)
    d = ts.derived
    scan = scan_from_snapshot(ts.snapshot(i), cfg.eta_read, float(ts.eta_coh[i]), d.mu_stored,
                              cfg.N0, samples_per_phi=args.samples, seed=cfg.seed, n_phi=args.phi_bins)
    hm = homodyne_heatmap(scan, args.eps_bins, phi_offset=math.pi / 2 if args.phi_offset else 0.0,
                          threads=getattr(args, "threads", 1))
    write_heatmap(out / "heatmap.csv", hm, scan)
    write_json(out / "manifest.json", manifest(ts.cfg, d, extra={"t_read": float(ts.t[i])}))
    print(f"t_read = {ts.t[i] * 1e3:.2f} ms, A_coh = {scan.A_coh:.3f}, "
          f"V_det in [{scan.V_det.min():.4f}, {scan.V_det.max():.4f}] -> {out}")
    return 0


def cmd_stability(args, cfg, out):
    rep = stability_for_config(cfg)
    write_json(out / "stability.json", rep.to_dict())
    print(json.dumps(rep.to_dict(), indent=2))
    return EXIT_GATE if rep.unstable and not rep.finite_size_suppressed else 0


def cmd_selftest(args, cfg, out):
    rep = selftest(quick=args.quick)
    for line in rep.lines():
        print(line)
    return 0 if rep.ok else EXIT_SELFTEST


def cmd_dump_css(args, cfg, out):
    d = derive_constants(cfg)
    css = css_coefficients(d.J, d.theta, cfg.phi0)
    path = write_css(out / "css.csv", css, None if args.full else cfg.coeff_cutoff_log)
    print(path)
    return 0


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "homodyne": cmd_homodyne,
            "stability": cmd_stability, "selftest": cmd_selftest, "dump-css": cmd_dump_css}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args, cfg)
    try:
        return COMMANDS[args.command](args, cfg, out)
    except NumericalError as exc:
        write_json(out / "manifest.json", manifest(cfg, derive_constants(cfg), extra={"error": repr(exc)}))
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
