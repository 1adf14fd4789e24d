#!/usr/bin/env python3
"""Reproduce the coupling-calibration triple pinned in cpcsim.defaults.

Three estimates of the coupling constant at response time sigma, in order of
increasing faithfulness (and cost):

  gamma_0   WKB seed: total phase pi accumulated through one pass of the
            Gaussian coupling window (closed form).
  gamma*    gated-oscillator shooting: the reduced single-coordinate ODE ends
            exactly at amplitude -1 with zero slope.
  gamma**   full 2D simulation: maximizes the final gate fidelity of the S1
            sech-product input on the reference grid.  Expensive (--full);
            without it the script prints the coarse-scan table only.

The gamma** landscape is very flat near its maximum (~1e-6 fidelity change
over +/- 0.3 in gamma), so the pinned value is quoted to ~3 digits.
"""

import argparse
import json
from dataclasses import replace

import numpy as np

from cpcsim import defaults
from cpcsim.cli import build_sim_config, resolve_config
from cpcsim.oracle import calibrate_gamma_oscillator, gamma_wkb, refine_gamma_full
from cpcsim.propagator import run
from cpcsim.waveshapes import build_preset


def coarse_scan(cfg, gammas):
    out = {}
    for g in gammas:
        c = replace(cfg, gamma=float(g))
        rec = run(build_preset("S1", c.eta_axis, c.nu_axis), c)
        out[float(g)] = float(rec.fidelity_trace[-1])
        print(f"  gamma = {g:6.2f}   F(L/2) = {out[float(g)]:.7f}", flush=True)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=defaults.SIGMA)
    ap.add_argument("--full", action="store_true",
                    help="run the full-simulation scan + refinement (slow)")
    ap.add_argument("--json", help="write results to this JSON file")
    args = ap.parse_args()

    g0 = gamma_wkb(args.sigma)
    gstar, residual = calibrate_gamma_oscillator(args.sigma)
    print(f"gamma_0 (WKB seed)     {g0:.6f}")
    print(f"gamma*  (oscillator)   {gstar:.10f}   residual {residual:.2e}")
    print(f"gamma* sqrt(sigma)     {gstar * np.sqrt(args.sigma):.6f}   (scale invariant)")

    results = {"sigma": args.sigma, "gamma_0": g0, "gamma_star": gstar,
               "residual": residual}

    if args.full:
        resolved = resolve_config({"preset": "S1",
                                   "kernel": {"sigma": args.sigma}})
        cfg = build_sim_config(resolved)
        print("coarse scan (full simulation per point):")
        scan = coarse_scan(cfg, np.arange(6.0, 16.1, 2.0))
        best = max(scan, key=scan.get)
        print(f"refining around gamma = {best} ...")
        gfull, ffull, probes = refine_gamma_full(
            cfg, bracket=(best - 1.5, best + 1.5), xtol=0.01)
        print(f"gamma** (full sim)     {gfull:.4f}   F(L/2) = {ffull:.7f}")
        results.update(gamma_full=gfull, fidelity=ffull,
                       scan=scan, probes=probes)
    else:
        print(f"gamma** (pinned)       {defaults.GAMMA_FULL:.4f}   "
              f"F(L/2) = {defaults.GAMMA_FULL_FIDELITY:.7f}   "
              "(rerun with --full to reproduce)")
        results.update(gamma_full=defaults.GAMMA_FULL,
                       fidelity=defaults.GAMMA_FULL_FIDELITY)

    if args.json:
        with open(args.json, "w") as f:
            json.dump(results, f, indent=1)
        print(f"wrote {args.json}")


if __name__ == "__main__":
    main()
