"""Command-line interface: run orchestration, sweeps, calibration, file output.

Subcommands
    run        one propagation from a JSON config; writes trace CSV,
               snapshot grids and a manifest
    sweep      Cartesian product over listed parameter values, in parallel
    calibrate  print the gamma_0 / gamma* / gamma** calibration triple
    coherence  coherence map, T^(4) and slowness margin of a waveshape
    units      derived physical quantities from laboratory parameters
    presets    list the built-in waveshape presets

Configs are JSON; keys mirror the dataclass field names and unknown keys are
errors.  All computation is deterministic (fixed-step integrator): rerunning
a resolved config reproduces every output bit-identically.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

from . import __version__, defaults
from .grids import Axis, save_grid
from .kernel import GaussianKernel
from .propagator import SimConfig, run
from .waveshapes import PRESETS, WaveshapeSpec, build_preset, build_waveshape


class ConfigFileError(ValueError):
    pass


# --- config schema ---------------------------------------------------------

_TOP_KEYS = {
    "preset", "waveshape", "ensemble", "kernel", "gamma", "beta1s", "beta1i",
    "L", "dz", "grid", "snapshot_zs", "conservation_tol", "boundary_tol",
    "sweep",
}
_KERNEL_KEYS = {"sigma", "truncation_radius"}
_GRID_KEYS = {"t_min", "t_max", "spacing"}
_WAVESHAPE_KEYS = {"tau_s", "tau_i", "t_s0", "t_i0", "phi", "C_s", "C_i"}
_BRANCH_KEYS = {"weight", "preset", "waveshape"}

_S3_SNAPSHOTS = (-3.5, -0.5, 0.0, 0.5, 3.5)
_DEFAULT_SNAPSHOTS = (-3.5, -1.5, 0.0, 1.5, 3.5)


def _check_keys(d: dict, allowed: set, where: str):
    unknown = set(d) - allowed
    if unknown:
        raise ConfigFileError(
            f"unknown key(s) {sorted(unknown)} in {where}; "
            f"allowed: {sorted(allowed)}"
        )


def load_config(path: str) -> dict:
    with open(path) as f:
        raw = json.load(f)
    if not isinstance(raw, dict):
        raise ConfigFileError("config root must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config root")
    for sub, keys in (("kernel", _KERNEL_KEYS), ("grid", _GRID_KEYS),
                      ("waveshape", _WAVESHAPE_KEYS)):
        if sub in raw:
            _check_keys(raw[sub], keys, sub)
    if "ensemble" in raw:
        _check_keys(raw["ensemble"], {"branches"}, "ensemble")
        for i, br in enumerate(raw["ensemble"].get("branches", [])):
            _check_keys(br, _BRANCH_KEYS, f"ensemble branch {i}")
            if "waveshape" in br:
                _check_keys(br["waveshape"], _WAVESHAPE_KEYS, f"branch {i} waveshape")
    return raw


def resolve_config(raw: dict) -> dict:
    """Fill every optional field with its documented default.

    The resolved dict is echoed into the manifest so reruns are exact.
    """
    preset = raw.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigFileError(f"unknown preset {preset!r}; have {sorted(PRESETS)}")
    if preset is None and "waveshape" not in raw and "ensemble" not in raw:
        raise ConfigFileError("config needs one of: preset, waveshape, ensemble")
    default_snaps = _S3_SNAPSHOTS if preset == "S3" else _DEFAULT_SNAPSHOTS
    kernel = {"sigma": 0.05, "truncation_radius": 5.0, **raw.get("kernel", {})}
    grid = {"t_min": -6.0, "t_max": 6.0, "spacing": 0.025, **raw.get("grid", {})}
    resolved = {
        "preset": preset,
        "waveshape": raw.get("waveshape"),
        "ensemble": raw.get("ensemble"),
        "kernel": kernel,
        "grid": grid,
        "gamma": raw.get("gamma", defaults.GAMMA_FULL),
        "beta1s": raw.get("beta1s", 1.0),
        "beta1i": raw.get("beta1i", -1.0),
        "L": raw.get("L", 7.0),
        "dz": raw.get("dz", 0.0025),
        "snapshot_zs": list(raw.get("snapshot_zs", default_snaps)),
        "conservation_tol": raw.get("conservation_tol", 1e-6),
        "boundary_tol": raw.get("boundary_tol", 0.02),
    }
    return resolved


def build_sim_config(resolved: dict) -> SimConfig:
    ax = Axis.from_range(
        resolved["grid"]["t_min"], resolved["grid"]["t_max"],
        resolved["grid"]["spacing"],
    )
    return SimConfig(
        kernel=GaussianKernel(**resolved["kernel"]),
        gamma=resolved["gamma"],
        eta_axis=ax,
        nu_axis=ax,
        ta_axis=ax,
        beta1s=resolved["beta1s"],
        beta1i=resolved["beta1i"],
        L=resolved["L"],
        dz=resolved["dz"],
        snapshot_zs=tuple(resolved["snapshot_zs"]),
        conservation_tol=resolved["conservation_tol"],
        boundary_tol=resolved["boundary_tol"],
    )


def build_input(resolved: dict, cfg: SimConfig):
    if resolved["preset"] is not None:
        return build_preset(resolved["preset"], cfg.eta_axis, cfg.nu_axis)
    if resolved["waveshape"] is not None:
        return build_waveshape(
            WaveshapeSpec(**resolved["waveshape"]), cfg.eta_axis, cfg.nu_axis
        )
    raise ConfigFileError("no input waveshape in config")


# --- artifacts -------------------------------------------------------------

def _digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _digest_file(path: str) -> str:
    with open(path, "rb") as f:
        return _digest_bytes(f.read())


def write_trace_csv(path: str, record) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["z", "F", "n_si", "n_a", "front"])
        for i in range(len(record.z_trace)):
            w.writerow(
                [
                    f"{record.z_trace[i]:.17g}",
                    f"{record.fidelity_trace[i]:.17g}",
                    f"{record.norm_si_trace[i]:.17g}",
                    f"{record.norm_a_trace[i]:.17g}",
                    f"{record.front_trace[i]:.17g}",
                ]
            )


def _run_one(resolved: dict, out_dir: str) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    cfg = build_sim_config(resolved)
    t0 = time.time()
    artifacts = {}

    if resolved["ensemble"] is not None:
        from .ensemble import EnsembleSpec, run_ensemble

        branches = []
        for br in resolved["ensemble"]["branches"]:
            if "preset" in br:
                shape = build_preset(br["preset"], cfg.eta_axis, cfg.nu_axis)
            else:
                shape = WaveshapeSpec(**br["waveshape"])
            branches.append((br["weight"], shape))
        erec = run_ensemble(EnsembleSpec(branches=tuple(branches)), cfg)
        for b, brec in enumerate(erec.branch_records):
            p = os.path.join(out_dir, f"trace_branch{b}.csv")
            write_trace_csv(p, brec)
            artifacts[p] = _digest_file(p)
        mix_path = os.path.join(out_dir, "trace_mixed.csv")
        with open(mix_path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["z", "F_mix"])
            for zv, fv in zip(erec.z_trace, erec.mixed_fidelity_trace):
                w.writerow([f"{zv:.17g}", f"{fv:.17g}"])
        artifacts[mix_path] = _digest_file(mix_path)
        record = erec.branch_records[0]
        summary = {
            "F_mix_final": float(erec.mixed_fidelity_trace[-1]),
            "min_branch_F_final": erec.min_final_fidelity,
        }
    else:
        inp = build_input(resolved, cfg)
        record = run(inp, cfg)
        trace_path = os.path.join(out_dir, "trace.csv")
        write_trace_csv(trace_path, record)
        artifacts[trace_path] = _digest_file(trace_path)
        for zv, psi_si, psi_a in record.snapshots:
            p = os.path.join(out_dir, f"snapshot_z{zv:+.3f}.grid")
            save_grid(p, psi_si)
            artifacts[p] = _digest_file(p)
        summary = {
            "F_final": float(record.fidelity_trace[-1]),
            "n_a_final": float(record.norm_a_trace[-1]),
        }

    manifest = {
        "version": __version__,
        "config": resolved,
        "config_digest": _digest_bytes(
            json.dumps(resolved, sort_keys=True).encode()
        ),
        "artifacts": {os.path.basename(k): v for k, v in artifacts.items()},
        "steps": len(record.z_trace) - 1,
        "wall_clock_s": time.time() - t0,
        "summary": summary,
    }
    mpath = os.path.join(out_dir, "manifest.json")
    with open(mpath, "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
    return manifest


# --- subcommands -----------------------------------------------------------

def cmd_run(args) -> int:
    resolved = resolve_config(load_config(args.config))
    if "sweep" in load_config(args.config):
        print("config contains a 'sweep' block; use the sweep subcommand",
              file=sys.stderr)
        return 2
    manifest = _run_one(resolved, args.out)
    print(json.dumps(manifest["summary"], indent=1))
    return 0


def _sweep_point(item):
    point, resolved, out_dir = item
    sub = os.path.join(
        out_dir, "_".join(f"{k}={v:g}" for k, v in point.items())
    )
    try:
        manifest = _run_one(resolved, sub)
        return point, manifest["summary"], None
    except Exception as exc:  # partial failures recorded; sweep continues
        return point, None, f"{type(exc).__name__}: {exc}"


def cmd_sweep(args) -> int:
    raw = load_config(args.config)
    ranges = raw.get("sweep")
    if not ranges:
        print("sweep config must contain a non-empty 'sweep' object",
              file=sys.stderr)
        return 2
    for key, vals in ranges.items():
        if key not in ("gamma", "dz", "L"):
            print(f"unsupported sweep parameter {key!r}", file=sys.stderr)
            return 2
        if not vals:
            print(f"empty sweep range for {key!r}", file=sys.stderr)
            return 2
    base = dict(raw)
    base.pop("sweep")
    keys = sorted(ranges)
    items = []
    for combo in itertools.product(*(ranges[k] for k in keys)):
        point = dict(zip(keys, combo))
        resolved = resolve_config({**base, **point})
        items.append((point, resolved, args.out))

    workers = args.workers or os.cpu_count() or 1
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, items))
    else:
        results = [_sweep_point(it) for it in items]

    os.makedirs(args.out, exist_ok=True)
    summary_path = os.path.join(args.out, "summary.csv")
    with open(summary_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(keys + ["F_final", "n_a_final", "error"])
        for point, summary, err in results:
            row = [f"{point[k]:.17g}" for k in keys]
            if summary is not None:
                row += [
                    f"{summary.get('F_final', summary.get('F_mix_final')):.17g}",
                    f"{summary.get('n_a_final', math.nan):.17g}",
                    "",
                ]
            else:
                row += ["", "", err]
            w.writerow(row)
    print(f"wrote {summary_path} ({len(results)} points)")
    return 0 if all(err is None for _, _, err in results) else 1


def cmd_calibrate(args) -> int:
    from .oracle import calibrate_gamma_oscillator, gamma_wkb, refine_gamma_full

    sigma = args.sigma
    g0 = gamma_wkb(sigma)
    gstar, residual = calibrate_gamma_oscillator(sigma)
    if args.full:
        resolved = resolve_config({"preset": "S1", "kernel": {"sigma": sigma}})
        gfull, ffull, _ = refine_gamma_full(build_sim_config(resolved))
    elif abs(sigma - defaults.SIGMA) < 1e-12:
        gfull, ffull = defaults.GAMMA_FULL, defaults.GAMMA_FULL_FIDELITY
    else:
        gfull, ffull = math.nan, math.nan
    rows = [
        ("gamma_0 (WKB seed)", g0, ""),
        ("gamma*  (oscillator)", gstar, f"residual {residual:.2e}"),
        ("gamma** (full sim)", gfull, f"F(L/2) {ffull:.6f}"
         if math.isfinite(gfull) else "pass --full for this sigma"),
    ]
    for name, val, note in rows:
        print(f"{name:24s} {val:12.6f}  {note}")
    return 0


def cmd_coherence(args) -> int:
    from .observables import coherence_time_T4, gamma22, slowness_margin

    resolved = resolve_config(load_config(args.config) if args.config
                              else {"preset": args.preset})
    cfg = build_sim_config(resolved)
    grid = build_input(resolved, cfg)
    sigma = cfg.kernel.sigma
    cmap = gamma22(grid, half_window=args.half_window or 10 * sigma,
                   spacing=args.spacing or sigma / 4)
    t4 = coherence_time_T4(cmap)
    slow = slowness_margin(grid, sigma)
    print(f"T4                 {t4.value:.6g}"
          + ("  (capped by window; widen --half-window)" if t4.capped else ""))
    print(f"T4 / sigma         {t4.value / sigma:.6g}")
    print(f"slowness margin    {slow.margin:.6g}")
    print(f"gradient criterion {slow.gradient_ratio:.6g}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        from .grids import ComplexGrid2D
        save_grid(os.path.join(args.out, "coherence.grid"),
                  ComplexGrid2D(cmap.tau_s_axis, cmap.tau_i_axis, cmap.values))
    return 0


_UNITS_REQUIRED = ("n2", "I_p", "S", "beta1", "tau_fwhm", "sigma_phys", "lambda_p")


def cmd_units(args) -> int:
    from .physical_units import (PhysicalParams, gamma_physical, normalize,
                                 z0_interaction_length)

    raw = load_config(args.config) if args.config else {}
    _check_keys(raw, set(_UNITS_REQUIRED), "units config")
    params = {}
    for name in _UNITS_REQUIRED:
        cli_val = getattr(args, name, None)
        val = cli_val if cli_val is not None else raw.get(name)
        if val is None:
            print(f"missing required field: {name}", file=sys.stderr)
            return 2
        params[name] = val
    p = PhysicalParams(**params)
    gp = gamma_physical(p)
    rows = [
        ("gamma_physical [1/(m sqrt(s))]", gp, "from n2, I_p, lambda_p, S"),
        ("tau (sech, s)", p.tau_sech, "FWHM / 1.7627"),
        ("z0 = tau/|beta1| (m, FWHM reading)", z0_interaction_length(p.tau_sech, p.beta1), ""),
        ("z0 (m, tau_fwhm as sech parameter)", z0_interaction_length(p.tau_fwhm, p.beta1), "alternative reading"),
    ]
    for use_fwhm, label in ((True, "FWHM reading"), (False, "sech-parameter reading")):
        n = normalize(p, use_fwhm=use_fwhm)
        rows.append((f"sigma/tau ({label})", n.sigma, ""))
        rows.append((f"normalized gamma ({label})", n.gamma, ""))
    for name, val, note in rows:
        print(f"{name:40s} {val:14.6g}  {note}")
    return 0


def cmd_presets(args) -> int:
    for name in sorted(PRESETS):
        print(f"{name}: {PRESETS[name]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpcsim", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seedless", action="store_true",
                   help="reserved no-op: all computation is already deterministic")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="single propagation run")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_run)

    ps = sub.add_parser("sweep", help="Cartesian parameter sweep")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out", required=True)
    ps.add_argument("--workers", type=int, default=0,
                    help="worker processes (default: logical cores)")
    ps.set_defaults(func=cmd_sweep)

    pc = sub.add_parser("calibrate", help="print the calibration triple")
    pc.add_argument("--sigma", type=float, default=defaults.SIGMA)
    pc.add_argument("--full", action="store_true",
                    help="re-run the expensive full-simulation refinement")
    pc.set_defaults(func=cmd_calibrate)

    pco = sub.add_parser("coherence", help="coherence map and slowness margin")
    pco.add_argument("--config")
    pco.add_argument("--preset", default="S1")
    pco.add_argument("--half-window", dest="half_window", type=float)
    pco.add_argument("--spacing", type=float)
    pco.add_argument("--out")
    pco.set_defaults(func=cmd_coherence)

    pu = sub.add_parser("units", help="physical-unit conversions")
    pu.add_argument("--config")
    for name in _UNITS_REQUIRED:
        pu.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    pu.set_defaults(func=cmd_units)

    pp = sub.add_parser("presets", help="list built-in waveshape presets")
    pp.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigFileError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
