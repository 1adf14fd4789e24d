#!/usr/bin/env python3
"""Fidelity-vs-z figure: one labeled curve F(z) per run manifest.

Reads each manifest's trace CSV (columns z,F,n_si,n_a,front) and plots the
fidelity column on a fixed [0, 1] axis.  Traces with different z grids are
plotted as-is, without resampling.

Usage:
    plot_fidelity.py --manifest S1/manifest.json S2/... --out fidelity.png
"""

import argparse
import csv
import json
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


class ManifestError(ValueError):
    pass


def load_trace(manifest_path):
    with open(manifest_path) as f:
        manifest = json.load(f)
    base = os.path.dirname(manifest_path)
    if "trace.csv" not in manifest.get("artifacts", {}):
        raise ManifestError(f"{manifest_path}: no trace.csv listed")
    z, fid = [], []
    with open(os.path.join(base, "trace.csv")) as f:
        reader = csv.DictReader(f)
        for row in reader:
            z.append(float(row["z"]))
            fid.append(float(row["F"]))
    if not z:
        raise ManifestError(f"{manifest_path}: empty trace")
    return z, fid


def default_label(manifest_path):
    with open(manifest_path) as f:
        cfg = json.load(f).get("config", {})
    return cfg.get("preset") or os.path.basename(os.path.dirname(manifest_path))


def build_figure(manifest_paths, labels=None):
    if labels is None:
        labels = [default_label(p) for p in manifest_paths]
    fig, ax = plt.subplots(figsize=(5.2, 3.6), constrained_layout=True)
    for path, label in zip(manifest_paths, labels):
        z, fid = load_trace(path)
        ax.plot(z, fid, label=label)
    ax.set_xlabel("z")
    ax.set_ylabel("F")
    ax.set_ylim(0.0, 1.0)
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--manifest", nargs="+", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--labels", nargs="+")
    ap.add_argument("--dpi", type=int, default=150)
    args = ap.parse_args(argv)
    if args.labels and len(args.labels) != len(args.manifest):
        ap.error("--labels must match --manifest in length")
    fig = build_figure(args.manifest, args.labels)
    fig.savefig(args.out, dpi=args.dpi)
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
