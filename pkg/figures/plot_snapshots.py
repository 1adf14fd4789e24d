#!/usr/bin/env python3
"""Snapshot panel figure: Re(psi_si) heatmaps over (eta, nu).

One row per input manifest (one manifest = one run, e.g. one preset), one
column per stored snapshot.  Each row shares a color scale symmetric about
zero so the sign flip of the real part is visually faithful.

Usage:
    plot_snapshots.py --manifest run1/manifest.json [run2/... ] \
                      --out snapshots.png [--labels S1 S2 ...]
"""

import argparse
import json
import os
import re
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from gridfile import read_grid

_SNAP_RE = re.compile(r"snapshot_z([+-]?\d+(?:\.\d+)?)\.grid$")


class ManifestError(ValueError):
    pass


def load_snapshots(manifest_path):
    """[(z, axes, values)] for every snapshot grid a manifest lists."""
    with open(manifest_path) as f:
        manifest = json.load(f)
    base = os.path.dirname(manifest_path)
    found = []
    for name in manifest.get("artifacts", {}):
        m = _SNAP_RE.match(name)
        if m:
            found.append((float(m.group(1)), os.path.join(base, name)))
    if not found:
        raise ManifestError(f"{manifest_path}: no snapshot grids listed")
    found.sort()
    out = []
    for z, path in found:
        axes, values = read_grid(path)
        if len(axes) != 2:
            raise ManifestError(f"{path}: expected a 2D grid, got rank {len(axes)}")
        out.append((z, axes, values))
    return out


def default_label(manifest_path):
    with open(manifest_path) as f:
        cfg = json.load(f).get("config", {})
    return cfg.get("preset") or os.path.basename(os.path.dirname(manifest_path))


def build_figure(manifest_paths, labels=None):
    rows = [load_snapshots(p) for p in manifest_paths]
    if labels is None:
        labels = [default_label(p) for p in manifest_paths]
    n_rows = len(rows)
    n_cols = max(len(r) for r in rows)
    fig, axes_grid = plt.subplots(
        n_rows, n_cols, figsize=(2.6 * n_cols, 2.6 * n_rows),
        squeeze=False, constrained_layout=True,
    )
    for i, (row, label) in enumerate(zip(rows, labels)):
        vmax = max(abs(vals.real).max() for _, _, vals in row) or 1.0
        for j in range(n_cols):
            ax = axes_grid[i][j]
            if j >= len(row):
                ax.set_axis_off()
                continue
            z, (eta_ax, nu_ax), vals = row[j]
            # values are indexed [eta, nu]; draw eta on x, nu on y
            im = ax.imshow(
                vals.real.T, origin="lower", cmap="RdBu_r",
                vmin=-vmax, vmax=vmax, interpolation="nearest",
                extent=(eta_ax.start, eta_ax.stop, nu_ax.start, nu_ax.stop),
                aspect="auto",
            )
            ax.set_title(f"{label}  z = {z:+.2f}", fontsize=9)
            if i == n_rows - 1:
                ax.set_xlabel(r"$\eta$")
            if j == 0:
                ax.set_ylabel(r"$\nu$")
        fig.colorbar(im, ax=list(axes_grid[i]), shrink=0.85,
                     label=r"Re $\Psi_{\mathrm{si}}$")
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
