#!/usr/bin/env python3
"""Run the four reference presets S1-S4 through the CLI and collect their
output manifests under one directory:

    out/
      S1/ trace.csv snapshot_z*.grid manifest.json
      S2/ ...
      S3/ ...
      S4/ ...

These are the inputs the figure scripts consume (see figures/).  Each run is
a full reference-grid propagation (~1-2 min); pass --coarse for a quick
smoke-test version on a wide-kernel, coarse-grid configuration.
"""

import argparse
import json
import os
import sys
import tempfile

from cpcsim.cli import main as cli_main

PRESETS = ("S1", "S2", "S3", "S4")

COARSE_OVERRIDES = {
    "kernel": {"sigma": 0.5},
    "grid": {"t_min": -6.0, "t_max": 6.0, "spacing": 0.25},
    "gamma": 1.5,
    "L": 2.0,
    "dz": 0.01,
    "snapshot_zs": [-1.0, -0.5, 0.0, 0.5, 1.0],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--coarse", action="store_true",
                    help="fast low-resolution version for smoke tests")
    ap.add_argument("--presets", nargs="+", default=list(PRESETS),
                    choices=PRESETS)
    args = ap.parse_args()

    for preset in args.presets:
        config = {"preset": preset}
        if args.coarse:
            config.update(COARSE_OVERRIDES)
        out_dir = os.path.join(args.out, preset)
        with tempfile.NamedTemporaryFile("w", suffix=".json",
                                         delete=False) as f:
            json.dump(config, f)
            cfg_path = f.name
        try:
            print(f"== {preset} ==", flush=True)
            rc = cli_main(["run", "--config", cfg_path, "--out", out_dir])
            if rc != 0:
                print(f"{preset} failed (exit {rc})", file=sys.stderr)
                return rc
        finally:
            os.unlink(cfg_path)
    print(f"manifests under {args.out}/<preset>/manifest.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
