#!/usr/bin/env python3
"""Run the default lifespan-vs-epsilon scaling study.

Writes a ready-made admissible configuration (n = 3, balanced damping,
critical rate), runs the scan through the CLI, and leaves records.csv,
fit.json, plot.svg and manifest.json in the output directory.
"""

import argparse
import sys
from pathlib import Path

from adswave.cli import main as adswave_main

CONFIG = """\
[model]
c = 1
h = 1
b = 0
m2 = 0
p = 2
beta = 0
mu = 800
varsigma = 0
n = 3
r = 1

[solver]
solver = fd
dx = 0.04
t_horizon = 4.5

[scan]
eps_max = 0.3
eps_min = 0.01
eps_points = 12
"""


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/lifespan-scan")
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "scan.ini"
    cfg_path.write_text(CONFIG)
    argv = ["lifespan", "scan", "--config", str(cfg_path), "--out", str(out)]
    if not args.no_plot:
        argv.append("--plot")
    return adswave_main(argv)


if __name__ == "__main__":
    sys.exit(main())
