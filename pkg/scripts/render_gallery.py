#!/usr/bin/env python3
"""Render the stock gallery of classification images into an output directory.

Usage: python3 scripts/render_gallery.py [--out DIR] [--size N] [--workers W]
"""

from __future__ import annotations

import argparse
import hashlib
import os
import time

from bungee_lab.expr import parse
from bungee_lab.grid import GridSpec, classify_grid, mask_stats
from bungee_lab.orbit import OrbitParams
from bungee_lab.presets import FATOU_PARAMS
from bungee_lab.render import render_ppm

GALLERY = [
    # (slug, expression, center, width, params)
    ("squaring", "z^2", 0j, 4.0, OrbitParams()),
    ("reciprocal-square", "1/z^2", 0j, 4.0, OrbitParams()),
    ("reciprocal-fourth", "1/z^4", 0j, 4.0, OrbitParams()),
    ("exp-cigar", "z*exp(z^2)", 0j, 4.0, OrbitParams()),
    ("gaussian-spiral", "z*exp(-z^2)", 0j, 6.0, OrbitParams()),
    ("drift-map", "1+z+exp(-z)", 0j, 12.0, FATOU_PARAMS),
    ("sine-displacement", "z+sin(z)", 0j, 12.0, FATOU_PARAMS),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="gallery", help="output directory")
    ap.add_argument("--size", type=int, default=512, help="pixels per side")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for slug, text, center, width, params in GALLERY:
        f = parse(text)
        spec = GridSpec(center, width, width, args.size, args.size)
        start = time.monotonic()
        grid = classify_grid(f, spec, params, workers=args.workers)
        data = render_ppm(grid)
        elapsed = time.monotonic() - start
        path = os.path.join(args.out, f"{slug}.ppm")
        with open(path, "wb") as fh:
            fh.write(data)
        stats = mask_stats(grid)["counts"]
        digest = hashlib.sha256(data).hexdigest()[:16]
        print(f"{path}  {elapsed:6.2f}s  sha256:{digest}  {stats}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
