#!/usr/bin/env python3
"""Render every built-in family: filled set, backward-orbit cloud, and a
fiber curve, written as PGM (and PNG with --png) under out/gallery."""

import argparse
from pathlib import Path

from polysemigroup import render
from polysemigroup.cli import default_viewport
from polysemigroup.families import BUILDERS, build
from polysemigroup.render import FiberSequence


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/gallery")
    ap.add_argument("--res", type=int, default=512)
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--png", action="store_true")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in sorted(BUILDERS):
        gs = build(name).generators
        vp = default_viewport(gs, args.res)
        stem = out / name

        filled = render.filled_raster(gs, vp, depth=min(args.depth, 14 // max(1, len(gs) // 2)))
        render.write_pgm(filled, f"{stem}_filled.pgm")

        cloud = render.backward_sample(gs, args.res * args.res, seed=args.seed)
        render.write_pgm(render.cloud_raster(cloud, vp), f"{stem}_cloud.pgm")

        gamma = FiberSequence.random_seeded(args.seed, 20, len(gs))
        fiber = render.fiber_raster(gs, gamma, vp)
        render.write_pgm(render.boundary_extract(fiber), f"{stem}_fiber.pgm")

        if args.png:
            for kind in ("filled", "cloud", "fiber"):
                r = render.read_pgm(f"{stem}_{kind}.pgm")
                render.write_png(r, f"{stem}_{kind}.png")
        print(name, "->", stem)


if __name__ == "__main__":
    main()
