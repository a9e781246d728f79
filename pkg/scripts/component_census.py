#!/usr/bin/env python3
"""Component counts of the Julia set proxy across resolutions, against the
affine attractor bound: the desk-scale view of the nesting structure."""

import argparse

from polysemigroup.affine import attractor_intervals
from polysemigroup.cli import default_viewport
from polysemigroup.families import BUILDERS, build
from polysemigroup.render import Viewport
from polysemigroup.topology import julia_component_map, order_totality


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--families", nargs="*", default=sorted(BUILDERS))
    ap.add_argument("--resolutions", nargs="*", type=int, default=[128, 256, 512, 1024])
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print("family,resolution,components,affine_bound,total_order")
    for name in args.families:
        gs = build(name).generators
        bound = len(attractor_intervals(gs, args.depth))
        base = default_viewport(gs, args.resolutions[0])
        for px in args.resolutions:
            vp = Viewport.square(base.center, base.width, px)
            cm = julia_component_map(gs, vp, seed=args.seed)
            total = order_totality(cm).total if cm.n <= 16 else None
            print(f"{name},{px},{cm.n},{bound},{total}")


if __name__ == "__main__":
    main()
