#!/usr/bin/env python3
"""Multi-resolution quasicircle-ratio trend along one fiber of the
basilica/monomial pair, with a round-circle control and the boundary-area
scaling estimate."""

import argparse

from polysemigroup.families import basilica_monomial_pair
from polysemigroup.poly import polynomial
from polysemigroup.render import FiberSequence, Viewport, boundary_extract, escape_raster, fiber_raster
from polysemigroup.topology import area_scaling, jordan_heuristic, quasicircle_ratio, trace_boundary


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=456)
    ap.add_argument("--length", type=int, default=24)
    ap.add_argument("--size", type=float, default=22.0)
    ap.add_argument("--resolutions", nargs="*", type=int, default=[256, 512, 1024])
    args = ap.parse_args()

    gs = basilica_monomial_pair().generators
    gamma = FiberSequence.random_seeded(args.seed, args.length, 2)
    print(f"fiber sequence (0=basilica^2, 1=monomial^2): {gamma.indices}")

    circle = polynomial([0, 0, 1])
    rasters = []
    print("resolution,jordan,ratio,circle_ratio")
    for px in args.resolutions:
        vp = Viewport.square(0j, args.size, px)
        b = boundary_extract(fiber_raster(gs, gamma, vp))
        rasters.append(b)
        t = trace_boundary(b)
        ratio = quasicircle_ratio(t, 256) if t.closed else float("nan")
        cvp = Viewport.square(0j, 4.0, px)
        ct = trace_boundary(boundary_extract(escape_raster(circle, cvp, maxiter=60, R=2.0)))
        print(f"{px},{jordan_heuristic(t)},{ratio:.3f},{quasicircle_ratio(ct, 256):.3f}")
    if len(rasters) >= 3:
        print(f"area scaling slope: {area_scaling(rasters):.3f}")


if __name__ == "__main__":
    main()
