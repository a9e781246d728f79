"""Command-line surface: check | render | certify | analyze | examples.

All randomness sits behind a single 64-bit seed (default 0); identical
configuration and seed give byte-identical outputs.  Exit codes: 0 done,
1 usage/parse error, 2 postcritically escaping family, 3 certificate
verdict unknown.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from polysemigroup import affine, certify, families, gsfile, render, semigroup, topology
from polysemigroup.render import FiberSequence, Viewport


@dataclass
class RunConfig:
    """Resolved options shared by the rendering-style commands."""

    generators_path: str | None = None
    depth: int = 12
    resolution: int = 512
    viewport: tuple[float, float, float, float] | None = None  # cx, cy, w, h
    seed: int = 0
    out_dir: str = "."
    threads: int = 1
    png: bool = False


def _load(path: str):
    try:
        return gsfile.load_generator_file(path)
    except FileNotFoundError:
        print(f"error: no such file: {path}", file=sys.stderr)
        raise SystemExit(1)
    except gsfile.ParseError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        raise SystemExit(1)


def default_viewport(gs, px: int) -> Viewport:
    """Square window sized from the outermost affine fixed point."""
    hull = affine.fixed_point_hull(gs)
    size = 2.4 * math.exp(max(hull[1], 0.0))
    return Viewport.square(0j, size, px)


def _viewport_from(cfg: RunConfig) -> Viewport | None:
    if cfg.viewport is None:
        return None
    cx, cy, w, h = cfg.viewport
    return Viewport(complex(cx, cy), w, h, cfg.resolution, cfg.resolution)


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=1)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


# ------------------------------------------------------------- check --


def cmd_check(args) -> int:
    gs = _load(args.generators)
    pcb = semigroup.pcb_check(gs, depth=args.depth)
    report = {"pcb": pcb.to_json(), "m_set": affine.summary_json(gs, depth=args.m_depth)}
    if pcb.verdict == "bounded":
        conn = affine.connectivity_check(gs)
        report["connectivity"] = conn.to_json()
    else:
        report["connectivity"] = {"verdict": "unknown", "rule": None}
    _write_json(report, args.json_out)
    return 2 if pcb.verdict == "escaping" else 0


# ------------------------------------------------------------ render --


def _parse_fiber(spec: str, n_generators: int, length: int, seed: int) -> FiberSequence:
    kind, _, rest = spec.partition(":")
    if kind == "const":
        return FiberSequence.constant(int(rest), length)
    if kind == "periodic":
        pattern = tuple(int(t) for t in rest.split(","))
        return FiberSequence.periodic(pattern, length)
    if kind == "random":
        return FiberSequence.random_seeded(int(rest) if rest else seed, length, n_generators)
    if kind == "explicit":
        return FiberSequence(tuple(int(t) for t in rest.split(",")))
    raise SystemExit(f"error: bad fiber spec {spec!r}")


def cmd_render(args) -> int:
    gs = _load(args.generators)
    cfg = RunConfig(
        generators_path=args.generators,
        depth=args.depth,
        resolution=args.res,
        viewport=args.viewport,
        seed=args.seed,
        out_dir=args.out,
        threads=args.threads,
        png=args.png,
    )
    vp = _viewport_from(cfg) or default_viewport(gs, cfg.resolution)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.mode == "filled":
        raster = render.filled_raster(gs, vp, depth=cfg.depth, threads=cfg.threads)
    elif args.mode == "escape":
        g = gs.generators[args.generator]
        from polysemigroup import poly

        raster = render.escape_raster(g, vp, maxiter=cfg.depth, R=2.0 * poly.escape_radius(g))
    elif args.mode == "fiber":
        gamma = _parse_fiber(args.fiber, len(gs), cfg.depth, cfg.seed)
        raster = render.fiber_raster(gs, gamma, vp)
    elif args.mode == "cloud":
        n = args.points or (cfg.resolution * cfg.resolution) // 2
        cloud = render.backward_sample(gs, n, seed=cfg.seed)
        render.write_cloud_csv(cloud, str(out_dir / "cloud.csv"))
        raster = render.cloud_raster(cloud, vp)
    else:
        raise SystemExit(f"error: unknown mode {args.mode!r}")

    if args.boundary:
        raster = render.boundary_extract(raster)
    stem = out_dir / args.mode
    try:
        render.write_pgm(raster, str(stem) + ".pgm")
        if cfg.png:
            render.write_png(raster, str(stem) + ".png")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    print(str(stem) + ".pgm")
    return 0


# ----------------------------------------------------------- certify --


def _parse_region(text: str):
    kind, _, rest = text.partition(":")
    vals = [float(t) for t in rest.split(",")]
    try:
        if kind == "disk" and len(vals) == 3:
            return certify.Disk(complex(vals[0], vals[1]), vals[2])
        if kind == "annulus" and len(vals) == 4:
            return certify.Annulus(complex(vals[0], vals[1]), vals[2], vals[3])
    except ValueError as exc:
        print(f"error: bad region: {exc}", file=sys.stderr)
        raise SystemExit(1)
    print(f"error: region must be disk:cx,cy,r or annulus:cx,cy,rin,rout (got {text!r})", file=sys.stderr)
    raise SystemExit(1)


def cmd_certify(args) -> int:
    if args.replay:
        stored = json.loads(Path(args.replay).read_text())
        cert = certify.replay(stored)
        same = cert.to_json_str() == json.dumps(stored, sort_keys=True, indent=1)
        print(json.dumps({"replay_matches": same, "verdict": cert.verdict}, indent=1))
        return 0 if (same and cert.verdict == "certified") else 3

    gs = _load(args.generators)
    r_out = args.rout or 2.0 * gs.max_escape_radius()

    if args.suggest:
        k = certify.suggest_annulus(gs)
        if k is None:
            print(json.dumps({"suggestion": None}))
            return 3
        print(json.dumps({"suggestion": k.to_json()}))
        return 0

    if args.region:
        region = _parse_region(args.region)
    else:
        region = certify.suggest_annulus(gs)
        if region is None:
            print("error: no region given and no separating annulus found", file=sys.stderr)
            return 1

    if args.statement == "forward":
        if not isinstance(region, certify.Disk):
            print("error: forward invariance takes a disk region", file=sys.stderr)
            return 1
        cert = certify.cert_forward_invariance(gs, region, args.max_depth)
    elif args.statement == "backward":
        cert = certify.cert_backward_invariance(gs, region, r_out, args.max_depth)
    elif args.statement == "disjoint":
        if len(gs) < 2:
            print("error: disjoint preimages need two generators", file=sys.stderr)
            return 1
        cert = certify.cert_disjoint_preimages(
            gs.generators[0], gs.generators[1], region, r_out, args.max_depth
        )
    else:
        cert = certify.cert_disconnected(gs, region, r_out, args.max_depth)

    text = cert.to_json_str()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0 if cert.verdict == "certified" else 3


# ----------------------------------------------------------- analyze --


def cmd_analyze(args) -> int:
    paths = [p for p in args.artifacts]
    for p in paths:
        if not Path(p).exists():
            print(f"error: missing artifact {p}", file=sys.stderr)
            return 1
    rasters = [render.read_pgm(p) for p in paths]
    report: dict = {"what": args.what}
    if args.what == "components":
        cm = topology.label_components(rasters[0], args.cls, 8)
        report["n_components"] = cm.n
        report["sizes"] = [int(s) for s in cm.sizes]
    elif args.what == "order":
        cm = topology.label_components(rasters[0], args.cls, 8)
        rep = topology.order_totality(cm)
        letter = {topology.LESS: "L", topology.GREATER: "G", topology.INCOMPARABLE: "I", topology.EQUAL: "E"}
        matrix = [["E"] * cm.n for _ in range(cm.n)]
        for (a, b), rel in rep.relations.items():
            matrix[a][b] = letter[rel]
            matrix[b][a] = {"L": "G", "G": "L"}.get(letter[rel], letter[rel])
        out = rep.to_json()
        out["matrix"] = matrix
        if rep.total and cm.n >= 1:
            lo, hi = topology.min_max_components(cm)
            out["min_id"], out["max_id"] = lo, hi
        report["n_components"] = cm.n
        report["order"] = out
    elif args.what == "curve":
        t = topology.trace_boundary(rasters[0])
        jordan = topology.jordan_heuristic(t)
        ratio = topology.quasicircle_ratio(t, args.pairs) if t.closed else None
        report["curve"] = {
            "closed": t.closed,
            "jordan": jordan,
            "n_points": len(t),
            "branch_pixels": t.n_branch_pixels,
            "quasicircle_ratio": ratio,
        }
        if args.trace_out:
            topology.write_trace_csv(t, args.trace_out)
    elif args.what == "area":
        if len(rasters) < 3:
            print("error: area scaling needs >= 3 rasters", file=sys.stderr)
            return 1
        slope = topology.area_scaling(rasters)
        report["area"] = {
            "slope": slope,
            "areas": [float(r.boundary_mask().sum() * r.viewport.px_size ** 2) for r in rasters],
            "pixel_sizes": [r.viewport.px_size for r in rasters],
        }
    _write_json(report, args.json_out)
    return 0


# ---------------------------------------------------------- examples --


def cmd_examples(args) -> int:
    if args.action == "list":
        for name in sorted(families.BUILDERS):
            print(name)
        return 0
    try:
        spec = families.build(args.name)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = gsfile.format_generator_set(spec.generators)
    if args.out:
        Path(args.out).write_text(text)
        print(args.out)
    else:
        print(text, end="")
    return 0


# -------------------------------------------------------------- main --


def _viewport_arg(text: str) -> tuple[float, float, float, float]:
    parts = [float(t) for t in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("viewport must be cx,cy,w,h")
    return tuple(parts)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polysg",
        description="Desk-scale dynamics of finitely generated polynomial semigroups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="postcritical boundedness + connectivity criteria")
    p.add_argument("generators")
    p.add_argument("--depth", type=int, default=semigroup.DEFAULT_DEPTH)
    p.add_argument("--m-depth", dest="m_depth", type=int, default=12)
    p.add_argument("--json", dest="json_out", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("render", help="raster / point-cloud images")
    p.add_argument("generators")
    p.add_argument("--mode", choices=("filled", "escape", "fiber", "cloud"), default="filled")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--res", type=int, default=512)
    p.add_argument("--viewport", type=_viewport_arg, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--png", action="store_true")
    p.add_argument("--boundary", action="store_true", help="extract the boundary class")
    p.add_argument("--generator", type=int, default=0, help="generator index for escape mode")
    p.add_argument("--fiber", default="random:0", help="const:i | periodic:i,j | random:seed | explicit:i,j,...")
    p.add_argument("--points", type=int, default=None, help="cloud sample count")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("certify", help="interval-arithmetic certificates")
    p.add_argument("generators", nargs="?")
    p.add_argument("--statement", choices=("disconnected", "forward", "backward", "disjoint"),
                   default="disconnected")
    p.add_argument("--region", default=None, help="disk:cx,cy,r | annulus:cx,cy,rin,rout")
    p.add_argument("--rout", type=float, default=None)
    p.add_argument("--max-depth", dest="max_depth", type=int, default=certify.DEFAULT_MAX_DEPTH)
    p.add_argument("--out", default=None)
    p.add_argument("--replay", default=None, help="re-verify a stored certificate JSON")
    p.add_argument("--suggest", action="store_true", help="suggest a separating annulus")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("analyze", help="component / order / curve / area reports")
    p.add_argument("artifacts", nargs="+", help="PGM files from render")
    p.add_argument("--what", choices=("components", "order", "curve", "area"), default="components")
    p.add_argument("--cls", choices=("bounded", "escaped", "boundary"), default="boundary")
    p.add_argument("--pairs", type=int, default=256)
    p.add_argument("--trace-out", dest="trace_out", default=None, help="write the traced polyline as CSV")
    p.add_argument("--json", dest="json_out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("examples", help="built-in generator families")
    p.add_argument("action", choices=("list", "emit"))
    p.add_argument("name", nargs="?")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_examples)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "certify" and not args.replay and not args.generators:
        print("error: certify needs a generator file (or --replay)", file=sys.stderr)
        return 1
    if args.command == "examples" and args.action == "emit" and not args.name:
        print("error: emit needs an example name", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
