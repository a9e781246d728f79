"""Rigorous interval-arithmetic certificates.

Forward-invariant disks, backward-invariant annuli, disjoint generator
preimages, and the composite disconnectedness certificate.  Soundness
rests on one property only: every interval operation rounds outward by
at least one ulp, so computed boxes enclose true images.  Region tests
work on |z|^2 intervals, keeping everything inside polynomial arithmetic.

A centered monomial a*z^d acting on an annulus around the origin admits
an exact radial argument (|h(z)| = |a| |z|^d is monotone in |z|), which
certifies containments that are tight on the annulus boundary; box
subdivision alone cannot resolve those, because boxes straddling the
boundary always contain points mapping onto it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from polysemigroup import poly
from polysemigroup.poly import Polynomial
from polysemigroup.semigroup import GeneratorSet

_INF = math.inf

DEFAULT_MAX_DEPTH = 12
BOX_BUDGET = 500_000

# ------------------------------------------------------- interval core --

Iv = tuple[float, float]


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def iv_add(a: Iv, b: Iv) -> Iv:
    return (_dn(a[0] + b[0]), _up(a[1] + b[1]))


def iv_sub(a: Iv, b: Iv) -> Iv:
    return (_dn(a[0] - b[1]), _up(a[1] - b[0]))


def iv_mul(a: Iv, b: Iv) -> Iv:
    p = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (_dn(min(p)), _up(max(p)))


def iv_sqr(a: Iv) -> Iv:
    lo, hi = a
    if lo <= 0.0 <= hi:
        m = max(lo * lo, hi * hi)
        return (0.0, _up(m))
    m0, m1 = sorted((lo * lo, hi * hi))
    return (_dn(m0), _up(m1))


def iv_point(x: float) -> Iv:
    return (x, x)


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in the plane, both axes as closed intervals."""

    re: Iv
    im: Iv

    def __post_init__(self):
        if self.re[0] > self.re[1] or self.im[0] > self.im[1]:
            raise ValueError("box endpoints out of order")

    @classmethod
    def square(cls, center: complex, half: float) -> "Box":
        return cls((center.real - half, center.real + half), (center.imag - half, center.imag + half))

    @classmethod
    def point(cls, z: complex) -> "Box":
        return cls(iv_point(z.real), iv_point(z.imag))

    def mid(self) -> complex:
        return complex((self.re[0] + self.re[1]) / 2, (self.im[0] + self.im[1]) / 2)

    def contains_point(self, z: complex) -> bool:
        return self.re[0] <= z.real <= self.re[1] and self.im[0] <= z.imag <= self.im[1]

    def strictly_contains(self, other: "Box") -> bool:
        return (
            self.re[0] < other.re[0] and other.re[1] < self.re[1]
            and self.im[0] < other.im[0] and other.im[1] < self.im[1]
        )

    def split(self) -> list["Box"]:
        """Quadtree split at the midpoint of both axes."""
        rm = (self.re[0] + self.re[1]) / 2
        im = (self.im[0] + self.im[1]) / 2
        return [
            Box((self.re[0], rm), (self.im[0], im)),
            Box((rm, self.re[1]), (self.im[0], im)),
            Box((self.re[0], rm), (im, self.im[1])),
            Box((rm, self.re[1]), (im, self.im[1])),
        ]

    def key(self) -> tuple[float, float, float, float]:
        return (self.re[0], self.im[0], self.re[1], self.im[1])

    def to_json(self) -> list[float]:
        return [self.re[0], self.re[1], self.im[0], self.im[1]]


def box_add(a: Box, b: Box) -> Box:
    return Box(iv_add(a.re, b.re), iv_add(a.im, b.im))


def box_mul(a: Box, b: Box) -> Box:
    return Box(
        iv_sub(iv_mul(a.re, b.re), iv_mul(a.im, b.im)),
        iv_add(iv_mul(a.re, b.im), iv_mul(a.im, b.re)),
    )


def box_abs2(b: Box, center: complex = 0j) -> Iv:
    re = iv_sub(b.re, iv_point(center.real)) if center.real else b.re
    im = iv_sub(b.im, iv_point(center.imag)) if center.imag else b.im
    return iv_add(iv_sqr(re), iv_sqr(im))


def interval_eval(p: Polynomial, b: Box) -> Box:
    """Enclosure of {p(z) : z in b}; Horner per chain factor."""
    out = b
    for f in reversed(p.factors()):
        acc = Box.point(f.coeffs[-1])
        for c in reversed(f.coeffs[:-1]):
            acc = box_add(box_mul(acc, out), Box.point(c))
        out = acc
    return out


def box_div(num: Box, den: Box) -> Box:
    """num / den as complex intervals; requires 0 strictly outside den."""
    d2 = box_abs2(den)
    if d2[0] <= 0.0:
        raise ZeroDivisionError("denominator box touches zero")
    conj = Box(den.re, (-den.im[1], -den.im[0]))
    prod = box_mul(num, conj)
    inv = (_dn(1.0 / d2[1]), _up(1.0 / d2[0]))
    return Box(iv_mul(prod.re, inv), iv_mul(prod.im, inv))


# ------------------------------------------------------------ regions --


@dataclass(frozen=True)
class Disk:
    center: complex
    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("disk radius must be positive")

    def to_json(self) -> dict:
        return {"kind": "disk", "center": [self.center.real, self.center.imag], "r": self.r}


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_in: float
    r_out: float

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError("need 0 < r_in < r_out")

    def to_json(self) -> dict:
        return {
            "kind": "annulus",
            "center": [self.center.real, self.center.imag],
            "r_in": self.r_in,
            "r_out": self.r_out,
        }


RegionSpec = Disk | Annulus


def region_from_json(d: dict) -> RegionSpec:
    c = complex(d["center"][0], d["center"][1])
    if d["kind"] == "disk":
        return Disk(c, d["r"])
    if d["kind"] == "annulus":
        return Annulus(c, d["r_in"], d["r_out"])
    raise ValueError(f"unknown region kind {d['kind']!r}")


def box_inside_open_disk(b: Box, disk: Disk) -> bool:
    return box_abs2(b, disk.center)[1] < _dn(disk.r * disk.r)


def box_outside_closed_disk(b: Box, disk: Disk) -> bool:
    return box_abs2(b, disk.center)[0] > _up(disk.r * disk.r)


def box_disjoint_from_annulus(b: Box, k: Annulus) -> bool:
    lo, hi = box_abs2(b, k.center)
    return hi < _dn(k.r_in * k.r_in) or lo > _up(k.r_out * k.r_out)


def box_inside_open_annulus(b: Box, k: Annulus) -> bool:
    lo, hi = box_abs2(b, k.center)
    return lo > _up(k.r_in * k.r_in) and hi < _dn(k.r_out * k.r_out)


def clip_box_to_disk(b: Box, d: Disk) -> Box | None:
    """Outward-rounded bounding box of b intersected with the closed disk.

    Intersection tests on straddling boxes must see only the disk side;
    evaluating the whole box would mix in points carrying no obligation.
    """
    c, r = d.center, d.r
    x0, x1 = max(b.re[0], c.real - r), min(b.re[1], c.real + r)
    y0, y1 = max(b.im[0], c.imag - r), min(b.im[1], c.imag + r)
    if x0 > x1 or y0 > y1:
        return None

    def half_extent(lo: float, hi: float, mid: float) -> float:
        if lo <= mid <= hi:
            return 0.0
        return min(abs(lo - mid), abs(hi - mid))

    r2 = _up(r * r)
    dx = half_extent(x0, x1, c.real)
    ybound = _up(math.sqrt(max(0.0, _up(r2 - _dn(dx * dx)))))
    y0, y1 = max(y0, c.imag - ybound), min(y1, c.imag + ybound)
    if y0 > y1:
        return None
    dy = half_extent(y0, y1, c.imag)
    xbound = _up(math.sqrt(max(0.0, _up(r2 - _dn(dy * dy)))))
    x0, x1 = max(x0, c.real - xbound), min(x1, c.real + xbound)
    if x0 > x1:
        return None
    return Box((x0, x1), (y0, y1))


# --------------------------------------------------------- radial rule --


def monomial_maps_annulus_complement_off(h: Polynomial, k: Annulus) -> bool:
    """Radial certificate: |z| < r_in => |h(z)| < r_in and |z| > r_out => |h(z)| > r_out.

    Valid for a centered monomial and a concentric annulus; |h| depends
    only on |z| and is strictly monotone, so the two endpoint inequalities
    settle every box, including ones straddling the annulus boundary.
    Binary64 values are exact dyadic rationals, so both inequalities are
    decided exactly in rational arithmetic (the iterated quarter map hits
    the outer radius with equality, which rounding would spuriously fail).
    """
    if not poly.is_monomial(h) or k.center != 0:
        return False
    d = h.degree
    a2 = Fraction(h.leading.real) ** 2 + Fraction(h.leading.imag) ** 2
    r_in = Fraction(k.r_in)
    r_out = Fraction(k.r_out)
    inner_ok = a2 * r_in ** (2 * d) <= r_in ** 2
    outer_ok = a2 * r_out ** (2 * d) >= r_out ** 2
    return inner_ok and outer_ok


def _abs_dn(z: complex) -> float:
    return _dn(_dn(math.hypot(z.real, z.imag)))


def _abs_up(z: complex) -> float:
    return _up(_up(math.hypot(z.real, z.imag)))


def monomial_preimage_annulus(h: Polynomial, k: Annulus) -> tuple[float, float] | None:
    """Outward-rounded radial bounds of h^{-1}(K) for a centered monomial."""
    if not poly.is_monomial(h) or k.center != 0:
        return None
    d = h.degree
    rho_in = _dn(_dn(k.r_in / _abs_up(h.leading)) ** (1.0 / d))
    rho_out = _up(_up(k.r_out / _abs_dn(h.leading)) ** (1.0 / d))
    return (_dn(rho_in), _up(rho_out))


def box_avoids_monomial_preimage(b: Box, h: Polynomial, k: Annulus) -> bool:
    rho = monomial_preimage_annulus(h, k)
    if rho is None:
        return False
    lo, hi = box_abs2(b, k.center)
    return hi < _dn(rho[0] * rho[0]) or lo > _up(rho[1] * rho[1])


# -------------------------------------------------------- certificates --


@dataclass
class Certificate:
    statement: str
    verdict: str  # "certified" | "unknown"
    params: dict
    # per generator: factor chain, outermost first; each factor is
    # ascending [re, im] coefficient pairs (the chain matters: it carries
    # the escape-radius bound the certificate's outer argument relies on)
    generators: list[list[list[list[float]]]]
    boxes_processed: int
    max_depth_used: int
    failing_box: list[float] | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "statement": self.statement,
            "verdict": self.verdict,
            "params": self.params,
            "generators": self.generators,
            "boxes_processed": self.boxes_processed,
            "max_depth_used": self.max_depth_used,
        }
        if self.failing_box is not None:
            out["failing_box"] = self.failing_box
        if self.detail:
            out["detail"] = self.detail
        return out

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def _gen_coeffs(gs: GeneratorSet) -> list[list[list[list[float]]]]:
    return [
        [[[c.real, c.imag] for c in f.coeffs] for f in g.factors()]
        for g in gs.generators
    ]


def _gen_from_json(factors_json: list[list[list[float]]]) -> Polynomial:
    factors = [poly.polynomial([complex(re, im) for re, im in f]) for f in factors_json]
    out = factors[0]
    for f in factors[1:]:
        out = poly.compose(out, f)
    return out


def _subdivide(
    roots: list[Box],
    discard,
    leaf_ok,
    max_depth: int,
) -> tuple[bool, int, int, Box | None]:
    """Shared refinement loop.

    Returns (all leaves passed, boxes processed, deepest level used,
    lexicographically smallest failing leaf).  Deterministic: boxes are
    processed in a fixed breadth-first order.
    """
    level = list(roots)
    processed = 0
    depth = 0
    failing: list[Box] = []
    while level:
        nxt: list[Box] = []
        for b in level:
            processed += 1
            if processed > BOX_BUDGET:
                failing.append(b)
                return False, processed, depth, min(failing, key=Box.key)
            if discard(b):
                continue
            if leaf_ok(b):
                continue
            if depth == max_depth:
                failing.append(b)
            else:
                nxt.extend(b.split())
        if not failing and nxt:
            depth += 1
        level = nxt if not failing else []
    if failing:
        return False, processed, max_depth, min(failing, key=Box.key)
    return True, processed, depth, None


def cert_forward_invariance(
    gs: GeneratorSet, d: Disk, max_depth: int = DEFAULT_MAX_DEPTH
) -> Certificate:
    """Certify h(D closure) inside open D for every generator.

    A certified verdict places the disk in the Fatou set of the whole
    family: all words map D into itself, so the family is normal there.
    """
    root = Box.square(d.center, d.r)

    def discard(b: Box) -> bool:
        return box_outside_closed_disk(b, d)

    def leaf_ok(b: Box) -> bool:
        return all(box_inside_open_disk(interval_eval(h, b), d) for h in gs.generators)

    ok, processed, used, bad = _subdivide([root], discard, leaf_ok, max_depth)
    return Certificate(
        "forward-invariant-disk",
        "certified" if ok else "unknown",
        {"region": d.to_json(), "max_depth": max_depth},
        _gen_coeffs(gs),
        processed,
        used,
        failing_box=None if ok else bad.to_json(),
    )


def cert_backward_invariance(
    gs: GeneratorSet, k: Annulus, r_out_bound: float, max_depth: int = DEFAULT_MAX_DEPTH
) -> Certificate:
    """Certify h^{-1}(K) inside K for every generator.

    Contrapositive cover: every box over {|z - c| <= R} minus int(K) must
    map off K; beyond R the doubling property of the escape radius keeps
    moduli above r_out.  Monomial generators may instead pass the radial
    monotonicity certificate, which also settles the boundary-tight case.
    A certified verdict confines the Julia set of the family to K (it is
    a closed backward-invariant set with more than two points).
    """
    if r_out_bound <= k.r_out:
        raise ValueError("outer bound must exceed the annulus")
    need = 2.0 * gs.max_escape_radius()
    if r_out_bound < need:
        raise ValueError(f"outer bound {r_out_bound} below 2*max escape radius {need}")

    radial = [monomial_maps_annulus_complement_off(h, k) for h in gs.generators]
    box_gens = [h for h, done in zip(gs.generators, radial) if not done]
    outer_disk = Disk(k.center, r_out_bound)
    hole = Disk(k.center, k.r_in)

    def discard(b: Box) -> bool:
        return box_inside_open_annulus(b, k) or box_outside_closed_disk(b, outer_disk)

    def leaf_ok(b: Box) -> bool:
        # obligations: the closed inner hole (clipped, so boxes straddling
        # the inner circle only answer for their hole side) and everything
        # at or past the outer radius
        parts: list[Box] = []
        inner = clip_box_to_disk(b, hole)
        if inner is not None:
            parts.append(inner)
        if not box_inside_open_disk(b, Disk(k.center, k.r_out)):
            parts.append(b)
        return all(
            box_disjoint_from_annulus(interval_eval(h, part), k)
            for part in parts
            for h in box_gens
        )

    if box_gens:
        root = Box.square(k.center, r_out_bound)
        ok, processed, used, bad = _subdivide([root], discard, leaf_ok, max_depth)
    else:
        ok, processed, used, bad = True, 0, 0, None
    return Certificate(
        "backward-invariant-annulus",
        "certified" if ok else "unknown",
        {"region": k.to_json(), "r_out_bound": r_out_bound, "max_depth": max_depth},
        _gen_coeffs(gs),
        processed,
        used,
        failing_box=None if ok else bad.to_json(),
        detail={"radial_rule": radial},
    )


def cert_disjoint_preimages(
    h1: Polynomial,
    h2: Polynomial,
    k: Annulus,
    r_out_bound: float,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Certificate:
    """Certify h1^{-1}(K) and h2^{-1}(K) are disjoint.

    Every leaf box must avoid at least one of the two preimages: either
    an interval image lands off K, or the radial bound of a monomial
    preimage excludes the box.  Both preimages live inside |z-c| <= R
    because past the escape radius moduli at least double.
    """
    for h in (h1, h2):
        if r_out_bound < 2.0 * poly.escape_radius(h):
            raise ValueError("outer bound below 2*escape radius")
    outer_disk = Disk(k.center, r_out_bound)

    def discard(b: Box) -> bool:
        return box_outside_closed_disk(b, outer_disk)

    def leaf_ok(b: Box) -> bool:
        for h in (h1, h2):
            if box_avoids_monomial_preimage(b, h, k):
                return True
            if box_disjoint_from_annulus(interval_eval(h, b), k):
                return True
        return False

    root = Box.square(k.center, r_out_bound)
    ok, processed, used, bad = _subdivide([root], discard, leaf_ok, max_depth)
    gs = GeneratorSet((h1, h2))
    return Certificate(
        "disjoint-preimages",
        "certified" if ok else "unknown",
        {"region": k.to_json(), "r_out_bound": r_out_bound, "max_depth": max_depth},
        _gen_coeffs(gs),
        processed,
        used,
        failing_box=None if ok else bad.to_json(),
    )


def verified_preimage_box(h: Polynomial, w: complex, start_radius: float = 1e-7) -> Box | None:
    """A box proven (interval Newton) to contain a solution of h(z) = w."""
    shifted = list(h.coeffs)
    shifted[0] -= w
    f = poly.polynomial(shifted)
    df = poly.derivative(f)
    candidates = [r for r, _ in poly.roots(f)]
    for z0 in candidates:
        half = max(start_radius, 1e-12 * abs(z0))
        for _ in range(12):
            b = Box.square(z0, half)
            try:
                num = interval_eval(f, Box.point(z0))
                den = interval_eval(df, b)
                step = box_div(num, den)
            except ZeroDivisionError:
                half *= 4
                continue
            newton = box_add(Box.point(z0), Box((-step.re[1], -step.re[0]), (-step.im[1], -step.im[0])))
            if b.strictly_contains(newton):
                return b
            half *= 4
    return None


def cert_disconnected(
    gs: GeneratorSet, k: Annulus, r_out_bound: float, max_depth: int = DEFAULT_MAX_DEPTH
) -> Certificate:
    """Composite disconnectedness certificate.

    Backward invariance confines the Julia set to K; pairwise disjoint
    preimages split the backward self-similar decomposition into
    separated nonempty pieces (nonemptiness witnessed by verified
    preimage boxes), so the Julia set is disconnected.
    """
    if len(gs) < 2:
        raise ValueError("need at least two generators")
    sub: dict[str, dict] = {}
    back = cert_backward_invariance(gs, k, r_out_bound, max_depth)
    sub["backward_invariance"] = back.to_json()
    processed = back.boxes_processed
    used = back.max_depth_used
    verdict = back.verdict

    pair_certs = []
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            c = cert_disjoint_preimages(gs.generators[i], gs.generators[j], k, r_out_bound, max_depth)
            pair_certs.append(((i, j), c))
            processed += c.boxes_processed
            used = max(used, c.max_depth_used)
            if c.verdict != "certified":
                verdict = "unknown"
    sub["disjoint_preimages"] = {f"{i},{j}": c.to_json() for (i, j), c in pair_certs}

    witnesses = {}
    mid = k.center + complex((k.r_in + k.r_out) / 2, 0.0)
    for i, h in enumerate(gs.generators):
        wbox = verified_preimage_box(h, mid)
        if wbox is None:
            verdict = "unknown"
            witnesses[str(i)] = None
        else:
            witnesses[str(i)] = wbox.to_json()
    sub["preimage_witnesses"] = {"point": [mid.real, mid.imag], "boxes": witnesses}

    failing = back.failing_box
    if failing is None:
        for _, c in pair_certs:
            if c.failing_box is not None:
                failing = c.failing_box
                break
    return Certificate(
        "disconnected-julia-set",
        verdict,
        {"region": k.to_json(), "r_out_bound": r_out_bound, "max_depth": max_depth},
        _gen_coeffs(gs),
        processed,
        used,
        failing_box=failing,
        detail=sub,
    )


# -------------------------------------------------------------- replay --


def replay(cert_json: dict) -> Certificate:
    """Re-verify a stored certificate from its own parameters."""
    gens = tuple(_gen_from_json(factors) for factors in cert_json["generators"])
    params = cert_json["params"]
    statement = cert_json["statement"]
    depth = params["max_depth"]
    if statement == "forward-invariant-disk":
        return cert_forward_invariance(GeneratorSet(gens), region_from_json(params["region"]), depth)
    if statement == "backward-invariant-annulus":
        return cert_backward_invariance(
            GeneratorSet(gens), region_from_json(params["region"]), params["r_out_bound"], depth
        )
    if statement == "disjoint-preimages":
        return cert_disjoint_preimages(
            gens[0], gens[1], region_from_json(params["region"]), params["r_out_bound"], depth
        )
    if statement == "disconnected-julia-set":
        return cert_disconnected(
            GeneratorSet(gens), region_from_json(params["region"]), params["r_out_bound"], depth
        )
    raise ValueError(f"unknown certificate statement {statement!r}")


def suggest_annulus(gs: GeneratorSet, depth: int = 10) -> Annulus | None:
    """Separating-annulus suggestion from the widest affine attractor gap.

    Heuristic for radially symmetric families: exponentiate the largest
    gap of the attractor cover and pad the hull; callers still need the
    certificate to validate the choice.
    """
    from polysemigroup.affine import attractor_intervals

    ivs = attractor_intervals(gs, depth)
    if len(ivs) < 2:
        return None
    gaps = [(ivs[i + 1][0] - ivs[i][1], i) for i in range(len(ivs) - 1)]
    width, i = max(gaps)
    if width <= 0:
        return None
    # pad by a fraction of the widest gap: enough slack for the interval
    # tests without closing the separation between generator preimages
    pad = 0.25 * width
    r_in = math.exp(ivs[0][0] - pad)
    r_out = math.exp(ivs[-1][1] + pad)
    return Annulus(0j, r_in, r_out)
