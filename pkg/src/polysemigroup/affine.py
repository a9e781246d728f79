"""Real-affine reduction of a generator family.

Each degree-d generator with leading coefficient a acts on log-moduli near
infinity like x -> d*x + log|a|.  The closure of repelling fixed points of
the induced affine semigroup is computed here as the attractor of the
inverse interval IFS; its component count bounds the component count of
the full Julia set, and three cheap sufficient criteria decide
connectedness outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from polysemigroup import poly
from polysemigroup.poly import Polynomial
from polysemigroup.semigroup import GeneratorSet, pcb_check

Interval = tuple[float, float]


@dataclass(frozen=True)
class AffineExpansion:
    """x -> slope * x + intercept with integer slope >= 2."""

    slope: int
    intercept: float

    def __post_init__(self):
        if self.slope < 2:
            raise ValueError("slope must be >= 2")
        if not math.isfinite(self.intercept):
            raise ValueError("intercept must be finite")

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "AffineExpansion":
        if p.degree < 2:
            raise ValueError("need degree >= 2")
        if p.leading == 0:
            raise ValueError("leading coefficient must be nonzero")
        return cls(p.degree, math.log(abs(p.leading)))

    def __call__(self, x: float) -> float:
        return self.slope * x + self.intercept

    def fixed_point(self) -> float:
        """Unique real fixed point, -intercept / (slope - 1)."""
        return -self.intercept / (self.slope - 1) + 0.0  # +0.0 normalizes -0.0

    def invert_interval(self, iv: Interval) -> Interval:
        """Preimage of a closed interval; contracts by 1/slope."""
        lo, hi = iv
        if lo > hi:
            raise ValueError("interval endpoints out of order")
        return ((lo - self.intercept) / self.slope, (hi - self.intercept) / self.slope)


def expansions(gs: GeneratorSet) -> list[AffineExpansion]:
    return [AffineExpansion.from_polynomial(g) for g in gs.generators]


def fixed_point_hull(gs: GeneratorSet) -> Interval:
    """[alpha, beta]: hull of the affine fixed points of the generators."""
    fps = [m.fixed_point() for m in expansions(gs)]
    return (min(fps), max(fps))


def merge_intervals(intervals: list[Interval], tol: float) -> list[Interval]:
    """Sorted union; gaps below tol count as connected."""
    if not intervals:
        return []
    ivs = sorted(intervals)
    out = [list(ivs[0])]
    for lo, hi in ivs[1:]:
        if lo <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def attractor_intervals(gs: GeneratorSet, depth: int) -> list[Interval]:
    """Interval cover of the affine repelling-fixed-point set at the given depth.

    Starts from the fixed-point hull and applies the union of the inverse
    affine maps `depth` times.  Each inverse is a contraction by 1/slope,
    so the cover decreases to the true set as depth grows.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    maps = expansions(gs)
    hull = fixed_point_hull(gs)
    tol = 1e-12 * max(hull[1] - hull[0], 1e-6)
    current = [hull]
    for _ in range(depth):
        images = [m.invert_interval(iv) for m in maps for iv in current]
        current = merge_intervals(images, tol)
    return current


def attractor_component_count(gs: GeneratorSet, depth: int) -> tuple[int, bool]:
    """(component count at depth, flag: count still growing at this depth).

    A strictly increasing count between the last two depths is the desk
    signature of a Cantor structure (uncountably many components).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    prev = len(attractor_intervals(gs, depth - 1))
    count = len(attractor_intervals(gs, depth))
    return count, count > prev


@dataclass(frozen=True)
class ConnectivityResult:
    verdict: str  # "connected" | "inconclusive"
    rule: str | None = None  # "degree-two" | "equal-fixed-points" | "interval-covering"
    gap: Interval | None = None  # first uncovered gap when inconclusive

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "rule": self.rule}
        if self.gap is not None:
            out["gap"] = list(self.gap)
        return out


def connectivity_check(gs: GeneratorSet, pcb_depth: int | None = None) -> ConnectivityResult:
    """One-sided connectivity decision from the affine reduction.

    Fires the cheapest criterion first: all degrees two, all affine fixed
    points equal, or the inverse intervals covering the fixed-point hull.
    Never returns "disconnected"; the criteria are sufficient only.
    Requires a bounded postcritical check first.
    """
    report = pcb_check(gs) if pcb_depth is None else pcb_check(gs, pcb_depth)
    if report.verdict != "bounded":
        raise ValueError(
            f"connectivity criteria assume a postcritically bounded family (check verdict: {report.verdict})"
        )

    if all(g.degree == 2 for g in gs.generators):
        return ConnectivityResult("connected", "degree-two")

    fps = [m.fixed_point() for m in expansions(gs)]
    if max(fps) - min(fps) <= 1e-12:
        return ConnectivityResult("connected", "equal-fixed-points")

    hull = (min(fps), max(fps))
    pieces = sorted(m.invert_interval(hull) for m in expansions(gs))
    covered_to = hull[0]
    for lo, hi in pieces:
        if lo > covered_to:
            return ConnectivityResult("inconclusive", None, gap=(covered_to, lo))
        covered_to = max(covered_to, hi)
    if covered_to >= hull[1]:
        return ConnectivityResult("connected", "interval-covering")
    return ConnectivityResult("inconclusive", None, gap=(covered_to, hull[1]))


def leading_monomials(gs: GeneratorSet) -> GeneratorSet:
    """Replace every generator by its leading monomial a * z^d.

    The Julia set of the monomial family is radially symmetric, with
    log-moduli exactly the affine attractor; it bounds the component
    count of the original family from above.
    """
    return GeneratorSet(
        tuple(poly.monomial(g.leading, g.degree) for g in gs.generators),
        labels=gs.labels,
    )


def summary_json(gs: GeneratorSet, depth: int = 12) -> dict:
    """Affine-reduction report used by the CLI check command."""
    fps = [m.fixed_point() for m in expansions(gs)]
    hull = fixed_point_hull(gs)
    counts = [len(attractor_intervals(gs, d)) for d in range(1, depth + 1)]
    return {
        "fixed_points": fps,
        "hull": list(hull),
        "m_components_by_depth": counts,
    }
