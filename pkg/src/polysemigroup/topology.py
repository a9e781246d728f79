"""Component structure of rendered sets.

Labeling, the surrounding (nesting) order on components, min/max elements,
Jordan-curve and quasicircle heuristics on traced boundaries, and area
scaling across resolutions.  Everything here works on pixel rasters, so
verdicts are resolution statements: components touching the viewport
frame are flagged rather than silently ordered, and quasicircle verdicts
are multi-resolution trends, never absolutes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from polysemigroup.render import BOUNDARY, PointCloud, Raster, Viewport, backward_sample, cloud_raster

_FOUR = ndimage.generate_binary_structure(2, 1)
_EIGHT = ndimage.generate_binary_structure(2, 2)

LESS = "less"
GREATER = "greater"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


@dataclass
class ComponentMap:
    """Connected-component labeling of one cell class of a raster."""

    viewport: Viewport
    labels: np.ndarray  # -1 background, 0..n-1 component ids
    n: int
    sizes: np.ndarray
    touches_frame: np.ndarray  # bool per id

    def mask(self, cid: int) -> np.ndarray:
        return self.labels == cid

    def component_of_point(self, z: complex) -> int | None:
        rc = self.viewport.pixel_of(z)
        if rc is None:
            return None
        cid = int(self.labels[rc])
        return cid if cid >= 0 else None


def filter_small(cm: ComponentMap, min_size: int) -> ComponentMap:
    """Drop components below min_size pixels and relabel densely.

    Sub-scale fragments are sampling noise when the marked class comes
    from a point cloud; any genuinely resolved curve spans hundreds of
    pixels at the viewports used here.
    """
    keep = [cid for cid in range(cm.n) if cm.sizes[cid] >= min_size]
    remap = {old: new for new, old in enumerate(keep)}
    labels = np.full_like(cm.labels, -1)
    for old, new in remap.items():
        labels[cm.labels == old] = new
    sizes = np.array([cm.sizes[old] for old in keep], dtype=cm.sizes.dtype)
    touches = np.array([cm.touches_frame[old] for old in keep], dtype=bool)
    return ComponentMap(cm.viewport, labels, len(keep), sizes, touches)


def class_mask(r: Raster, cls: str) -> np.ndarray:
    if cls == "bounded":
        return r.bounded_mask()
    if cls == "escaped":
        return r.escaped_mask()
    if cls == "boundary":
        return r.boundary_mask()
    raise ValueError(f"unknown cell class {cls!r}")


def label_components(r: Raster, cls: str = "boundary", connectivity: int = 8) -> ComponentMap:
    """Standard flood-fill labeling of the pixels of one class."""
    mask = class_mask(r, cls)
    structure = _EIGHT if connectivity == 8 else _FOUR
    labels, n = ndimage.label(mask, structure=structure)
    labels = labels.astype(np.int32) - 1
    sizes = np.bincount(labels[labels >= 0].ravel(), minlength=n) if n else np.zeros(0, dtype=int)
    frame = np.zeros(mask.shape, dtype=bool)
    frame[0, :] = frame[-1, :] = True
    frame[:, 0] = frame[:, -1] = True
    touches = np.zeros(n, dtype=bool)
    for cid in np.unique(labels[frame & (labels >= 0)]):
        touches[cid] = True
    return ComponentMap(r.viewport, labels, n, sizes, touches)


def _frame_reachable(blocked: np.ndarray) -> np.ndarray:
    """Pixels connected to the raster frame while avoiding `blocked` (4-connectivity)."""
    open_mask = ~blocked
    labels, _ = ndimage.label(open_mask, structure=_FOUR)
    frame_labels = np.unique(
        np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
    )
    frame_labels = frame_labels[frame_labels > 0]
    return np.isin(labels, frame_labels)


class _OrderOracle:
    """Caches, per component, the frame-reachable region of its complement.

    One flood fill per component instead of one per ordered pair; the
    pairwise tests then reduce to mask intersections.
    """

    def __init__(self, cm: ComponentMap):
        self.cm = cm
        self._reach: dict[int, np.ndarray] = {}
        self._wall: dict[int, np.ndarray] = {}

    def wall(self, cid: int) -> np.ndarray:
        if cid not in self._wall:
            # 1-pixel dilation closes the sampling gaps raster curves
            # always have; without it thin rings leak
            self._wall[cid] = ndimage.binary_dilation(self.cm.mask(cid), structure=_EIGHT)
        return self._wall[cid]

    def reach(self, cid: int) -> np.ndarray:
        if cid not in self._reach:
            self._reach[cid] = _frame_reachable(self.wall(cid))
        return self._reach[cid]

    def surrounded_by(self, inner: int, outer: int) -> bool:
        probe = self.cm.mask(inner) & ~self.wall(outer)
        if not probe.any():
            return False  # inner vanishes inside the dilated wall: treat as not surrounded
        return not (probe & self.reach(outer)).any()

    def relation(self, a: int, b: int) -> str:
        if a == b:
            return EQUAL
        if self.cm.touches_frame[a] and self.cm.touches_frame[b]:
            return INCOMPARABLE
        a_in_b = self.surrounded_by(a, b)
        b_in_a = self.surrounded_by(b, a)
        if a_in_b and not b_in_a:
            return LESS
        if b_in_a and not a_in_b:
            return GREATER
        return INCOMPARABLE


def surrounding_order(a: int, b: int, cm: ComponentMap, oracle: _OrderOracle | None = None) -> str:
    """Nesting relation between two components.

    a < b when a lies in a bounded complementary component of b, decided
    by flood-filling the complement of a 1-pixel dilation of b from the
    raster frame.  Components touching the frame on both sides are
    incomparable (the viewport truncates them).
    """
    for cid in (a, b):
        if not 0 <= cid < cm.n:
            raise ValueError(f"component id {cid} out of range")
    return (oracle or _OrderOracle(cm)).relation(a, b)


@dataclass
class OrderReport:
    total: bool
    incomparable_pairs: list[tuple[int, int]]
    frame_warnings: list[int]
    relations: dict[tuple[int, int], str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "incomparable_pairs": [list(p) for p in self.incomparable_pairs],
            "frame_warnings": self.frame_warnings,
        }


def order_totality(cm: ComponentMap) -> OrderReport:
    """Pairwise surrounding order; total when no pair is incomparable."""
    oracle = _OrderOracle(cm)
    incomparable = []
    relations = {}
    for a in range(cm.n):
        for b in range(a + 1, cm.n):
            rel = oracle.relation(a, b)
            relations[(a, b)] = rel
            if rel == INCOMPARABLE:
                incomparable.append((a, b))
    warnings = [int(i) for i in np.nonzero(cm.touches_frame)[0]]
    return OrderReport(not incomparable, incomparable, warnings, relations)


def min_max_components(cm: ComponentMap) -> tuple[int, int]:
    """(innermost id, outermost id) under the surrounding order; requires totality."""
    report = order_totality(cm)
    if not report.total:
        raise ValueError(f"ordering is not total: incomparable pairs {report.incomparable_pairs}")
    if cm.n == 1:
        return 0, 0
    score = np.zeros(cm.n, dtype=int)  # number of components that surround each id
    for (a, b), rel in report.relations.items():
        if rel == LESS:
            score[a] += 1
        elif rel == GREATER:
            score[b] += 1
    return int(np.argmax(score)), int(np.argmin(score))


# ------------------------------------------------------------- curves --


@dataclass
class CurveTrace:
    """Ordered contour pixel centers plus skeleton diagnostics.

    The point list comes from Moore-neighbor tracing of the region, which
    closes regardless of pixel-scale pinching; the skeleton statistics
    (components, branch pixels) back the Jordan verdict.
    """

    points: np.ndarray  # complex, loop order when closed
    closed: bool
    n_components: int
    n_branch_pixels: int
    n_skeleton_px: int
    viewport: Viewport

    def __len__(self) -> int:
        return len(self.points)


def _neighbor_count(mask: np.ndarray) -> np.ndarray:
    padded = np.pad(mask.astype(np.int32), 1)
    total = np.zeros_like(padded)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr or dc:
                total += np.roll(np.roll(padded, dr, 0), dc, 1)
    return total[1:-1, 1:-1]


def _crossing_number(mask: np.ndarray) -> np.ndarray:
    """Number of 0->1 transitions around the 8-neighborhood ring of each pixel."""
    padded = np.pad(mask.astype(np.int8), 1)
    ring = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]
    vals = [np.roll(np.roll(padded, -dr, 0), -dc, 1)[1:-1, 1:-1] for dr, dc in ring]
    crossings = np.zeros(mask.shape, dtype=np.int32)
    for k in range(8):
        crossings += (vals[k] == 0) & (vals[(k + 1) % 8] == 1)
    return crossings


def _zhang_suen(mask: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """Thin a binary mask to a 1-pixel-wide skeleton."""
    img = mask.copy()
    ring = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]
    for _ in range(max_iter):
        changed = False
        for phase in (0, 1):
            padded = np.pad(img.astype(np.int8), 1)
            n = [np.roll(np.roll(padded, -dr, 0), -dc, 1)[1:-1, 1:-1] for dr, dc in ring]
            p2, p3, p4, p5, p6, p7, p8, p9 = n
            bsum = sum(n)
            a = sum(((n[k] == 0) & (n[(k + 1) % 8] == 1)).astype(np.int8) for k in range(8))
            cond = img & (bsum >= 2) & (bsum <= 6) & (a == 1)
            if phase == 0:
                cond &= (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
            else:
                cond &= (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
            if cond.any():
                img &= ~cond
                changed = True
        if not changed:
            break
    return img


def _prune_spurs(mask: np.ndarray) -> np.ndarray:
    """Delete degree <= 1 pixels until stable, keeping only cycle structure.

    Thinning artifacts grow tree-like spurs off the curve; a cycle walk
    entering one dead-ends, so spurs are removed wholesale.  A skeleton
    with no cycle erodes to nothing, which the tracer reports as open.
    """
    img = mask.copy()
    while True:
        deg = _neighbor_count(img)
        tips = img & (deg <= 1)
        if not tips.any():
            return img
        img &= ~tips


# Moore neighborhood, clockwise starting from west (rows grow downward)
_MOORE = [(0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]


def _moore_contour(mask: np.ndarray) -> list[tuple[int, int]]:
    """Closed outer contour of the largest component by Moore tracing.

    The scan around each contour pixel restarts at the backtrack pixel
    (the outside neighbor examined just before entering it); tracing
    stops when the start pixel is re-entered with the starting backtrack
    (Jacob's criterion), so the contour always closes.
    """
    labels, n = ndimage.label(mask, structure=_EIGHT)
    if n == 0:
        return []
    largest = int(np.argmax(np.bincount(labels.ravel())[1:])) + 1
    region = labels == largest
    rows, cols = np.nonzero(region)
    r0 = int(rows.min())
    c0 = int(cols[rows == r0].min())
    start = (r0, c0)

    def inside(p):
        rr, cc = p
        return 0 <= rr < region.shape[0] and 0 <= cc < region.shape[1] and region[rr, cc]

    start_back = (r0, c0 - 1)  # outside: start is topmost-leftmost
    p, b = start, start_back
    contour = [start]
    cap = 8 * int(region.sum()) + 64
    for _ in range(cap):
        i = _MOORE.index((b[0] - p[0], b[1] - p[1]))
        nxt = None
        for k in range(1, 9):
            d = _MOORE[(i + k) % 8]
            cand = (p[0] + d[0], p[1] + d[1])
            if inside(cand):
                nxt = cand
                prev_d = _MOORE[(i + k - 1) % 8]
                b = (p[0] + prev_d[0], p[1] + prev_d[1])
                break
        if nxt is None:
            return contour  # isolated single pixel
        p = nxt
        if p == start and b == start_back:
            return contour
        contour.append(p)
    return contour


def trace_boundary(r: Raster) -> CurveTrace:
    """Trace the curve class of a raster.

    Prefers the boundary class when present (bounded class otherwise, for
    filled rasters).  Contour points come from Moore tracing; the Jordan
    diagnostics come from the thinned skeleton graph.
    """
    mask = r.boundary_mask()
    if not mask.any():
        mask = r.bounded_mask()
    if not mask.any():
        return CurveTrace(np.zeros(0, dtype=complex), False, 0, 0, 0, r.viewport)

    skel = _prune_spurs(_zhang_suen(mask))
    if skel.any():
        _, n_comp = ndimage.label(skel, structure=_EIGHT)
        branch = int(((_crossing_number(skel) >= 3) & skel).sum())
        skel_px = int(skel.sum())
    else:
        n_comp, branch, skel_px = 0, 0, 0

    path = _moore_contour(mask)
    closed = len(path) >= 8 and max(abs(path[0][0] - path[-1][0]), abs(path[0][1] - path[-1][1])) <= 1
    grid = r.viewport.grid()
    pts = np.array([grid[p] for p in path]) if path else np.zeros(0, dtype=complex)
    return CurveTrace(pts, closed, int(n_comp), branch, skel_px, r.viewport)


def write_trace_csv(t: CurveTrace, path: str) -> None:
    """Polyline export, one vertex per line."""
    with open(path, "w") as fh:
        fh.write("re,im\n")
        for z in t.points:
            fh.write(f"{z.real!r},{z.imag!r}\n")


def jordan_heuristic(t: CurveTrace) -> bool:
    """True when the thinned boundary graph is one clean closed cycle."""
    if not t.closed or len(t) < 8:
        return False
    return t.n_components == 1 and t.n_branch_pixels == 0 and t.n_skeleton_px >= 8


def _arc_diameter(points: np.ndarray) -> float:
    """Diameter of a point set via its convex hull."""
    if len(points) < 2:
        return 0.0
    xy = np.c_[points.real, points.imag]
    if len(points) > 16:
        from scipy.spatial import ConvexHull

        try:
            xy = xy[ConvexHull(xy).vertices]
        except Exception:
            pass  # degenerate (collinear) hulls fall back to all points
    d2 = np.sum((xy[:, None, :] - xy[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def quasicircle_ratio(t: CurveTrace, n_pairs: int = 256, seed: int = 0, min_chord_px: float = 6.0) -> float:
    """Max over sampled pairs of diam(smaller arc) / chord length.

    Bounded for quasicircles, grows with resolution for curves with
    degenerating necks: each refinement admits pocket mouths one rung
    deeper into the chord window, and on a non-quasicircle those pockets
    carry ever larger diameter-to-mouth quotients.  Chords under
    min_chord_px pixels are excluded because pixel-center quantization
    understates them by an unbounded relative error (a fused 1-pixel
    mouth can inflate the quotient several-fold); at 6 pixels the
    inflation is bounded by roughly twenty percent, which keeps the
    maximum comparable across resolutions.  Pairs mix random draws with
    spatial-hash candidates (trace-far but plane-near points) collected
    at every dyadic cell size.
    """
    if not t.closed:
        raise ValueError("quasicircle ratio needs a closed trace")
    if n_pairs < 100:
        raise ValueError("n_pairs must be >= 100")
    pts = t.points
    L = len(pts)
    px = t.viewport.px_size
    chord_floor = min_chord_px * px
    rng = np.random.default_rng(seed)
    pairs = {tuple(sorted((int(i), int(j)))) for i, j in rng.integers(0, L, size=(n_pairs, 2)) if i != j}

    # neck candidates: close in the plane, far along the trace; hashed at
    # several cell sizes so pocket mouths of every scale are found
    # regardless of resolution
    diam = max(pts.real.max() - pts.real.min(), pts.imag.max() - pts.imag.min())
    cell = 3.0 * px
    while cell < diam / 2:
        buckets: dict[tuple[int, int], list[int]] = {}
        stride = max(1, int(cell / (3.0 * px)))  # decimate at coarse scales
        for k in range(0, L, stride):
            z = pts[k]
            key = (int(z.real // cell), int(z.imag // cell))
            buckets.setdefault(key, []).append(k)
        for (bx, by), members in buckets.items():
            neighborhood = list(members)
            for ox, oy in ((1, 0), (0, 1), (1, 1), (1, -1)):
                neighborhood += buckets.get((bx + ox, by + oy), [])
            for ii in members:
                for jj in neighborhood:
                    if jj <= ii:
                        continue
                    d_idx = min((jj - ii) % L, (ii - jj) % L)
                    if d_idx >= L // 8:
                        pairs.add((ii, jj))
        cell *= 2.0

    # exact arc diameters are costly; rank candidates by circular index
    # distance over chord (pocket mouths score high) and evaluate the top
    scored = []
    for i, j in pairs:
        chord = abs(pts[i] - pts[j])
        if chord < chord_floor:
            continue
        d_idx = min((j - i) % L, (i - j) % L)
        scored.append((d_idx / chord, i, j))
    scored.sort(reverse=True)

    best = 0.0
    for _, i, j in scored[: max(n_pairs, 600)]:
        chord = abs(pts[i] - pts[j])
        arc_a = pts[i : j + 1]
        arc_b = np.concatenate([pts[j:], pts[: i + 1]])
        da, db = _arc_diameter(arc_a), _arc_diameter(arc_b)
        ratio = min(da, db) / chord
        best = max(best, ratio)
    return best


def area_scaling(rasters: list[Raster]) -> float:
    """Least-squares slope of log(boundary area) against log(pixel size).

    Positive slope means the boundary area vanishes with refinement,
    the desk-scale signature of a measure-zero curve.
    """
    if len(rasters) < 3:
        raise ValueError("need at least 3 resolutions")
    areas, sizes = [], []
    for r in rasters:
        count = int(r.boundary_mask().sum())
        if count == 0:
            raise ValueError("raster without boundary pixels")
        px = r.viewport.px_size
        areas.append(count * px * px)
        sizes.append(px)
    slope = np.polyfit(np.log(sizes), np.log(areas), 1)[0]
    return float(slope)


# ------------------------------------------------- component stability --


@dataclass
class StabilityReport:
    verdict: str  # "stable" | "growing"
    count: int | None
    counts_by_resolution: dict[int, int]
    n_points_by_resolution: dict[int, int]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "count": self.count,
            "counts_by_resolution": {str(k): v for k, v in self.counts_by_resolution.items()},
        }


def julia_component_map(
    gs,
    vp: Viewport,
    n_points: int | None = None,
    seed: int = 0,
    dilate: int = 1,
    min_size: int = 24,
    cloud: PointCloud | None = None,
) -> ComponentMap:
    """Components of the rasterized backward-orbit cloud (the Julia set proxy).

    The cloud raster is dilated before labeling so sampling gaps along a
    curve do not fragment it, and sub-scale fragments are filtered out;
    counts are therefore lower bounds that grow as resolution resolves
    more of the nesting structure.
    """
    if cloud is None:
        if n_points is None:
            # one point per pixel keeps the sparsest cylinder of the
            # backward-orbit measure covered at curve-connectivity density
            n_points = max(vp.px_w, vp.px_h) ** 2
        cloud = backward_sample(gs, n_points, seed=seed)
    r = cloud_raster(cloud, vp)
    mask = r.boundary_mask()
    if dilate > 0:
        mask = ndimage.binary_dilation(mask, structure=_EIGHT, iterations=dilate)
    cells = np.where(mask, BOUNDARY, 0).astype(np.int32)
    cm = label_components(Raster(vp, cells, dict(r.meta)), "boundary", 8)
    return filter_small(cm, min_size) if min_size > 0 else cm


def component_count_stability(
    gs,
    center: complex,
    size: float,
    resolutions: list[int],
    seed: int = 0,
    dilate: int = 1,
) -> StabilityReport:
    """Component counts of the Julia set proxy across resolutions.

    Stable(n) when the two finest settings agree; Growing otherwise.
    """
    counts: dict[int, int] = {}
    npts: dict[int, int] = {}
    for px in resolutions:
        vp = Viewport.square(center, size, px)
        n_points = px * px
        cm = julia_component_map(gs, vp, n_points=n_points, seed=seed, dilate=dilate)
        counts[px] = cm.n
        npts[px] = n_points
    finest = sorted(resolutions)[-2:]
    if len(finest) == 2 and counts[finest[0]] == counts[finest[1]]:
        return StabilityReport("stable", counts[finest[1]], counts, npts)
    return StabilityReport("growing", None, counts, npts)
