"""Raster and point-cloud computation of semigroup and fiberwise Julia sets.

Per-pixel work is a pure function of the pixel coordinate, so every raster
here is deterministic regardless of how the work is scheduled.  Escape
steps for the all-words raster follow the fixed depth-first generator
order, which keeps images reproducible.

Two independent approximations of the semigroup Julia set are provided
and cross-validated in the test suite: the backward-orbit chaos game
(dense by the backward-orbit density lemma) and boundaries of filled
rasters.  Neither pixel algorithm is canonical, so disagreement flags
resolution or depth starvation.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from polysemigroup import poly
from polysemigroup.poly import Polynomial
from polysemigroup.semigroup import GeneratorSet

BOUNDED = 0
BOUNDARY = -1  # produced by boundary_extract / cloud_raster only

_PGM_BOUNDED = 0
_PGM_BOUNDARY = 128


@dataclass(frozen=True)
class Viewport:
    """Axis-aligned window of the complex plane with a pixel grid."""

    center: complex
    width: float
    height: float
    px_w: int
    px_h: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport extents must be positive")
        if self.px_w < 16 or self.px_h < 16:
            raise ValueError("pixel counts must be >= 16")

    @classmethod
    def square(cls, center: complex, size: float, px: int) -> "Viewport":
        return cls(complex(center), size, size, px, px)

    @property
    def px_size(self) -> float:
        return self.width / self.px_w

    def grid(self) -> np.ndarray:
        """Complex pixel centers, row 0 at the top of the window."""
        xs = self.center.real - self.width / 2 + (np.arange(self.px_w) + 0.5) * self.width / self.px_w
        ys = self.center.imag + self.height / 2 - (np.arange(self.px_h) + 0.5) * self.height / self.px_h
        return xs[None, :] + 1j * ys[:, None]

    def pixel_of(self, z: complex) -> tuple[int, int] | None:
        """(row, col) containing z, or None if outside the window."""
        col = int(np.floor((z.real - (self.center.real - self.width / 2)) / self.width * self.px_w))
        row = int(np.floor(((self.center.imag + self.height / 2) - z.imag) / self.height * self.px_h))
        if 0 <= row < self.px_h and 0 <= col < self.px_w:
            return row, col
        return None


@dataclass
class Raster:
    """Pixel classification: 0 bounded, k >= 1 escaped at step k, -1 boundary."""

    viewport: Viewport
    cells: np.ndarray  # int32, shape (px_h, px_w)
    meta: dict = field(default_factory=dict)

    def bounded_mask(self) -> np.ndarray:
        return self.cells == BOUNDED

    def escaped_mask(self) -> np.ndarray:
        return self.cells > 0

    def boundary_mask(self) -> np.ndarray:
        return self.cells == BOUNDARY


@dataclass(frozen=True)
class PointCloud:
    """Backward-orbit samples with full reproducibility info."""

    points: np.ndarray  # complex, 1-d
    seed: int
    burn_in: int
    history_length: int


@dataclass(frozen=True)
class FiberSequence:
    """Finite prefix of a generator-index sequence along one fiber."""

    indices: tuple[int, ...]
    rule: str = "explicit"  # "explicit" | "periodic" | "random"

    def __post_init__(self):
        if len(self.indices) < 1:
            raise ValueError("fiber sequence needs length >= 1")

    @classmethod
    def constant(cls, index: int, length: int) -> "FiberSequence":
        return cls((index,) * length, rule="periodic")

    @classmethod
    def periodic(cls, pattern: tuple[int, ...], length: int) -> "FiberSequence":
        reps = (length + len(pattern) - 1) // len(pattern)
        return cls(tuple((pattern * reps)[:length]), rule="periodic")

    @classmethod
    def random_seeded(cls, seed: int, length: int, n_generators: int) -> "FiberSequence":
        rng = np.random.default_rng(seed)
        return cls(tuple(int(i) for i in rng.integers(n_generators, size=length)), rule="random")

    def counts(self, n_generators: int) -> list[int]:
        return [self.indices.count(i) for i in range(n_generators)]


def _iterate_masked(p: Polynomial, z: np.ndarray) -> np.ndarray:
    """One application of p on an array, inf/nan tolerated for the caller to mask."""
    return poly.evaluate_array(p, z)


def escape_raster(p: Polynomial, vp: Viewport, maxiter: int, R: float) -> Raster:
    """Classical escape-time raster: bounded iff all iterates stay within R."""
    if R < poly.escape_radius(p):
        raise ValueError("R must be at least the escape radius")
    z = vp.grid()
    cells = np.zeros(z.shape, dtype=np.int32)
    alive = np.ones(z.shape, dtype=bool)
    for step in range(1, maxiter + 1):
        z[alive] = _iterate_masked(p, z[alive])
        with np.errstate(invalid="ignore"):
            out = alive & (~np.isfinite(z.real) | ~np.isfinite(z.imag) | (np.abs(z) > R))
        cells[out] = step
        z[out] = 0
        alive &= ~out
        if not alive.any():
            break
    return Raster(vp, cells, {"algorithm": "escape", "depth": maxiter, "radius": R})


def filled_raster(
    gs: GeneratorSet,
    vp: Viewport,
    depth: int,
    R: float | None = None,
    threads: int = 1,
) -> Raster:
    """Smallest-filled-set raster: bounded iff no word of length <= depth escapes.

    Depth-first search over the word tree with early exit: one escaping
    word excludes a pixel rigorously (up to rounding), so the bounded set
    over-approximates the true set and shrinks monotonically with depth.
    Escape steps record the length of the first escaping word in
    depth-first generator order.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if R is None:
        R = 2.0 * gs.max_escape_radius()
    grid = vp.grid()
    if threads > 1:
        bands = np.array_split(np.arange(vp.px_h), min(threads, vp.px_h))
        cells = np.zeros(grid.shape, dtype=np.int32)
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                pool.submit(_word_tree_escape, gs, grid[band[0] : band[-1] + 1].ravel(), depth, R): band
                for band in bands if len(band)
            }
            for fut, band in futures.items():
                cells[band[0] : band[-1] + 1] = fut.result().reshape(len(band), vp.px_w)
    else:
        cells = _word_tree_escape(gs, grid.ravel(), depth, R).reshape(grid.shape)
    return Raster(vp, cells, {"algorithm": "filled", "depth": depth, "radius": R})


def _word_tree_escape(gs: GeneratorSet, z0: np.ndarray, depth: int, R: float) -> np.ndarray:
    """Escape step per point over all words of length <= depth (0 = survived)."""
    n = z0.shape[0]
    esc_step = np.zeros(n, dtype=np.int32)
    escaped = np.zeros(n, dtype=bool)
    # explicit DFS stack; children pushed in reverse so generator 0 runs first
    stack: list[tuple[np.ndarray, np.ndarray, int]] = [(np.arange(n), z0.copy(), 0)]
    gens = list(gs.generators)
    while stack:
        idx, vals, d = stack.pop()
        keep = ~escaped[idx]
        if not keep.all():
            idx = idx[keep]
            vals = vals[keep]
        if idx.size == 0:
            continue
        for j in range(len(gens) - 1, -1, -1):
            w = _iterate_masked(gens[j], vals)
            with np.errstate(invalid="ignore"):
                out = ~np.isfinite(w.real) | ~np.isfinite(w.imag) | (np.abs(w) > R)
            out &= ~escaped[idx]
            if out.any():
                hit = idx[out]
                esc_step[hit] = d + 1
                escaped[hit] = True
            if d + 1 < depth:
                alive = ~escaped[idx]
                if alive.any():
                    stack.append((idx[alive], w[alive], d + 1))
    return esc_step


def fiber_raster(gs: GeneratorSet, gamma: FiberSequence, vp: Viewport, R: float | None = None) -> Raster:
    """Filled raster along one fiber: bounded iff every partial composition stays within R."""
    if R is None:
        R = 2.0 * gs.max_escape_radius()
    m = len(gs)
    for i in gamma.indices:
        if not 0 <= i < m:
            raise IndexError(f"fiber index {i} out of range")
    z = vp.grid()
    cells = np.zeros(z.shape, dtype=np.int32)
    alive = np.ones(z.shape, dtype=bool)
    for step, i in enumerate(gamma.indices, start=1):
        z[alive] = _iterate_masked(gs.generators[i], z[alive])
        with np.errstate(invalid="ignore"):
            out = alive & (~np.isfinite(z.real) | ~np.isfinite(z.imag) | (np.abs(z) > R))
        cells[out] = step
        z[out] = 0
        alive &= ~out
        if not alive.any():
            break
    return Raster(vp, cells, {"algorithm": "fiber", "depth": len(gamma.indices), "radius": R, "rule": gamma.rule})


def repelling_fixed_point(p: Polynomial) -> complex:
    """A repelling fixed point of p, the seed for backward sampling."""
    shifted = list(p.coeffs)
    shifted[1] -= 1  # p(z) - z
    candidates = [r for r, _ in poly.roots(poly.polynomial(shifted))]
    dp = poly.derivative(p)
    repelling = [z for z in candidates if abs(poly.evaluate(dp, z)) > 1]
    if not repelling:
        raise ValueError("no repelling fixed point among candidates; seed from a different generator")
    repelling.sort(key=lambda z: (-abs(poly.evaluate(dp, z)), z.real, z.imag))
    return repelling[0]


def _preimage_batch(f: Polynomial, w: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One random preimage per entry under a single (atomic) polynomial."""
    if poly.is_monomial(f):
        d = f.degree
        ratio = w / f.leading
        radius = np.abs(ratio) ** (1.0 / d)
        theta = (np.angle(ratio) + 2 * np.pi * rng.integers(d, size=w.shape)) / d
        return radius * np.exp(1j * theta)
    if f.degree == 2:
        c0, c1, c2 = f.coeffs
        disc = np.sqrt(c1 * c1 - 4 * c2 * (c0 - w) + 0j)
        sign = np.where(rng.integers(2, size=w.shape) == 0, 1.0, -1.0)
        return (-c1 + sign * disc) / (2 * c2)
    return np.array([poly.random_preimage(f, wi, rng) for wi in w])


def backward_sample(
    gs: GeneratorSet, n_points: int, burn_in: int = 64, seed: int = 0, batch: int = 256
) -> PointCloud:
    """Chaos game on the inverse branches, dense in the semigroup Julia set.

    Runs a batch of independent walkers, all seeded at a repelling fixed
    point of the first generator; each step picks a uniformly random
    generator and a uniformly random preimage branch per walker, the
    burn-in steps are discarded, and the rest are emitted.  Identical
    seeds give bit-identical clouds.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.default_rng(np.random.PCG64(seed))
    z0 = repelling_fixed_point(gs.generators[0])
    batch = min(batch, n_points)
    steps = burn_in + (n_points + batch - 1) // batch
    z = np.full(batch, z0, dtype=complex)
    gens = gs.generators
    m = len(gens)
    chunks = []
    emitted = 0
    for k in range(steps):
        choice = rng.integers(m, size=batch)
        nxt = np.empty_like(z)
        for i in range(m):
            sel = choice == i
            if not sel.any():
                continue
            w = z[sel]
            for f in gens[i].factors():
                w = _preimage_batch(f, w, rng)
            nxt[sel] = w
        z = nxt
        if k >= burn_in and emitted < n_points:
            take = min(batch, n_points - emitted)
            chunks.append(z[:take].copy())
            emitted += take
    out = np.concatenate(chunks)
    return PointCloud(out, seed=seed, burn_in=burn_in, history_length=steps)


def boundary_extract(r: Raster) -> Raster:
    """Mark bounded pixels 4-adjacent to escaped pixels as boundary."""
    bounded = r.bounded_mask()
    escaped = r.escaped_mask()
    neighbor_escaped = np.zeros_like(escaped)
    neighbor_escaped[1:, :] |= escaped[:-1, :]
    neighbor_escaped[:-1, :] |= escaped[1:, :]
    neighbor_escaped[:, 1:] |= escaped[:, :-1]
    neighbor_escaped[:, :-1] |= escaped[:, 1:]
    cells = r.cells.copy()
    cells[bounded & neighbor_escaped] = BOUNDARY
    meta = dict(r.meta)
    meta["boundary"] = True
    return Raster(r.viewport, cells, meta)


def cloud_raster(cloud: PointCloud, vp: Viewport) -> Raster:
    """Rasterize a point cloud; hit pixels become boundary cells."""
    cells = np.zeros((vp.px_h, vp.px_w), dtype=np.int32)
    xs = (cloud.points.real - (vp.center.real - vp.width / 2)) / vp.width * vp.px_w
    ys = ((vp.center.imag + vp.height / 2) - cloud.points.imag) / vp.height * vp.px_h
    cols = np.floor(xs).astype(int)
    rows = np.floor(ys).astype(int)
    ok = (rows >= 0) & (rows < vp.px_h) & (cols >= 0) & (cols < vp.px_w)
    cells[rows[ok], cols[ok]] = BOUNDARY
    return Raster(vp, cells, {"algorithm": "cloud", "n_points": len(cloud.points), "seed": cloud.seed})


# ---------------------------------------------------------------- export --

def raster_bytes(r: Raster) -> np.ndarray:
    """One byte per pixel: 0 bounded, 128 boundary, 129..255 escaped (shaded by step)."""
    cells = r.cells
    depth = max(int(r.meta.get("depth", cells.max() if cells.max() > 0 else 1)), 1)
    img = np.zeros(cells.shape, dtype=np.uint8)
    img[cells == BOUNDARY] = _PGM_BOUNDARY
    esc = cells > 0
    if esc.any():
        steps = cells[esc].astype(np.int64)
        shade = 255 - np.minimum(126, (steps - 1) * 126 // max(1, depth - 1))
        img[esc] = shade.astype(np.uint8)
    return img


def write_pgm(r: Raster, path: str) -> None:
    img = raster_bytes(r)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        fh.write(img.tobytes())


def read_pgm(path: str) -> Raster:
    """Read back a P5 file written by write_pgm; escape steps collapse to 1."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a P5 PGM file")
    w, h = (int(t) for t in parts[1].split())
    img = np.frombuffer(parts[3], dtype=np.uint8, count=w * h).reshape(h, w)
    cells = np.zeros((h, w), dtype=np.int32)
    cells[img == _PGM_BOUNDARY] = BOUNDARY
    cells[img > _PGM_BOUNDARY] = 1
    vp = Viewport(0j, float(w), float(h), max(w, 16), max(h, 16))
    return Raster(vp, cells, {"algorithm": "pgm"})


def write_png(r: Raster, path: str) -> None:
    from PIL import Image

    Image.fromarray(raster_bytes(r), mode="L").save(path, format="PNG")


def write_cloud_csv(cloud: PointCloud, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("re,im\n")
        for z in cloud.points:
            fh.write(f"{z.real!r},{z.imag!r}\n")
