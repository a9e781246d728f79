"""Complex polynomial arithmetic: the atom of every dynamical computation.

Polynomials are immutable value objects with coefficients stored in
ascending degree order.  A polynomial built by composition remembers its
factor chain, which keeps evaluation and preimage extraction cheap for
high-degree iterates (evaluate factor by factor instead of expanding a
degree-2^l Horner sum).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

# Moduli beyond this are classified as escaped rather than propagated,
# so NaN/Inf never contaminate downstream rasters.
OVERFLOW_LIMIT = 1e150

ROOT_ITERATION_CAP = 500


class Escaped(ArithmeticError):
    """Raised when an evaluation exceeds OVERFLOW_LIMIT; callers treat it as escape to infinity."""


class RootConvergenceError(RuntimeError):
    def __init__(self, best_residual: float):
        super().__init__(f"root iteration did not converge (best residual {best_residual:.3e})")
        self.best_residual = best_residual


@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial c0 + c1 z + ... + cd z^d with cd != 0.

    ``chain``, when present, is a factor sequence (outermost first) whose
    composition equals this polynomial; it is carried as an evaluation
    hint and never affects equality.
    """

    coeffs: tuple[complex, ...]
    chain: tuple["Polynomial", ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("need degree >= 1 (at least two coefficients)")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero (no trailing zeros)")
        for c in self.coeffs:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def factors(self) -> tuple["Polynomial", ...]:
        """Factor chain, outermost first; the polynomial itself when atomic."""
        return self.chain if self.chain is not None else (self,)

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"({c.real:g}{c.imag:+g}i)z^{k}" if c.imag else f"{c.real:g}z^{k}")
        return " + ".join(terms) if terms else "0"


def polynomial(coeffs) -> Polynomial:
    """Build a Polynomial from any coefficient sequence, stripping trailing zeros."""
    cs = [complex(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return Polynomial(tuple(cs))


def monomial(a: complex, d: int) -> Polynomial:
    """a * z^d."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return Polynomial((0,) * d + (complex(a),))


def shifted_power(a: complex, b: complex, d: int) -> Polynomial:
    """a*(z - b)^d + b, the one-parameter family used to seed new generators."""
    coeffs = np.zeros(d + 1, dtype=complex)
    for k in range(d + 1):
        coeffs[k] = a * math.comb(d, k) * (-b) ** (d - k)
    coeffs[0] += b
    return polynomial(coeffs)


def is_monomial(p: Polynomial) -> bool:
    return all(c == 0 for c in p.coeffs[:-1])


def _horner(coeffs: tuple[complex, ...], z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
        if abs(acc.real) > OVERFLOW_LIMIT or abs(acc.imag) > OVERFLOW_LIMIT:
            raise Escaped
    return acc


def evaluate(p: Polynomial, z: complex) -> complex:
    """p(z) by Horner, factor by factor for composed polynomials.

    Raises Escaped when any intermediate modulus exceeds OVERFLOW_LIMIT.
    """
    w = complex(z)
    for f in reversed(p.factors()):
        w = _horner(f.coeffs, w)
    return w


def evaluate_array(p: Polynomial, z: np.ndarray) -> np.ndarray:
    """Vectorized p(z); overflow produces inf/nan entries for the caller to mask."""
    w = np.asarray(z, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for f in reversed(p.factors()):
            acc = np.full_like(w, f.coeffs[-1])
            for c in reversed(f.coeffs[:-1]):
                acc = acc * w + c
            w = acc
    return w


def compose(p: Polynomial, q: Polynomial) -> Polynomial:
    """p o q, with degree deg(p)*deg(q) and leading coefficient a(p)*a(q)^deg(p)."""
    a = np.array(q.coeffs, dtype=complex)
    acc = np.array([p.coeffs[-1]], dtype=complex)
    for c in reversed(p.coeffs[:-1]):
        acc = np.convolve(acc, a)
        acc[0] += c
    if not np.all(np.isfinite(acc.view(float))):
        bad = int(np.nonzero(~np.isfinite(acc.view(float)))[0][0] // 2)
        raise OverflowError(f"coefficient overflow at degree {bad} while composing")
    if acc[-1] == 0:
        raise OverflowError(f"leading coefficient underflowed to zero at degree {len(acc) - 1}")
    return Polynomial(tuple(acc), chain=p.factors() + q.factors())


def iterate(p: Polynomial, n: int) -> Polynomial:
    """n-fold self-composition p o p o ... o p."""
    if n < 1:
        raise ValueError("iterate count must be >= 1")
    out = p
    for _ in range(n - 1):
        out = compose(out, p)
    return out


@dataclass(frozen=True)
class Constant:
    """Zero-degree result of differentiating a linear polynomial, kept distinct from Polynomial."""

    value: complex

    def __call__(self, z: complex) -> complex:
        return self.value


def derivative(p: Polynomial) -> Polynomial | Constant:
    """Exact coefficient-wise derivative, degree d-1; Constant for d = 1."""
    if p.degree == 1:
        return Constant(complex(p.coeffs[1]))
    return Polynomial(tuple((k + 1) * c for k, c in enumerate(p.coeffs[1:])))


def cauchy_root_bound(p: Polynomial) -> float:
    """All roots lie in |z| <= 1 + max |c_k / c_d|."""
    cd = abs(p.leading)
    return 1.0 + max(abs(c) for c in p.coeffs[:-1]) / cd if p.degree >= 1 else 1.0


def roots(p: Polynomial, tol: float = 1e-10) -> list[tuple[complex, int]]:
    """All roots with multiplicities, as (root, multiplicity) pairs.

    Closed forms for degree <= 2; Ehrlich-Aberth simultaneous iteration
    above that, started on a perturbed circle at the Cauchy root bound.
    Multiplicities come from clustering within 1e-6 * root bound, which is
    about the separation double precision can support at these degrees.
    """
    d = p.degree
    cs = p.coeffs
    if d == 1:
        return [(-cs[0] / cs[1], 1)]
    if d == 2:
        return _quadratic_roots(cs[0], cs[1], cs[2])

    bound = cauchy_root_bound(p)
    k = np.arange(d)
    # perturbed circle: irrational-ish angle offset breaks root symmetries
    z = bound * np.exp(1j * (2 * np.pi * k / d + 0.739085))
    coeff = np.array(cs, dtype=complex)
    dcoeff = np.array([(j + 1) * c for j, c in enumerate(cs[1:])], dtype=complex)

    best_rel = np.inf
    for _ in range(ROOT_ITERATION_CAP):
        pv = np.polyval(coeff[::-1], z)
        scale = np.polyval(np.abs(coeff)[::-1], np.abs(z))
        rel = np.abs(pv) / np.maximum(scale, 1e-300)
        best_rel = min(best_rel, float(rel.max()))
        if np.all(rel <= 1e-15 * (d + 4)):
            break
        dv = np.polyval(dcoeff[::-1], z)
        newton = np.where(dv != 0, pv / np.where(dv == 0, 1, dv), 0.05 * bound)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        repel = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * repel
        step = np.where(np.abs(denom) > 1e-30, newton / np.where(denom == 0, 1, denom), newton)
        z = z - step
        bad = ~np.isfinite(z.view(float).reshape(-1, 2)).all(axis=1)
        if bad.any():
            idx = np.nonzero(bad)[0]
            z[idx] = bound * np.exp(1j * (2 * np.pi * idx / d + 1.234))

    pv = np.polyval(coeff[::-1], z)
    scale = max(abs(c) for c in cs) * np.maximum(1.0, np.abs(z)) ** d
    if np.any(np.abs(pv) > tol * scale):
        raise RootConvergenceError(best_rel)
    return _cluster(z, 1e-6 * bound)


def _quadratic_roots(c0: complex, c1: complex, c2: complex) -> list[tuple[complex, int]]:
    if c0 == 0:
        pair = np.array([0j, -c1 / c2])
    else:
        disc = c1 * c1 - 4 * c2 * c0
        s = cmath.sqrt(disc)
        if (c1.conjugate() * s).real < 0:
            s = -s
        q = -(c1 + s) / 2  # sign chosen against cancellation
        pair = np.array([q / c2, c0 / q])
    bound = 1.0 + max(abs(c0), abs(c1)) / abs(c2)
    return _cluster(pair, 1e-6 * bound)


def _cluster(points: np.ndarray, radius: float) -> list[tuple[complex, int]]:
    """Greedy clustering; each cluster becomes (centroid, size)."""
    remaining = sorted((complex(z) for z in points), key=lambda z: (z.real, z.imag))
    out: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        keep = []
        for z in remaining:
            if abs(z - seed) <= radius:
                members.append(z)
            else:
                keep.append(z)
        remaining = keep
        centroid = sum(members) / len(members)
        out.append((centroid, len(members)))
    return out


def critical_points(p: Polynomial) -> list[complex]:
    """Finite critical points (zeros of p'), with multiplicity collapsed."""
    if p.degree < 2:
        raise ValueError("need degree >= 2")
    return [r for r, _ in roots(derivative(p))]


def _dedup(values: list[complex], tol: float) -> list[complex]:
    out: list[complex] = []
    for v in values:
        if not any(abs(v - u) <= tol * (1 + abs(u)) for u in out):
            out.append(v)
    return sorted(out, key=lambda z: (z.real, z.imag))


def critical_values_finite(p: Polynomial, tol: float = 1e-9) -> list[complex]:
    """{p(c) : p'(c) = 0}, deduplicated within tol * (1 + |value|).

    Composed polynomials use the chain recursion CV(f o g) = f(CV(g)) u CV(f),
    which stays well-conditioned where the expanded derivative would not.
    Values past the overflow limit are clamped to a huge sentinel; any
    such value certifies postcritical escape on its own.
    """
    factors = p.factors()
    if len(factors) == 1:
        values = []
        for c in critical_points(p):
            values.append(evaluate(p, c))
        return _dedup(values, tol)
    values: list[complex] = []
    for f in reversed(factors):
        mapped = []
        for v in values:
            try:
                mapped.append(_horner(f.coeffs, v))
            except Escaped:
                mapped.append(complex(2 * OVERFLOW_LIMIT, 0.0))
        values = _dedup(mapped + critical_values_finite(f, tol), tol)
    return values


def preimages(p: Polynomial, w: complex, tol: float = 1e-10) -> list[complex]:
    """All distinct solutions of p(z) = w."""
    shifted = list(p.coeffs)
    shifted[0] -= w
    if all(c == 0 for c in shifted):
        raise ValueError("p is identically w; preimage is the whole plane")
    q = polynomial(shifted)
    if q.degree == 0:
        return []
    return [r for r, _ in roots(q, tol)]


def random_preimage(p: Polynomial, w: complex, rng: np.random.Generator) -> complex:
    """One uniformly chosen preimage, walking the factor chain outermost-in.

    For a composed polynomial this draws a branch per factor, equivalent to
    sampling a leaf of the preimage tree; the support is the full preimage
    set, which is all the backward-orbit sampler needs.
    """
    value = complex(w)
    for f in p.factors():
        value = _one_preimage(f, value, rng)
    return value


def _one_preimage(f: Polynomial, w: complex, rng: np.random.Generator) -> complex:
    if is_monomial(f):
        d = f.degree
        radius = abs(w / f.leading) ** (1.0 / d)
        theta = (cmath.phase(w / f.leading) + 2 * math.pi * rng.integers(d)) / d
        return radius * cmath.exp(1j * theta)
    pts = preimages(f, w)
    return pts[int(rng.integers(len(pts)))]


def escape_radius(p: Polynomial) -> float:
    """R >= 1 with the doubling property: |z| >= R implies |p(z)| >= 2|z|.

    Atomic polynomials use R = max(1, (2 + sum |c_k|) / |c_d|).  Composed
    polynomials take the max over chain factors, which both satisfies the
    doubling test and avoids the blowup the raw formula suffers when the
    expanded leading coefficient is tiny.
    """
    if p.degree < 2:
        raise ValueError("need degree >= 2")
    factors = p.factors()
    if len(factors) > 1:
        return max(escape_radius(f) for f in factors)
    return max(1.0, (2.0 + sum(abs(c) for c in p.coeffs[:-1])) / abs(p.leading))
