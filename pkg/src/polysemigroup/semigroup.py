"""Generator families, words, and the postcritical boundedness check.

The membership test for the postcritically bounded class runs a
breadth-first closure of the finite critical values under all generators,
deduplicating on a snap grid.  An Escaping verdict is rigorous (past the
escape radius the doubling bound forces divergence); Bounded and
Inconclusive are depth-limited statements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from polysemigroup import poly
from polysemigroup.poly import Escaped, Polynomial

# Orbit points are snapped to this grid for closure detection; a finite
# check of an infinite union needs a convergence rule, and this one makes
# Bounded reachable for super-attracting examples with negligible false merges.
DEDUP_GRID = 1e-9

DEFAULT_DEPTH = 400

Word = tuple[int, ...]  # generator indices, 0-based, applied left to right


@dataclass(frozen=True)
class GeneratorSet:
    """Ordered finite family of polynomials of degree >= 2."""

    generators: tuple[Polynomial, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.generators:
            raise ValueError("generator set must be non-empty")
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.degree < 2:
                raise ValueError("every generator must have degree >= 2")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(self.generators):
                raise ValueError("one label per generator")
            if len(set(self.labels)) != len(self.labels):
                raise ValueError("labels must be unique")

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def max_escape_radius(self) -> float:
        return max(poly.escape_radius(g) for g in self.generators)

    def label(self, i: int) -> str:
        if self.labels:
            return self.labels[i]
        return f"g{i}"


def generator_set(polys, labels=None) -> GeneratorSet:
    return GeneratorSet(tuple(polys), tuple(labels) if labels else None)


def word_apply(gs: GeneratorSet, w: Word, z: complex) -> complex:
    """h_{w[-1]} o ... o h_{w[0]} applied to z; Escaped propagates."""
    m = len(gs)
    value = complex(z)
    for i in w:
        if not 0 <= i < m:
            raise IndexError(f"word index {i} out of range for {m} generators")
        value = poly.evaluate(gs.generators[i], value)
    return value


@dataclass(frozen=True)
class PostcriticalReport:
    """Outcome of the postcritical orbit closure search."""

    verdict: str  # "bounded" | "escaping" | "inconclusive"
    samples: tuple[complex, ...]
    max_modulus: float
    depth: int
    radius_used: float
    witness_word: Word | None = None
    witness_seed: complex | None = None
    generations_used: int = field(default=0)

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "max_modulus": self.max_modulus,
            "depth": self.depth,
            "radius": self.radius_used,
            "n_samples": len(self.samples),
        }
        if self.verdict == "escaping":
            out["witness"] = {
                "word": list(self.witness_word),
                "seed": [self.witness_seed.real, self.witness_seed.imag],
            }
        return out

    def __str__(self) -> str:
        return json.dumps(self.to_json())


def _snap(z: complex) -> tuple[int, int]:
    return (round(z.real / DEDUP_GRID), round(z.imag / DEDUP_GRID))


def postcritical_orbit(gs: GeneratorSet, depth: int, radius: float) -> PostcriticalReport:
    """Breadth-first closure of the finite critical values under all generators.

    Escaping fires as soon as any orbit point leaves the given radius and
    carries a replayable witness word; Bounded means the deduplicated
    frontier emptied (orbit closure converged) within `depth` generations.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")

    seeds: list[complex] = []
    for g in gs.generators:
        for v in poly.critical_values_finite(g):
            seeds.append(v)

    seen: dict[tuple[int, int], complex] = {}
    frontier: list[tuple[complex, Word, complex]] = []  # (value, word so far, seed)
    max_modulus = 0.0
    for s in seeds:
        key = _snap(s)
        if key not in seen:
            seen[key] = s
            frontier.append((s, (), s))
            max_modulus = max(max_modulus, abs(s))
            if abs(s) > radius:
                return PostcriticalReport(
                    "escaping", tuple(seen.values()), max_modulus, depth, radius,
                    witness_word=(), witness_seed=s,
                )

    for generation in range(1, depth + 1):
        if not frontier:
            return PostcriticalReport(
                "bounded", tuple(seen.values()), max_modulus, depth, radius,
                generations_used=generation - 1,
            )
        next_frontier: list[tuple[complex, Word, complex]] = []
        for value, word, seed in frontier:
            for i, g in enumerate(gs.generators):
                try:
                    image = poly.evaluate(g, value)
                except Escaped:
                    return PostcriticalReport(
                        "escaping", tuple(seen.values()), float("inf"), depth, radius,
                        witness_word=word + (i,), witness_seed=seed,
                    )
                if abs(image) > radius:
                    max_modulus = max(max_modulus, abs(image))
                    return PostcriticalReport(
                        "escaping", tuple(seen.values()), max_modulus, depth, radius,
                        witness_word=word + (i,), witness_seed=seed,
                    )
                key = _snap(image)
                if key not in seen:
                    seen[key] = image
                    max_modulus = max(max_modulus, abs(image))
                    next_frontier.append((image, word + (i,), seed))
        frontier = next_frontier

    if not frontier:
        return PostcriticalReport(
            "bounded", tuple(seen.values()), max_modulus, depth, radius,
            generations_used=depth,
        )
    return PostcriticalReport(
        "inconclusive", tuple(seen.values()), max_modulus, depth, radius,
        generations_used=depth,
    )


def pcb_check(gs: GeneratorSet, depth: int = DEFAULT_DEPTH) -> PostcriticalReport:
    """Postcritical boundedness at radius 2 * max escape radius."""
    radius = 2.0 * gs.max_escape_radius()
    return postcritical_orbit(gs, depth, radius)
