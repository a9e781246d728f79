"""Parameterized builders for the explicit semigroup families shipped with
the package, each carrying expected-property metadata for the test suite.

Families: the Cantor-of-circles pair, logistic maps of the unit interval,
the 2n-generator family with a prescribed finite component count, the
iterated basilica/monomial pair with a certified disconnected Julia set,
the connected quadratic pair, and a three-generator family with countably
many components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from polysemigroup import poly
from polysemigroup.poly import Polynomial, compose, iterate, monomial, polynomial
from polysemigroup.semigroup import GeneratorSet, generator_set


@dataclass(frozen=True)
class ExampleSpec:
    """A named generator family plus the properties the suite checks."""

    name: str
    generators: GeneratorSet
    expected: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.generators)


def cantor_circles() -> ExampleSpec:
    """The pair {z^3, z^2/4}: bounded postcritical set, Julia set a Cantor family of circles."""
    gs = generator_set(
        [polynomial([0, 0, 0, 1]), polynomial([0, 0, 0.25])], labels=("cube", "quarter_square")
    )
    return ExampleSpec(
        "cantor_circles",
        gs,
        expected={
            "pcb": "bounded",
            "pcb_samples": [0j],
            "connectivity": "disconnected",
            "component_growth": "cantor",
            "affine_fixed_points": [0.0, math.log(4.0)],
            "certificate_annulus": (0.9, 4.5),
            "certificate_r_out": 32.0,
            "min_generator": 0,
        },
    )


def logistic_family(c: float, a: int, b: int) -> ExampleSpec:
    """c * z^a * (1-z)^b keeping [0,1] forward invariant.

    Admissible when c * (a/(a+b))^a * (b/(a+b))^b <= 1, which puts the
    interval maximum (attained at a/(a+b)) inside [0,1].
    """
    if c <= 0 or a < 1 or b < 1:
        raise ValueError("need c > 0 and integer exponents >= 1")
    bound = c * (a / (a + b)) ** a * (b / (a + b)) ** b
    if bound > 1:
        raise ValueError(
            f"inadmissible parameters: c*(a/(a+b))^a*(b/(a+b))^b = {bound:.6g} > 1"
        )
    coeffs = [0.0] * (a + b + 1)
    for k in range(b + 1):
        coeffs[a + k] = c * math.comb(b, k) * (-1.0) ** k
    gs = generator_set([polynomial(coeffs)])
    return ExampleSpec(
        f"logistic_{c:g}_{a}_{b}",
        gs,
        expected={
            "pcb": "bounded",
            "interval_invariant": (0.0, 1.0),
            "admissibility_value": bound,
        },
    )


def _alpha(j: int) -> Polynomial:
    return polynomial([0, 0, 1.0 / j])


def _beta(j: int, eps: float) -> Polynomial:
    # (z - eps)^2 / j + eps
    return polynomial([eps * eps / j + eps, -2.0 * eps / j, 1.0 / j])


def finite_component_family(n: int, eps: float, l: int) -> ExampleSpec:
    """2n generators, l-th iterates of z^2/j and ((z-eps)^2)/j + eps.

    For large enough l the Julia set has exactly n components, one per
    scale j; the affine fixed points log(j) are independent of l.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 < eps < 0.5:
        raise ValueError("need 0 < eps < 1/2")
    if l < 1:
        raise ValueError("need l >= 1")
    gens = [iterate(_alpha(j), l) for j in range(1, n + 1)]
    gens += [iterate(_beta(j, eps), l) for j in range(1, n + 1)]
    labels = [f"a{j}_iter{l}" for j in range(1, n + 1)] + [f"b{j}_iter{l}" for j in range(1, n + 1)]
    gs = generator_set(gens, labels=labels)
    return ExampleSpec(
        f"finite_components_{n}_{eps:g}_{l}",
        gs,
        expected={
            "pcb": "bounded",
            "component_count": n,
            "affine_fixed_points": [math.log(j) for j in range(1, n + 1)] * 2,
            "min_generator": 0,
        },
    )


def basilica_monomial_pair() -> ExampleSpec:
    """{(z^2-1)^2 - 1, z^4/64}: certified disconnected, with fiberwise
    Jordan-but-not-quasicircle curves along suitable sequences."""
    g1 = polynomial([-1, 0, 1])
    g2 = polynomial([0, 0, 0.25])
    gs = generator_set([compose(g1, g1), compose(g2, g2)], labels=("basilica_sq", "quarter_sq"))
    return ExampleSpec(
        "basilica_monomial_pair",
        gs,
        expected={
            "pcb": "bounded",
            # the superattracting fixed point -1 is itself a critical value;
            # every other postcritical point lands in the invariant disk
            "pcb_region": {"disk": 0.4, "extra_points": [-1 + 0j]},
            "connectivity": "disconnected",
            "forward_disk": 0.4,
            "certificate_annulus": (0.4, 4.0),
            "certificate_r_out": 16.0,
            "min_generator": 0,
            "min_generator_jordan": False,
        },
    )


def connected_quadratic_pair(a: complex) -> ExampleSpec:
    """{z^2 - 1, a z^2} with 0 < |a| < 0.1: connected by the degree-two rule."""
    if not 0 < abs(a) < 0.1:
        raise ValueError("need 0 < |a| < 0.1")
    gs = generator_set([polynomial([-1, 0, 1]), monomial(a, 2)], labels=("basilica", "scaled_sq"))
    return ExampleSpec(
        f"connected_quadratic_{a!r}",
        gs,
        expected={
            "pcb": "bounded",
            "connectivity": "connected",
            "connectivity_rule": "degree-two",
            "forward_disk": 0.2,
        },
    )


def countable_component_family(eps: float, l: int) -> ExampleSpec:
    """Three generators (iterates of z^2, (z-eps)^2+eps, z^2/2): countably
    many Julia components, seen at desk scale as growing counts."""
    if not 0 < eps < 0.5:
        raise ValueError("need 0 < eps < 1/2")
    if l < 1:
        raise ValueError("need l >= 1")
    gens = [
        iterate(polynomial([0, 0, 1.0]), l),
        iterate(polynomial([eps * eps + eps, -2.0 * eps, 1.0]), l),
        iterate(polynomial([0, 0, 0.5]), l),
    ]
    gs = generator_set(gens, labels=("unit_sq", "shifted_sq", "half_sq"))
    return ExampleSpec(
        f"countable_components_{eps:g}_{l}",
        gs,
        expected={"pcb": "bounded", "component_growth": "growing"},
    )


def disconnection_coefficient_bound(gs: GeneratorSet, r: float, d: int) -> float:
    """Coefficient threshold for adjoining a new degree-d generator.

    For a family with bounded postcritical set and a disk of radius r
    inside the interior of its smallest filled set, any a(z-b)^d + b with
    0 < |a| below this bound produces a disconnected extended family.
    The degree pair (2,2) is excluded (the displayed exponent blows up).
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if r <= 0:
        raise ValueError("need r > 0")
    best = math.inf
    for h in gs.generators:
        dh = h.degree
        if (d, dh) == (2, 2):
            raise ValueError("degree pair (2,2) is excluded")
        denom = d + dh - dh * d
        factor = d * (d - 1) * dh / denom
        inner = math.log(2.0) - math.log(abs(h.leading) / 2.0) / dh - math.log(r) / d
        best = min(best, math.exp(factor * inner))
    return best


BUILDERS = {
    "cantor_circles": cantor_circles,
    "logistic": lambda: logistic_family(4.0, 1, 1),
    "finite_components": lambda: finite_component_family(2, 0.25, 6),
    "basilica_monomial_pair": basilica_monomial_pair,
    "connected_quadratic": lambda: connected_quadratic_pair(0.05),
    "countable_components": lambda: countable_component_family(0.25, 4),
}


def build(name: str) -> ExampleSpec:
    if name not in BUILDERS:
        raise KeyError(f"unknown example {name!r}; available: {', '.join(sorted(BUILDERS))}")
    return BUILDERS[name]()


def scan_iterate_power(
    n: int,
    eps: float,
    resolutions: list[int],
    l_range=range(4, 9),
    seed: int = 0,
) -> tuple[int | None, dict]:
    """Smallest iterate power whose component count stabilizes at n.

    Returns (first passing l or None, full scan record); no l passing is
    reported as a scan result, not a failure.
    """
    from polysemigroup.topology import component_count_stability

    record = {}
    for l in l_range:
        spec = finite_component_family(n, eps, l)
        rep = component_count_stability(spec.generators, 0j, 5.4, resolutions, seed=seed)
        record[l] = rep.to_json()
        if rep.verdict == "stable" and rep.count == n:
            return l, record
    return None, record
