import math

import pytest

from polysemigroup.affine import attractor_component_count, connectivity_check, expansions
from polysemigroup.families import (
    BUILDERS,
    basilica_monomial_pair,
    build,
    cantor_circles,
    connected_quadratic_pair,
    countable_component_family,
    disconnection_coefficient_bound,
    finite_component_family,
    logistic_family,
)
from polysemigroup.poly import evaluate
from polysemigroup.semigroup import generator_set, pcb_check
from polysemigroup.poly import polynomial


def test_every_example_pcb_matches_expectation():
    for name in BUILDERS:
        spec = build(name)
        expected = spec.expected.get("pcb")
        if expected:
            assert pcb_check(spec.generators).verdict == expected, name


def test_cantor_circles_metadata():
    spec = cantor_circles()
    assert [g.degree for g in spec.generators] == [3, 2]
    fps = [m.fixed_point() for m in expansions(spec.generators)]
    assert abs(fps[0]) < 1e-12 and abs(fps[1] - math.log(4)) < 1e-12
    count, growing = attractor_component_count(spec.generators, 6)
    assert growing and count == 64


def test_logistic_builders():
    spec = logistic_family(4.0, 1, 1)
    g = spec.generators.generators[0]
    assert g.coeffs == (0, 4, -4)
    assert abs(spec.expected["admissibility_value"] - 1.0) < 1e-12
    spec2 = logistic_family(2.0, 1, 1)
    assert abs(spec2.expected["admissibility_value"] - 0.5) < 1e-12
    with pytest.raises(ValueError):
        logistic_family(5.0, 1, 1)


def test_logistic_interval_invariance():
    import numpy as np

    for c, a, b in ((4.0, 1, 1), (2.0, 1, 1), (6.75, 1, 2)):
        g = logistic_family(c, a, b).generators.generators[0]
        xs = np.linspace(0, 1, 500)
        vals = [evaluate(g, x) for x in xs]
        assert all(-1e-12 <= v.real <= 1 + 1e-12 and abs(v.imag) < 1e-15 for v in vals)


def test_finite_component_family_structure():
    spec = finite_component_family(2, 0.25, 1)
    assert len(spec.generators) == 4
    assert all(g.degree == 2 for g in spec.generators)
    spec3 = finite_component_family(3, 0.25, 1)
    assert len(spec3.generators) == 6
    # affine fixed point of the j-th iterate stays log j regardless of l
    for l in (1, 3, 5):
        s = finite_component_family(2, 0.25, l)
        fps = sorted(m.fixed_point() for m in expansions(s.generators))
        assert abs(fps[0]) < 1e-9 and abs(fps[1]) < 1e-9
        assert abs(fps[2] - math.log(2)) < 1e-9 and abs(fps[3] - math.log(2)) < 1e-9
    with pytest.raises(ValueError):
        finite_component_family(1, 0.25, 1)
    with pytest.raises(ValueError):
        finite_component_family(2, 0.6, 1)


def test_basilica_monomial_pair():
    spec = basilica_monomial_pair()
    g1, g2 = spec.generators.generators
    assert g1.coeffs == (0, 0, -2, 0, 1)  # (z^2-1)^2 - 1 = z^4 - 2z^2
    assert g2.coeffs == (0, 0, 0, 0, 1 / 64)
    assert spec.expected["certificate_annulus"] == (0.4, 4.0)
    report = pcb_check(spec.generators)
    assert report.verdict == "bounded"
    for z in report.samples:
        assert abs(z) < 0.4 or abs(z - (-1)) < 1e-9


def test_connected_quadratic_pair():
    spec = connected_quadratic_pair(0.05)
    res = connectivity_check(spec.generators)
    assert res.verdict == "connected" and res.rule == "degree-two"
    with pytest.raises(ValueError):
        connected_quadratic_pair(0.2)
    with pytest.raises(ValueError):
        connected_quadratic_pair(0.0)


def test_countable_component_family():
    spec = countable_component_family(0.25, 4)
    assert len(spec.generators) == 3
    assert all(g.degree == 16 for g in spec.generators)
    spec1 = countable_component_family(0.25, 1)
    assert [g.degree for g in spec1.generators] == [2, 2, 2]


def test_disconnection_coefficient_bound_value():
    gs = generator_set([polynomial([-1, 0, 1])])  # z^2 - 1, leading 1
    got = disconnection_coefficient_bound(gs, 0.3, 3)
    # plug-in oracle: factor = 3*2*2 / (3+2-6) = -12,
    # inner = log2 - (1/2) log(1/2) - (1/3) log 0.3
    inner = math.log(2) + 0.5 * math.log(2) - math.log(0.3) / 3
    expected = math.exp(-12.0 * inner)
    assert abs(got - expected) <= 1e-15 * expected


def test_disconnection_coefficient_excluded_pair():
    gs = generator_set([polynomial([-1, 0, 1])])
    with pytest.raises(ValueError):
        disconnection_coefficient_bound(gs, 0.3, 2)


def test_disconnection_coefficient_monotone_in_r():
    gs = generator_set([polynomial([-1, 0, 1])])
    values = [disconnection_coefficient_bound(gs, r, 3) for r in (0.1, 0.2, 0.4, 0.8)]
    # the closed form has factor < 0 against -log(r)/d, so the bound
    # strictly increases with the available room r
    assert all(a < b for a, b in zip(values, values[1:]))


def test_build_registry():
    assert set(BUILDERS) == {
        "cantor_circles",
        "logistic",
        "finite_components",
        "basilica_monomial_pair",
        "connected_quadratic",
        "countable_components",
    }
    with pytest.raises(KeyError):
        build("nope")
