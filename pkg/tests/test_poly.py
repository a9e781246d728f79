import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysemigroup import poly
from polysemigroup.poly import (
    Constant,
    Escaped,
    Polynomial,
    cauchy_root_bound,
    compose,
    critical_values_finite,
    derivative,
    escape_radius,
    evaluate,
    iterate,
    monomial,
    polynomial,
    preimages,
    roots,
    shifted_power,
)

Z2 = polynomial([0, 0, 1])            # z^2
Z3 = polynomial([0, 0, 0, 1])         # z^3
Z2M1 = polynomial([-1, 0, 1])         # z^2 - 1
Z2_OVER_4 = polynomial([0, 0, 0.25])  # z^2 / 4
LOGISTIC4 = polynomial([0, 4, -4])    # 4 z (1 - z)


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * (1 + abs(b))


def test_validation():
    with pytest.raises(ValueError):
        Polynomial((1,))
    with pytest.raises(ValueError):
        Polynomial((1, 0))
    with pytest.raises(ValueError):
        Polynomial((1, float("inf")))
    assert polynomial([1, 2, 0, 0]).degree == 1


def test_evaluate_basics():
    assert close(evaluate(Z2, 1 + 1j), 2j)
    assert close(evaluate(Z3, 2), 8)
    basilica2 = compose(Z2M1, Z2M1)  # (z^2-1)^2 - 1
    assert close(evaluate(basilica2, 0), 0)


def test_evaluate_overflow_signals_escape():
    with pytest.raises(Escaped):
        evaluate(Z2, 1e100)


def test_compose_examples():
    # p = z^2, q = z + 1 -> z^2 + 2z + 1
    q = polynomial([1, 1])
    c = compose(Z2, q)
    assert np.allclose(c.coeffs, [1, 2, 1])
    # (z^2-1) o (z^2-1) = z^4 - 2 z^2
    b2 = compose(Z2M1, Z2M1)
    assert np.allclose(b2.coeffs, [0, 0, -2, 0, 1])
    # leading coefficient of (z^2/4) o z^3: degree 6, coefficient 1/4
    c2 = compose(Z2_OVER_4, Z3)
    assert c2.degree == 6
    assert close(c2.leading, 0.25)


def test_derivative():
    assert derivative(Z2M1).coeffs == (0, 2)
    assert derivative(Z3).coeffs == (0, 0, 3)
    assert derivative(LOGISTIC4).coeffs == (4, -8)
    assert derivative(polynomial([3, 2])) == Constant(2)


def test_roots_simple():
    rs = roots(Z2M1)
    vals = sorted((r for r, _ in rs), key=lambda z: z.real)
    assert close(vals[0], -1) and close(vals[1], 1)
    assert roots(Z2) == [(0j, 2)]
    # 4z(1-z) - 1 has the double root 1/2 (quadratic formula oracle)
    double = polynomial([-1, 4, -4])
    assert len(roots(double)) == 1
    r, m = roots(double)[0]
    assert m == 2 and close(r, 0.5, 1e-6)


def test_critical_values():
    assert critical_values_finite(Z2) == [0]
    assert critical_values_finite(Z2M1) == [-1]
    cv = critical_values_finite(LOGISTIC4)
    assert len(cv) == 1 and close(cv[0], 1)


def test_preimages():
    pts = sorted(preimages(Z2, 1), key=lambda z: z.real)
    assert close(pts[0], -1) and close(pts[1], 1)
    pts = sorted(preimages(Z2_OVER_4, 1), key=lambda z: z.real)
    assert close(pts[0], -2) and close(pts[1], 2)
    omega = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    pts = preimages(Z3, 8)
    expected = [2, 2 * omega, 2 * omega * omega]
    for e in expected:
        assert min(abs(p - e) for p in pts) < 1e-9


def test_escape_radius_values():
    assert escape_radius(Z2) == 2
    assert escape_radius(Z2M1) == 3
    assert escape_radius(Z2_OVER_4) == 8


@pytest.mark.parametrize("p", [Z2, Z2M1, Z2_OVER_4, LOGISTIC4, compose(Z2M1, Z2M1)])
def test_escape_radius_doubling(p):
    # |z| in [R, 10R] (1e3 samples) must double in modulus
    rng = np.random.default_rng(7)
    R = escape_radius(p)
    radii = rng.uniform(R, 10 * R, 1000)
    angles = rng.uniform(0, 2 * np.pi, 1000)
    z = radii * np.exp(1j * angles)
    w = poly.evaluate_array(p, z)
    assert np.all(np.abs(w) >= 2 * np.abs(z) - 1e-9)


def test_shifted_power():
    # a(z-b)^d + b at z = b is b; leading coefficient a
    p = shifted_power(0.5, 1 + 2j, 3)
    assert close(evaluate(p, 1 + 2j), 1 + 2j)
    assert close(p.leading, 0.5)
    assert p.degree == 3


def test_iterate_chain():
    p4 = iterate(Z2, 2)
    assert p4.degree == 4
    assert close(evaluate(p4, 3), 81)
    assert len(p4.factors()) == 2


coeff = st.complex_numbers(min_magnitude=0, max_magnitude=2, allow_nan=False, allow_infinity=False)


def poly_strategy(max_degree=5):
    return st.lists(coeff, min_size=2, max_size=max_degree + 1).map(
        lambda cs: cs[:-1] + [cs[-1] if abs(cs[-1]) > 0.2 else cs[-1] + 1.0]
    ).map(polynomial)


@given(poly_strategy(), poly_strategy(), st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False))
@settings(max_examples=200)
def test_compose_evaluate_consistency(p, q, z):
    direct = evaluate(compose(p, q), z)
    stepped = evaluate(p, evaluate(q, z))
    assert abs(direct - stepped) <= 1e-8 * (1 + abs(stepped))


@given(poly_strategy(), poly_strategy())
@settings(max_examples=200)
def test_derivative_linearity(p, q):
    n = max(len(p.coeffs), len(q.coeffs))
    cs = [0j] * n
    for k, c in enumerate(p.coeffs):
        cs[k] += c
    for k, c in enumerate(q.coeffs):
        cs[k] += c
    if all(c == 0 for c in cs[1:]):
        return
    s = polynomial(cs)
    ds = derivative(s)
    dsum = [0j] * (n - 1)
    for src in (p, q):
        d = derivative(src)
        if isinstance(d, Constant):
            dsum[0] += d.value
        else:
            for k, c in enumerate(d.coeffs):
                dsum[k] += c
    got = ds.coeffs if not isinstance(ds, Constant) else (ds.value,)
    for k, c in enumerate(got):
        # exact up to one rounding of k*(a+b) vs k*a + k*b
        assert abs(c - dsum[k]) <= 1e-14 * (1 + abs(c))


@given(poly_strategy(max_degree=8))
@settings(max_examples=150, deadline=None)
def test_roots_rebuild(p):
    rs = roots(p)
    assert sum(m for _, m in rs) == p.degree
    rebuilt = np.array([1.0 + 0j])
    for r, m in rs:
        for _ in range(m):
            rebuilt = np.convolve(rebuilt, np.array([-r, 1.0]))
    target = np.array(p.coeffs) / p.leading
    scale = np.max(np.abs(target))
    assert np.allclose(rebuilt, target, rtol=0, atol=1e-6 * max(scale, 1.0))


def test_roots_scale_contract():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = int(rng.integers(3, 9))
        cs = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        cs[-1] += 3.0
        p = polynomial(cs)
        bound = cauchy_root_bound(p)
        for r, _ in roots(p):
            scale = max(abs(c) for c in p.coeffs) * max(1.0, abs(r)) ** p.degree
            assert abs(evaluate(p, r)) <= 1e-10 * scale
            assert abs(r) <= bound + 1e-9


def test_roots_nonconvergence_carries_residual():
    from polysemigroup.poly import RootConvergenceError

    with pytest.raises(RootConvergenceError) as err:
        roots(polynomial([1, 1, 1, 1]), tol=0.0)
    assert err.value.best_residual >= 0.0
