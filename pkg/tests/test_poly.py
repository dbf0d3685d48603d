import random
from fractions import Fraction

import pytest

from mollab.errors import PreconditionError
from mollab.poly import Polynomial

P1 = Polynomial([0.0, 4.86, 0.29, -0.96, 0.974, -0.17])
P2 = Polynomial([0.0, -3.11, -0.3, 0.87, -0.18, -0.53])
P3 = Polynomial([0.0, 4.86, 0.06])


def random_poly(rng, max_deg=6):
    return Polynomial([rng.uniform(-3, 3) for _ in range(rng.randint(1, max_deg + 1))])


def test_eval_zero():
    assert Polynomial()(7.0) == 0.0
    assert Polynomial().degree == -1


def test_eval_reference_polys():
    # sums of coefficients, hand arithmetic
    assert P3(1.0) == pytest.approx(4.92, abs=1e-12)
    assert P1(1.0) == pytest.approx(4.86 + 0.29 - 0.96 + 0.974 - 0.17, abs=1e-12)


def test_derivative():
    assert Polynomial([0, 0, 1]).derivative().coeffs == (0.0, 2.0)
    assert Polynomial().derivative().is_zero()
    assert P3.derivative().coeffs == (4.86, 0.12)


def test_integral01():
    assert Polynomial([1.0]).integral01() == 1.0
    assert Polynomial([0.0, 1.0]).integral01() == 0.5
    # exact rational oracle
    expected = (
        Fraction(-311, 100) / 2
        + Fraction(-30, 100) / 3
        + Fraction(87, 100) / 4
        + Fraction(-18, 100) / 5
        + Fraction(-53, 100) / 6
    )
    assert P2.integral01() == pytest.approx(float(expected), abs=1e-15)


def test_mul():
    x = Polynomial([0, 1])
    assert (x * x).coeffs == (0.0, 0.0, 1.0)
    assert (P1 * Polynomial()).is_zero()
    assert (Polynomial([1, 1]) * Polynomial([1, -1])).coeffs == (1.0, 0.0, -1.0)


def test_mul_matches_pointwise():
    rng = random.Random(11)
    for _ in range(20):
        p, q = random_poly(rng), random_poly(rng)
        x = rng.uniform(-2, 2)
        prod = (p * q)(x)
        ref = p(x) * q(x)
        assert prod == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_compose_affine():
    x = Polynomial([0, 1])
    assert x.compose_affine(0, 1).coeffs == (0.0, 1.0)
    assert Polynomial([0, 0, 1]).compose_affine(1, -1).coeffs == (1.0, -2.0, 1.0)


def test_compose_affine_matches_pointwise():
    # includes the shape used by the second-moment functional
    theta1, theta2 = 0.5, 0.163
    comp = P1.compose_affine(1 - theta2 / theta1, theta2 / theta1)
    for i in range(10):
        x = i / 9
        assert comp(x) == pytest.approx(
            P1(1 - theta2 * (1 - x) / theta1), rel=1e-10, abs=1e-12
        )
    rng = random.Random(3)
    for _ in range(20):
        p = random_poly(rng)
        a, b = rng.uniform(-2, 2), rng.uniform(-2, 2)
        x = rng.uniform(-2, 2)
        assert p.compose_affine(a, b)(x) == pytest.approx(
            p(a + b * x), rel=1e-10, abs=1e-10
        )


def test_integral_derivative_consistency():
    rng = random.Random(7)
    for _ in range(50):
        p = random_poly(rng)
        lhs = p.derivative().integral01()
        assert lhs == pytest.approx(p(1.0) - p(0.0), abs=1e-12)


def test_degree_cap():
    Polynomial([1.0] * 65)  # degree 64 allowed
    with pytest.raises(PreconditionError):
        Polynomial([1.0] * 66)
