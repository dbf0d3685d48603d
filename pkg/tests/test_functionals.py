import random
from fractions import Fraction

import numpy as np
import pytest

from mollab.errors import PreconditionError
from mollab.functionals import (
    MollifierSpec,
    assemble_quadratic_model,
    bmv_main,
    is_proportion,
    ismv_main,
    kappa,
    lambda_functional,
    mv_proportion,
    proportion,
    reference_spec,
    s1_constant,
    s2_constant,
)
from mollab.poly import Polynomial

X = Polynomial([0, 1])
ZERO = Polynomial()


def quad01(f, n=64):
    """Gauss-Legendre on [0,1]; independent oracle, exact for polynomials."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    xs = (nodes + 1) / 2
    return float(np.sum(weights * f(xs))) / 2


def spec_with(p1=ZERO, p2=ZERO, p3=ZERO, t1=0.5, t2=0.163, t3=0.5):
    return MollifierSpec(t1, t2, t3, p1, p2, p3)


def random_spec(rng):
    def rpoly():
        return Polynomial([0.0] + [rng.uniform(-2, 2) for _ in range(rng.randint(1, 4))])

    t2 = rng.uniform(0.05, 0.3)
    t1 = rng.uniform(t2 + 0.05, 0.5)
    t3 = rng.uniform(t2 + 0.05, 0.5)
    return MollifierSpec(t1, t2, t3, rpoly(), rpoly(), rpoly())


# ------------------------------------------------------------------ s1


def test_s1_trivial():
    assert s1_constant(spec_with()) == 0.0
    assert s1_constant(spec_with(p1=X)) == 1.0


def test_s1_reference():
    spec = reference_spec()
    int_p2 = Fraction(-9371, 6000)  # exact rational integral of the P2 choice
    expected = 4.994 + 4.92 + 0.163 / 2 * float(int_p2)
    assert s1_constant(spec) == pytest.approx(expected, abs=1e-12)
    assert s1_constant(spec) == pytest.approx(9.786710583333333, abs=1e-12)


# --------------------------------------------------------------- kappa


def test_kappa_zero_p2():
    assert kappa(spec_with(p3=X)) == 0.0


def test_kappa_exact_fraction():
    # 3*(1/4)*1*(1/2) - 2*(1/4)*(1/3) = 5/24
    spec = spec_with(p2=X, p3=X, t2=0.25)
    assert kappa(spec) == pytest.approx(float(Fraction(5, 24)), abs=1e-15)


def test_kappa_reference_vs_quadrature():
    spec = reference_spec()
    t2, p2, p3 = spec.theta2, spec.p2, spec.p3
    expected = 3 * t2 * p3(1.0) * quad01(np.vectorize(p2)) - 2 * t2 * quad01(
        lambda x: np.vectorize(p2)(x) * np.vectorize(p3)(x)
    )
    assert kappa(spec) == pytest.approx(expected, abs=1e-10)
    # frozen exact value
    assert kappa(spec) == pytest.approx(-2.089148412857143, abs=1e-12)


# -------------------------------------------------------------- lambda


def test_lambda_p1_only():
    # P1 = x, theta1 = 1/2: P1(1)^2 + (1/theta1) * 1 = 3
    assert lambda_functional(spec_with(p1=X, t1=0.5)) == pytest.approx(3.0, abs=1e-14)


def test_lambda_p2_only_vs_quadrature():
    # with P1 = 0 every P1-carrying term vanishes
    t1, t2 = 0.5, 0.25
    spec = spec_with(p2=X, t1=t1, t2=t2)
    p2 = np.vectorize(spec.p2)
    p2d = np.vectorize(spec.p2.derivative())
    p2t = 0.5
    expected = (
        t2**2 * quad01(lambda x: (1 - x) * p2(x) ** 2)
        + t2 / 2 * quad01(lambda x: (1 - x) ** 2 * p2d(x) ** 2)
        - t2**2 / 4 * p2t**2
        + t2 / 4 * quad01(lambda x: p2(x) ** 2)
    )
    assert lambda_functional(spec) == pytest.approx(expected, abs=1e-12)


def test_lambda_reference_vs_quadrature():
    spec = reference_spec()
    t1, t2 = spec.theta1, spec.theta2
    p1 = np.vectorize(spec.p1)
    p1d = np.vectorize(spec.p1.derivative())
    p2 = np.vectorize(spec.p2)
    p2d = np.vectorize(spec.p2.derivative())
    p2t = spec.p2.integral01()
    expected = (
        spec.p1(1.0) ** 2
        + quad01(lambda x: p1d(x) ** 2) / t1
        - t2 * spec.p1(1.0) * p2t
        + 2 * t2 * quad01(lambda x: p1(1 - t2 * (1 - x) / t1) * p2(x))
        + t2 / t1 * quad01(lambda x: p1d(1 - t2 * (1 - x) / t1) * p2(x))
        + t2**2 * quad01(lambda x: (1 - x) * p2(x) ** 2)
        + t2 / 2 * quad01(lambda x: (1 - x) ** 2 * p2d(x) ** 2)
        - t2**2 / 4 * p2t**2
        + t2 / 4 * quad01(lambda x: p2(x) ** 2)
    )
    assert lambda_functional(spec) == pytest.approx(expected, rel=1e-9)
    assert lambda_functional(spec) == pytest.approx(71.60671032102502, rel=1e-12)


# ------------------------------------------------------------------ s2


def test_s2_trivial():
    assert s2_constant(spec_with()) == 0.0
    assert s2_constant(spec_with(p3=X, t3=0.5)) == pytest.approx(3.0, abs=1e-14)


def test_s2_reference_frozen():
    assert s2_constant(reference_spec()) == pytest.approx(191.28012190816787, rel=1e-12)


# ---------------------------------------------------------- proportion


def test_proportion_reference():
    assert proportion(reference_spec()) == pytest.approx(0.50073004, abs=1e-6)
    assert proportion(reference_spec()) == pytest.approx(0.5007300449542361, rel=1e-12)


def test_proportion_single_piece():
    assert proportion(spec_with(p1=X)) == pytest.approx(1 / 3, abs=1e-14)


def test_proportion_degenerate():
    with pytest.raises(PreconditionError):
        proportion(spec_with())


def test_closed_form_benchmarks():
    assert is_proportion(1.0) == 0.5
    assert is_proportion(0.5) == pytest.approx(1 / 3, abs=1e-15)
    assert mv_proportion(0.5) == 0.5


# ------------------------------------------------------------ invariants


def test_theta_windows():
    with pytest.raises(PreconditionError):
        s2_constant(spec_with(p1=X, t1=0.7))  # above 1/2
    with pytest.raises(PreconditionError):
        s2_constant(spec_with(p2=X, t2=0.5, t1=0.5, t3=0.5))  # needs strict <
    with pytest.raises(PreconditionError):
        MollifierSpec(0.5, 0.163, 0.5, Polynomial([1.0]), ZERO, ZERO)  # P(0) != 0
    # s1 tolerates the wider window
    assert s1_constant(spec_with(p1=X, t1=0.9)) == 1.0


def test_theta2_irrelevant_without_p2():
    rng = random.Random(5)
    for _ in range(10):
        p1 = Polynomial([0, rng.uniform(-2, 2), rng.uniform(-1, 1)])
        p3 = Polynomial([0, rng.uniform(-2, 2)])
        vals = {
            s2_constant(spec_with(p1=p1, p3=p3, t2=t2))
            for t2 in (0.05, 0.163, 0.3)
        }
        assert max(vals) - min(vals) < 1e-14


def test_decomposition():
    rng = random.Random(9)
    for _ in range(10):
        p1 = Polynomial([0] + [rng.uniform(-2, 2) for _ in range(3)])
        p3 = Polynomial([0] + [rng.uniform(-2, 2) for _ in range(2)])
        t1, t3 = rng.uniform(0.2, 0.5), rng.uniform(0.2, 0.5)
        is1 = s2_constant(spec_with(p1=p1, t1=t1, t3=t3))
        is3 = s2_constant(spec_with(p3=p3, t1=t1, t3=t3))
        both = s2_constant(spec_with(p1=p1, p3=p3, t1=t1, t3=t3))
        # single-piece second moment is the diagonal P(1)^2 + (1/theta) int P'^2
        p3d = p3.derivative()
        assert is3 == pytest.approx(
            p3(1.0) ** 2 + (p3d * p3d).integral01() / t3, rel=1e-12, abs=1e-12
        )
        # the only coupling of pieces 1 and 3 is 2 P1(1) P3(1)
        assert both - is1 - is3 == pytest.approx(2 * p1(1.0) * p3(1.0), rel=1e-12, abs=1e-12)


def test_cross_term_constants():
    assert ismv_main(spec_with(p1=X, p3=X)) == 1.0
    rng = random.Random(13)
    for _ in range(50):
        spec = random_spec(rng)
        assert bmv_main(spec) == pytest.approx(kappa(spec) / 2, rel=1e-14, abs=1e-14)
    # reference configuration against the quadrature oracle
    ref = reference_spec()
    p2, p3 = np.vectorize(ref.p2), np.vectorize(ref.p3)
    expected = 1.5 * ref.theta2 * ref.p3(1.0) * quad01(p2) - ref.theta2 * quad01(
        lambda x: p2(x) * p3(x)
    )
    assert bmv_main(ref) == pytest.approx(expected, abs=1e-10)


# ------------------------------------------------------- quadratic model


def test_model_reproduces_reference():
    spec = reference_spec()
    model = assemble_quadratic_model(5, 5, 2, thetas=spec.thetas())
    a = np.array(
        list(spec.p1.coeffs[1:]) + list(spec.p2.coeffs[1:]) + list(spec.p3.coeffs[1:])
    )
    assert model.s1(a) == pytest.approx(s1_constant(spec), rel=1e-10)
    assert model.s2(a) == pytest.approx(s2_constant(spec), rel=1e-10)


def test_model_degree_one_truncation():
    # truncating the reference polynomials to their x^1 terms
    spec = reference_spec()
    model = assemble_quadratic_model(1, 1, 1, thetas=spec.thetas())
    a = np.array([spec.p1.coeffs[1], spec.p2.coeffs[1], spec.p3.coeffs[1]])
    truncated = MollifierSpec(
        *spec.thetas(),
        p1=Polynomial([0.0, a[0]]),
        p2=Polynomial([0.0, a[1]]),
        p3=Polynomial([0.0, a[2]]),
    )
    assert model.s1(a) == pytest.approx(s1_constant(truncated), rel=1e-10)
    assert model.s2(a) == pytest.approx(s2_constant(truncated), rel=1e-10)


def test_model_c_entries():
    model = assemble_quadratic_model(1, 1, 1, thetas=(0.5, 0.163, 0.5))
    assert model.c[0] == pytest.approx(1.0, abs=1e-14)  # piece 1, x^1
    assert model.c[2] == pytest.approx(1.0, abs=1e-14)  # piece 3, x^1
    assert model.c[1] == pytest.approx(0.163 / 2 * 0.5, abs=1e-14)  # piece 2, int x


def test_model_symmetric():
    model = assemble_quadratic_model(3, 3, 3, thetas=(0.5, 0.163, 0.5))
    assert np.max(np.abs(model.q - model.q.T)) < 1e-14


def test_model_consistency_random():
    rng = random.Random(21)
    npr = np.random.default_rng(21)
    for _ in range(100):
        t2 = rng.uniform(0.05, 0.3)
        t1 = rng.uniform(t2 + 0.05, 0.5)
        t3 = rng.uniform(t2 + 0.05, 0.5)
        d1, d2, d3 = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
        model = assemble_quadratic_model(d1, d2, d3, thetas=(t1, t2, t3))
        a = npr.uniform(-2, 2, d1 + d2 + d3)
        spec = model.spec_for(a)
        assert model.s1(a) == pytest.approx(s1_constant(spec), abs=1e-12, rel=1e-12)
        assert model.s2(a) == pytest.approx(s2_constant(spec), rel=1e-9)


def test_model_empty_rejected():
    with pytest.raises(PreconditionError):
        assemble_quadratic_model(0, 0, 0, thetas=(0.5, 0.163, 0.5))
