import cmath
import math

import numpy as np
import pytest

from mollab.errors import BudgetError, PreconditionError
from mollab.kloosterman import (
    Bump2D,
    TrilinearInstance,
    di_bound,
    kloosterman_sum,
    random_instance,
    ratio_report,
    reciprocity_check,
    trilinear_form,
    weil_check,
)


def egcd_inverse(a: int, m: int) -> int:
    """Extended-Euclid modular inverse, independent of pow(a, -1, m)."""
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
    assert old_r == 1
    return old_s % m


def kloosterman_dual(a: int, b: int, c: int) -> complex:
    """Independent direct summation with cmath phases."""
    if c == 1:
        return 1.0
    total = 0j
    for x in range(1, c):
        if math.gcd(x, c) == 1:
            total += cmath.exp(2j * cmath.pi * (a * x + b * egcd_inverse(x, c)) / c)
    return total


def test_trivial_modulus():
    assert kloosterman_sum(1, 1, 1) == 1.0


def test_modulus_two():
    assert kloosterman_sum(1, 1, 2) == pytest.approx(1.0, abs=1e-12)


def test_modulus_five():
    expected = 2 + 2 * math.cos(4 * math.pi / 5)
    assert kloosterman_sum(1, 1, 5) == pytest.approx(expected, abs=1e-10)
    assert kloosterman_sum(1, 1, 5) == pytest.approx(0.3819660112501051, abs=1e-10)


def test_symmetry():
    for c in range(1, 51):
        for a in range(1, 11):
            for b in range(a, 11):
                assert kloosterman_sum(a, b, c) == pytest.approx(
                    kloosterman_sum(b, a, c), abs=1e-10
                )


def test_against_dual_implementation():
    rng = np.random.default_rng(2)
    for _ in range(40):
        a = int(rng.integers(1, 20))
        b = int(rng.integers(1, 20))
        c = int(rng.integers(1, 60))
        assert kloosterman_sum(a, b, c) == pytest.approx(
            kloosterman_dual(a, b, c).real, abs=1e-10
        )


def test_weil_check_small():
    report = weil_check(50)
    assert report["worst_ratio"] <= 1.0
    assert report["pairs_checked"] > 0


def test_weil_examples():
    assert abs(kloosterman_sum(1, 1, 5)) <= 2 * math.sqrt(5)
    assert abs(kloosterman_sum(1, 1, 2)) <= 2 * math.sqrt(2)


def test_reciprocity_examples():
    assert reciprocity_check(1, 1)
    assert reciprocity_check(3, 5)


def test_reciprocity_exhaustive_small():
    for x in range(1, 101):
        for y in range(1, 101):
            if math.gcd(x, y) == 1:
                assert reciprocity_check(x, y)


def test_reciprocity_rejects_common_factor():
    with pytest.raises(PreconditionError):
        reciprocity_check(6, 9)


def test_trilinear_zero_coefficients():
    inst = TrilinearInstance(4, 4, 4, 2, 2, {(1, 3, 3): 0.0})
    assert trilinear_form(inst) == 0.0


def test_trilinear_single_term():
    # one triple, a delta-like g0 selecting the single cell (c, d) = (5, 7)
    class PointWeight:
        def __call__(self, xi, eta):
            return 1.0 if (abs(xi - 1.25) < 0.01 and abs(eta - 1.75) < 0.01) else 0.0

    c_val, d_val = 5, 7  # C = D = 4
    n, r, s = 1, 3, 4  # gcd(r d, s c) = gcd(21, 20) = 1
    inst = TrilinearInstance(4, 4, 4, 2, 2, {(n, r, s): 1.0}, g0=PointWeight())
    sc = s * c_val
    inv = egcd_inverse(r * d_val % sc, sc)
    assert inv == 1  # 21 = 1 mod 20, hand check
    expected = cmath.exp(2j * cmath.pi * (n * inv % sc) / sc)
    got = trilinear_form(inst)
    assert got == pytest.approx(expected, abs=1e-12)


def test_trilinear_dual_implementation():
    def dual(inst):
        total = 0j
        for c in range(1, math.ceil(2 * inst.c_range) + 1):
            for d in range(1, math.ceil(2 * inst.d_range) + 1):
                g = inst.g0(c / inst.c_range, d / inst.d_range)
                if g == 0.0:
                    continue
                for (n, r, s), coeff in inst.coefficients.items():
                    if math.gcd(r * d, s * c) != 1:
                        continue
                    inv = egcd_inverse(r * d % (s * c), s * c)
                    total += coeff * g * cmath.exp(2j * cmath.pi * n * inv / (s * c))
        return total

    rng = np.random.default_rng(7)
    for _ in range(20):
        inst = random_instance(int(rng.integers(3, 9)), rng)
        a = trilinear_form(inst)
        b = dual(inst)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_trilinear_budget():
    big = {(n, 3, 3): 1.0 for n in range(1, 3)}
    inst = TrilinearInstance(1e6, 1e6, 2, 2, 2, big)
    with pytest.raises(BudgetError):
        trilinear_form(inst)


def test_trilinear_support_validation():
    with pytest.raises(PreconditionError):
        TrilinearInstance(4, 4, 4, 2, 2, {(1, 2, 3): 1.0})  # r = 2 not in (2, 4]


def test_di_bound_plugin():
    assert di_bound(1, 1, 1, 1, 1, 1.0) == pytest.approx(
        math.sqrt(5 + math.sqrt(2)), abs=1e-14
    )


def test_di_bound_scaling_and_monotonicity():
    base = di_bound(4, 4, 4, 2, 2, 1.0)
    assert di_bound(4, 4, 4, 2, 2, 2.0) == pytest.approx(2 * base, rel=1e-14)
    grew = [di_bound(4, 4, n, 2, 2, 1.0) for n in (1, 2, 4, 8, 16)]
    assert all(b >= a for a, b in zip(grew, grew[1:]))


def test_ratio_report():
    rows = ratio_report(6, count=3, seed=1)
    assert len(rows) == 3
    for row in rows:
        assert row["bound"] > 0
        assert row["ratio"] >= 0


def test_bump_support():
    g0 = Bump2D()
    assert g0(1.0, 1.5) == 0.0
    assert g0(1.5, 1.5) > 0.0
