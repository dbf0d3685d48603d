import math

import mpmath as mp
import numpy as np
import pytest

from mollab.characters import character_group, root_number
from mollab.errors import PreconditionError
from mollab.functionals import MollifierSpec, reference_spec
from mollab.lfunctions import AfeEvaluator
from mollab.poly import Polynomial

mp.mp.dps = 30


def hurwitz_oracle(chi) -> complex:
    """L(1/2, chi) = q^{-1/2} sum_a chi(a) zeta(1/2, a/q); independent path."""
    q = chi.modulus
    vals = chi.values
    acc = mp.mpc(0)
    for a in range(1, q + 1):
        v = vals[a % q]
        if v != 0:
            acc += mp.mpc(v.real, v.imag) * mp.zeta(mp.mpf("0.5"), mp.mpf(a) / q)
    return complex(acc / mp.sqrt(q))


def quadratic_mod5(group=None):
    group = group or character_group(5)
    return next(c for c in group.characters() if c.order == 2)


def test_central_value_vs_hurwitz_quadratic(evaluator):
    chi = quadratic_mod5()
    assert abs(evaluator.central_value(chi) - hurwitz_oracle(chi)) < 1e-8


def test_central_value_vs_hurwitz_sample(evaluator):
    for q in (8, 13, 21, 29):
        for chi in character_group(q).even_primitive():
            assert abs(evaluator.central_value(chi) - hurwitz_oracle(chi)) < 1e-8


def test_central_value_vs_hurwitz_larger_conductor(evaluator):
    # stresses the envelope-derived truncation at sweep-scale moduli
    for q in (101, 211):
        chars = character_group(q).even_primitive()
        for chi in (chars[0], chars[len(chars) // 2]):
            assert abs(evaluator.central_value(chi) - hurwitz_oracle(chi)) < 1e-8


def test_central_value_conjugation(evaluator):
    for chi in character_group(13).even_primitive():
        a = evaluator.central_value(chi)
        b = evaluator.central_value(chi.conjugate())
        assert abs(b - np.conj(a)) < 1e-9


def test_real_character_real_value(evaluator):
    chi = quadratic_mod5()
    assert abs(evaluator.central_value(chi).imag) < 1e-9


def test_central_value_domain(evaluator):
    odd = next(c for c in character_group(3).characters() if not c.is_even)
    with pytest.raises(PreconditionError):
        evaluator.central_value(odd)
    imprimitive = next(c for c in character_group(8).characters() if not c.is_primitive)
    with pytest.raises(PreconditionError):
        evaluator.central_value(imprimitive)


def test_cross_representation(evaluator):
    for q in range(3, 31):
        for chi in character_group(q).even_primitive():
            sq = evaluator.central_value_sq(chi)
            assert sq >= -1e-9
            direct = abs(evaluator.central_value(chi)) ** 2
            if direct > 1e-12:
                assert sq == pytest.approx(direct, rel=1e-6)


def test_g_independence(evaluator, evaluator_k3):
    for q in (5, 8, 13, 29):
        for chi in character_group(q).even_primitive():
            a = evaluator.central_value_sq(chi)
            b = evaluator_k3.central_value_sq(chi)
            assert abs(a - b) < 1e-7


def test_mollifier_trivial(evaluator):
    zero = Polynomial()
    spec = MollifierSpec(0.5, 0.163, 0.5, zero, zero, zero)
    chi = quadratic_mod5()
    assert evaluator.mollifier_values(chi, spec, 100.0) == (0.0, 0.0, 0.0)


def test_mollifier_single_term(evaluator):
    # y1 < 2: only l = 1 contributes and the weight is exactly P1(1)
    spec = reference_spec()
    chi = quadratic_mod5()
    big_q = 1.5 ** (1 / spec.theta1)  # y1 = 1.5
    psi_is, _, _ = evaluator.mollifier_values(chi, spec, big_q)
    assert psi_is == pytest.approx(spec.p1(1.0), abs=1e-12)


def test_mollifier_log_piece_vs_brute_force(evaluator):
    import sympy

    spec = reference_spec()
    group = character_group(11)
    chi = group.even_primitive()[0]
    _, psi_b, _ = evaluator.mollifier_values(chi, spec, 100.0)
    y2 = 100.0**spec.theta2
    vals = chi.values
    acc = 0j
    for b in range(2, int(y2) + 1):
        f = sympy.factorint(b)
        if len(f) != 1:
            continue
        lam = math.log(list(f)[0])
        for c in range(1, int(y2 / b) + 1):
            mu = int(sympy.mobius(c))
            if mu == 0:
                continue
            arg = 1 - math.log(b * c) / math.log(y2)
            acc += lam * mu * np.conj(vals[b % 11]) * vals[c % 11] * (b * c) ** -0.5 * spec.p2(arg)
    acc /= math.log(100.0)
    assert abs(psi_b - acc) < 1e-12


def test_mollifier_conjugation(evaluator):
    spec = reference_spec()
    for chi in character_group(13).even_primitive():
        a = evaluator.mollifier_values(chi, spec, 80.0)
        b = evaluator.mollifier_values(chi.conjugate(), spec, 80.0)
        assert abs(b[0] - np.conj(a[0])) < 1e-12
        assert abs(b[1] - np.conj(a[1])) < 1e-12
        assert abs(b[2] - np.conj(a[2])) < 1e-12


def test_mollifier_batch_matches_single(evaluator):
    spec = reference_spec()
    group = character_group(29)
    chars = group.even_primitive()
    _, eps = evaluator.central_value_batch(group, chars)
    batch = evaluator.mollifier_values_batch(group, chars, spec, 100.0, eps)
    for i, chi in enumerate(chars):
        single = evaluator.mollifier_values(chi, spec, 100.0)
        for j in range(3):
            assert abs(batch[j][i] - single[j]) < 1e-12


def test_mollifier_rejects_degenerate(evaluator):
    spec = reference_spec()
    chi = quadratic_mod5()
    with pytest.raises(PreconditionError):
        evaluator.mollifier_values(chi, spec, 1.0)


def test_identity_residual_quadratic(evaluator):
    chi = quadratic_mod5()
    assert evaluator.vf_identity_residual(chi, 1.0) < 1e-6


def test_identity_residual_sample(evaluator):
    for q in (5, 8, 13, 17):
        for chi in character_group(q).even_primitive():
            for t in (1.0, 2.0, 5.0):
                assert evaluator.vf_identity_residual(chi, t) < 1e-6


def test_identity_residual_t_independence(evaluator):
    chi = quadratic_mod5()
    r1 = evaluator.vf_identity_residual(chi, 1.0)
    r5 = evaluator.vf_identity_residual(chi, 5.0)
    assert r1 < 1e-6 and r5 < 1e-6


def test_truncation_robustness(evaluator):
    # a 10x tighter tail tolerance moves nothing beyond 1e-8
    tight = AfeEvaluator(evaluator.cfg, tail_tol=1e-10)
    for q in (5, 13):
        for chi in character_group(q).even_primitive():
            a = evaluator.central_value(chi)
            b = tight.central_value(chi)
            assert abs(a - b) < 1e-8


def test_batch_matches_single_central_value(evaluator):
    group = character_group(29)
    chars = group.even_primitive()
    lvals, eps = evaluator.central_value_batch(group, chars)
    for i, chi in enumerate(chars):
        assert abs(lvals[i] - evaluator.central_value(chi)) < 1e-12
        assert abs(eps[i] - root_number(chi)) < 1e-12
