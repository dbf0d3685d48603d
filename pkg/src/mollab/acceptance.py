"""The acceptance criteria as callable checks.

Each criterion function performs its checks with plain assertions and
returns a small details dict; tolerances are pinned here.  The dedicated
test module runs every criterion, and `mollab verify` exposes the same
checks as a CLI command.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .arith import mobius
from .characters import (
    character_group,
    enumerate_characters,
    even_primitive_pair_sum,
    gauss_sum,
    phi_plus,
    phi_star,
    ramanujan_sum,
    root_number,
)
from .functionals import (
    assemble_quadratic_model,
    is_proportion,
    mv_proportion,
    proportion,
    reference_spec,
)
from .kernels import KernelConfig, default_G, eval_F, eval_V, eval_V1
from .kloosterman import random_instance, reciprocity_check, trilinear_form, weil_check
from .lfunctions import AfeEvaluator, default_evaluator
from .moments import compute_moments, compute_moments_naive
from .optimizer import maximize_rayleigh, reproduce_benchmark

_K3_EVALUATOR: AfeEvaluator | None = None


def k3_evaluator() -> AfeEvaluator:
    global _K3_EVALUATOR
    if _K3_EVALUATOR is None:
        _K3_EVALUATOR = AfeEvaluator(KernelConfig(g=default_G(3), pole_kill_count=3))
    return _K3_EVALUATOR


def criterion_1_reference_proportion() -> dict:
    value = proportion(reference_spec())
    assert abs(value - 0.50073004) < 1e-6
    assert value >= 0.50073
    return {"proportion": value}


def criterion_2_closed_form_benchmarks() -> dict:
    for theta in (0.1, 0.2, 0.3, 0.4, 0.5):
        target = is_proportion(theta)
        for d1 in range(1, 6):
            model = assemble_quadratic_model(d1, 0, 0, thetas=(theta, theta / 2, theta))
            assert abs(maximize_rayleigh(model).value - target) < 1e-10
        model = assemble_quadratic_model(2, 0, 2, thetas=(theta, theta / 2, theta))
        assert abs(maximize_rayleigh(model).value - mv_proportion(theta)) < 1e-10
    assert is_proportion(1.0) == 0.5  # exact
    return {"theta_grid": [0.1, 0.2, 0.3, 0.4, 0.5], "degrees": [1, 2, 3, 4, 5]}


def criterion_3_optimizer_dominates() -> dict:
    report = reproduce_benchmark(degrees=(5, 5, 2))
    fixed = report["fixed_spec"]["proportion"]
    optimized = report["optimized"]["value"]
    assert optimized >= fixed
    return {"fixed": fixed, "optimized": optimized}


def criterion_4_kernel_identities() -> dict:
    cfg = KernelConfig()
    f1 = eval_F(1.0, cfg)
    assert abs(f1 - 0.5) < 1e-8
    for x in (2.0, 5.0):
        assert abs(eval_F(x, cfg) + eval_F(1.0 / x, cfg) - 1.0) < 1e-8
    assert abs(eval_V(1.0, cfg, sigma=1.0) - eval_V(1.0, cfg, sigma=2.0)) < 1e-9
    assert abs(eval_V1(1.0, cfg, sigma=1.0) - eval_V1(1.0, cfg, sigma=1.5)) < 1e-9
    assert abs(eval_F(2.0, cfg, sigma=1.0) - eval_F(2.0, cfg, sigma=2.0)) < 1e-9
    v40 = eval_V(40.0, cfg)
    assert abs(v40) < 1e-6
    return {"F(1)": f1, "V(40)": v40}


def criterion_5_kernel_swap_identity(evaluator: AfeEvaluator | None = None) -> dict:
    evaluator = evaluator or default_evaluator()
    worst = 0.0
    count = 0
    for q in range(3, 51):
        for chi in character_group(q).even_primitive():
            for t in (1.0, 2.0, 5.0):
                residual = evaluator.vf_identity_residual(chi, t)
                assert residual < 1e-6
                worst = max(worst, residual)
                count += 1
    return {"checked": count, "worst_residual": worst}


def criterion_6_afe_cross_check(
    evaluator: AfeEvaluator | None = None, alt: AfeEvaluator | None = None
) -> dict:
    evaluator = evaluator or default_evaluator()
    alt = alt or k3_evaluator()
    worst_rel = 0.0
    worst_g = 0.0
    for q in range(3, 51):
        for chi in character_group(q).even_primitive():
            direct = abs(evaluator.central_value(chi)) ** 2
            double = evaluator.central_value_sq(chi)
            assert abs(double - direct) <= 1e-6 * abs(direct)
            gap = abs(alt.central_value_sq(chi) - double)
            assert gap < 1e-7
            worst_rel = max(worst_rel, abs(double - direct) / abs(direct))
            worst_g = max(worst_g, gap)
    return {"worst_relative": worst_rel, "worst_g_dependence": worst_g}


def criterion_7_character_arithmetic() -> dict:
    # closed-form pair sums against direct enumeration, q <= 60, m, n <= 20
    for q in range(1, 61):
        group = character_group(q)
        eps_chars = group.even_primitive()
        ms = np.arange(1, 21)
        if eps_chars:
            table = group.value_block(eps_chars, ms)
            direct = table.T @ table.conj()  # [i,j] = sum chi(m_i) conj(chi(m_j))
        for i, m in enumerate(ms):
            for j, n in enumerate(ms):
                if math.gcd(int(m) * int(n), q) != 1:
                    continue
                closed = even_primitive_pair_sum(q, int(m), int(n))
                got = direct[i, j] if eps_chars else 0.0
                assert abs(got - closed) < 1e-9
    # multiplicativity and parity, every character with q <= 200
    probe = np.array([2, 3, 5, 7, 11, 13])
    for q in range(1, 201):
        group = character_group(q)
        chars = group.characters()
        vals = group.value_block(chars, np.arange(q))
        prod_idx = (probe[:, None] * probe[None, :]).ravel() % q
        lhs = vals[:, prod_idx]
        rhs = (vals[:, probe % q][:, :, None] * vals[:, probe % q][:, None, :]).reshape(
            len(chars), -1
        )
        assert np.max(np.abs(lhs - rhs)) < 1e-12
        for k, chi in enumerate(chars):
            expected_even = abs(vals[k, (q - 1) % q] - 1) < 1e-9 or q <= 2
            assert chi.is_even == expected_even
    # Gauss sums and root numbers, every primitive character with q <= 200
    for q in range(1, 201):
        for chi in enumerate_characters(q):
            if not chi.is_primitive:
                continue
            eps = root_number(chi)
            assert abs(abs(eps) - 1.0) < 1e-9
            tau = gauss_sum(chi)
            tau_bar = gauss_sum(chi.conjugate())
            sign = chi(q - 1) if q > 1 else 1.0
            assert abs(tau * tau_bar - sign * q) < 1e-9
    # Ramanujan sums, exactly
    for q in range(1, 101):
        assert ramanujan_sum(q, 1) == mobius(q)
        for n in range(1, 101):
            assert abs(ramanujan_sum(q, n)) <= math.gcd(q, n)
    # even primitive counts vs half the primitive count
    for q in range(1, 501):
        assert abs(phi_plus(q) - phi_star(q) / 2) <= 1
    return {"q_pair_sum": 60, "q_gauss": 200, "q_counts": 500}


def criterion_8_moment_sweep_integrity(evaluator: AfeEvaluator | None = None) -> dict:
    evaluator = evaluator or default_evaluator()
    spec = reference_spec()
    opt = compute_moments(100.0, spec, workers=1, evaluator=evaluator)
    naive = compute_moments_naive(100.0, spec, evaluator=evaluator)
    assert abs(opt.s1.real - naive.s1.real) <= 1e-9 * abs(opt.s1.real)
    assert abs(opt.s2 - naive.s2) <= 1e-9 * opt.s2
    assert opt.lower_bound <= opt.census_nonzero_weighted * (1 + 1e-12)
    assert abs(opt.s1.imag) < 1e-6 * abs(opt.s1)
    parallel = compute_moments(100.0, spec, workers=2, evaluator=evaluator)
    assert parallel.s1 == opt.s1 and parallel.s2 == opt.s2
    return {
        "S1": opt.s1.real,
        "S2": opt.s2,
        "naive_rel_gap_s2": abs(opt.s2 - naive.s2) / opt.s2,
        "lower_bound": opt.lower_bound,
        "census_nonzero_weighted": opt.census_nonzero_weighted,
    }


def criterion_9_exponential_sums() -> dict:
    report = weil_check(197)
    assert report["worst_ratio"] <= 1.0
    for x in range(1, 201):
        for y in range(1, 201):
            if math.gcd(x, y) == 1:
                assert reciprocity_check(x, y)

    def egcd_inverse(a: int, m: int) -> int:
        old_r, r, old_s, s = a % m, m, 1, 0
        while r:
            k = old_r // r
            old_r, r = r, old_r - k * r
            old_s, s = s, old_s - k * s
        return old_s % m

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

    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        inst = random_instance(int(rng.integers(3, 9)), rng)
        a = trilinear_form(inst)
        b = dual(inst)
        gap = abs(a - b)
        assert gap <= 1e-10 * max(1.0, abs(b))
        worst = max(worst, gap)
    return {"weil_worst_ratio": report["worst_ratio"], "dual_worst_gap": worst}


def criterion_10_disclosure_and_trend(evaluator: AfeEvaluator | None = None) -> dict:
    """Diagnostic only: the asymptotic inequality and its error-term
    estimates are out of reach at desk scale; the trend toward the
    main-term constants is reported, never asserted.  The one assertion
    is the Q = 300 sweep runtime."""
    evaluator = evaluator or default_evaluator()
    spec = reference_spec()
    trend = []
    q300_time = None
    for big_q in (150.0, 300.0, 600.0):
        t0 = time.perf_counter()
        rep = compute_moments(big_q, spec, evaluator=evaluator)
        elapsed = time.perf_counter() - t0
        if big_q == 300.0:
            q300_time = elapsed
        trend.append(
            {
                "Q": big_q,
                "s1_over_norm": rep.s1.real / rep.norm,
                "s2_over_norm": rep.s2 / rep.norm,
                "predicted_s1_over_norm": rep.predicted_s1 / rep.norm,
                "predicted_s2_over_norm": rep.predicted_s2 / rep.norm,
                "seconds": elapsed,
            }
        )
    assert q300_time is not None and q300_time < 300.0
    return {
        "disclosure": (
            "the Q->infinity non-vanishing inequality and the error-term "
            "estimates behind it are not reproducible at desk scale; the "
            "identity and property suites plus this trend report stand in"
        ),
        "trend": trend,
        "q300_seconds": q300_time,
    }


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    limit_s: float
    run: Callable[[], dict]


CRITERIA: list[Criterion] = [
    Criterion(1, "reference proportion 0.50073004", 1.0, criterion_1_reference_proportion),
    Criterion(2, "closed-form optimizer benchmarks", 1.0, criterion_2_closed_form_benchmarks),
    Criterion(3, "optimized value dominates the fixed one", 1.0, criterion_3_optimizer_dominates),
    Criterion(4, "kernel identities", 10.0, criterion_4_kernel_identities),
    Criterion(5, "kernel-swap identity residuals, q <= 50", 120.0, criterion_5_kernel_swap_identity),
    Criterion(6, "AFE cross-check and G-independence, q <= 50", 120.0, criterion_6_afe_cross_check),
    Criterion(7, "exact character arithmetic", 60.0, criterion_7_character_arithmetic),
    Criterion(8, "moment sweep integrity at Q = 100", 180.0, criterion_8_moment_sweep_integrity),
    Criterion(9, "exponential sums", 60.0, criterion_9_exponential_sums),
    Criterion(10, "disclosure and diagnostic trend", 330.0, criterion_10_disclosure_and_trend),
]


def run_criterion(item: Criterion) -> dict:
    """Run one criterion; the runtime limit is part of the verdict."""
    start = time.perf_counter()
    try:
        details = item.run()
        passed = True
        error = None
    except AssertionError as exc:
        details = {}
        passed = False
        error = str(exc) or "assertion failed"
    elapsed = time.perf_counter() - start
    if passed and elapsed >= item.limit_s:
        passed = False
        error = f"runtime {elapsed:.1f}s exceeded limit {item.limit_s:g}s"
    return {
        "criterion": item.number,
        "name": item.name,
        "passed": passed,
        "seconds": elapsed,
        "limit_seconds": item.limit_s,
        "error": error,
        "details": details,
    }
