"""Maximization of the non-vanishing proportion over polynomial coefficients.

The objective (c.a)^2 / (a^T Q a) is a Rayleigh quotient: its maximum is
c^T Q^{-1} c, attained at a = Q^{-1} c.  The solve uses an explicit
Cholesky factorization so a failing pivot can be reported; a
derivative-free coordinate search is included purely as a cross-check
harness for the closed-form answer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConditioningError, PreconditionError
from .functionals import (
    MollifierSpec,
    QuadraticModel,
    assemble_quadratic_model,
    proportion,
    reference_spec,
    s1_constant,
    s2_constant,
)

PIVOT_RTOL = 1e-12  # pivots below PIVOT_RTOL * ||Q|| are rejected


@dataclass
class OptimizationResult:
    value: float
    coefficients: np.ndarray
    spec: MollifierSpec
    condition_diagnostic: float  # smallest eigenvalue of Q


def _cholesky(q: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with explicit pivot rejection."""
    n = q.shape[0]
    lo = np.zeros_like(q)
    threshold = PIVOT_RTOL * np.linalg.norm(q)
    for j in range(n):
        d = q[j, j] - lo[j, :j] @ lo[j, :j]
        if d <= threshold:
            raise ConditioningError(
                f"pivot {d:.3e} at index {j} below {threshold:.3e}; "
                "Q is numerically singular or indefinite",
                pivot=float(d),
            )
        lo[j, j] = np.sqrt(d)
        if j + 1 < n:
            lo[j + 1 :, j] = (q[j + 1 :, j] - lo[j + 1 :, :j] @ lo[j, :j]) / lo[j, j]
    return lo


def _solve_spd(q: np.ndarray, c: np.ndarray) -> np.ndarray:
    # forward then backward substitution against the Cholesky factor
    lo = _cholesky(q)
    n = q.shape[0]
    y = np.empty(n)
    for i in range(n):
        y[i] = (c[i] - lo[i, :i] @ y[:i]) / lo[i, i]
    a = np.empty(n)
    for i in reversed(range(n)):
        a[i] = (y[i] - lo[i + 1 :, i] @ a[i + 1 :]) / lo[i, i]
    return a


def maximize_rayleigh(model: QuadraticModel) -> OptimizationResult:
    """Closed-form maximizer of (c.a)^2 / (a^T Q a)."""
    a = _solve_spd(model.q, model.c)
    value = float(model.c @ a)
    # gauge fix: first entry of meaningful size is positive
    anorm = np.max(np.abs(a))
    if anorm == 0.0:
        raise PreconditionError("model has zero linear form")
    for ai in a:
        if abs(ai) > 1e-12 * anorm:
            if ai < 0:
                a = -a
            break
    eigmin = float(np.linalg.eigvalsh(model.q).min())
    return OptimizationResult(
        value=value,
        coefficients=a,
        spec=model.spec_for(a),
        condition_diagnostic=eigmin,
    )


def coordinate_refine(
    model: QuadraticModel,
    start: np.ndarray,
    initial_step: float = 0.5,
    min_step: float = 1e-7,
) -> tuple[np.ndarray, float]:
    """Derivative-free coordinate descent; cross-check harness only.

    Walks each coordinate with a shrinking step, accepting improvements of
    the Rayleigh quotient.  Returns (point, value).
    """

    def ratio(a: np.ndarray) -> float:
        s2 = float(a @ model.q @ a)
        if s2 <= 0:
            return -np.inf
        return float(model.c @ a) ** 2 / s2

    a = np.array(start, dtype=float)
    best = ratio(a)
    step = initial_step
    while step > min_step:
        improved = False
        for i in range(a.size):
            for sign in (1.0, -1.0):
                trial = a.copy()
                trial[i] += sign * step
                r = ratio(trial)
                if r > best + 1e-15:
                    a, best = trial, r
                    improved = True
        if not improved:
            step /= 2
    return a, best


def reproduce_benchmark(degrees: Sequence[int] = (5, 5, 2)) -> dict:
    """Evaluate the reference configuration and the optimized model.

    Returns a report with the fixed-spec proportion (target 0.50073004),
    the optimized proportion at the given degrees and the same exponents,
    and the optimizer diagnostics.
    """
    spec = reference_spec()
    fixed_value = proportion(spec)
    model = assemble_quadratic_model(*degrees, thetas=spec.thetas())
    opt = maximize_rayleigh(model)
    return {
        "fixed_spec": {
            "thetas": list(spec.thetas()),
            "p1": list(spec.p1.coeffs),
            "p2": list(spec.p2.coeffs),
            "p3": list(spec.p3.coeffs),
            "s1": s1_constant(spec),
            "s2": s2_constant(spec),
            "proportion": fixed_value,
        },
        "target": 0.50073004,
        "meets_target": bool(fixed_value >= 0.50073),
        "optimized": {
            "degrees": list(degrees),
            "value": opt.value,
            "coefficients": opt.coefficients.tolist(),
            "condition_diagnostic": opt.condition_diagnostic,
            "dominates_fixed": bool(opt.value >= fixed_value),
        },
    }


def scan_theta2(
    theta2_grid: Sequence[float],
    degrees: Sequence[int] = (5, 5, 2),
    theta13: float = 0.5,
) -> dict:
    """Optimized proportion for each theta2 on the grid (theta1 = theta3 fixed).

    Conditioning failures are recorded per grid point, not raised.
    """
    rows = []
    for t2 in sorted(theta2_grid):
        if not (0 < t2 < 0.5 and t2 < theta13):
            raise PreconditionError(f"theta2 = {t2} outside (0, 1/2) or >= theta13")
        row: dict = {"theta2": t2}
        try:
            model = assemble_quadratic_model(*degrees, thetas=(theta13, t2, theta13))
            opt = maximize_rayleigh(model)
            row["value"] = opt.value
            row["condition_diagnostic"] = opt.condition_diagnostic
        except ConditioningError as exc:
            row["value"] = None
            row["condition_diagnostic"] = exc.pivot
            row["error"] = str(exc)
        rows.append(row)
    usable = [r for r in rows if r["value"] is not None]
    argmax = max(usable, key=lambda r: r["value"])["theta2"] if usable else None
    return {"degrees": list(degrees), "theta13": theta13, "rows": rows, "argmax_theta2": argmax}
