"""Main-term functionals of the mollified first and second moments.

A three-piece mollifier is described by exponents theta1..theta3 (the
piece lengths are y_i = Q^theta_i) and smoothing polynomials P1..P3 with
P_i(0) = 0.  To leading order the averaged first moment is proportional to

    s1 = P1(1) + P3(1) + (theta2/2) * int_0^1 P2,

and the averaged second moment to

    s2 = 2 P1(1) P3(1) + P3(1)^2 + (1/theta3) int_0^1 P3'(x)^2 dx
         + kappa + lambda,

where kappa couples pieces 2 and 3 and lambda is the contribution of the
square of pieces 1 and 2 (nine terms; see lambda_functional).  The
non-vanishing proportion implied by Cauchy-Schwarz is s1^2 / s2.

Both s1 and s2 are evaluated exactly by polynomial coefficient
arithmetic; quadrature appears only in test oracles.  s1 is linear and
s2 quadratic in the polynomial coefficients, so over a monomial basis
x^1..x^d_i per piece the pair (s1, s2) becomes a linear form c and a
symmetric matrix Q, packaged as a QuadraticModel for the optimizer.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, PreconditionError
from .poly import Polynomial

ONE_MINUS_X = Polynomial([1.0, -1.0])


@dataclass(frozen=True)
class MollifierSpec:
    """A full three-piece mollifier configuration."""

    theta1: float
    theta2: float
    theta3: float
    p1: Polynomial
    p2: Polynomial
    p3: Polynomial

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive")
        for name in ("p1", "p2", "p3"):
            p = getattr(self, name)
            if p.coeffs and p.coeffs[0] != 0.0:
                raise PreconditionError(f"{name}(0) must vanish")

    def thetas(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)


def reference_spec() -> MollifierSpec:
    """The bundled reference configuration attaining proportion 0.50073004."""
    return MollifierSpec(
        theta1=0.5,
        theta2=0.163,
        theta3=0.5,
        p1=Polynomial([0.0, 4.86, 0.29, -0.96, 0.974, -0.17]),
        p2=Polynomial([0.0, -3.11, -0.3, 0.87, -0.18, -0.53]),
        p3=Polynomial([0.0, 4.86, 0.06]),
    )


def _require_first_moment_window(spec: MollifierSpec) -> None:
    # s1 is valid on 0 < theta1, theta2 < 1 and 0 < theta3 <= 1/2
    if not (spec.theta1 < 1 and spec.theta2 < 1):
        raise PreconditionError("first moment needs theta1, theta2 < 1")
    if not spec.theta3 <= 0.5:
        raise PreconditionError("first moment needs theta3 <= 1/2")


def _require_second_moment_window(spec: MollifierSpec) -> None:
    # Full second moment window: 0 < theta_i <= 1/2, and strictly
    # theta2 < theta1, theta3 whenever piece 2 is present.  The boundary
    # value 1/2 is admitted: the functionals are continuous there and the
    # reference configuration sits exactly on it.
    if not (spec.theta1 <= 0.5 and spec.theta2 <= 0.5 and spec.theta3 <= 0.5):
        raise PreconditionError("second moment needs theta_i <= 1/2")
    if not spec.p2.is_zero():
        if not (spec.theta2 < spec.theta1 and spec.theta2 < spec.theta3):
            raise PreconditionError(
                "second moment needs theta2 < theta1, theta3 when P2 != 0"
            )


def s1_constant(spec: MollifierSpec) -> float:
    """P1(1) + P3(1) + (theta2/2) int_0^1 P2."""
    _require_first_moment_window(spec)
    return spec.p1(1.0) + spec.p3(1.0) + spec.theta2 / 2 * spec.p2.integral01()


def kappa(spec: MollifierSpec) -> float:
    """3 theta2 P3(1) int P2  -  2 theta2 int P2 P3."""
    _require_second_moment_window(spec)
    t2 = spec.theta2
    return (
        3 * t2 * spec.p3(1.0) * spec.p2.integral01()
        - 2 * t2 * (spec.p2 * spec.p3).integral01()
    )


def lambda_functional(spec: MollifierSpec) -> float:
    """The nine-term second-moment contribution of pieces 1 and 2."""
    _require_second_moment_window(spec)
    t1, t2 = spec.theta1, spec.theta2
    p1, p2 = spec.p1, spec.p2
    p1d = p1.derivative()
    p2d = p2.derivative()
    p2t = p2.integral01()
    # P1 and P1' composed with 1 - theta2 (1-x) / theta1
    p1c = p1.compose_affine(1 - t2 / t1, t2 / t1)
    p1dc = p1d.compose_affine(1 - t2 / t1, t2 / t1)
    return (
        p1(1.0) ** 2
        + (p1d * p1d).integral01() / t1
        - t2 * p1(1.0) * p2t
        + 2 * t2 * (p1c * p2).integral01()
        + t2 / t1 * (p1dc * p2).integral01()
        + t2**2 * (ONE_MINUS_X * p2 * p2).integral01()
        + t2 / 2 * (ONE_MINUS_X * ONE_MINUS_X * p2d * p2d).integral01()
        - t2**2 / 4 * p2t**2
        + t2 / 4 * (p2 * p2).integral01()
    )


def s2_constant(spec: MollifierSpec) -> float:
    """Second-moment main constant: diagonal of piece 3, cross terms, lambda."""
    p3d = spec.p3.derivative()
    return (
        2 * spec.p1(1.0) * spec.p3(1.0)
        + spec.p3(1.0) ** 2
        + (p3d * p3d).integral01() / spec.theta3
        + kappa(spec)
        + lambda_functional(spec)
    )


def proportion(spec: MollifierSpec) -> float:
    """Cauchy-Schwarz non-vanishing proportion s1^2 / s2."""
    s2 = s2_constant(spec)
    if not s2 > 0:
        raise PreconditionError("degenerate mollifier: second moment is not positive")
    return s1_constant(spec) ** 2 / s2


def is_proportion(theta: float) -> float:
    """Closed-form benchmark theta/(1+theta) for the single Mobius piece."""
    if not theta > 0:
        raise PreconditionError("theta must be positive")
    return theta / (1 + theta)


def mv_proportion(theta: float) -> float:
    """Closed-form benchmark 2 theta/(1+2 theta) for the two-piece mollifier."""
    if not theta > 0:
        raise PreconditionError("theta must be positive")
    return 2 * theta / (1 + 2 * theta)


def ismv_main(spec: MollifierSpec) -> float:
    """Cross-term constant of pieces 1 and 3: P1(1) P3(1)."""
    return spec.p1(1.0) * spec.p3(1.0)


def bmv_main(spec: MollifierSpec) -> float:
    """Cross-term constant of pieces 2 and 3 (equals kappa/2)."""
    _require_second_moment_window(spec)
    t2 = spec.theta2
    return (
        1.5 * t2 * spec.p3(1.0) * spec.p2.integral01()
        - t2 * (spec.p2 * spec.p3).integral01()
    )


@dataclass
class QuadraticModel:
    """s1 and s2 as a linear form c and symmetric form Q over coefficients.

    The basis is x^1..x^d1 for piece 1, then x^1..x^d2, then x^1..x^d3;
    a degree of zero means the piece is absent.
    """

    degrees: tuple[int, int, int]
    thetas: tuple[float, float, float]
    c: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return sum(self.degrees)

    def spec_for(self, a: np.ndarray) -> MollifierSpec:
        """Rebuild the MollifierSpec encoded by coefficient vector a."""
        d1, d2, d3 = self.degrees
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim,):
            raise PreconditionError(f"coefficient vector must have length {self.dim}")
        return MollifierSpec(
            *self.thetas,
            p1=Polynomial([0.0, *a[:d1]]),
            p2=Polynomial([0.0, *a[d1 : d1 + d2]]),
            p3=Polynomial([0.0, *a[d1 + d2 :]]),
        )

    def s1(self, a: np.ndarray) -> float:
        return float(self.c @ a)

    def s2(self, a: np.ndarray) -> float:
        return float(a @ self.q @ a)


def assemble_quadratic_model(
    d1: int, d2: int, d3: int, thetas: tuple[float, float, float]
) -> QuadraticModel:
    """Expand s1/s2 over monomial bases into (c, Q) by polarization.

    Q[i][j] = (s2(e_i + e_j) - s2(e_i) - s2(e_j)) / 2, which is exact
    because s2 is a pure quadratic form with no linear part.
    """
    if min(d1, d2, d3) < 0:
        raise PreconditionError("basis degrees must be nonnegative")
    dim = d1 + d2 + d3
    if dim == 0:
        raise PreconditionError("basis dimension is zero")

    def spec_of(a: np.ndarray) -> MollifierSpec:
        return MollifierSpec(
            *thetas,
            p1=Polynomial([0.0, *a[:d1]]),
            p2=Polynomial([0.0, *a[d1 : d1 + d2]]),
            p3=Polynomial([0.0, *a[d1 + d2 :]]),
        )

    c = np.zeros(dim)
    diag = np.zeros(dim)
    q = np.zeros((dim, dim))
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        c[i] = s1_constant(spec_of(e))
        diag[i] = s2_constant(spec_of(e))
        q[i, i] = diag[i]
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros(dim)
            e[i] = 1.0
            e[j] = 1.0
            q[i, j] = q[j, i] = (s2_constant(spec_of(e)) - diag[i] - diag[j]) / 2
    eigmin = float(np.linalg.eigvalsh(q).min())
    if eigmin <= 0:
        raise ConditioningError(
            f"assembled second-moment form is not positive definite "
            f"(min eigenvalue {eigmin:.3e})",
            pivot=eigmin,
        )
    return QuadraticModel(degrees=(d1, d2, d3), thetas=tuple(thetas), c=c, q=q)
