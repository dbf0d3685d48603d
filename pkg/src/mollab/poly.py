"""Real polynomials with exact coefficient arithmetic.

Coefficients are stored ascending: coeffs[k] is the coefficient of x^k.
Everything the moment functionals need (evaluation, differentiation,
products, the definite integral over [0,1], affine substitution) stays
closed over this representation, so downstream integrals are computed by
coefficient arithmetic rather than quadrature.

Deliberately dependency free.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PreconditionError

# Convolution blowup guard; nothing in this package needs degree > 64.
MAX_DEGREE = 64


def _trim(coeffs: Iterable[float]) -> tuple[float, ...]:
    cs = [float(c) for c in coeffs]
    while cs and cs[-1] == 0.0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class Polynomial:
    """Immutable real polynomial; the zero polynomial has empty coeffs."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float] = ()):
        trimmed = _trim(coeffs)
        if len(trimmed) > MAX_DEGREE + 1:
            raise PreconditionError(
                f"degree {len(trimmed) - 1} exceeds cap {MAX_DEGREE}"
            )
        object.__setattr__(self, "coeffs", trimmed)

    @property
    def degree(self) -> int:
        """Largest power with a nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: float) -> float:
        # Horner evaluation
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def integral01(self) -> float:
        """Definite integral over [0,1]: sum coeffs[k]/(k+1)."""
        return sum(c / (k + 1) for k, c in enumerate(self.coeffs))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero() or other.is_zero():
            return Polynomial()
        n, m = len(self.coeffs), len(other.coeffs)
        out = [0.0] * (n + m - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def scale(self, t: float) -> "Polynomial":
        return Polynomial([t * c for c in self.coeffs])

    def compose_affine(self, a: float, b: float) -> "Polynomial":
        """Exact expansion of p(a + b*x)."""
        out = Polynomial()
        power = Polynomial([1.0])  # (a + b x)^k, built iteratively
        affine = Polynomial([a, b])
        for c in self.coeffs:
            out = out + power.scale(c)
            power = power * affine
        return out


X = Polynomial([0.0, 1.0])
