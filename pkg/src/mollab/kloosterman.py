"""Complete Kloosterman sums, smooth trilinear forms, and reciprocity.

Everything here is desk scale: sums are evaluated by direct enumeration
with exact modular arithmetic (inverses by the extended Euclid built into
pow, phases reduced to exact rational angles before any trigonometry).
The Deshouillers-Iwaniec-type bound K(C,D,N,R,S) is exercised only as an
observed |form| / bound ratio; its implied constant is unspecified, so
the ratio is reported, never asserted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .arith import primes_up_to
from .errors import BudgetError, PreconditionError

TERM_BUDGET = 100_000_000


def _roots_of_unity(c: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(c) / c)


def kloosterman_sum_raw(a: int, b: int, c: int) -> complex:
    """sum over units x mod c of e((a x + b x^{-1})/c), as a complex number."""
    if c < 1:
        raise PreconditionError("modulus must be >= 1")
    if c == 1:
        return 1.0 + 0.0j  # single residue 0, empty exponent
    roots = _roots_of_unity(c)
    total = 0.0 + 0.0j
    for x in range(1, c):
        if math.gcd(x, c) != 1:
            continue
        xinv = pow(x, -1, c)
        total += roots[(a * x + b * xinv) % c]
    return total


def kloosterman_sum(a: int, b: int, c: int) -> float:
    """Real value of S(a, b; c); the x -> -x pairing makes the sum real."""
    total = kloosterman_sum_raw(a, b, c)
    if abs(total.imag) > 1e-10:
        raise PreconditionError(
            f"S({a},{b};{c}) imaginary part {total.imag:.2e} exceeds tolerance"
        )
    return float(total.real)


def weil_check(p_max: int) -> dict:
    """Verify |S(a, b; p)| <= 2 sqrt(p) for primes p <= p_max, a,b <= 10.

    A violation indicates an arithmetic bug and raises immediately.
    """
    checked = 0
    worst = 0.0
    for p in primes_up_to(p_max):
        p = int(p)
        bound = 2 * math.sqrt(p)
        roots = _roots_of_unity(p)
        xs = np.arange(1, p)
        xinv = np.array([pow(int(x), -1, p) for x in xs])
        for a in range(1, min(p - 1, 10) + 1):
            for b in range(1, min(p - 1, 10) + 1):
                s = roots[(a * xs + b * xinv) % p].sum()
                ratio = abs(s) / bound
                if ratio > 1.0 + 1e-12:
                    raise AssertionError(
                        f"Weil bound violated: |S({a},{b};{p})| = {abs(s)} > {bound}"
                    )
                worst = max(worst, ratio)
                checked += 1
    return {"p_max": p_max, "pairs_checked": checked, "worst_ratio": worst}


@dataclass(frozen=True)
class Bump2D:
    """Separable smooth bump g0(xi, eta) supported on [1,2] x [1,2]."""

    lo: float = 1.0
    hi: float = 2.0

    def _bump(self, x: float) -> float:
        if not self.lo < x < self.hi:
            return 0.0
        return math.exp(-1.0 / ((x - self.lo) * (self.hi - x)))

    def __call__(self, xi: float, eta: float) -> float:
        return self._bump(xi) * self._bump(eta)


@dataclass
class TrilinearInstance:
    """Dyadic ranges, coefficients and smooth weight of a trilinear form."""

    c_range: float
    d_range: float
    n_range: float
    r_range: float
    s_range: float
    coefficients: dict[tuple[int, int, int], complex]
    g0: Callable[[float, float], float] = field(default_factory=Bump2D)

    def __post_init__(self):
        for name in ("c_range", "d_range", "n_range", "r_range", "s_range"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive")
        nn, rr, ss = self.n_range, self.r_range, self.s_range
        for (n, r, s) in self.coefficients:
            if not (0 < n <= nn and rr < r <= 2 * rr and ss < s <= 2 * ss):
                raise PreconditionError(
                    f"coefficient ({n},{r},{s}) outside (0,N] x (R,2R] x (S,2S]"
                )

    def b_norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self.coefficients.values()))


def trilinear_form(inst: TrilinearInstance) -> complex:
    """Direct five-fold sum of b_{n,r,s} g(c/C, d/D) e(n inv(rd)/sc).

    Pairs (c, d) run over the support of g0; triples with gcd(rd, sc) > 1
    are skipped.  Instances above the raw term budget are refused.
    """
    cs = range(math.floor(inst.c_range) + 1, math.ceil(2 * inst.c_range))
    ds = range(math.floor(inst.d_range) + 1, math.ceil(2 * inst.d_range))
    n_terms = len(inst.coefficients) * max(0, len(cs)) * max(0, len(ds))
    if n_terms > TERM_BUDGET:
        raise BudgetError(f"term count {n_terms} exceeds budget {TERM_BUDGET}")
    total = 0.0 + 0.0j
    for c in cs:
        gc = c / inst.c_range
        for d in ds:
            g = inst.g0(gc, d / inst.d_range)
            if g == 0.0:
                continue
            for (n, r, s), coeff in inst.coefficients.items():
                sc = s * c
                if math.gcd(r * d, sc) != 1:
                    continue
                inv = pow(r * d, -1, sc)
                angle = (n * inv) % sc
                total += coeff * g * complex(
                    math.cos(2 * math.pi * angle / sc),
                    math.sin(2 * math.pi * angle / sc),
                )
    return total


def di_bound(
    c_range: float, d_range: float, n_range: float,
    r_range: float, s_range: float, b_norm: float,
) -> float:
    """K(C,D,N,R,S) ||b||_2 with
    K^2 = CS(RS+N)(C+RD) + C^2 D S sqrt((RS+N)R) + D^2 N R / S."""
    c, d, n, r, s = c_range, d_range, n_range, r_range, s_range
    if min(c, d, n, r, s) <= 0:
        raise PreconditionError("all ranges must be positive")
    k_sq = (
        c * s * (r * s + n) * (c + r * d)
        + c**2 * d * s * math.sqrt((r * s + n) * r)
        + d**2 * n * r / s
    )
    return math.sqrt(k_sq) * b_norm


def reciprocity_check(x: int, y: int) -> bool:
    """Exact check of inv(x)/y + inv(y)/x == 1/(x y) modulo 1."""
    if x < 1 or y < 1:
        raise PreconditionError("x and y must be positive")
    if math.gcd(x, y) != 1:
        raise PreconditionError("x and y must be coprime")
    xbar = pow(x, -1, y) if y > 1 else 0
    ybar = pow(y, -1, x) if x > 1 else 0
    lhs = Fraction(xbar, y) + Fraction(ybar, x) - Fraction(1, x * y)
    return lhs.denominator == 1


def random_instance(
    scale: int, rng: np.random.Generator, density: float = 0.5
) -> TrilinearInstance:
    """Unit +-1 coefficients on a random subset of the support box."""
    c = d = float(scale)
    n_r = r_r = s_r = float(max(2, scale // 2))
    coeffs = {}
    for n in range(1, int(n_r) + 1):
        for r in range(int(r_r) + 1, int(2 * r_r) + 1):
            for s in range(int(s_r) + 1, int(2 * s_r) + 1):
                if rng.random() < density:
                    coeffs[(n, r, s)] = 1.0 if rng.random() < 0.5 else -1.0
    if not coeffs:
        coeffs[(1, int(r_r) + 1, int(s_r) + 1)] = 1.0
    return TrilinearInstance(c, d, n_r, r_r, s_r, coeffs)


def ratio_report(scale: int, count: int = 5, seed: int = 0) -> list[dict]:
    """Observed |form| / bound ratios on random instances; report only."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(count):
        inst = random_instance(scale, rng)
        form = trilinear_form(inst)
        bound = di_bound(
            inst.c_range, inst.d_range, inst.n_range,
            inst.r_range, inst.s_range, inst.b_norm(),
        )
        rows.append(
            {
                "C": inst.c_range, "D": inst.d_range, "N": inst.n_range,
                "R": inst.r_range, "S": inst.s_range,
                "form_abs": abs(form), "bound": bound,
                "ratio": abs(form) / bound if bound else float("inf"),
            }
        )
    return rows
