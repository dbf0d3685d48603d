"""Desk-scale averaged mollified moments and the non-vanishing census.

The sweep accumulates, over moduli q weighted by a smooth bump Psi(q/Q)
and the arithmetic factor q/phi(q),

    S1 = sum_q w_q sum_chi L(1/2, chi) psi(chi),
    S2 = sum_q w_q sum_chi |L(1/2, chi) psi(chi)|^2,

the sums on chi running over even primitive characters, with
psi = psi_is + psi_b + psi_mv the three-piece mollifier.  Cauchy-Schwarz
then gives the usable lower bound (Re S1)^2 / S2 for the weighted count
of non-vanishing central values, an inequality the report also verifies
directly against the census of computed values.

Determinism: per-modulus partial sums are computed independently (and may
run on worker processes); the reduction always proceeds in ascending q
with compensated summation, so the report is bit-identical for any worker
count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arith import euler_phi, factorize, mobius
from .characters import character_group
from .errors import AccuracyError, PreconditionError
from .functionals import MollifierSpec, s1_constant, s2_constant
from .lfunctions import AfeEvaluator, default_evaluator

VANISH_THRESHOLD = 1e-8  # |L| above this counts as nonzero; tail budget is 1e-9


@dataclass(frozen=True)
class PsiWeight:
    """Smooth bump supported on [lo, hi]: exp(-1/((x-lo)(hi-x))) inside."""

    lo: float = 0.5
    hi: float = 2.0

    def __call__(self, x: float) -> float:
        if not self.lo < x < self.hi:
            return 0.0
        return math.exp(-1.0 / ((x - self.lo) * (self.hi - x)))


def default_psi() -> PsiWeight:
    return PsiWeight()


class _Neumaier:
    """Compensated accumulator; the reduction order is fixed by the caller."""

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


@dataclass
class PerModulus:
    q: int
    weight: float
    phi_plus: int
    s1: complex
    s2: float
    n_nonzero: int


@dataclass
class MomentReport:
    big_q: float
    stride: int
    s1: complex
    s2: float
    norm: float
    predicted_s1: float
    predicted_s2: float
    census_total: int
    census_nonzero: int
    census_nonzero_weighted: float
    lower_bound: float
    per_q: list[PerModulus] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "Q": self.big_q,
            "stride": self.stride,
            "S1_re": self.s1.real,
            "S1_im": self.s1.imag,
            "S2": self.s2,
            "norm": self.norm,
            "predicted_s1": self.predicted_s1,
            "predicted_s2": self.predicted_s2,
            "s1_over_norm": self.s1.real / self.norm if self.norm else 0.0,
            "s2_over_norm": self.s2 / self.norm if self.norm else 0.0,
            "predicted_s1_over_norm": (
                self.predicted_s1 / self.norm if self.norm else 0.0
            ),
            "predicted_s2_over_norm": (
                self.predicted_s2 / self.norm if self.norm else 0.0
            ),
            "census_total": self.census_total,
            "census_nonzero": self.census_nonzero,
            "census_nonzero_weighted": self.census_nonzero_weighted,
            "lower_bound": self.lower_bound,
        }

    def csv_rows(self) -> list[dict]:
        return [
            {
                "q": row.q,
                "weight": row.weight,
                "phi_plus": row.phi_plus,
                "s1_re": row.s1.real,
                "s1_im": row.s1.imag,
                "s2": row.s2,
                "n_nonzero": row.n_nonzero,
            }
            for row in self.per_q
        ]


def _moduli(big_q: float, psi: PsiWeight, stride: int) -> list[int]:
    lo = math.floor(big_q * psi.lo)
    hi = math.ceil(big_q * psi.hi)
    return [q for q in range(max(1, lo), hi + 1, stride) if psi(q / big_q) > 0]


def _modulus_partial(
    q: int,
    big_q: float,
    spec: MollifierSpec,
    psi: PsiWeight,
    threshold: float,
    evaluator: AfeEvaluator,
) -> PerModulus:
    weight = psi(q / big_q) * q / euler_phi(q)
    group = character_group(q)
    chars = group.even_primitive()
    if not chars:
        return PerModulus(q, weight, 0, 0j, 0.0, 0)
    lvals, eps = evaluator.central_value_batch(group, chars)
    psi_is, psi_b, psi_mv = evaluator.mollifier_values_batch(
        group, chars, spec, big_q, eps
    )
    lpsi = lvals * (psi_is + psi_b + psi_mv)
    s1 = complex(np.sum(lpsi))
    s2 = float(np.sum(np.abs(lpsi) ** 2))
    n_nonzero = int(np.sum(np.abs(lvals) > threshold))
    return PerModulus(q, weight, len(chars), s1, s2, n_nonzero)


# worker-process state for the parallel sweep (fork inherits kernel tables)
_WORKER_ARGS: dict = {}


def _init_worker(spec, big_q, psi, threshold, evaluator):
    _WORKER_ARGS.update(
        spec=spec, big_q=big_q, psi=psi, threshold=threshold, evaluator=evaluator
    )


def _worker_task(q: int) -> PerModulus:
    return _modulus_partial(
        q,
        _WORKER_ARGS["big_q"],
        _WORKER_ARGS["spec"],
        _WORKER_ARGS["psi"],
        _WORKER_ARGS["threshold"],
        _WORKER_ARGS["evaluator"],
    )


def compute_moments(
    big_q: float,
    spec: MollifierSpec,
    psi: PsiWeight | None = None,
    stride: int = 1,
    workers: int = 1,
    evaluator: AfeEvaluator | None = None,
    vanish_threshold: float = VANISH_THRESHOLD,
) -> MomentReport:
    """Full sweep over the Psi-window of moduli around Q."""
    if big_q < 20:
        raise PreconditionError("Q must be at least 20")
    if stride < 1:
        raise PreconditionError("stride must be >= 1")
    psi = psi or default_psi()
    evaluator = evaluator or default_evaluator()
    moduli = _moduli(big_q, psi, stride)

    if workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(spec, big_q, psi, vanish_threshold, evaluator),
        ) as pool:
            partials = {p.q: p for p in pool.map(_worker_task, moduli, chunksize=8)}
    else:
        partials = {
            q: _modulus_partial(q, big_q, spec, psi, vanish_threshold, evaluator)
            for q in moduli
        }

    # deterministic reduction: ascending q, compensated sums
    s1_re, s1_im = _Neumaier(), _Neumaier()
    s2_acc, norm_acc, wnz_acc = _Neumaier(), _Neumaier(), _Neumaier()
    census_total = 0
    census_nonzero = 0
    rows = []
    for q in sorted(partials):
        p = partials[q]
        rows.append(p)
        s1_re.add(p.weight * p.s1.real)
        s1_im.add(p.weight * p.s1.imag)
        s2_acc.add(p.weight * p.s2)
        norm_acc.add(p.weight * p.phi_plus)
        wnz_acc.add(p.weight * p.n_nonzero)
        census_total += p.phi_plus
        census_nonzero += p.n_nonzero

    s1 = complex(s1_re.value, s1_im.value)
    s2 = s2_acc.value
    norm = norm_acc.value
    if abs(s1) > 0 and abs(s1.imag) > 1e-6 * abs(s1):
        raise AccuracyError(
            f"Im(S1) = {s1.imag:.3e} is not negligible against |S1| = {abs(s1):.3e}"
        )
    lower = (s1.real**2 / s2) if s2 > 0 else 0.0
    return MomentReport(
        big_q=big_q,
        stride=stride,
        s1=s1,
        s2=s2,
        norm=norm,
        predicted_s1=s1_constant(spec) * norm,
        predicted_s2=s2_constant(spec) * norm,
        census_total=census_total,
        census_nonzero=census_nonzero,
        census_nonzero_weighted=wnz_acc.value,
        lower_bound=lower,
        per_q=rows,
    )


def nonvanishing_census(
    big_q: float,
    stride: int = 1,
    evaluator: AfeEvaluator | None = None,
    vanish_threshold: float = VANISH_THRESHOLD,
) -> tuple[int, int]:
    """(total, nonzero) even primitive characters in the Psi-window."""
    if big_q < 20:
        raise PreconditionError("Q must be at least 20")
    evaluator = evaluator or default_evaluator()
    psi = default_psi()
    total = 0
    nonzero = 0
    for q in _moduli(big_q, psi, stride):
        group = character_group(q)
        chars = group.even_primitive()
        if not chars:
            continue
        lvals, _ = evaluator.central_value_batch(group, chars)
        total += len(chars)
        nonzero += int(np.sum(np.abs(lvals) > vanish_threshold))
    return total, nonzero


# ----------------------------------------------------------------- naive dual


def _naive_mobius(n: int) -> int:
    return mobius(n)


def _naive_von_mangoldt(n: int) -> float:
    f = factorize(n)
    return math.log(f[0][0]) if len(f) == 1 else 0.0


def compute_moments_naive(
    big_q: float,
    spec: MollifierSpec,
    psi: PsiWeight | None = None,
    evaluator: AfeEvaluator | None = None,
    vanish_threshold: float = VANISH_THRESHOLD,
) -> MomentReport:
    """Plain double-loop re-implementation of the sweep, for cross-checking.

    Same truncation policy and kernel tables as the optimized sweep, but
    scalar arithmetic, factorization-based mu and Lambda, and bare `sum`
    accumulation throughout.
    """
    if big_q < 20:
        raise PreconditionError("Q must be at least 20")
    psi = psi or default_psi()
    evaluator = evaluator or default_evaluator()

    y1 = big_q**spec.theta1
    y2 = big_q**spec.theta2
    y3 = big_q**spec.theta3
    logq = math.log(big_q)

    def logw(p, y, x):
        return p(1.0) if x == 1 else p(1 - math.log(x) / math.log(y))

    # chi-independent term weights
    is_terms = [
        (l, _naive_mobius(l) * l**-0.5 * logw(spec.p1, y1, l))
        for l in range(1, int(y1) + 1)
        if _naive_mobius(l) != 0
    ]
    mv_terms = [
        (l, _naive_mobius(l) * l**-0.5 * logw(spec.p3, y3, l))
        for l in range(1, int(y3) + 1)
        if _naive_mobius(l) != 0
    ]
    b_terms = [
        (b, c, _naive_von_mangoldt(b) * _naive_mobius(c)
         * (b * c) ** -0.5 * logw(spec.p2, y2, b * c))
        for b in range(2, int(y2) + 1)
        if _naive_von_mangoldt(b) != 0.0
        for c in range(1, int(y2 / b) + 1)
        if _naive_mobius(c) != 0
    ]

    s1 = 0j
    s2 = 0.0
    norm = 0.0
    census_total = 0
    census_nonzero = 0
    wnz = 0.0
    rows = []
    for q in _moduli(big_q, psi, 1):
        weight = psi(q / big_q) * q / euler_phi(q)
        group = character_group(q)
        chars = group.even_primitive()
        sq = math.sqrt(q)
        n_max = evaluator.v1.sum_cutoff(1.0 / sq)
        v1_terms = [(n, n**-0.5 * float(evaluator.v1(n / sq))) for n in range(1, n_max + 1)]
        phase = [np.exp(2j * np.pi * h / q) for h in range(q)]
        s1_q = 0j
        s2_q = 0.0
        nz_q = 0
        for chi in chars:
            vals = chi.values
            eps = sum(vals[h] * phase[h] for h in range(q)) / sq
            a_sum = sum(vals[n % q] * w for n, w in v1_terms)
            b_sum = sum(np.conj(vals[n % q]) * w for n, w in v1_terms)
            lval = a_sum + eps * b_sum

            p_is = sum(vals[l % q] * w for l, w in is_terms)
            p_mv = np.conj(eps) * sum(np.conj(vals[l % q]) * w for l, w in mv_terms)
            p_b = sum(np.conj(vals[b % q]) * vals[c % q] * w for b, c, w in b_terms)
            p_b /= logq

            lpsi = lval * (p_is + p_b + p_mv)
            s1_q += lpsi
            s2_q += abs(lpsi) ** 2
            if abs(lval) > vanish_threshold:
                nz_q += 1
        rows.append(PerModulus(q, weight, len(chars), complex(s1_q), float(s2_q), nz_q))
        s1 += weight * s1_q
        s2 += weight * s2_q
        norm += weight * len(chars)
        census_total += len(chars)
        census_nonzero += nz_q
        wnz += weight * nz_q

    lower = (s1.real**2 / s2) if s2 > 0 else 0.0
    return MomentReport(
        big_q=big_q,
        stride=1,
        s1=complex(s1),
        s2=float(s2),
        norm=float(norm),
        predicted_s1=s1_constant(spec) * norm,
        predicted_s2=s2_constant(spec) * norm,
        census_total=census_total,
        census_nonzero=census_nonzero,
        census_nonzero_weighted=wnz,
        lower_bound=lower,
        per_q=rows,
    )
