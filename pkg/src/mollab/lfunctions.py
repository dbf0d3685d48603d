"""Central values, mollifier values and the kernel-swap identity.

Central values of even primitive characters are computed from two
independent representations:

  * the first-moment expansion
        L(1/2, chi) = sum_n chi(n) n^{-1/2} V1(n/sqrt q)
                      + eps(chi) sum_n conj(chi)(n) n^{-1/2} V1(n/sqrt q),
  * the second-moment expansion
        |L(1/2, chi)|^2 = 2 sum_{m,n} chi(m) conj(chi)(n) (mn)^{-1/2} V(mn/q).

Their agreement, and the residual of the kernel-swap identity

    sum_n conj(chi)(n) n^{-1/2} V(Tn/q)
        = L(1/2, conj chi) - eps(conj chi) sum_n chi(n) n^{-1/2} F(n/T),

are the module's principal numerical checks.  All sums are truncated
where the kernel decay envelopes certify a tail below the configured
tolerance; cutoffs are derived from the envelopes, never hard-coded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import CharacterGroup, DirichletCharacter, root_number
from .errors import AccuracyError, PreconditionError
from .functionals import MollifierSpec
from .kernels import KernelConfig, KernelTable, kernel_table
from .arith import mobius_sieve, von_mangoldt_sieve
from .poly import Polynomial


@dataclass
class CentralData:
    """Everything the lab records about one character's central value."""

    q: int
    index: int
    L_half: complex
    L_half_sq: float  # from the double-sum expansion
    psi_is: complex
    psi_b: complex
    psi_mv: complex
    epsilon: complex


@lru_cache(maxsize=64)
def _sieves(limit: int) -> tuple[np.ndarray, np.ndarray]:
    return mobius_sieve(limit), von_mangoldt_sieve(limit)


def _require_even_primitive(chi: DirichletCharacter) -> None:
    if not chi.is_primitive:
        raise PreconditionError("central values need a primitive character")
    if not chi.is_even:
        raise PreconditionError("odd characters are not supported")


def _log_weight(p: Polynomial, y: float, xs: np.ndarray) -> np.ndarray:
    """P(log(y/x)/log y) for 1 <= x <= y; the x = 1 weight is exactly P(1)."""
    if y < 1.0:
        raise PreconditionError(f"mollifier length {y} is < 1")
    if y == 1.0:
        return np.full(xs.shape, p(1.0))
    args = 1.0 - np.log(xs) / math.log(y)
    return np.array([p(a) for a in args])


class AfeEvaluator:
    """Bundles the kernel tables and truncation policy for one configuration."""

    def __init__(
        self,
        cfg: KernelConfig | None = None,
        tail_tol: float = 1e-9,
        interp_tol: float = 1e-9,
    ):
        self.cfg = cfg or KernelConfig()
        self.tail_tol = tail_tol
        self.v1: KernelTable = kernel_table("V1", self.cfg, interp_tol, tail_tol)
        self.v: KernelTable = kernel_table("V", self.cfg, interp_tol, tail_tol)
        self.f: KernelTable = kernel_table("F", self.cfg, interp_tol, tail_tol)

    # ---------------------------------------------------------------- L-values

    def central_value_batch(
        self, group: CharacterGroup, chars: list[DirichletCharacter]
    ) -> tuple[np.ndarray, np.ndarray]:
        """(L(1/2, chi), eps(chi)) for a batch of even primitive characters."""
        q = group.q
        n_max = self.v1.sum_cutoff(1.0 / math.sqrt(q))
        ns = np.arange(1, n_max + 1)
        weights = ns ** (-0.5) * self.v1(ns / math.sqrt(q))
        table = group.value_block(chars, ns)
        eps = group.value_block(chars, np.arange(q)) @ group.unit_phase()
        eps /= math.sqrt(q)
        lvals = table @ weights + eps * (table.conj() @ weights)
        return lvals, eps

    def central_value(self, chi: DirichletCharacter) -> complex:
        """First-moment expansion of L(1/2, chi)."""
        _require_even_primitive(chi)
        lvals, _ = self.central_value_batch(chi.group, [chi])
        return complex(lvals[0])

    def central_value_sq(self, chi: DirichletCharacter) -> float:
        """|L(1/2, chi)|^2 from the double-sum expansion; real by symmetry."""
        _require_even_primitive(chi)
        q = chi.modulus
        n_max = self.v.divisor_sum_cutoff(1.0 / q)
        ms, ns, prods = _product_pairs(n_max)
        w = 2.0 * prods ** (-0.5) * self.v(prods / q)
        vals = chi.values
        total = np.sum(vals[ms % q] * np.conj(vals[ns % q]) * w)
        if abs(total.imag) > 1e-9 * max(1.0, abs(total)):
            raise AccuracyError(
                f"double-sum |L|^2 has imaginary part {total.imag:.3e}"
            )
        return float(total.real)

    # ------------------------------------------------------------- mollifiers

    def mollifier_values(
        self,
        chi: DirichletCharacter,
        spec: MollifierSpec,
        big_q: float,
    ) -> tuple[complex, complex, complex]:
        """The three mollifier pieces at chi with lengths y_i = Q^theta_i.

        Piece 1 carries mu(l) chi(l), piece 2 carries Lambda(b) mu(c)
        conj(chi)(b) chi(c) / log Q, piece 3 carries the conjugate root
        number times mu(l) conj(chi)(l); each with the usual logarithmic
        polynomial weight.
        """
        if big_q <= 1:
            raise PreconditionError("Q must exceed 1 so that log Q > 0")
        y1 = big_q**spec.theta1
        y2 = big_q**spec.theta2
        y3 = big_q**spec.theta3
        if min(y1, y2, y3) < 1:
            raise PreconditionError("mollifier lengths must be >= 1")
        logq = math.log(big_q)
        mu, lam = _sieves(int(max(y1, y2, y3)) + 1)
        vals = chi.values
        q = chi.modulus

        def mobius_piece(p: Polynomial, y: float, table: np.ndarray) -> complex:
            ls = np.arange(1, int(y) + 1)
            ls = ls[mu[ls] != 0]
            if ls.size == 0:
                return 0.0
            w = mu[ls] * ls ** (-0.5) * _log_weight(p, y, ls)
            return complex(np.sum(table[ls % q] * w))

        psi_is = mobius_piece(spec.p1, y1, vals)
        psi_mv = mobius_piece(spec.p3, y3, np.conj(vals))

        psi_b = 0.0 + 0.0j
        bs, cs, wbc = _lambda_mu_pairs(spec.p2, y2)
        if bs.size:
            psi_b = complex(
                np.sum(np.conj(vals[bs % q]) * vals[cs % q] * wbc) / logq
            )

        # piece 3 carries the conjugate root number, so chi must be primitive
        eps_bar = root_number(chi.conjugate())
        return psi_is, psi_b, eps_bar * psi_mv

    def mollifier_values_batch(
        self,
        group: CharacterGroup,
        chars: list[DirichletCharacter],
        spec: MollifierSpec,
        big_q: float,
        eps: np.ndarray,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized mollifier pieces for a batch of even primitive characters.

        `eps` must hold the root numbers of `chars`; for even characters
        eps(conj chi) = conj(eps(chi)).
        """
        if big_q <= 1:
            raise PreconditionError("Q must exceed 1 so that log Q > 0")
        y1 = big_q**spec.theta1
        y2 = big_q**spec.theta2
        y3 = big_q**spec.theta3
        if min(y1, y2, y3) < 1:
            raise PreconditionError("mollifier lengths must be >= 1")
        mu, _ = _sieves(int(max(y1, y2, y3)) + 1)
        nchars = len(chars)

        def mobius_weights(p: Polynomial, y: float):
            ls = np.arange(1, int(y) + 1)
            ls = ls[mu[ls] != 0]
            return ls, mu[ls] * ls ** (-0.5) * _log_weight(p, y, ls)

        ls1, w1 = mobius_weights(spec.p1, y1)
        psi_is = group.value_block(chars, ls1) @ w1 if ls1.size else np.zeros(nchars, complex)

        ls3, w3 = mobius_weights(spec.p3, y3)
        psi_mv = (
            np.conj(eps) * (np.conj(group.value_block(chars, ls3)) @ w3)
            if ls3.size
            else np.zeros(nchars, complex)
        )

        bs, cs, wbc = _lambda_mu_pairs(spec.p2, y2)
        if bs.size:
            blk = np.conj(group.value_block(chars, bs)) * group.value_block(chars, cs)
            psi_b = (blk @ wbc) / math.log(big_q)
        else:
            psi_b = np.zeros(nchars, complex)
        return psi_is, psi_b, psi_mv

    # ---------------------------------------------------------- identity check

    def vf_identity_residual(self, chi: DirichletCharacter, t_shift: float) -> float:
        """Residual of the V -> F kernel-swap identity at parameter T > 0."""
        _require_even_primitive(chi)
        if not t_shift > 0:
            raise PreconditionError("T must be positive")
        q = chi.modulus
        vals = chi.values
        chibar = chi.conjugate()

        n_v = self.v.sum_cutoff(t_shift / q)
        ns = np.arange(1, n_v + 1)
        sum_v = np.sum(
            np.conj(vals[ns % q]) * ns ** (-0.5) * self.v(ns * t_shift / q)
        )

        n_f = self.f.sum_cutoff(1.0 / t_shift)
        ns = np.arange(1, n_f + 1)
        sum_f = np.sum(vals[ns % q] * ns ** (-0.5) * self.f(ns / t_shift))

        l_bar = self.central_value(chibar)
        eps_bar = root_number(chibar)
        return float(abs(sum_v - l_bar + eps_bar * sum_f))

    # ------------------------------------------------------------- full record

    def central_data(
        self,
        chi: DirichletCharacter,
        index: int,
        spec: MollifierSpec | None = None,
        big_q: float | None = None,
    ) -> CentralData:
        _require_even_primitive(chi)
        lval = self.central_value(chi)
        lsq = self.central_value_sq(chi)
        eps = root_number(chi)
        if abs(abs(eps) - 1.0) > 1e-10:
            raise AccuracyError(f"|eps| = {abs(eps)} differs from 1")
        psi = (0j, 0j, 0j)
        if spec is not None and big_q is not None:
            psi = self.mollifier_values(chi, spec, big_q)
        return CentralData(
            q=chi.modulus,
            index=index,
            L_half=lval,
            L_half_sq=lsq,
            psi_is=psi[0],
            psi_b=psi[1],
            psi_mv=psi[2],
            epsilon=eps,
        )


@lru_cache(maxsize=32)
def _product_pairs(n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All (m, n) with m n <= n_max, as flat arrays (m, n, m n)."""
    ms, ns = [], []
    for m in range(1, n_max + 1):
        top = n_max // m
        ms.append(np.full(top, m, dtype=np.int64))
        ns.append(np.arange(1, top + 1, dtype=np.int64))
    m_arr = np.concatenate(ms)
    n_arr = np.concatenate(ns)
    return m_arr, n_arr, m_arr * n_arr


@lru_cache(maxsize=64)
def _lambda_mu_pairs_cached(
    p2_coeffs: tuple[float, ...], y2: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    p2 = Polynomial(p2_coeffs)
    mu, lam = _sieves(int(y2) + 1)
    bs, cs = [], []
    for b in range(2, int(y2) + 1):
        if lam[b] == 0.0:
            continue
        for c in range(1, int(y2 / b) + 1):
            if mu[c] != 0:
                bs.append(b)
                cs.append(c)
    if not bs:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    b_arr = np.array(bs, dtype=np.int64)
    c_arr = np.array(cs, dtype=np.int64)
    prod = b_arr * c_arr
    w = (
        lam[b_arr]
        * mu[c_arr]
        * prod ** (-0.5)
        * _log_weight(p2, y2, prod)
    )
    return b_arr, c_arr, w


def _lambda_mu_pairs(p2: Polynomial, y2: float):
    return _lambda_mu_pairs_cached(p2.coeffs, y2)


_DEFAULT_EVALUATOR: AfeEvaluator | None = None


def default_evaluator() -> AfeEvaluator:
    """Process-wide evaluator with the default kernel configuration."""
    global _DEFAULT_EVALUATOR
    if _DEFAULT_EVALUATOR is None:
        _DEFAULT_EVALUATOR = AfeEvaluator()
    return _DEFAULT_EVALUATOR


def central_value(chi: DirichletCharacter) -> complex:
    return default_evaluator().central_value(chi)


def central_value_sq(chi: DirichletCharacter) -> float:
    return default_evaluator().central_value_sq(chi)


def mollifier_values(chi: DirichletCharacter, spec: MollifierSpec, big_q: float):
    return default_evaluator().mollifier_values(chi, spec, big_q)


def vf_identity_residual(chi: DirichletCharacter, t_shift: float) -> float:
    return default_evaluator().vf_identity_residual(chi, t_shift)
