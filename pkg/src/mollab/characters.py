"""Dirichlet characters mod q and their exact arithmetic.

The unit group (Z/q)^* is decomposed into cyclic components: one per odd
prime power q_p = p^e with a primitive root as generator, and for the
2-part either nothing (2 || q), a single order-2 component (4 || q), or
the pair <-1> x <5> (8 | q).  A character is an exponent vector k with
k_i modulo the component order s_i, and

    chi(n) = e( sum_i k_i dlog_i(n) / s_i ),

realized on a common denominator e = lcm(s_i) so every value is an exact
root of unity exp(2 pi i m / e) looked up from a precomputed table.

Conductors come from the component orders (no search): for odd p the
component of order d contributes p^(1 + v_p(d)) unless d = 1; for the
2-part, order 2^m on the <5> component contributes 2^(m+2), else -1
alone contributes 4.  Parity is chi(-1).  Both are cross-checked against
brute force in the test suite.

Enumeration order is lexicographic in the exponent vectors, components
ordered by ascending prime (the <-1> component before the <5> component),
which makes character indices reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import divisors, euler_phi, factorize, mobius, primitive_root
from .errors import PreconditionError


def _two_part_components(e: int) -> list[tuple[int, int]]:
    """(generator, order) pairs for (Z/2^e)^*, e >= 1."""
    if e == 1:
        return []
    if e == 2:
        return [(3, 2)]
    return [(2**e - 1, 2), (5, 2 ** (e - 2))]


class CharacterGroup:
    """The character group mod q, with shared discrete-log tables."""

    def __init__(self, q: int):
        if q < 1:
            raise PreconditionError("modulus must be >= 1")
        self.q = q
        self.factorization = factorize(q) if q > 1 else []

        # components: (prime, prime_power, generator mod prime_power, order)
        comps: list[tuple[int, int, int, int]] = []
        for p, e in self.factorization:
            pe = p**e
            if p == 2:
                for g, s in _two_part_components(e):
                    comps.append((p, pe, g % pe, s))
            else:
                g = primitive_root(pe, p)
                comps.append((p, pe, g, euler_phi(pe)))
        self.components = comps
        self.orders = np.array([s for (_, _, _, s) in comps], dtype=np.int64)
        self.exponent = int(np.lcm.reduce(self.orders)) if comps else 1

        # dlog matrix: row n holds the component dlogs of n; -1 marks non-units
        self.dlog = np.full((q, len(comps)), -1, dtype=np.int64)
        unit_mask = np.array([math.gcd(n, q) == 1 for n in range(q)], dtype=bool)
        if q == 1:
            unit_mask[0] = True  # the single residue class
        self.unit_mask = unit_mask
        self.units = np.nonzero(unit_mask)[0]
        for ci, (p, pe, g, s) in enumerate(comps):
            if p == 2 and pe >= 8:
                # n = (-1)^a 5^b: the sign exponent a, or the 5-exponent b
                col = self._dlog_two_sign(pe) if g == pe - 1 else self._dlog_two_five(pe)
            else:
                col = self._dlog_cyclic(pe, g, s)
            self.dlog[self.units, ci] = col[self.units % pe]
        self.dlog[~unit_mask, :] = -1

        self._roots = np.exp(2j * np.pi * np.arange(self.exponent) / self.exponent)
        self._unit_phase = None  # e(h/q) on residues, built when needed

    def _dlog_cyclic(self, pe: int, g: int, s: int) -> np.ndarray:
        table = np.full(pe, -1, dtype=np.int64)
        acc = 1
        for j in range(s):
            table[acc] = j
            acc = acc * g % pe
        return table

    def _dlog_two_sign(self, pe: int) -> np.ndarray:
        # n = (-1)^a 5^b mod 2^e; a = 0 iff n lies in <5>
        table = np.full(pe, -1, dtype=np.int64)
        acc = 1
        for _ in range(pe // 4):
            table[acc] = 0
            table[pe - acc] = 1
            acc = acc * 5 % pe
        return table

    def _dlog_two_five(self, pe: int) -> np.ndarray:
        table = np.full(pe, -1, dtype=np.int64)
        acc = 1
        for b in range(pe // 4):
            table[acc] = b
            table[pe - acc] = b
            acc = acc * 5 % pe
        return table

    def characters(self) -> list["DirichletCharacter"]:
        """All phi(q) characters, lexicographic in exponent vectors."""
        if not self.components:
            return [DirichletCharacter(self, ())]
        out = []
        exps = [0] * len(self.components)
        total = int(np.prod(self.orders))
        for _ in range(total):
            out.append(DirichletCharacter(self, tuple(exps)))
            for i in reversed(range(len(exps))):
                exps[i] += 1
                if exps[i] < self.orders[i]:
                    break
                exps[i] = 0
        return out

    def even_primitive(self) -> list["DirichletCharacter"]:
        return [c for c in self.characters() if c.is_even and c.is_primitive]

    def unit_phase(self) -> np.ndarray:
        """e(h/q) for h = 0..q-1, zeroed outside the units."""
        if self._unit_phase is None:
            ph = np.exp(2j * np.pi * np.arange(self.q) / self.q)
            ph[~self.unit_mask] = 0.0
            self._unit_phase = ph
        return self._unit_phase

    def exponent_block(
        self, chars: list["DirichletCharacter"], residues: np.ndarray
    ) -> np.ndarray:
        """Exponents of chi(r) on the common denominator e; -1 for non-units.

        Shape (len(chars), len(residues)).
        """
        res = np.asarray(residues, dtype=np.int64) % self.q
        if not self.components:
            block = np.zeros((len(chars), res.size), dtype=np.int64)
        else:
            dl = self.dlog[res]  # (nres, ncomp)
            kmat = np.array(
                [
                    [k * (self.exponent // s) for k, s in zip(chi.exponents, self.orders)]
                    for chi in chars
                ],
                dtype=np.int64,
            )  # (nchars, ncomp)
            block = (np.maximum(dl, 0) @ kmat.T).T % self.exponent
        block[:, ~self.unit_mask[res]] = -1
        return block

    def value_block(
        self, chars: list["DirichletCharacter"], residues: np.ndarray
    ) -> np.ndarray:
        """chi(r) as a complex matrix, zero at non-units."""
        block = self.exponent_block(chars, residues)
        vals = np.where(block >= 0, self._roots[np.maximum(block, 0)], 0.0)
        return vals


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q as an exponent vector over the group components."""

    group: CharacterGroup = field(repr=False)
    exponents: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.group.q

    @property
    def order(self) -> int:
        if not self.exponents:
            return 1
        return int(
            np.lcm.reduce(
                [
                    s // math.gcd(k, s)
                    for k, s in zip(self.exponents, self.group.orders)
                ]
            )
        )

    @property
    def conductor(self) -> int:
        cond = 1
        comps = self.group.components
        i = 0
        while i < len(comps):
            p, pe, g, s = comps[i]
            if p == 2 and pe >= 8:
                a, b = self.exponents[i], self.exponents[i + 1]
                s5 = comps[i + 1][3]
                if b == 0:
                    cond *= 4 if a == 1 else 1
                else:
                    m = s5 // math.gcd(b, s5)  # order on the <5> component
                    cond *= 4 * m  # = 2^(v2(m) + 2)
                i += 2
                continue
            k = self.exponents[i]
            if k != 0:
                d = s // math.gcd(k, s)
                if p == 2:  # the 4 || q component
                    cond *= 4
                else:
                    vp = 0
                    while d % p == 0:
                        d //= p
                        vp += 1
                    cond *= p ** (1 + vp)
            i += 1
        return cond

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_even(self) -> bool:
        """chi(-1) = 1, computed exactly from the dlogs of -1."""
        if self.modulus <= 2:
            return True
        group = self.group
        dl = group.dlog[self.modulus - 1]
        total = sum(
            int(k) * (group.exponent // int(s)) * int(d)
            for k, s, d in zip(self.exponents, group.orders, dl)
        )
        return total % group.exponent == 0

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    @property
    def values(self) -> np.ndarray:
        """Full value table on residues 0..q-1 (cached)."""
        cached = self.__dict__.get("_values")
        if cached is None:
            cached = self.group.value_block([self], np.arange(self.modulus))[0]
            self.__dict__["_values"] = cached
        return cached

    def conjugate(self) -> "DirichletCharacter":
        exps = tuple(
            (-k) % s for k, s in zip(self.exponents, self.group.orders)
        )
        return DirichletCharacter(self.group, exps)


@lru_cache(maxsize=512)
def character_group(q: int) -> CharacterGroup:
    return CharacterGroup(q)


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """The phi(q) characters mod q in deterministic order."""
    return character_group(q).characters()


def phi_star(q: int) -> int:
    """Number of primitive characters mod q, by enumeration."""
    return sum(1 for c in enumerate_characters(q) if c.is_primitive)


def phi_plus(q: int) -> int:
    """Number of even primitive characters mod q, by enumeration."""
    return sum(1 for c in enumerate_characters(q) if c.is_primitive and c.is_even)


def gauss_sum(chi: DirichletCharacter) -> complex:
    """sum_h chi(h) e(h/q) by direct summation."""
    group = chi.group
    return complex(chi.values @ group.unit_phase())


def root_number(chi: DirichletCharacter) -> complex:
    """Normalized Gauss sum; modulus 1 exactly when chi is primitive."""
    if not chi.is_primitive:
        raise PreconditionError("root number requires a primitive character")
    return gauss_sum(chi) / math.sqrt(chi.modulus)


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) by the divisor formula sum_{d | (q,n)} d mu(q/d)."""
    if q < 1:
        raise PreconditionError("modulus must be >= 1")
    g = math.gcd(q, abs(n)) if n != 0 else q
    return sum(d * mobius(q // d) for d in divisors(g))


def even_primitive_pair_sum(q: int, m: int, n: int) -> float:
    """Closed form for sum over even primitive chi mod q of chi(m) conj(chi(n)).

    Evaluates (1/2) [ sum_{vw=q, w | m-n} mu(v) phi(w)
                     + sum_{vw=q, w | m+n} mu(v) phi(w) ],
    the two divisibility conditions being summed (w | 0 counts).
    """
    if math.gcd(m * n, q) != 1:
        raise PreconditionError("m and n must be coprime to q")
    total = 0
    for w in divisors(q):
        v = q // w
        mv = mobius(v)
        if mv == 0:
            continue
        phw = euler_phi(w)
        if (m - n) % w == 0:
            total += mv * phw
        if (m + n) % w == 0:
            total += mv * phw
    return total / 2
