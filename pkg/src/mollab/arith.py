"""Elementary arithmetic functions: sieves, factorization, primitive roots.

Shared plumbing for the character, L-function and exponential-sum modules.
All sieves return numpy arrays indexed 0..n.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[k] = smallest prime factor of k (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def mobius_sieve(n: int) -> np.ndarray:
    """mu[k] for k = 0..n (mu[0] = 0), via smallest prime factors."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    spf = smallest_prime_factor(n)
    for k in range(2, n + 1):
        p = spf[k]
        m = k // p
        mu[k] = 0 if m % p == 0 else -mu[m]
    return mu


def von_mangoldt_sieve(n: int) -> np.ndarray:
    """Lambda[k] = log p when k = p^j, else 0."""
    lam = np.zeros(n + 1, dtype=np.float64)
    for p in primes_up_to(n):
        pk = int(p)
        while pk <= n:
            lam[pk] = math.log(p)
            pk *= int(p)
    return lam


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, ascending primes."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    phi = 1
    for p, e in factorize(n):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def mobius(n: int) -> int:
    mu = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


@lru_cache(maxsize=4096)
def primitive_root(pe: int, p: int) -> int:
    """A generator of (Z/pe)^* for odd prime p (pe = p^e)."""
    phi = euler_phi(pe)
    prime_factors = [f for f, _ in factorize(phi)]
    for g in range(2, pe):
        if math.gcd(g, pe) != 1:
            continue
        if all(pow(g, phi // f, pe) != 1 for f in prime_factors):
            return g
    raise ValueError(f"no primitive root mod {pe}")  # unreachable for odd p^e
