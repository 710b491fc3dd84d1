"""Coefficients of the zeta factors: sum_m a(m) m^-s = L_S(|.|^(6s+1)) and
sum_m b(m) m^-s = zeta_K(6s+1).  Both live on sixth powers m = k^6."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import factorint, integer_nthroot


@lru_cache(maxsize=1 << 14)
def ideal_count(k: int) -> int:
    """Number of ideals of Z[w] of norm k."""
    if k < 1:
        raise ValueError("k must be positive")
    n = 1
    for p, e in factorint(k).items():
        if p == 3:
            continue
        if p % 3 == 1:
            n *= e + 1
        elif e % 2:
            return 0
    return n


def sixth_root(m: int) -> int | None:
    k, exact = integer_nthroot(m, 6)
    return int(k) if exact else None


def coeff_a(m: int) -> Fraction:
    """I(k)/k if m = k^6 with k coprime to 6, else 0."""
    k = sixth_root(m)
    if k is None or k % 2 == 0 or k % 3 == 0:
        return Fraction(0)
    return Fraction(ideal_count(k), k)


def coeff_b(m: int) -> Fraction:
    """I(k)/k if m = k^6, else 0."""
    k = sixth_root(m)
    if k is None:
        return Fraction(0)
    return Fraction(ideal_count(k), k)


def a_of_k(k: int) -> Fraction:
    """a(k^6) without forming k^6."""
    if k % 2 == 0 or k % 3 == 0:
        return Fraction(0)
    return Fraction(ideal_count(k), k)


def b_of_k(k: int) -> Fraction:
    return Fraction(ideal_count(k), k)
