"""Sixth power residue symbols and the S-Legendre symbol.

(a/pi) is the unique sixth root of unity w^j with a^((N pi - 1)/6) = w^j
mod pi.  All symbols are returned as exponents j mod 6.
"""
from __future__ import annotations

from functools import lru_cache

from .eisenstein import (ONE, UNITS, EisensteinInt, PrimeRecord, ResidueRing,
                         factor, gcd_raw, omega_mod, prime_record, valuation)


class _PrimeField:
    """Fast Euler criterion modulo a fixed prime pi coprime to 6."""

    def __init__(self, pi: EisensteinInt):
        self.pi = pi
        self.N = pi.norm()
        self.e = (self.N - 1) // 6
        r = prime_record(pi)
        self.split = r.splitting == "split"
        if self.split:
            p = self.N
            a, b = pi.a, pi.b
            # pi | (t - w)  <=>  a + b t = 0 mod p
            self.p = p
            self.t = (-a * pow(b, -1, p)) % p if b % p else omega_mod(p)
            assert (a + b * self.t) % p == 0
            self.log = {pow(self.t, j, p): j for j in range(6)}
        else:
            self.ring = ResidueRing(pi)
            self.log = {}
            for j, u in enumerate(UNITS):
                r_ = self.ring.reduce(u)
                self.log[(r_.a, r_.b)] = j

    def symbol(self, a: EisensteinInt) -> int:
        if self.split:
            v = (a.a + a.b * self.t) % self.p
            if v == 0:
                raise ValueError(f"{a} is not coprime to {self.pi}")
            return self.log[pow(v, self.e, self.p)]
        r = self.ring.pow(a, self.e)
        try:
            return self.log[(r.a, r.b)]
        except KeyError:
            raise ValueError(f"{a} is not coprime to {self.pi}") from None


@lru_cache(maxsize=1 << 16)
def _field(a: int, b: int) -> _PrimeField:
    return _PrimeField(EisensteinInt(a, b))


def residue_symbol_prime(a: EisensteinInt, pi) -> int:
    """(a/pi)_6 as an exponent mod 6."""
    if isinstance(pi, PrimeRecord):
        pi = pi.generator
    if pi.norm() % 2 == 0 or pi.norm() % 3 == 0:
        raise ValueError("prime must be coprime to 6")
    return _field(pi.a, pi.b).symbol(a)


def legendre_S(a: EisensteinInt, b: EisensteinInt) -> int:
    """(a/b)_S = product over primes pi | b of (a/pi)^(v_pi(b))."""
    nb = b.norm()
    if nb % 2 == 0 or nb % 3 == 0:
        raise ValueError("b must be coprime to 6")
    if gcd_raw(a, b).norm() != 1:
        raise ValueError("a and b must be coprime")
    _, fac = factor(b)
    return sum(k * residue_symbol_prime(a, pi) for pi, k in fac) % 6


def tame_hilbert(x: EisensteinInt, y: EisensteinInt, pi) -> int:
    """(x, y)_pi at a prime pi not above 6 via the tame formula.

    With s = v(x), t = v(y) the symbol is ((-1)^(st) y^s x^(-t) / pi).  This
    orientation is the one compatible with the stored matrices A, B under the
    product formula."""
    if isinstance(pi, PrimeRecord):
        pi = pi.generator
    s, xu = valuation(x, pi)
    t, yu = valuation(y, pi)
    # y^s x^-t = yu^s xu^-t exactly, the powers of pi cancel
    j = s * t * residue_symbol_prime(EisensteinInt(-1, 0), pi)
    j += s * residue_symbol_prime(yu, pi) - t * residue_symbol_prime(xu, pi)
    return j % 6


def product_formula(x: EisensteinInt, y: EisensteinInt) -> int:
    """Sum over all places of (x, y)_v as an exponent mod 6; zero for x, y != 0.

    The places above 2 and 3 come from the local pairing, the infinite place
    is complex and contributes nothing, and the remaining primes are tame."""
    from .localfields import hilbert_S
    j = hilbert_S(x, y)
    _, fx = factor(x)
    _, fy = factor(y)
    seen = set()
    for pi, _ in fx + fy:
        n = pi.norm()
        if n % 2 == 0 or n % 3 == 0 or pi in seen:
            continue
        seen.add(pi)
        j += tame_hilbert(x, y, pi)
    return j % 6
