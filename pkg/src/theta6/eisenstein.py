"""Exact arithmetic in the Eisenstein integers O = Z[w], w = exp(i*pi/3).

Elements are a + b*w with w^2 = w - 1.  The ring is norm-Euclidean, which is
all we need for gcds, factorization and residue systems.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

from sympy import factorint


@dataclass(frozen=True, slots=True)
class EisensteinInt:
    a: int
    b: int

    def __add__(self, o: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.a + o.a, self.b + o.b)

    def __sub__(self, o: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.a - o.a, self.b - o.b)

    def __neg__(self) -> "EisensteinInt":
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, o):
        if isinstance(o, int):
            return EisensteinInt(self.a * o, self.b * o)
        a, b, c, d = self.a, self.b, o.a, o.b
        return EisensteinInt(a * c - b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "EisensteinInt":
        if e < 0:
            raise ValueError("negative exponent")
        r, x = ONE, self
        while e:
            if e & 1:
                r = r * x
            x = x * x
            e >>= 1
        return r

    def conj(self) -> "EisensteinInt":
        # conj(w) = 1 - w
        return EisensteinInt(self.a + self.b, -self.b)

    def norm(self) -> int:
        a, b = self.a, self.b
        return a * a + a * b + b * b

    def trace(self) -> int:
        return 2 * self.a + self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def to_complex(self) -> complex:
        return self.a + self.b * complex(0.5, math.sqrt(3) / 2)

    def __str__(self) -> str:
        return format_elt(self)

    def __repr__(self) -> str:
        return f"E({self.a},{self.b})"


ZERO = EisensteinInt(0, 0)
ONE = EisensteinInt(1, 0)
W = EisensteinInt(0, 1)
SQRT_M3 = EisensteinInt(-1, 2)          # 2w - 1, a square root of -3
UNITS = tuple(W ** k for k in range(6))  # UNITS[k] = w^k


def E(a: int, b: int = 0) -> EisensteinInt:
    return EisensteinInt(a, b)


def as_elt(x) -> EisensteinInt:
    if isinstance(x, EisensteinInt):
        return x
    if isinstance(x, int):
        return EisensteinInt(x, 0)
    if isinstance(x, str):
        return parse_elt(x)
    a, b = x
    return EisensteinInt(int(a), int(b))


# ---------------------------------------------------------------- text form

_ELT_RE = re.compile(r"^\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*w\s*$")


def format_elt(x: EisensteinInt) -> str:
    sign = "-" if x.b < 0 else "+"
    return f"{x.a}{sign}{abs(x.b)}*w"


def parse_elt(s: str) -> EisensteinInt:
    """Inverse of format_elt; also accepts a bare integer."""
    m = _ELT_RE.match(s)
    if m:
        b = int(m.group(3))
        return EisensteinInt(int(m.group(1)), -b if m.group(2) == "-" else b)
    try:
        return EisensteinInt(int(s.strip()), 0)
    except ValueError:
        raise ValueError(f"cannot parse Eisenstein integer {s!r}") from None


# ---------------------------------------------------------------- division

def _round_div(n: int, d: int) -> int:
    # nearest integer to n/d, d > 0
    return (2 * n + d) // (2 * d)


def divmod_e(x: EisensteinInt, y: EisensteinInt) -> tuple[EisensteinInt, EisensteinInt]:
    """x = q*y + r with N(r) <= 3/4 N(y), by rounding x*conj(y)/N(y)."""
    n = y.norm()
    if n == 0:
        raise ZeroDivisionError("division by zero in Z[w]")
    t = x * y.conj()
    q = EisensteinInt(_round_div(t.a, n), _round_div(t.b, n))
    return q, x - q * y


def divides(y: EisensteinInt, x: EisensteinInt) -> bool:
    return divmod_e(x, y)[1].is_zero()


def exact_div(x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
    q, r = divmod_e(x, y)
    if not r.is_zero():
        raise ValueError(f"{y} does not divide {x}")
    return q


def gcd_raw(x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
    while not y.is_zero():
        x, y = y, divmod_e(x, y)[1]
    return x


def gcd(x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
    return canonical(gcd_raw(x, y))


def canonical(x: EisensteinInt) -> EisensteinInt:
    """Deterministic associate: the one in V when coprime to 6, otherwise
    the unique associate with a > 0 and b >= 0 (argument in [0, pi/3))."""
    if x.is_zero():
        return x
    if math.gcd(x.norm(), 6) == 1:
        from .cosets import normalize_to_V
        return normalize_to_V(x)[1]
    for u in UNITS:
        y = u * x
        if y.a > 0 and y.b >= 0:
            return y
    raise AssertionError(x)


def valuation(x: EisensteinInt, p: EisensteinInt) -> tuple[int, EisensteinInt]:
    """(k, x / p^k) with p^k exactly dividing x."""
    if x.is_zero():
        raise ValueError("valuation of zero")
    k = 0
    while True:
        q, r = divmod_e(x, p)
        if not r.is_zero():
            return k, x
        x, k = q, k + 1


# ---------------------------------------------------------------- residues

@lru_cache(maxsize=4096)
def _hnf(a: int, b: int) -> tuple[int, int, int]:
    """Basis (A, B), (0, D) of the lattice (a + b w) Z[w] in coordinates."""
    v1 = (a, b)
    m = EisensteinInt(a, b) * W
    v2 = (m.a, m.b)
    g, s, t = _egcd(v1[0], v2[0])
    B = s * v1[1] + t * v2[1]
    D = abs((v1[0] // g) * v2[1] - (v2[0] // g) * v1[1])
    return g, B % D, D


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


class ResidueRing:
    """O/(c) with canonical representatives a + b w, 0 <= a < A, 0 <= b < D."""

    def __init__(self, c: EisensteinInt):
        if c.is_zero():
            raise ZeroDivisionError("residue ring modulo zero")
        self.c = c
        self.A, self.B, self.D = _hnf(c.a, c.b)
        self.size = self.A * self.D

    def reduce(self, x: EisensteinInt) -> EisensteinInt:
        a, b = x.a, x.b
        k = a // self.A
        a -= k * self.A
        b = (b - k * self.B) % self.D
        return EisensteinInt(a, b)

    def __iter__(self) -> Iterator[EisensteinInt]:
        for a in range(self.A):
            for b in range(self.D):
                yield EisensteinInt(a, b)

    def __len__(self) -> int:
        return self.size

    def is_unit(self, x: EisensteinInt) -> bool:
        return gcd_raw(self.c, x).norm() == 1

    def units(self) -> Iterator[EisensteinInt]:
        return (x for x in self if self.is_unit(x))

    def pow(self, x: EisensteinInt, e: int) -> EisensteinInt:
        r, x = self.reduce(ONE), self.reduce(x)
        while e:
            if e & 1:
                r = self.reduce(r * x)
            x = self.reduce(x * x)
            e >>= 1
        return r


def residues_mod(c: EisensteinInt) -> ResidueRing:
    return ResidueRing(c)


# ---------------------------------------------------------------- primes

class PrimeRecord(NamedTuple):
    generator: EisensteinInt
    norm: int
    splitting: str          # 'split', 'inert' or 'ramified'

    @property
    def p(self) -> int:
        return self.norm if self.splitting != "inert" else math.isqrt(self.norm)


def prime_sieve(n: int) -> list[int]:
    if n < 2:
        return []
    s = bytearray([1]) * (n + 1)
    s[0] = s[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if s[i]:
            s[i * i::i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, f in enumerate(s) if f]


def omega_mod(p: int) -> int:
    """A root t of t^2 - t + 1 mod p (p = 1 mod 3), i.e. an image of w."""
    for g in range(2, p):
        c = pow(g, (p - 1) // 3, p)
        if c != 1:
            return (-c) % p
    raise ValueError(p)


def split_generator(p: int) -> EisensteinInt:
    """Some prime of norm p for a rational prime p = 1 mod 3."""
    t = omega_mod(p)
    g = gcd_raw(EisensteinInt(p, 0), EisensteinInt(t, -1))
    assert g.norm() == p, (p, g)
    return g


def enumerate_primes(max_norm: int) -> list[PrimeRecord]:
    """Prime ideals coprime to 6 with norm <= max_norm, ordered by norm."""
    out = []
    for p in prime_sieve(max_norm):
        if p % 3 == 1:
            g = split_generator(p)
            for h in (g, g.conj()):
                out.append(PrimeRecord(canonical(h), p, "split"))
        elif p > 3 and p * p <= max_norm:
            out.append(PrimeRecord(canonical(EisensteinInt(p, 0)), p * p, "inert"))
    out.sort(key=lambda r: (r.norm, r.generator.a, r.generator.b))
    return out


def prime_record(pi: EisensteinInt) -> PrimeRecord:
    n = pi.norm()
    if n == 3:
        return PrimeRecord(pi, 3, "ramified")
    r = math.isqrt(n)
    if r * r == n and n % 3 != 0 and r % 3 == 2:
        return PrimeRecord(pi, n, "inert")
    return PrimeRecord(pi, n, "split")


def factor(x: EisensteinInt) -> tuple[EisensteinInt, list[tuple[EisensteinInt, int]]]:
    """x = u * prod pi^e with canonical prime generators pi and a unit u."""
    if x.is_zero():
        raise ValueError("cannot factor zero")
    out = []
    rest = x
    for p in sorted(factorint(x.norm())):
        if p == 3:
            cands = [SQRT_M3]
        elif p == 2 or p % 3 == 2:
            cands = [EisensteinInt(p, 0)]
        else:
            g = split_generator(p)
            cands = [g, g.conj()]
        for c in cands:
            c = canonical(c)
            k, rest = valuation(rest, c)
            if k:
                out.append((c, k))
    assert rest.is_unit()
    return rest, out
