"""Sextic Gauss sums g6(r, eps^k, c).

    g6(r, eps^k, c) = sum_{x mod c} eps((x/c)_S)^k e(r x / c),
    e(x) = exp(sigma 2 pi i Tr(x)),  eps(w^j) = exp(2 pi i j / 6).

For a split prime of norm p the sum reduces to a classical Gauss sum of a
character of F_p; that sum is approximated through Shimura's theta quotient
and then snapped onto the exact root fixed by Eisenstein-Weil.  Inert primes
have a closed form.  Composite moduli are assembled by twisted
multiplicativity.
"""
from __future__ import annotations

import cmath
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .eisenstein import (ONE, EisensteinInt, PrimeRecord, ResidueRing,
                         canonical, divides, factor, prime_record, valuation)
from .specialfn import ctx
from .symbols import legendre_S, residue_symbol_prime

PREC = 200
DEFAULT_SIGN = -1
HEADER = "theta6-gauss v1 precision={prec} sign={sign}"


class SnapError(RuntimeError):
    pass


def root6(j: int, prec: int = PREC):
    """eps(w^j) = exp(2 pi i j/6) as an mpc."""
    j %= 6
    with ctx(prec):
        h = gmpy2.sqrt(mpfr(3)) / 2
        re = (mpfr(1), mpfr(1) / 2, -mpfr(1) / 2, -mpfr(1), -mpfr(1) / 2, mpfr(1) / 2)[j]
        im = (0, h, h, 0, -h, -h)[j]
        return mpc(re, im)


def additive_char(num: EisensteinInt, den: EisensteinInt = ONE, sigma: int = DEFAULT_SIGN,
                  prec: int = PREC):
    """e(num/den) = exp(sigma 2 pi i Tr(num/den)) for den coprime to 6."""
    n = den.norm()
    if n % 2 == 0 or n % 3 == 0:
        raise ValueError("denominator must be coprime to 6")
    t = Fraction((num * den.conj()).trace(), n)
    t -= math.floor(t)
    with ctx(prec):
        ang = sigma * 2 * gmpy2.const_pi() * mpfr(t.numerator) / t.denominator
        return mpc(gmpy2.cos(ang), gmpy2.sin(ang))


# ---------------------------------------------------------------- oracle

def gauss_naive(r: EisensteinInt, k: int, c: EisensteinInt, sigma: int = DEFAULT_SIGN) -> complex:
    """Direct sum over O/c in double precision.  Oracle only."""
    nc = c.norm()
    if nc % 2 == 0 or nc % 3 == 0:
        raise ValueError("modulus must be coprime to 6")
    if nc == 1:
        return complex(1)
    _, fac = factor(c)
    if len(fac) == 1 and fac[0][1] == 1 and prime_record(fac[0][0]).splitting == "split":
        return _naive_split(r, k, c, fac[0][0], sigma)
    total = 0j
    for x in ResidueRing(c):
        if any(divides(pi, x) for pi, _ in fac):
            continue
        j = sum(m * residue_symbol_prime(x, pi) for pi, m in fac)
        t = Fraction((r * x * c.conj()).trace(), nc)
        total += cmath.exp(2j * math.pi * (k * j / 6 + sigma * float(t - math.floor(t))))
    return total


def _naive_split(r, k, c, pi, sigma) -> complex:
    # O/pi = Z/p, x in 1..p-1; x^((p-1)/6) read off through w = t mod pi
    p = pi.norm()
    t = _omega_residue(pi)
    x = np.arange(1, p, dtype=np.int64)
    j = _dlog6(x, p, t)
    # Tr(r x / c) = x Tr(r conj(c)) / N(c)
    tr = (r * c.conj()).trace() % p
    ang = 2 * np.pi * (k * j / 6.0 + sigma * ((x * tr) % p) / p)
    return complex(np.exp(1j * ang).sum())


def _omega_residue(pi: EisensteinInt) -> int:
    p = pi.norm()
    return (-pi.a * pow(pi.b, -1, p)) % p


def _powmod(x: np.ndarray, e: int, p: int) -> np.ndarray:
    r = np.ones_like(x)
    x = x % p
    while e:
        if e & 1:
            r = r * x % p
        x = x * x % p
        e >>= 1
    return r


def _dlog6(x: np.ndarray, p: int, t: int) -> np.ndarray:
    """j with x^((p-1)/6) = t^j mod p (p < 2^31)."""
    v = _powmod(x.astype(np.int64), (p - 1) // 6, p)
    out = np.full(v.shape, -1, dtype=np.int64)
    for j in range(6):
        out[v == pow(t, j, p)] = j
    if (out < 0).any():
        raise ValueError("argument not coprime to the prime")
    return out


# ---------------------------------------------------------------- theta route

def theta_terms(p: int) -> int:
    return math.ceil(math.sqrt(p * math.log(p)))


def classical_gauss_theta(p: int, t: int, k: int, terms: int | None = None) -> complex:
    """g(chi^k) = sum_x chi^k(x) exp(2 pi i x/p) via W_D = theta(chi,i)/theta(chibar,i),
    chi(x) = eps(w^j) where x^((p-1)/6) = t^j mod p."""
    M = terms or theta_terms(p)
    n = np.arange(1, M + 1, dtype=np.int64)
    j = (k * _dlog6(n, p, t)) % 6
    odd = (k * (p - 1) // 2) % 6 == 3             # chi^k(-1) = -1
    w = np.exp(-np.pi * n.astype(float) ** 2 / p) * (n if odd else 1)
    ch = np.exp(2j * np.pi * j / 6)
    th = (w * ch).sum()
    thb = (w * ch.conj()).sum()
    if abs(thb) < 1e-300:
        raise SnapError(f"theta(chibar, i) vanishes for p={p}")
    return th / thb * math.sqrt(p) * (1j if odd else 1)


def _to_lattice(z: complex) -> tuple[EisensteinInt, float]:
    b = z.imag / (math.sqrt(3) / 2)
    a = z.real - b / 2
    x = EisensteinInt(round(a), round(b))
    return x, math.hypot(a - x.a, b - x.b)


def _cube_root_near(beta, approx: complex, prec: int):
    """The cube root of the mpc beta closest to approx."""
    with ctx(prec):
        r = gmpy2.root(abs(beta), 3)
        arg = gmpy2.phase(beta) / 3
        two_pi3 = 2 * gmpy2.const_pi() / 3
        best, dist = None, None
        for m in range(3):
            a = arg + m * two_pi3
            z = mpc(r * gmpy2.cos(a), r * gmpy2.sin(a))
            d = abs(complex(z) - approx)
            if dist is None or d < dist:
                best, dist = z, d
        return best


def _snap(approx: complex, q, target_norm: int, prec: int, p: int):
    """approx^3 / q lies in O with norm target_norm; return the exact cube root."""
    z, resid = _to_lattice(approx ** 3 / complex(q))
    if z.norm() != target_norm or resid > 0.25:
        raise SnapError(f"p={p}: no lattice point near g^3 (residual {resid:.3g})")
    if resid > 0.1:
        warnings.warn(f"p={p}: weak snapping margin, residual {resid:.3g}")
    with ctx(prec):
        beta = mpc(mpfr(z.a) + mpfr(z.b) / 2, mpfr(z.b) * gmpy2.sqrt(mpfr(3)) / 2) * q
        return _cube_root_near(beta, approx, prec)


def gauss_split_theta(pi, k: int = 1, sigma: int = DEFAULT_SIGN, prec: int = PREC):
    """g6(1, eps^k, pi) for split pi and k in {1, 2}, via theta and snapping."""
    if isinstance(pi, PrimeRecord):
        pi = pi.generator
    p = pi.norm()
    if k not in (1, 2):
        raise ValueError("theta route covers k = 1, 2")
    t = _omega_residue(pi)
    terms = theta_terms(p)
    with ctx(prec):
        sq = gmpy2.sqrt(mpfr(p))
        if k == 1:
            q = mpc(sq) if p % 4 == 1 else mpc(0, sq)
            norm_target = p * p
        else:
            q = mpc(mpfr(p))
            norm_target = p
    for attempt in range(3):
        approx = classical_gauss_theta(p, t, k, terms)
        try:
            g = _snap(approx, q, norm_target, prec, p)
            break
        except SnapError:
            if attempt == 2:
                raise
            terms *= 2
    return _classical_to_g6(g, pi, k, sigma, prec)


def _classical_to_g6(g, pi, k, sigma, prec):
    # g6(1,eps^k,pi) = eps^k((-conj(pi)/pi))^-1 g(chi^k) for sigma = -1
    j = -k * residue_symbol_prime(-pi.conj(), pi) + _sign_twist(pi, k, sigma)
    with ctx(prec):
        return root6(j, prec) * g


def _sign_twist(pi, k, sigma):
    # x -> -x turns the sigma = -1 sum into the sigma = +1 one: factor eps^k((-1/pi))
    return k * residue_symbol_prime(EisensteinInt(-1, 0), pi) if sigma == 1 else 0


# ---------------------------------------------------------------- prime table

def _inert_value(p: int, k: int, prec: int):
    """g6(1, eps^k, p) = p eps^k(((1 - 2w)/p)) for inert p (either sign)."""
    j = k * residue_symbol_prime(EisensteinInt(1, -2), EisensteinInt(p, 0))
    with ctx(prec):
        return root6(j, prec) * p


def _quadratic_value(pi, sigma, prec):
    """k = 3: eps^3((conj(pi)/pi)) sqrt N if N = 1 mod 4, eps^3((-conj(pi)/pi)) i sqrt N else."""
    p = pi.norm()
    with ctx(prec):
        sq = gmpy2.sqrt(mpfr(p))
        if p % 4 == 1:
            v = root6(3 * residue_symbol_prime(pi.conj(), pi), prec) * sq
        else:
            v = root6(3 * residue_symbol_prime(-pi.conj(), pi), prec) * mpc(0, sq)
        return v * root6(_sign_twist(pi, 3, sigma), prec)


def gauss_prime(pi, k: int = 1, sigma: int = DEFAULT_SIGN, prec: int = PREC):
    """g6(1, eps^k, pi) for a prime pi coprime to 6 and k in 0..5."""
    rec = pi if isinstance(pi, PrimeRecord) else prime_record(pi)
    pi = rec.generator
    k %= 6
    if k == 0:
        with ctx(prec):
            return mpc(-1)                          # Ramanujan sum at a prime
    if rec.splitting == "inert":
        return _inert_value(rec.p, k, prec)
    if k in (1, 2):
        return gauss_split_theta(pi, k, sigma, prec)
    if k == 3:
        return _quadratic_value(pi, sigma, prec)
    # k = 4, 5: g6(1, eps^-l, pi) = conj(g6(1, eps^l, pi)) eps^l((-1/pi)), l = 6 - k
    l = 6 - k
    m1 = residue_symbol_prime(EisensteinInt(-1, 0), pi)
    base = gauss_split_theta(pi, l, sigma, prec)
    with ctx(prec):
        return base.conjugate() * root6(l * m1, prec)


def conjugate_prime_value(g, pi, k: int = 1, prec: int = PREC):
    """g6(1, eps^k, canonical(conj(pi))) from g6(1, eps^k, pi).

    Conjugating the sum gives g6 at conj(pi) twisted by ((-1/conj(pi)))^k;
    moving conj(pi) to its V-associate contributes a unit symbol that cancels
    this twist for every prime coprime to 6, so the result is the plain
    conjugate (checked against the theta evaluation in the tests)."""
    with ctx(prec):
        return mpc(g).conjugate()


def prime_values(rec, sigma: int = DEFAULT_SIGN, prec: int = PREC) -> dict:
    """{k: g6(1, eps^k, pi)} for k = 1..5 with two theta evaluations."""
    rec = rec if isinstance(rec, PrimeRecord) else prime_record(rec)
    pi = rec.generator
    if rec.splitting == "inert":
        return {k: _inert_value(rec.p, k, prec) for k in range(1, 6)}
    g1 = gauss_split_theta(pi, 1, sigma, prec)
    g2 = gauss_split_theta(pi, 2, sigma, prec)
    m1 = residue_symbol_prime(EisensteinInt(-1, 0), pi)
    with ctx(prec):
        return {1: g1, 2: g2, 3: _quadratic_value(pi, sigma, prec),
                4: g2.conjugate() * root6(2 * m1, prec),
                5: g1.conjugate() * root6(m1, prec)}


# ---------------------------------------------------------------- cache

@dataclass
class GaussTable:
    """g6(1, eps^k, pi) for canonical prime generators, k = 1..5."""
    prec: int = PREC
    sign: int = DEFAULT_SIGN
    values: dict = field(default_factory=dict)     # (a, b, k) -> mpc

    def get(self, pi: EisensteinInt, k: int = 1):
        k %= 6
        if k == 0:
            with ctx(self.prec):
                return mpc(-1)
        key = (pi.a, pi.b, k)
        if key not in self.values:
            raise KeyError(f"no Gauss sum cached for {pi} k={k}")
        return self.values[key]

    def primes(self) -> set:
        return {(a, b) for a, b, _ in self.values}

    def add_prime(self, rec: PrimeRecord) -> None:
        pi = rec.generator
        for k, v in prime_values(rec, self.sign, self.prec).items():
            self.values[(pi.a, pi.b, k)] = v

    def add_conjugate(self, rec: PrimeRecord, other: EisensteinInt) -> None:
        """Fill pi from the stored values of canonical(conj(pi)) = other."""
        pi = rec.generator
        for k in range(1, 6):
            self.values[(pi.a, pi.b, k)] = conjugate_prime_value(
                self.values[(other.a, other.b, k)], other, k, self.prec)

    def fill(self, records) -> int:
        """Add every missing prime; returns the number of primes added."""
        done = self.primes()
        n = 0
        for rec in records:
            pi = rec.generator
            if (pi.a, pi.b) in done:
                continue
            other = canonical(pi.conj())
            if rec.splitting == "split" and (other.a, other.b) in done:
                self.add_conjugate(rec, other)
            else:
                self.add_prime(rec)
            done.add((pi.a, pi.b))
            n += 1
        return n

    def save(self, path) -> None:
        rows = sorted(self.values.items(), key=lambda kv: (EisensteinInt(kv[0][0], kv[0][1]).norm(), kv[0]))
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(HEADER.format(prec=self.prec, sign=self.sign) + "\n")
            for (a, b, k), v in rows:
                fh.write(f"{a} {b} {k} {format(v.real, 'a')} {format(v.imag, 'a')}\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path, prec: int = PREC, sign: int = DEFAULT_SIGN) -> "GaussTable":
        with open(path, encoding="utf-8") as fh:
            head = fh.readline().strip()
            if head != HEADER.format(prec=prec, sign=sign):
                raise ValueError(f"cache header mismatch: {head!r}")
            tab = cls(prec, sign)
            with ctx(prec):
                for line in fh:
                    a, b, k, re, im = line.split()
                    tab.values[(int(a), int(b), int(k))] = mpc(mpfr(re, base=16), mpfr(im, base=16))
        return tab


# ---------------------------------------------------------------- composite moduli

def _prime_power_value(r: EisensteinInt, pi: EisensteinInt, l: int, table, prec: int):
    """g6(r, eps, pi^l), l >= 1."""
    N = pi.norm()
    m, r1 = valuation(r, pi)
    if l <= m:
        # e(r x / pi^l) = 1; the character eps^l((x/pi)) sums to zero unless trivial
        with ctx(prec):
            return mpc(N ** (l - 1) * (N - 1)) if l % 6 == 0 else mpc(0)
    if l > m + 1:
        with ctx(prec):
            return mpc(0)
    # l = m + 1:  N^m g6(1, eps^l, pi) twisted by (r1/pi^l)^-1
    j = -l * residue_symbol_prime(r1, pi)
    with ctx(prec):
        return root6(j, prec) * table(pi, l) * (mpfr(N) ** m)


def gauss_general(r: EisensteinInt, c: EisensteinInt, table=None, sigma: int = DEFAULT_SIGN,
                  prec: int = PREC):
    """g6(r, eps, c) for c coprime to 6 from prime values.

    ``table`` maps (canonical pi, k) to g6(1, eps^k, pi); a GaussTable (strict,
    raises on a miss) or None to compute prime values on the fly."""
    nc = c.norm()
    if nc % 2 == 0 or nc % 3 == 0:
        raise ValueError("modulus must be coprime to 6")
    if table is None:
        look = lambda pi, k: _gauss_prime_cached(pi.a, pi.b, k % 6, sigma, prec)
    elif isinstance(table, GaussTable):
        look = table.get
    else:
        look = table
    u, fac = factor(c)
    with ctx(prec):
        total = mpc(1)
    j = 0
    parts = []
    for pi, l in fac:
        v = _prime_power_value(r, pi, l, look, prec)
        if v == 0:
            with ctx(prec):
                return mpc(0)
        parts.append((pi, l))
        with ctx(prec):
            total = total * v
    # twisted multiplicativity: eps((c1/c2)) eps((c2/c1)) for each pair
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            pa, la = parts[a]
            pb, lb = parts[b]
            j += la * lb * (residue_symbol_prime(pa, pb) + residue_symbol_prime(pb, pa))
    # unit: g(r, u c) = eps((u/c)) g(r, c)
    if not u == ONE:
        j += legendre_S(u, c)
    with ctx(prec):
        return total * root6(j, prec)


@lru_cache(maxsize=1 << 14)
def _gauss_prime_cached(a: int, b: int, k: int, sigma: int, prec: int):
    return gauss_prime(EisensteinInt(a, b), k, sigma, prec)
