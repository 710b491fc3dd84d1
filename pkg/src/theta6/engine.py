"""Fourier coefficients tau(r, V) of the sextic theta series.

The coefficient is assembled from two truncated sums over moduli c (V-normalised
generators of ideals coprime to 6, squarefree away from r):

    V1 = sum_c g6(r, eps, c)/N(c) sum_k a(k^6) F1(y1 x N(c) k^6)
    V2 = sum_c g6(r, eps, c)/N(c) sum_w c_{j(c), w} sum_k b(k^6) F2(y1 x^-1 4^-w1 3^-w2 k^6 N(c))

    tau = (V1 - 6 sqrt(3) V2) x^(1/6) Gamma(1/6) Gamma(7/6) y1^(1/6) N(r)^(1/12)

with y1 = (2 pi)^5 N(r)^(-1/2) / 27 and c_{jw} the column sums of the transition
matrix.  The sweep over c does not depend on x, so one sweep serves a whole
x grid.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import gmpy2
from gmpy2 import mpc, mpfr

from .cosets import coset_table, normalize_to_V
from .dirichlet import a_of_k, b_of_k
from .eisenstein import ONE, EisensteinInt, enumerate_primes, factor, format_elt
from .gauss import DEFAULT_SIGN, PREC, GaussTable, _gauss_prime_cached, _prime_power_value, root6
from .specialfn import F1, F2, ctx, gamma_constants
from .symbols import residue_symbol_prime
from .transition import ColumnSums, cached_column_sums

V_TAG = "V12"       # the 12 residue classes mod 12 defining V
X_GRID = (Fraction(1, 500), Fraction(1, 400), Fraction(1, 300), Fraction(1, 200), Fraction(1, 100))


@dataclass(frozen=True)
class EngineConfig:
    r: EisensteinInt = ONE
    B: int = 10 ** 5
    x: Fraction = Fraction(1, 300)
    X: float = 1e-20
    prec: int = PREC
    sigma: int = DEFAULT_SIGN

    def __post_init__(self):
        n = self.r.norm()
        if n == 0 or n % 2 == 0 or n % 3 == 0:
            raise ValueError(f"r = {format_elt(self.r)} must be coprime to 6")
        if self.B < 7:
            raise ValueError("B must be at least 7")
        x = Fraction(self.x)
        if not 0 < x <= 1:
            raise ValueError("x must lie in (0, 1]")
        object.__setattr__(self, "x", x)
        if not self.X > 0:
            raise ValueError("cutoff X must be positive")
        if self.prec < 64:
            raise ValueError("precision below 64 bits")


class Term(NamedTuple):
    element: EisensteinInt      # V-normalised modulus c
    gauss: object               # g6(r, eps, c) as mpc
    norm: int
    coset: int                  # j(c), index into the coset table


class _Factor(NamedTuple):
    prime: EisensteinInt
    norm: int                   # N(prime)
    exp: int                    # exponent l of prime^l in the modulus


@dataclass
class SweepState:
    config: EngineConfig
    terms: list = field(default_factory=list)
    M: dict = field(default_factory=dict)      # norm -> F1 inner sum
    V1: object = None
    V2: object = None


# ---------------------------------------------------------------- scalars

def y1_factor(r: EisensteinInt, prec: int = PREC):
    """(2 pi)^5 N(r)^(-1/2) / 27."""
    with ctx(prec):
        return (2 * gmpy2.const_pi()) ** 5 / gmpy2.sqrt(mpfr(r.norm())) / 27


def _frac(x: Fraction, prec: int):
    with ctx(prec):
        return mpfr(gmpy2.mpq(x.numerator, x.denominator))


def _f2_envelope(arg) -> float:
    # |F2| <= exp(-sqrt(3) t / 2) / (6 pi)
    t = float(arg) ** (1 / 6)
    return math.exp(-math.sqrt(3) * t / 2) / (6 * math.pi)


def inner_sum_F1(scale, X: float, prec: int = PREC):
    """sum_k a(k^6) F1(scale k^6), stopped at the first nonzero term below X."""
    with ctx(prec):
        scale = mpfr(scale)
        if scale <= 0:
            raise ValueError("scale must be positive")
        total = mpfr(0)
    for k in itertools.count(1):
        a = a_of_k(k)
        if a == 0:
            continue
        f = F1(scale * k ** 6, prec)
        with ctx(prec):
            term = f * a.numerator / a.denominator
            total += term
        if abs(term) < X:
            return total


def inner_sums_F2(scale, window, X: float, prec: int = PREC) -> dict:
    """{(w1, w2): sum_k b(k^6) F2(scale 4^-w1 3^-w2 k^6)} over the window."""
    out = {}
    for w1, w2 in window:
        with ctx(prec):
            f = Fraction(4) ** -w1 * Fraction(3) ** -w2
            base = mpfr(scale) * gmpy2.mpq(f.numerator, f.denominator)
            total = mpfr(0)
        for k in itertools.count(1):
            arg = base * k ** 6
            if _f2_envelope(arg) < X:
                break
            b = b_of_k(k)
            if b == 0:
                continue
            f = F2(arg, prec)
            with ctx(prec):
                total += f * b.numerator / b.denominator
        out[(w1, w2)] = total
    return out


def inner_sum_F2(j: int, scale, coeffs: dict, X: float, prec: int = PREC):
    """sum_w c_{jw} sum_k b(k^6) F2(...) for one coset j; coeffs maps w to the
    embedded column sums (a list over j)."""
    sums = inner_sums_F2(scale, sorted(coeffs), X, prec)
    with ctx(prec):
        return sum((coeffs[w][j] * sums[w] for w in sorted(coeffs)), mpc(0))


# ---------------------------------------------------------------- sweep

def _lookup(table, sigma: int, prec: int) -> Callable:
    if table is None:
        return lambda pi, k: _gauss_prime_cached(pi.a, pi.b, k % 6, sigma, prec)
    if isinstance(table, GaussTable):
        if table.sign != sigma or table.prec < prec:
            raise ValueError("Gauss table does not match the sign/precision of the run")
        return table.get
    return table


def _prime_items(cfg: EngineConfig, look: Callable):
    """(norm, factor, g6(r, eps, prime^l)) for every admissible prime power:
    prime^1 for primes not dividing r, and the non-vanishing exponents
    l = m + 1 (and l = 6, 12, .. <= m) for primes with v(r) = m > 0."""
    r, B, prec = cfg.r, cfg.B, cfg.prec
    _, rfac = factor(r)
    rval = {(p.a, p.b): m for p, m in rfac}
    items = []
    for rec in enumerate_primes(B):
        pi = rec.generator
        m = rval.pop((pi.a, pi.b), 0)
        if m == 0:
            j = -residue_symbol_prime(r, pi)
            with ctx(prec):
                g = root6(j, prec) * look(pi, 1)
            items.append((rec.norm, _Factor(pi, rec.norm, 1), g))
            continue
        for l in [l for l in range(6, m + 1, 6)] + [m + 1]:
            if rec.norm ** l <= B:
                items.append((rec.norm ** l, _Factor(pi, rec.norm, l),
                              _prime_power_value(r, pi, l, look, prec)))
    items.sort(key=lambda t: (t[0], t[1].prime.a, t[1].prime.b, t[1].exp))
    return [(n, f, g) for n, f, g in items if g != 0]


def sweep(cfg: EngineConfig, gauss=None) -> SweepState:
    """All moduli c with N(c) <= B built as products of the admissible prime
    powers, each rebound to its V-associate with the Gauss value adjusted.

    L holds (c, g6(r, eps, c), N(c), factors) for products that can still be
    extended; an entry is kept only while N(c) N(pi) <= B for the prime pi
    just multiplied in."""
    prec = cfg.prec
    look = _lookup(gauss, cfg.sigma, prec)
    ident = coset_table().identity
    with ctx(prec):
        one = mpc(1)
    state = SweepState(cfg, [Term(ONE, one, 1, ident)])
    L = [(ONE, one, 1, ())]
    for nq, fq, gq in _prime_items(cfg, look):
        if nq > cfg.B:
            break
        q = fq.prime ** fq.exp
        new = []
        for a, ga, na, fac in L:
            n = na * nq
            if n > cfg.B:
                break
            if any(f.prime == fq.prime for f in fac):
                continue
            # twisted multiplicativity: eps((a/q)) eps((q/a))
            e = fq.exp * residue_symbol_prime(a, fq.prime) if fac else 0
            e += sum(f.exp * fq.exp * residue_symbol_prime(fq.prime, f.prime) for f in fac)
            c = a * q
            k, cv, j = normalize_to_V(c)
            allf = fac + (fq,)
            # unit rebinding: g(r, w^k c) = eps((w^k/c)) g(r, c),  (w/pi) = w^((N-1)/6)
            e += k * sum(f.exp * ((f.norm - 1) // 6) for f in allf)
            with ctx(prec):
                g = ga * gq * root6(e, prec)
            state.terms.append(Term(cv, g, n, j))
            if n * nq <= cfg.B:
                new.append((cv, g, n, allf))
        if new:
            L = sorted(L + new, key=lambda t: t[2])
    state.terms.sort(key=lambda t: (t.norm, t.element.a, t.element.b))
    return state


# ---------------------------------------------------------------- assembly

def _accumulate(state: SweepState, x: Fraction, cs: ColumnSums):
    cfg = state.config
    prec, X = cfg.prec, cfg.X
    coeffs = cs.numeric(prec)
    window = sorted(coeffs)
    y1 = y1_factor(cfg.r, prec)
    xf = _frac(x, prec)
    with ctx(prec):
        s1, s2 = y1 * xf, y1 / xf
    M = {}
    F2memo = {}
    with ctx(prec):
        V1 = mpc(0)
        V2 = mpc(0)
    for t in state.terms:
        n = t.norm
        if n not in M:
            with ctx(prec):
                M[n] = inner_sum_F1(s1 * n, X, prec)
                F2memo = {n: inner_sums_F2(s2 * n, window, X, prec)}
        with ctx(prec):
            w = t.gauss / n
            V1 += w * M[n]
            V2 += w * sum((coeffs[v][t.coset] * F2memo[n][v] for v in window), mpc(0))
    return V1, V2, M


def assemble(V1, V2, x: Fraction, r: EisensteinInt, prec: int = PREC):
    """(V1 - 6 sqrt3 V2) x^(1/6) Gamma(1/6) Gamma(7/6) y1^(1/6) N(r)^(1/12)."""
    g = gamma_constants(prec)["g16g76"]
    with ctx(prec):
        y1 = y1_factor(r, prec)
        xf = _frac(x, prec)
        out = (V1 - 6 * gmpy2.sqrt(mpfr(3)) * V2) * gmpy2.root(xf, 6) * g
        return out * gmpy2.root(y1, 6) * gmpy2.root(mpfr(r.norm()), 12)


def tau(cfg: EngineConfig, gauss=None, cs: ColumnSums | None = None,
        state: SweepState | None = None, cache_dir=None):
    """tau(r, V) for one configuration; pass ``state`` to reuse a sweep."""
    if state is None:
        state = sweep(cfg, gauss)
    elif state.config.r != cfg.r or state.config.B != cfg.B:
        raise ValueError("sweep state belongs to a different (r, B)")
    if cs is None:
        cs = cached_column_sums(cfg.r, cache_dir)
    V1, V2, M = _accumulate(state, cfg.x, cs)
    state.V1, state.V2, state.M = V1, V2, M
    return assemble(V1, V2, cfg.x, cfg.r, cfg.prec)


@dataclass
class TauResult:
    config: EngineConfig
    value: object
    runtime: float
    deviation: float | None = None

    HEADER = "r,V,B,x,X,precision,tau_re_hex,tau_im_hex,tau_re,tau_im,runtime_s,max_x_deviation"

    def csv(self) -> str:
        c = self.config
        re_, im_ = self.value.real, self.value.imag
        dev = "" if self.deviation is None else f"{self.deviation:.3e}"
        return ",".join([format_elt(c.r), V_TAG, str(c.B), str(c.x), repr(c.X), str(c.prec),
                         format(re_, "a"), format(im_, "a"),
                         f"{float(re_):.16g}", f"{float(im_):.16g}",
                         f"{self.runtime:.2f}", dev])


def run_tau(cfg: EngineConfig, gauss=None, cs=None, cache_dir=None) -> TauResult:
    t0 = time.perf_counter()
    v = tau(cfg, gauss, cs, cache_dir=cache_dir)
    return TauResult(cfg, v, time.perf_counter() - t0)


def x_stability(cfg: EngineConfig, xs=X_GRID, gauss=None, cs=None, cache_dir=None):
    """tau over an x grid from one sweep; returns ({x: tau}, max pairwise deviation)."""
    state = sweep(cfg, gauss)
    if cs is None:
        cs = cached_column_sums(cfg.r, cache_dir)
    vals = {}
    for x in xs:
        c = EngineConfig(cfg.r, cfg.B, Fraction(x), cfg.X, cfg.prec, cfg.sigma)
        vals[c.x] = tau(c, cs=cs, state=state)
    dev = max((abs(complex(a) - complex(b)) for a, b in itertools.combinations(vals.values(), 2)),
              default=0.0)
    return vals, dev
