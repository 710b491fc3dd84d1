"""F1, F2 and the Gamma constants, in arbitrary precision (gmpy2 mpfr/mpc).

With f(s) = 1/Gamma(1+s) the two inverse Mellin kernels are

    F1(x) = 1/(2 pi i) int Gamma(6s)/(Gamma(s) Gamma(1+s)) x^-s ds
    F2(x) = 1/(2 pi i) int Gamma(6s)/(Gamma(s) Gamma(1-s)) x^-s ds

F2 has a closed form; F1 is summed from its residue series at s = -m/6.
"""
from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

DEFAULT_PREC = 200
INNER_LIMIT = 10_000
_TABLE_START = 600


def ctx(prec: int):
    """Local gmpy2 context at the given precision (bits)."""
    if prec < 64:
        raise ValueError("precision below 64 bits")
    return gmpy2.context(precision=prec, real_prec=prec, imag_prec=prec)


def big(x, prec: int = DEFAULT_PREC):
    with ctx(prec):
        return mpfr(x)


def bigc(re, im=0, prec: int = DEFAULT_PREC):
    with ctx(prec):
        return mpc(mpfr(re), mpfr(im))


# ---------------------------------------------------------------- constants

@lru_cache(maxsize=None)
def gamma_constants(prec: int = DEFAULT_PREC) -> dict:
    """Gamma(1/6) Gamma(7/6) and 1/Gamma(-k/6)^2 for k = 1..5."""
    with ctx(prec + 32):
        g16 = gmpy2.gamma(mpfr(1) / 6)
        g76 = gmpy2.gamma(mpfr(7) / 6)
        inv = {k: 1 / gmpy2.gamma(mpfr(-k) / 6) ** 2 for k in range(1, 6)}
    with ctx(prec):
        return {"g16": +g16, "g76": +g76, "g16g76": g16 * g76,
                "inv_gamma_sq": {k: +v for k, v in inv.items()}}


class QuotientTable:
    """q_k(i) = prod_{l=1}^{i-1} (k+6l)^2 / (k+6i-1)!  for i >= 1, k = 1..5,
    together with the leading 1/(k k!), stored per precision and grown on
    demand."""

    def __init__(self, prec: int, size: int = _TABLE_START):
        self.prec = prec
        self.rows = {k: [] for k in range(1, 6)}
        self.lead = {}
        with ctx(prec):
            for k in range(1, 6):
                self.lead[k] = 1 / (mpfr(k) * gmpy2.fac(k))
        self.grow(size)

    def grow(self, size: int) -> None:
        with ctx(self.prec):
            for k in range(1, 6):
                row = self.rows[k]
                if not row:
                    row.append(1 / gmpy2.fac(k + 5))       # i = 1
                while len(row) < size:
                    i = len(row)                            # next index i+1
                    m = k + 6 * i
                    den = mpfr(1)
                    for j in range(m, m + 6):
                        den *= j
                    row.append(row[-1] * mpfr(m) * m / den)

    def __call__(self, k: int, i: int):
        if i > len(self.rows[k]):
            self.grow(max(i, 2 * len(self.rows[k])))
        return self.rows[k][i - 1]


@lru_cache(maxsize=8)
def quotient_table(prec: int) -> QuotientTable:
    return QuotientTable(prec)


# ---------------------------------------------------------------- F2

def F2(x, prec: int = DEFAULT_PREC):
    """(1/(6 pi)) exp(-sqrt(3) t/2) sin(t/2), t = x^(1/6)."""
    with ctx(prec):
        x = mpfr(x)
        if x <= 0:
            raise ValueError("F2 needs x > 0")
        t = gmpy2.root(x, 6)
        return gmpy2.exp(-gmpy2.sqrt(mpfr(3)) * t / 2) * gmpy2.sin(t / 2) / (6 * gmpy2.const_pi())


# ---------------------------------------------------------------- F1

def _log_peak(t: float) -> float:
    """Natural log of the largest summand of the F1 series at t = x^(1/6)."""
    if t <= 1:
        return 0.0
    best = 0.0
    lt = math.log(t)
    m = 1
    while True:
        if m % 6:
            v = (m * lt + 2 * math.lgamma(1 + m / 6) - math.log(m) - math.lgamma(m + 1))
            best = max(best, v)
            if m > 12 and v < best - 50:
                break
        m += 1
    return best


def F1(x, prec: int = DEFAULT_PREC):
    """Residue series for F1 at working precision prec (plus guard bits for
    the cancellation between large alternating terms)."""
    xf = float(x)
    if xf <= 0:
        raise ValueError("F1 needs x > 0")
    guard = int(_log_peak(xf ** (1 / 6)) / math.log(2)) + 16
    wp = prec + guard
    tab = quotient_table(_round_prec(wp))
    consts = gamma_constants(_round_prec(wp))["inv_gamma_sq"]
    with ctx(wp):
        eps = mpfr(2) ** (-wp)
        z = -gmpy2.root(mpfr(x), 6)
        u = z ** 6 / 36
        total = mpfr(0)
        zk = mpfr(1)
        for k in range(1, 6):
            zk *= z
            s = tab.lead[k]
            ui = mpfr(1)
            for i in range(1, INNER_LIMIT + 1):
                ui *= u
                term = ui * tab(k, i)
                s += term
                if abs(term) < eps * abs(s) or term == 0:
                    break
            else:
                raise RuntimeError(f"F1 inner series did not converge at x={xf}")
            total -= zk * consts[k] * s
    with ctx(prec):
        return +total


def _round_prec(p: int) -> int:
    # share tables between nearby precisions
    return ((p + 63) // 64) * 64
