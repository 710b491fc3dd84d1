"""Exact column sums of the transition matrix T(r, s).

    T_ij(r, s) = 6^-6 (1 - W^6)(1 - V^6) eps((eta_i, -eta_j)_S)
                 * sum_h eps((h, -eta_j/eta_i)_S) G_2(z) G_3(z),
    z = -r / (h eta_i eta_j),   G_v(z) = sum_y eps((z, y)_v) Gamma_v(|.|^s eps((y, .)_v)),

with h over the 216 S-unit classes, eta over V, y over K_v^*/K_v^*6, and the
formal variables W = 4^-s, V = 3^-s.  Local Tate factors have coefficients in
Q(zeta_72), so the column sums sum_i T_ij are Laurent polynomials in W, V
over that field.

The bulk contraction is done modulo primes l = 1 mod 72 at all 24 embeddings
of zeta_72, the power-basis coefficients recovered by a Vandermonde solve,
and the integers reassembled by CRT.
"""
from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr
from sympy import isprime, primitive_root

from .cosets import _add_table, coset_table
from .eisenstein import EisensteinInt, ResidueRing, valuation
from .localfields import (CLASS_INDEX, CLASSES, DIFFERENT, RESIDUE_Q,
                          UNIFORMIZER, LocalClass, conductor, local_class_index,
                          pairing_table)
from .specialfn import ctx

DEG = 24                       # phi(72)
ORDER = 72
UNIT_EXPS = tuple(e for e in range(ORDER) if math.gcd(e, ORDER) == 1)
HEADER = "theta6-tmat v1"
LOCAL_SIGN = 1                 # local additive characters exp(+2 pi i {Tr x}_v)


# ---------------------------------------------------------------- Q(zeta_72)

def _reduce(coeffs) -> list:
    """Reduce a coefficient list modulo Phi_72 = x^24 - x^12 + 1."""
    c = list(coeffs)
    for n in range(len(c) - 1, DEG - 1, -1):
        a = c[n]
        if a:
            c[n] = 0
            c[n - 12] += a          # x^n = x^(n-12) - x^(n-24)
            c[n - 24] -= a
    c = c[:DEG]
    return c + [0] * (DEG - len(c))


@dataclass(frozen=True)
class CycloExact:
    """Element of Q(zeta_72) in the power basis 1, z, ..., z^23."""
    coeffs: tuple

    @classmethod
    def zero(cls) -> "CycloExact":
        return cls((Fraction(0),) * DEG)

    @classmethod
    def rational(cls, q) -> "CycloExact":
        return cls((Fraction(q),) + (Fraction(0),) * (DEG - 1))

    @classmethod
    def root(cls, j: int) -> "CycloExact":
        j %= ORDER
        c = [Fraction(0)] * (j + 1)
        c[j] = Fraction(1)
        return cls(tuple(_reduce(c)))

    def __add__(self, o: "CycloExact") -> "CycloExact":
        return CycloExact(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o: "CycloExact") -> "CycloExact":
        return CycloExact(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self) -> "CycloExact":
        return CycloExact(tuple(-a for a in self.coeffs))

    def __mul__(self, o) -> "CycloExact":
        if not isinstance(o, CycloExact):
            return CycloExact(tuple(a * o for a in self.coeffs))
        prod = [Fraction(0)] * (2 * DEG - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycloExact(tuple(_reduce(prod)))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_complex(self, prec: int | None = None):
        if prec is None:
            z = cmath.exp(2j * math.pi / ORDER)
            return sum(complex(a) * z ** i for i, a in enumerate(self.coeffs) if a)
        with ctx(prec):
            ang = 2 * gmpy2.const_pi() / ORDER
            tot = mpc(0)
            for i, a in enumerate(self.coeffs):
                if a:
                    tot += mpfr(a.numerator) / a.denominator * mpc(gmpy2.cos(i * ang), gmpy2.sin(i * ang))
            return tot

    def in_Q_zeta36(self) -> bool:
        # Phi_72(x) = Phi_36(x^2): Q(zeta_36) is spanned by the even powers
        return not any(self.coeffs[1::2])

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.coeffs)


SQRT3 = CycloExact.root(6) + CycloExact.root(-6)      # zeta_12 + zeta_12^-1


def _q_power_half(place: int, k: int) -> CycloExact:
    """q_v^(-k/2) exactly."""
    q = RESIDUE_Q[place]
    if place == 2:
        return CycloExact.rational(Fraction(1, 2 ** k))
    if k % 2 == 0:
        return CycloExact.rational(Fraction(1, 3 ** (k // 2)))
    return SQRT3 * Fraction(1, 3 ** ((k + 1) // 2))


# ---------------------------------------------------------------- local factors

def local_psi_exponent(x: EisensteinInt, place: int, m: int) -> int:
    """j with psi_v(x / pi_v^m) = zeta_72^j, psi_v(t) = exp(+2 pi i {Tr t}_v)."""
    if place == 2:
        t = Fraction(x.trace(), 2 ** m)
    else:
        # 1/sqrt(-3)^m = (-1)^m sqrt(-3)^m / 3^m
        t = Fraction((x * UNIFORMIZER[3] ** m).trace() * (-1) ** m, 3 ** m)
    e = LOCAL_SIGN * t * ORDER
    if e.denominator != 1:
        raise ArithmeticError(f"local character value outside mu_72 at {place}")
    return int(e) % ORDER


def _unit_reps(place: int, f: int) -> list[EisensteinInt]:
    pi = UNIFORMIZER[place]
    return [x for x in ResidueRing(pi ** f) if not x.is_zero() and valuation(x, pi)[0] == 0]


def root_number(ycls, place: int, f: int | None = None) -> CycloExact:
    """W(chi) = |pi|^(f/2) sum_{x in U/(1+p^f)} chi(x) psi(x/pi^(d+f)), chi = eps((y, .)_v)."""
    ycls = tuple(ycls)
    if f is None:
        f = conductor(LocalClass(place, ycls), place)
    if f == 0:
        raise ValueError("root number of an unramified character")
    P = pairing_table(place)
    yi = _class_index(place, ycls)
    d = DIFFERENT[place]
    tot = [0] * ORDER
    for x in _unit_reps(place, f):
        j = 12 * P[yi, local_class_index(x, place)] + local_psi_exponent(x, place, d + f)
        tot[j % ORDER] += 1
    s = CycloExact(tuple(_reduce([Fraction(c) for c in tot])))
    return s * _q_power_half(place, f)


def _class_index(place, exps) -> int:
    return CLASS_INDEX[place][tuple(exps)]


def tate_gamma(y, place: int) -> dict[int, CycloExact]:
    """(1 - X^6) Gamma_v(chi) for chi = |.|^s eps((y, .)_v), X = q_v^-s, as a
    Laurent polynomial {exponent of X: coefficient}.

    unramified:  chi(pi)^-d (1 - |pi| chi(pi)^-1) / (1 - chi(pi)) |pi|^(d/2)
    ramified:    chi(pi)^(-d-f) |pi|^((d+f)/2) W(chi)
    with chi(pi) = X eps((y, pi)_v)."""
    ycls = tuple(y.exponents) if hasattr(y, "exponents") else tuple(y)
    return dict(_tate_gamma(place, ycls))


@lru_cache(maxsize=None)
def _tate_gamma(place: int, ycls: tuple) -> tuple:
    d, q = DIFFERENT[place], RESIDUE_Q[place]
    P = pairing_table(place)
    yi = _class_index(place, ycls)
    k = int(P[yi, _class_index(place, (1, 0, 0, 0))])     # eps((y, pi)_v) = w^k
    f = conductor(LocalClass(place, ycls), place)
    out: dict[int, CycloExact] = {}

    def add(e, c):
        out[e] = out.get(e, CycloExact.zero()) + c

    if f == 0:
        # (1 - X^6)/(1 - uX) = sum_{i<6} (uX)^i, u = w^k
        half = _q_power_half(place, d)
        for i in range(6):
            base = CycloExact.root(12 * k * (i - d)) * half
            add(i - d, base)                                       # 1 * (uX)^(i-d)
            add(i - d - 1, -(CycloExact.root(12 * k * (i - d - 1)) * half * Fraction(1, q)))
    else:
        W = root_number(ycls, place, f)
        c = CycloExact.root(-12 * k * (d + f)) * _q_power_half(place, d + f) * W
        add(-d - f, c)
        add(6 - d - f, -c)
    return tuple(sorted((e, c) for e, c in out.items() if not c.is_zero()))


def tate_gamma_value(y, place: int, s: complex) -> complex:
    """Gamma_v(chi) at a complex s in floating point, straight from the formulas."""
    ycls = tuple(y.exponents) if hasattr(y, "exponents") else tuple(y)
    d, q = DIFFERENT[place], RESIDUE_Q[place]
    P = pairing_table(place)
    k = int(P[_class_index(place, ycls), _class_index(place, (1, 0, 0, 0))])
    chipi = q ** (-s) * cmath.exp(2j * math.pi * k / 6)
    f = conductor(LocalClass(place, ycls), place)
    if f == 0:
        return chipi ** (-d) * (1 - chipi ** -1 / q) / (1 - chipi) * q ** (-d / 2)
    return chipi ** (-d - f) * q ** (-(d + f) / 2) * root_number(ycls, place, f).to_complex()


# ---------------------------------------------------------------- H_v = (1 - X^6) G_v

@lru_cache(maxsize=None)
def _rotation() -> np.ndarray:
    """Matrix of multiplication by zeta_6 = zeta_72^12 on the power basis."""
    R = np.zeros((DEG, DEG), dtype=np.int64)
    for i in range(DEG):
        R[:, i] = _reduce([0] * (i + 12) + [1])
    return R


@lru_cache(maxsize=None)
def local_H(place: int) -> tuple[np.ndarray, int, int]:
    """Integer array H[z, e, c] and (denominator D, lowest exponent e0) with
    (1 - X^6) G_v(z) = (1/D) sum_e X^(e0+e) sum_c H[z,e,c] zeta_72^c."""
    classes = CLASSES[place]
    polys = [_tate_gamma(place, c) for c in classes]
    exps = [e for p in polys for e, _ in p]
    e0, e1 = min(exps), max(exps)
    D = 1
    for p in polys:
        for _, c in p:
            for a in c.coeffs:
                D = math.lcm(D, a.denominator)
    ny = len(classes)
    Gint = np.zeros((ny, e1 - e0 + 1, DEG), dtype=np.int64)
    for y, p in enumerate(polys):
        for e, c in p:
            Gint[y, e - e0] = [int(a * D) for a in c.coeffs]
    P = pairing_table(place)                 # P[z, y] = (z, y)_v
    flat = Gint.reshape(ny, -1)
    R = _rotation()
    Ra = np.eye(DEG, dtype=np.int64)
    H = np.zeros((ny, e1 - e0 + 1, DEG), dtype=np.int64)
    for a in range(6):
        S = ((P == a).astype(np.int64) @ flat).reshape(ny, e1 - e0 + 1, DEG)
        H += S @ Ra.T
        Ra = R @ Ra
    return H, D, e0


# ---------------------------------------------------------------- coset bookkeeping

@lru_cache(maxsize=None)
def _structure():
    """Arrays describing V, the S-unit classes and the transversal map."""
    t = coset_table()
    add2, add3 = _add_table(2), _add_table(3)
    n2, n3 = len(CLASSES[2]), len(CLASSES[3])
    e2 = np.array([a for a, _ in t.reps])
    e3 = np.array([b for _, b in t.reps])
    h2 = np.array([a for a, _ in t.sunits])
    h3 = np.array([b for _, b in t.sunits])
    # every class is uniquely h + eta_i
    I_of = np.full((n2, n3), -1, dtype=np.int64)
    H_of = np.full((n2, n3), -1, dtype=np.int64)
    s2 = add2[h2[:, None], e2[None, :]]
    s3 = add3[h3[:, None], e3[None, :]]
    I_of[s2, s3] = np.broadcast_to(np.arange(216)[None, :], s2.shape)
    H_of[s2, s3] = np.broadcast_to(np.arange(216)[:, None], s2.shape)
    assert (I_of >= 0).all()
    neg2 = np.array([(-LocalClass(2, c)).index for c in CLASSES[2]])
    neg3 = np.array([(-LocalClass(3, c)).index for c in CLASSES[3]])
    m2 = local_class_index(EisensteinInt(-1, 0), 2)
    m3 = local_class_index(EisensteinInt(-1, 0), 3)
    return dict(e2=e2, e3=e3, h2=h2, h3=h3, I_of=I_of, H_of=H_of, add2=add2, add3=add3,
                neg2=neg2, neg3=neg3, m2=m2, m3=m3)


def r_class(r: EisensteinInt) -> tuple[int, int]:
    """Class of r in K_S^*/K_S^*6 as (index at 2, index at 3); the column sums
    depend on r only through it."""
    return local_class_index(r, 2), local_class_index(r, 3)


def phase_matrix(rcls: tuple[int, int], j: int) -> tuple[np.ndarray, np.ndarray]:
    """For column j: A[z2, z3] = exponent of the sixth root multiplying
    G_2(z2) G_3(z3), and the row index i each z belongs to."""
    st = _structure()
    add2, add3, neg2, neg3 = st["add2"], st["add3"], st["neg2"], st["neg3"]
    P2, P3 = pairing_table(2), pairing_table(3)
    n2, n3 = len(CLASSES[2]), len(CLASSES[3])
    ej2, ej3 = st["e2"][j], st["e3"][j]
    # z = -r/(h eta_i eta_j)  <=>  h eta_i = -r / (eta_j z)
    c2 = add2[add2[st["m2"], rcls[0]], neg2[ej2]]
    c3 = add3[add3[st["m3"], rcls[1]], neg3[ej3]]
    z2 = np.arange(n2)[:, None]
    z3 = np.arange(n3)[None, :]
    s2 = np.broadcast_to(add2[c2, neg2[z2]], (n2, n3))
    s3 = np.broadcast_to(add3[c3, neg3[z3]], (n2, n3))
    I = st["I_of"][s2, s3]
    H = st["H_of"][s2, s3]
    ei2, ei3 = st["e2"][I], st["e3"][I]
    mj2, mj3 = add2[st["m2"], ej2], add3[st["m3"], ej3]
    # (eta_i, -eta_j)_S and (h, -eta_j/eta_i)_S
    a1 = P2[ei2, mj2] + P3[ei3, mj3]
    a2 = P2[st["h2"][H], add2[mj2, neg2[ei2]]] + P3[st["h3"][H], add3[mj3, neg3[ei3]]]
    return (a1 + a2) % 6, I


# ---------------------------------------------------------------- modular machinery

def _primes_1_mod_72(limit: int = 1 << 20):
    p = limit - (limit % ORDER) + 1
    while p > ORDER:
        p -= ORDER
        if isprime(p):
            yield p


class _ModField:
    def __init__(self, ell: int):
        self.ell = ell
        g = pow(int(primitive_root(ell)), (ell - 1) // ORDER, ell)
        self.zeta = g
        self.pow = np.array([pow(g, k, ell) for k in range(ORDER)], dtype=np.int64)
        # embedding e sends zeta_72 -> g^e
        self.emb = np.array([[self.pow[(e * c) % ORDER] for c in range(DEG)] for e in UNIT_EXPS],
                            dtype=np.int64)
        self.vinv = _inv_mod_matrix(self.emb, ell)

    def embed(self, ints: np.ndarray) -> np.ndarray:
        """[..., 24] integer coefficient arrays -> [24 embeddings, ...] mod ell."""
        x = np.mod(ints, self.ell)
        return np.moveaxis(_matmul_mod(x, self.emb.T, self.ell), -1, 0)

    def coeffs(self, vals: np.ndarray) -> np.ndarray:
        """Inverse of embed along axis 0."""
        v = np.moveaxis(vals, 0, -1)
        return _matmul_mod(v, self.vinv.T, self.ell)


def _matmul_mod(a: np.ndarray, b: np.ndarray, ell: int) -> np.ndarray:
    # float64 matmul is exact while inner sums stay below 2^53
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[-1] * float(ell) ** 2 >= 2.0 ** 53:
        raise OverflowError("modulus too large for exact float matmul")
    return np.mod(a @ b, ell).astype(np.int64)


def _inv_mod_matrix(M: np.ndarray, ell: int) -> np.ndarray:
    n = M.shape[0]
    A = [[int(M[i, j]) % ell for j in range(n)] + [int(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c])
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], -1, ell)
        A[c] = [x * inv % ell for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % ell for x, y in zip(A[r], A[c])]
    return np.array([row[n:] for row in A], dtype=np.int64)


def _crt_pair(r1: np.ndarray, m1: int, r2: np.ndarray, m2: int):
    inv = pow(m1, -1, m2)
    r1o = r1.astype(object)
    t = ((r2.astype(object) - r1o) * inv) % m2
    return r1o + m1 * t, m1 * m2


def _symmetric(x, m):
    h = m // 2
    return np.where(x > h, x - m, x)


# ---------------------------------------------------------------- column sums

@dataclass
class ColumnSums:
    """sum_i T_ij(r, s) = sum_{(w1,w2)} c[j, w1, w2] W^w1 V^w2, W = 4^-s, V = 3^-s,
    with c = numer / denominator in the power basis of Q(zeta_72)."""
    rcls: tuple[int, int]
    denominator: int
    w1: np.ndarray                 # W exponents (axis 1)
    w2: np.ndarray                 # V exponents (axis 2)
    numer: np.ndarray              # object array [216, len(w1), len(w2), 24]

    def entries(self):
        """(j, w1, w2, CycloExact) for the nonzero coefficients."""
        for j in range(self.numer.shape[0]):
            for a, p in enumerate(self.w1):
                for b, q in enumerate(self.w2):
                    v = self.numer[j, a, b]
                    if any(v):
                        yield j, int(p), int(q), CycloExact(
                            tuple(Fraction(int(x), self.denominator) for x in v))

    def support(self) -> set[tuple[int, int]]:
        return {(w1, w2) for _, w1, w2, _ in self.entries()}

    def numeric(self, prec: int | None = None) -> dict:
        """{(w1, w2): array over j} of embedded coefficients."""
        out = {}
        for j, p, q, c in self.entries():
            if (p, q) not in out:
                out[(p, q)] = [0] * self.numer.shape[0]
            out[(p, q)][j] = c.to_complex(prec)
        return out

    def evaluate(self, j: int, s: complex) -> complex:
        tot = 0j
        for jj, p, q, c in self.entries():
            if jj == j:
                tot += c.to_complex() * 4.0 ** (-s * p) * 3.0 ** (-s * q)
        return tot

    def save(self, path) -> None:
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(HEADER + "\n")
            fh.write(f"rclass {self.rcls[0]} {self.rcls[1]} denominator {self.denominator}\n")
            for j, a, b in zip(*np.nonzero(np.any(self.numer != 0, axis=-1))):
                row = " ".join(str(int(x)) for x in self.numer[j, a, b])
                fh.write(f"{j} {int(self.w1[a])} {int(self.w2[b])} {row}\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "ColumnSums":
        with open(path, encoding="utf-8") as fh:
            if fh.readline().strip() != HEADER:
                raise ValueError("not a transition-matrix cache")
            tag = fh.readline().split()
            if tag[0] != "rclass" or tag[3] != "denominator":
                raise ValueError("malformed r-class line")
            rcls, den = (int(tag[1]), int(tag[2])), int(tag[4])
            rows = [line.split() for line in fh if line.strip()]
        w1 = sorted({int(r[1]) for r in rows})
        w2 = sorted({int(r[2]) for r in rows})
        numer = np.zeros((216, len(w1), len(w2), DEG), dtype=object)
        for r in rows:
            numer[int(r[0]), w1.index(int(r[1])), w2.index(int(r[2]))] = [int(x) for x in r[3:]]
        return cls(rcls, den, np.array(w1), np.array(w2), numer)


def _colsums_mod(rcls, F: _ModField, H2e, H3e, phases) -> np.ndarray:
    """[216, E2, E3, 24 embeddings] of D2 D3 sum_i (6^6 T_ij) mod ell."""
    ell = F.ell
    out = np.zeros((216, H2e.shape[2], H3e.shape[2], DEG), dtype=np.int64)
    for j in range(216):
        A = phases[j]
        for k, e in enumerate(UNIT_EXPS):
            M = F.pow[(12 * e * A) % ORDER]
            L = _matmul_mod(H2e[k].T, M, ell)               # [E2, n3]
            out[j, :, :, k] = _matmul_mod(L, H3e[k], ell)   # [E2, E3]
    return out


def column_sums(r: EisensteinInt | tuple, max_primes: int = 40) -> ColumnSums:
    """Exact column sums for the class of r (an element or an r_class pair)."""
    rcls = tuple(r) if isinstance(r, tuple) else r_class(r)
    H2, D2, e2 = local_H(2)
    H3, D3, e3 = local_H(3)
    phases = [phase_matrix(rcls, j)[0] for j in range(216)]
    denom = 6 ** 6 * D2 * D3
    acc, mod, prev = None, 1, None
    for n, ell in enumerate(_primes_1_mod_72()):
        F = _ModField(ell)
        H2e = F.embed(H2)                   # [24, n2, E2]
        H3e = F.embed(H3)
        vals = _colsums_mod(rcls, F, H2e, H3e, phases)
        coef = F.coeffs(np.moveaxis(vals, -1, 0))          # [216, E2, E3, 24]
        if acc is None:
            acc, mod = coef.astype(object), ell
        else:
            acc, mod = _crt_pair(acc, mod, coef, ell)
        cur = _symmetric(acc % mod, mod)
        if prev is not None and np.array_equal(cur, prev):
            break
        prev = cur
        if n >= max_primes:
            raise RuntimeError("CRT did not stabilise")
    return _trim(ColumnSums(rcls, denom, np.arange(e2, e2 + H2.shape[1]),
                            np.arange(e3, e3 + H3.shape[1]), cur))


def _trim(cs: ColumnSums) -> ColumnSums:
    nz = np.any(cs.numer != 0, axis=(0, 3))
    rows = np.nonzero(nz.any(axis=1))[0]
    cols = np.nonzero(nz.any(axis=0))[0]
    numer = cs.numer[:, rows][:, :, cols]
    g = 0
    for x in numer.flat:
        g = math.gcd(g, int(x))
    g = math.gcd(g, cs.denominator) or 1
    return ColumnSums(cs.rcls, cs.denominator // g, cs.w1[rows], cs.w2[cols], numer // g)


# ---------------------------------------------------------------- checks

WINDOW = (range(-5, 5), range(-3, 6))


def check_support(cs: ColumnSums) -> bool:
    """Exponents inside {-5..4} x {-3..5}, read as (V-exponent, W-exponent)."""
    return all(w2 in WINDOW[0] and w1 in WINDOW[1] for w1, w2 in cs.support())


def check_integrality(cs: ColumnSums, scale: int = 6 ** 6) -> bool:
    """scale * c_jw lies in Z[zeta_36] for every coefficient."""
    for _, _, _, c in cs.entries():
        c = c * scale
        if not (c.in_Q_zeta36() and c.is_integral()):
            return False
    return True


def transition_at(rcls, F: _ModField, X2: int, X3: int, emb: int = 0) -> np.ndarray:
    """6^6 D2 D3 T(r, s) mod ell at W = X2, V = X3 under one embedding."""
    ell = F.ell
    H2, _, e2 = local_H(2)
    H3, _, e3 = local_H(3)
    h2 = F.embed(H2)[emb]
    h3 = F.embed(H3)[emb]
    p2 = np.array([pow(X2, e, ell) for e in range(e2, e2 + H2.shape[1])], dtype=np.int64)
    p3 = np.array([pow(X3, e, ell) for e in range(e3, e3 + H3.shape[1])], dtype=np.int64)
    v2 = _matmul_mod(h2, p2[:, None], ell)[:, 0]
    v3 = _matmul_mod(h3, p3[:, None], ell)[:, 0]
    G = (v2[:, None] * v3[None, :]) % ell               # [n2, n3]
    T = np.zeros((216, 216), dtype=np.int64)
    e = UNIT_EXPS[emb]
    for j in range(216):
        A, I = phase_matrix(rcls, j)
        w = (G * F.pow[(12 * e * A) % ORDER]) % ell
        T[:, j] = np.mod(np.bincount(I.ravel(), weights=w.ravel().astype(np.float64), minlength=216),
                         ell).astype(np.int64)
    return T


def check_diagonal(r, trials: int = 2, seed: int = 0) -> bool:
    """T(r, s) T(r, -s) is diagonal: checked exactly modulo primes at random
    (W, V) and random embeddings (Schwartz-Zippel)."""
    rcls = tuple(r) if isinstance(r, tuple) else r_class(r)
    rng = np.random.default_rng(seed)
    primes = _primes_1_mod_72()
    for _ in range(trials):
        F = _ModField(next(primes))
        ell = F.ell
        X2, X3 = (int(v) for v in rng.integers(2, ell - 1, size=2))
        k = int(rng.integers(0, DEG))
        Tp = transition_at(rcls, F, X2, X3, k)
        Tm = transition_at(rcls, F, pow(X2, -1, ell), pow(X3, -1, ell), k)
        Pm = _matmul_mod(Tp, Tm, ell)
        off = Pm - np.diag(np.diag(Pm))
        if off.any():
            return False
    return True


# ---------------------------------------------------------------- cache

def tmat_cache_path(cache_dir, rcls: tuple[int, int]) -> str:
    return os.path.join(os.fspath(cache_dir), f"tmat_{rcls[0]}_{rcls[1]}.txt")


def cached_column_sums(r: EisensteinInt | tuple, cache_dir=None) -> ColumnSums:
    """column_sums keyed by the class of r, stored under cache_dir if given."""
    rcls = tuple(r) if isinstance(r, tuple) else r_class(r)
    if cache_dir is None:
        return _column_sums_memo(rcls)
    path = tmat_cache_path(cache_dir, rcls)
    if os.path.exists(path):
        cs = ColumnSums.load(path)
        if cs.rcls != rcls:
            raise ValueError(f"{path} holds class {cs.rcls}, expected {rcls}")
        return cs
    cs = _column_sums_memo(rcls)
    os.makedirs(os.fspath(cache_dir), exist_ok=True)
    cs.save(path)
    return cs


@lru_cache(maxsize=32)
def _column_sums_memo(rcls: tuple[int, int]) -> ColumnSums:
    return column_sums(rcls)
