"""The coset system K_S^*/(K_S^*6 O_S^*) and the representative set V.

A class of K_S^*/K_S^*6 is a pair (class at 2, class at 3), 144 * 324 = 46656
in total.  The image of O_S^* = <w, 2, sqrt(-3)> has order 216, leaving 216
cosets.  Each coset contains exactly one class with
alpha_1 = beta_1 = beta_2 = 0 and alpha_3 = alpha_2 mod 2, and these are the
classes of the elements x = y mod 12 with y in the list below; that class is
used as the canonical representative.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .eisenstein import SQRT_M3, UNITS, W, EisensteinInt
from .localfields import (CLASS_INDEX, CLASSES, ORDERS, decompose_local,
                          hilbert_S, local_class_index)

V_RESIDUES = ((1, 0), (5, 0), (4, 3), (8, 3), (1, 6), (5, 6),
              (1, 9), (2, 9), (5, 9), (7, 9), (10, 9), (11, 9))
_VSET = frozenset(V_RESIDUES)


def _coprime6(x: EisensteinInt) -> bool:
    n = x.norm()
    return n % 2 != 0 and n % 3 != 0


def in_V(x: EisensteinInt) -> bool:
    if not _coprime6(x):
        raise ValueError(f"{x} is not coprime to 6")
    return (x.a % 12, x.b % 12) in _VSET


class Normalized(NamedTuple):
    k: int                  # 1..6, with w^6 = 1 as the identity
    element: EisensteinInt  # w^k * a
    j: int                  # coset index of the associate


def normalize_to_V(a: EisensteinInt) -> Normalized:
    """Smallest k in 1..6 with w^k a in V."""
    if not _coprime6(a):
        raise ValueError(f"{a} is not coprime to 6")
    for k in range(1, 7):
        y = UNITS[k % 6] * a
        if (y.a % 12, y.b % 12) in _VSET:
            return Normalized(k, y, coset_index(y))
    raise RuntimeError(f"no associate of {a} lies in V")


def _v_class(c2: tuple, c3: tuple) -> bool:
    return c2[0] == 0 and c2[2] % 2 == c2[1] and c3[0] == 0 and c3[1] == 0


class CosetTable:
    """Orbits of the 46656 global classes under O_S^*."""

    def __init__(self):
        gens = [UNITS[1], EisensteinInt(2, 0), SQRT_M3]
        g2 = [np.array(decompose_local(g, 2).exponents) for g in gens]
        g3 = [np.array(decompose_local(g, 3).exponents) for g in gens]
        o2, o3 = np.array(ORDERS[2]), np.array(ORDERS[3])
        # the 216 S-unit classes w^a 2^b sqrt(-3)^c
        self.sunits = []
        self.sunit_elements = []
        for a, b, c in itertools.product(range(6), repeat=3):
            e2 = tuple(int(v) for v in (a * g2[0] + b * g2[1] + c * g2[2]) % o2)
            e3 = tuple(int(v) for v in (a * g3[0] + b * g3[1] + c * g3[2]) % o3)
            self.sunits.append((CLASS_INDEX[2][e2], CLASS_INDEX[3][e3]))
            self.sunit_elements.append((a, b, c))
        if len(set(self.sunits)) != 216:
            raise RuntimeError("S-units do not give 216 distinct classes")
        reps = [(CLASS_INDEX[2][c2], CLASS_INDEX[3][c3])
                for c2 in CLASSES[2] for c3 in CLASSES[3] if _v_class(c2, c3)]
        reps.sort()
        if len(reps) != 216:
            raise RuntimeError(f"expected 216 cosets, found {len(reps)}")
        self.reps = reps
        self.lookup = np.full((len(CLASSES[2]), len(CLASSES[3])), -1, dtype=np.int64)
        add2, add3 = _add_table(2), _add_table(3)
        for j, (i2, i3) in enumerate(reps):
            for (u2, u3) in self.sunits:
                a, b = add2[i2, u2], add3[i3, u3]
                if self.lookup[a, b] != -1:
                    raise RuntimeError("V is not a transversal of the cosets")
                self.lookup[a, b] = j
        if (self.lookup < 0).any():
            raise RuntimeError("coset orbits do not cover all classes")
        self.identity = reps.index((0, 0))

    def index_of_classes(self, i2: int, i3: int) -> int:
        return int(self.lookup[i2, i3])

    def __len__(self) -> int:
        return len(self.reps)


@lru_cache(maxsize=None)
def _add_table(place: int) -> np.ndarray:
    C = np.array(CLASSES[place], dtype=np.int64)
    o = np.array(ORDERS[place])
    S = (C[:, None, :] + C[None, :, :]) % o
    # mixed-radix index
    radix = np.array([int(np.prod(o[i + 1:])) for i in range(4)])
    return S @ radix


@lru_cache(maxsize=None)
def coset_table() -> CosetTable:
    return CosetTable()


def build_coset_table() -> CosetTable:
    return coset_table()


def coset_index(x: EisensteinInt) -> int:
    """Index 0..215 of the coset of x."""
    return coset_table().index_of_classes(local_class_index(x, 2), local_class_index(x, 3))


def v_property_check() -> bool:
    """For all v, w in V: (v, w)_S = 1 or (v, -w)_S = 1, over all 216 classes."""
    t = coset_table()
    from .localfields import pairing_table
    P2, P3 = pairing_table(2), pairing_table(3)
    m2, m3 = local_class_index(EisensteinInt(-1, 0), 2), local_class_index(EisensteinInt(-1, 0), 3)
    add2, add3 = _add_table(2), _add_table(3)
    for (i2, i3) in t.reps:
        for (k2, k3) in t.reps:
            plain = (P2[i2, k2] + P3[i3, k3]) % 6
            neg = (P2[i2, add2[m2, k2]] + P3[i3, add3[m3, k3]]) % 6
            if plain and neg:
                return False
    return True


def v_property_holds_for(elements) -> bool:
    """The same property checked directly on a list of elements."""
    for v in elements:
        for w in elements:
            if hilbert_S(v, w) and hilbert_S(v, -w):
                return False
    return True
