"""Local data at the places above 2 and 3.

K_2 = Q_2(w) is unramified (uniformizer 2, residue field F_4) and
K_3 = Q_3(w) is totally ramified (uniformizer sqrt(-3) = 2w - 1).
K_v^*/K_v^*6 has order 144 resp. 324; classes are exponent vectors over the
fixed bases below, and the Hilbert symbol is the bilinear form given by the
matrices A and B.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .eisenstein import (ONE, SQRT_M3, UNITS, W, EisensteinInt, ResidueRing,
                         divmod_e, valuation)

PLACES = (2, 3)

UNIFORMIZER = {2: EisensteinInt(2, 0), 3: SQRT_M3}
RESIDUE_Q = {2: 4, 3: 3}            # size of the residue field
DIFFERENT = {2: 0, 3: 1}            # local different exponent d_v
RAMIFICATION = {2: 1, 3: 2}         # v(6) = e, Hensel modulus pi^(2e+1)

_P3 = SQRT_M3
GENERATORS = {
    2: (EisensteinInt(2, 0), EisensteinInt(3, 2), EisensteinInt(5, 3), EisensteinInt(1, 2)),
    3: (_P3, (ONE + _P3) ** 2, EisensteinInt(2, 0), ONE + _P3 ** 3),
}
ORDERS = {2: (6, 2, 6, 2), 3: (6, 3, 6, 3)}

HILBERT_MATRIX = {
    2: np.array([[0, 3, 4, 0], [3, 3, 3, 0], [2, 3, 0, 3], [0, 0, 3, 3]], dtype=np.int64),
    3: np.array([[3, 0, 3, 2], [0, 0, 4, 0], [3, 2, 0, 0], [4, 0, 0, 0]], dtype=np.int64),
}


@dataclass(frozen=True, slots=True)
class LocalClass:
    place: int
    exponents: tuple[int, int, int, int]

    def __add__(self, o: "LocalClass") -> "LocalClass":
        return LocalClass(self.place, tuple((x + y) % m for x, y, m in
                                            zip(self.exponents, o.exponents, ORDERS[self.place])))

    def __neg__(self) -> "LocalClass":
        return LocalClass(self.place, tuple(-x % m for x, m in zip(self.exponents, ORDERS[self.place])))

    def __mul__(self, k: int) -> "LocalClass":
        return LocalClass(self.place, tuple(x * k % m for x, m in zip(self.exponents, ORDERS[self.place])))

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    @property
    def index(self) -> int:
        return CLASS_INDEX[self.place][self.exponents]


def all_classes(place: int) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(o) for o in ORDERS[place])))


CLASSES = {v: all_classes(v) for v in PLACES}
CLASS_INDEX = {v: {c: i for i, c in enumerate(CLASSES[v])} for v in PLACES}


def hensel_modulus(place: int) -> EisensteinInt:
    return UNIFORMIZER[place] ** (2 * RAMIFICATION[place] + 1)


class _UnitTable:
    """Unit residues modulo pi^(2e+1) mapped to exponent vectors over the unit
    generators.  Built by running over all exponent vectors (the bounded
    exhaustive search) and multiplying by all sixth powers."""

    def __init__(self, place: int):
        self.place = place
        self.pi = UNIFORMIZER[place]
        self.ring = ResidueRing(hensel_modulus(place))
        units = [x for x in self.ring if not divmod_e(x, self.pi)[1].is_zero()]
        red = self.ring.reduce
        self.sixth = frozenset(red(u ** 6) for u in units)
        gens = GENERATORS[place][1:]
        table: dict[tuple[int, int], tuple[int, ...]] = {}
        for e in itertools.product(*(range(o) for o in ORDERS[place][1:])):
            g = ONE
            for gi, ei in zip(gens, e):
                g = g * gi ** ei
            for s in self.sixth:
                r = red(g * s)
                key = (r.a, r.b)
                if key in table and table[key] != e:
                    raise RuntimeError(f"inconsistent local basis at {place}")
                table[key] = e
        if len(table) != len(units):
            raise RuntimeError(f"local basis at {place} does not generate U/U^6")
        self.table = table

    def lookup(self, u: EisensteinInt) -> tuple[int, ...]:
        r = self.ring.reduce(u)
        try:
            return self.table[(r.a, r.b)]
        except KeyError:
            raise RuntimeError(f"no class found for unit {u} at {self.place}") from None


@lru_cache(maxsize=None)
def _unit_table(place: int) -> _UnitTable:
    return _UnitTable(place)


def _split(x: EisensteinInt, place: int) -> tuple[int, EisensteinInt]:
    if x.is_zero():
        raise ValueError("zero has no local class")
    return valuation(x, UNIFORMIZER[place])


@lru_cache(maxsize=1 << 18)
def _decompose(a: int, b: int, place: int) -> tuple[int, ...]:
    k, u = _split(EisensteinInt(a, b), place)
    return (k % 6,) + _unit_table(place).lookup(u)


def decompose_local(x: EisensteinInt, place: int) -> LocalClass:
    """Exponent vector e with x * prod gen_i^(-e_i) in K_v^*6."""
    return LocalClass(place, _decompose(x.a, x.b, place))


def local_class_index(x: EisensteinInt, place: int) -> int:
    return CLASS_INDEX[place][_decompose(x.a, x.b, place)]


def is_sixth_power_local(x: EisensteinInt, place: int) -> bool:
    k, u = _split(x, place)
    if k % 6:
        return False
    t = _unit_table(place)
    return t.ring.reduce(u) in t.sixth


def pairing(e, f, place: int) -> int:
    """e^T M f mod 6 for exponent vectors."""
    M = HILBERT_MATRIX[place]
    return int(np.asarray(e) @ M @ np.asarray(f)) % 6


def hilbert_local(x: EisensteinInt, y: EisensteinInt, place: int) -> int:
    """(x, y)_v as the exponent j of w^j."""
    return pairing(_decompose(x.a, x.b, place), _decompose(y.a, y.b, place), place)


def hilbert_S(x: EisensteinInt, y: EisensteinInt) -> int:
    """(x, y)_S; the complex place contributes nothing."""
    return (hilbert_local(x, y, 2) + hilbert_local(x, y, 3)) % 6


@lru_cache(maxsize=None)
def pairing_table(place: int) -> np.ndarray:
    """P[i, j] = exponent of (class_i, class_j)_v."""
    C = np.array(CLASSES[place], dtype=np.int64)
    return (C @ HILBERT_MATRIX[place] @ C.T) % 6


def class_of_generator_power(place: int, x: EisensteinInt) -> tuple[int, ...]:
    return _decompose(x.a, x.b, place)


# ---------------------------------------------------------------- conductors

def residue_reps(place: int) -> list[EisensteinInt]:
    """Representatives R1 of O_v / p_v."""
    return list(ResidueRing(UNIFORMIZER[place]))


def teichmuller(place: int) -> list[EisensteinInt]:
    """mu_(q-1) inside O: cube roots of unity at 2, +-1 at 3."""
    return [UNITS[0], UNITS[2], UNITS[4]] if place == 2 else [UNITS[0], UNITS[3]]


def conductor(y, place: int, max_level: int = 16) -> int:
    """Conductor of x -> (y, x)_v; 0 means unramified.

    Guess a level g, double it until eps(y, 1 + r pi^g) = 1 for all r in R1,
    then walk down while the check keeps passing.  ``y`` may be an element or
    a LocalClass."""
    ycls = y.exponents if isinstance(y, LocalClass) else _decompose(y.a, y.b, place)
    pi = UNIFORMIZER[place]
    reps = residue_reps(place)

    def trivial_at(g: int) -> bool:
        pg = pi ** g
        for r in reps:
            z = ONE + r * pg
            if pairing(ycls, _decompose(z.a, z.b, place), place):
                return False
        return True

    g = 6
    while not trivial_at(g):
        g *= 2
        if g > max_level * 4:
            raise RuntimeError("conductor search did not terminate")
    while g > 1 and trivial_at(g - 1):
        g -= 1
    if g > 1:
        return g
    if all(pairing(ycls, _decompose(t.a, t.b, place), place) == 0 for t in teichmuller(place)):
        return 0
    return 1
