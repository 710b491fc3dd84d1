import random

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpc, mpfr

from theta6.cosets import coset_table
from theta6.eisenstein import E, ONE, W
from theta6.localfields import (CLASS_INDEX, CLASSES, DIFFERENT, RESIDUE_Q, LocalClass,
                                conductor, pairing_table)
from theta6.specialfn import ctx
from theta6.transition import (ColumnSums, CycloExact, cached_column_sums, check_diagonal,
                               check_integrality, check_support, phase_matrix, r_class,
                               root_number, tate_gamma, tate_gamma_value, tmat_cache_path)

PREC = 128


@pytest.fixture(scope="module")
def cs1(tmat_dir):
    return cached_column_sums(ONE, tmat_dir)


def test_cyclo_arithmetic():
    z = CycloExact.root(1)
    assert (CycloExact.root(36) + CycloExact.rational(1)).is_zero()
    p = CycloExact.rational(1)
    for _ in range(72):
        p = p * z
    assert p == CycloExact.rational(1)
    assert abs(CycloExact.root(12).to_complex() - complex(0.5, 3 ** 0.5 / 2)) < 1e-15
    assert CycloExact.root(2).in_Q_zeta36() and not CycloExact.root(1).in_Q_zeta36()


def test_unramified_gamma_trivial_class():
    y = (0,) * len(CLASSES[2][0])
    assert conductor(LocalClass(2, y), 2) == 0
    for s in (0.3, 0.2 + 1.1j):
        X = 4 ** (-s)
        want = (1 - 4 ** -1 / X) / (1 - X)          # d2 = 0, |pi| = 1/4
        assert abs(tate_gamma_value(y, 2, s) - want) < 1e-12
        poly = sum(c.to_complex() * X ** e for e, c in tate_gamma(y, 2).items())
        assert abs(poly - (1 - X ** 6) * want) < 1e-12


@pytest.mark.parametrize("place", [2, 3])
def test_root_numbers_unimodular(place):
    for c in CLASSES[place]:
        f = conductor(LocalClass(place, c), place)
        if f:
            assert abs(abs(root_number(c, place, f).to_complex()) - 1) < 1e-12


@pytest.mark.parametrize("place", [2, 3])
def test_gamma_polynomial_matches_formula(place):
    rng = random.Random(place)
    q = RESIDUE_Q[place]
    for c in rng.sample(CLASSES[place], 25):
        s = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        X = q ** (-s)
        poly = sum(v.to_complex() * X ** e for e, v in tate_gamma(c, place).items())
        assert abs(poly - (1 - X ** 6) * tate_gamma_value(c, place, s)) < 1e-9


def test_support_integrality(cs1):
    assert cs1.rcls == r_class(ONE)
    assert check_support(cs1)
    assert check_integrality(cs1)
    assert cs1.support()


@pytest.mark.slow
def test_diagonal_product():
    assert check_diagonal(ONE, trials=1)


def test_cache_roundtrip_and_key(cs1, tmat_dir):
    path = tmat_cache_path(tmat_dir, cs1.rcls)
    back = ColumnSums.load(path)
    assert back.rcls == cs1.rcls and back.denominator == cs1.denominator
    assert list(back.entries()) == list(cs1.entries())
    # r u s^6 with u in O_S^*6 lands on the same entry
    for r in (W ** 6, E(5) ** 6, E(2) ** 6 * E(7, 3) ** 6, E(-1) ** 6):
        assert r_class(r) == cs1.rcls
        assert tmat_cache_path(tmat_dir, r_class(r)) == path
    assert r_class(E(7)) != cs1.rcls or r_class(E(5)) != cs1.rcls


def test_cache_rejects_wrong_class(cs1, tmp_path):
    cs1.save(tmat_cache_path(tmp_path, (1, 2)))
    with pytest.raises(ValueError):
        cached_column_sums((1, 2), tmp_path)
    (tmp_path / "junk.txt").write_text("nope\n")
    with pytest.raises(ValueError):
        ColumnSums.load(tmp_path / "junk.txt")


def _gamma_numeric(place, s):
    """Gamma_v(|.|^s eps((y, .)_v)) for every class y, straight from the local formulas."""
    d, q = DIFFERENT[place], RESIDUE_Q[place]
    P = pairing_table(place)
    pi_idx = CLASS_INDEX[place][(1,) + (0,) * (len(CLASSES[place][0]) - 1)]
    out = []
    with ctx(PREC):
        two_pi = 2 * gmpy2.const_pi()
        qs = mpfr(q) ** (-s)
        for yi, c in enumerate(CLASSES[place]):
            k = int(P[yi, pi_idx])
            chi = qs * mpc(gmpy2.cos(two_pi * k / 6), gmpy2.sin(two_pi * k / 6))
            f = conductor(LocalClass(place, c), place)
            if f == 0:
                g = chi ** (-d) * (1 - 1 / (chi * q)) / (1 - chi) * mpfr(q) ** (mpfr(-d) / 2)
            else:
                g = chi ** (-d - f) * mpfr(q) ** (mpfr(-d - f) / 2) * root_number(c, place, f).to_complex(PREC)
            out.append(g)
    return out


def _G_numeric(place, s):
    gam = _gamma_numeric(place, s)
    P = pairing_table(place)
    with ctx(PREC):
        roots = [mpc(gmpy2.cos(2 * gmpy2.const_pi() * a / 6), gmpy2.sin(2 * gmpy2.const_pi() * a / 6))
                 for a in range(6)]
        return [sum((roots[int(P[z, y])] * gam[y] for y in range(len(gam))), mpc(0))
                for z in range(len(gam))]


def test_embedding_consistency(cs1):
    """One column sum at s = 1/6 rebuilt numerically from the local factors."""
    s = mpfr(1) / 6
    G2, G3 = _G_numeric(2, s), _G_numeric(3, s)
    j = coset_table().identity
    A, _ = phase_matrix(cs1.rcls, j)
    with ctx(PREC):
        roots = [mpc(gmpy2.cos(2 * gmpy2.const_pi() * a / 6), gmpy2.sin(2 * gmpy2.const_pi() * a / 6))
                 for a in range(6)]
        tot = mpc(0)
        for a in range(6):
            zz = np.argwhere(A == a)
            part = mpc(0)
            for z2, z3 in zz:
                part += G2[z2] * G3[z3]
            tot += roots[a] * part
        Wv, Vv = mpfr(4) ** (-s), mpfr(3) ** (-s)
        num = tot * (1 - Wv ** 6) * (1 - Vv ** 6) / 6 ** 6
        exact = mpc(0)
        for jj, w1, w2, c in cs1.entries():
            if jj == j:
                exact += c.to_complex(PREC) * Wv ** w1 * Vv ** w2
        assert abs(exact - num) < 1e-20
        assert abs(complex(exact) - cs1.evaluate(j, 1 / 6)) < 1e-10
