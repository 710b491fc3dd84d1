import cmath
import math
import random

import gmpy2
import pytest
from hypothesis import given, settings, strategies as st

from conftest import coprime6
from theta6.eisenstein import E, ONE, canonical, enumerate_primes, factor, prime_record
from theta6.gauss import (GaussTable, additive_char, conjugate_prime_value, gauss_general,
                          gauss_naive, gauss_prime, prime_values)
from theta6.symbols import residue_symbol_prime

SPLIT = [r for r in enumerate_primes(400) if r.splitting == "split"]
INERT = [r for r in enumerate_primes(100 ** 2) if r.splitting == "inert"]


def _c(z):
    return complex(z)


def test_additive_char_examples():
    assert abs(_c(additive_char(ONE)) - 1) < 1e-50
    # Tr(1/7) = 2/7, sigma = -1
    assert abs(_c(additive_char(ONE, E(7))) - cmath.exp(-4j * math.pi / 7)) < 1e-15
    assert abs(_c(additive_char(ONE, E(7), sigma=1)) - cmath.exp(4j * math.pi / 7)) < 1e-15
    with pytest.raises(ValueError):
        additive_char(ONE, E(2))


@pytest.mark.parametrize("rec", SPLIT[:30], ids=lambda r: str(r.generator))
def test_split_prime_matches_naive(rec):
    for k in range(1, 6):
        g = _c(gauss_prime(rec, k))
        assert abs(g - gauss_naive(ONE, k, rec.generator)) < 1e-8, k
        assert abs(abs(g) - math.sqrt(rec.norm)) < 1e-10


@pytest.mark.parametrize("rec", INERT[:4], ids=lambda r: str(r.generator))
def test_inert_matches_naive(rec):
    for k in (1, 2, 3):
        assert abs(_c(gauss_prime(rec, k)) - gauss_naive(ONE, k, rec.generator)) < 1e-7


def test_quadratic_is_twelfth_root():
    for rec in SPLIT[:40]:
        u = _c(gauss_prime(rec, 3)) / math.sqrt(rec.norm)
        e = round(cmath.phase(u) / (math.pi / 6))
        assert abs(u - cmath.exp(1j * math.pi * e / 6)) < 1e-30 + 1e-15


def test_trivial_character():
    assert _c(gauss_prime(SPLIT[0], 0)) == -1


def test_conjugate_shortcut():
    for rec in SPLIT:
        other = canonical(rec.generator.conj())
        vals = prime_values(rec)
        for k in range(1, 6):
            direct = gauss_prime(other, k)
            assert abs(conjugate_prime_value(vals[k], rec.generator, k) - direct) < gmpy2.mpfr(2) ** -150


def test_prime_values_agree():
    for rec in SPLIT[:20]:
        vals = prime_values(rec)
        for k in range(1, 6):
            assert vals[k] == gauss_prime(rec, k) or abs(vals[k] - gauss_prime(rec, k)) < 1e-50


def test_squarefree_composites():
    rng = random.Random(11)
    done = 0
    while done < 40:
        c = E(rng.randint(-30, 30), rng.randint(-30, 30))
        n = c.norm()
        if n < 2 or n > 2000 or n % 2 == 0 or n % 3 == 0:
            continue
        if any(l > 1 for _, l in factor(c)[1]):
            continue
        r = E(rng.randint(-50, 50), rng.randint(-50, 50))
        if r.is_zero():
            continue
        assert abs(_c(gauss_general(r, c)) - gauss_naive(r, 1, c)) < 1e-7, (r, c)
        done += 1


@settings(max_examples=25)
@given(st.sampled_from([r.generator for r in SPLIT[:6]]), st.integers(1, 3), coprime6(50))
def test_prime_powers(pi, l, u):
    # cover l <= m, l = m + 1 and l > m + 1
    for m in range(0, 3):
        r = pi ** m * u
        c = pi ** l
        if c.norm() > 3000:
            continue
        assert abs(_c(gauss_general(r, c)) - gauss_naive(r, 1, c)) < 1e-6, (r, c)


def test_square_modulus_examples():
    pi = SPLIT[0].generator
    assert _c(gauss_general(ONE, pi ** 2)) == 0
    N = pi.norm()
    assert abs(_c(gauss_general(pi, pi ** 2)) - N * _c(gauss_prime(pi, 2))) < 1e-12


def test_unit_multiple_of_modulus():
    c = SPLIT[0].generator * SPLIT[3].generator
    for u in (E(-1), E(0, 1), E(1, -1)):
        assert abs(_c(gauss_general(E(2, 1), u * c)) - gauss_naive(E(2, 1), 1, u * c)) < 1e-7


def test_table_roundtrip(tmp_path):
    tab = GaussTable()
    recs = enumerate_primes(800)
    assert tab.fill(recs) == len(recs)
    assert tab.fill(recs) == 0
    for rec in recs[:10]:
        for k in range(1, 6):
            assert tab.get(rec.generator, k) == gauss_prime(rec, k) or \
                abs(tab.get(rec.generator, k) - gauss_prime(rec, k)) < gmpy2.mpfr(2) ** -150
    path = tmp_path / "g.txt"
    tab.save(path)
    back = GaussTable.load(path)
    assert back.values == tab.values
    with pytest.raises(ValueError):
        GaussTable.load(path, prec=300)
    with pytest.raises(KeyError):
        tab.get(E(1000003), 1)
    c = recs[0].generator * recs[5].generator
    assert abs(gauss_general(E(5), c, table=tab) - gauss_general(E(5), c)) < 1e-50


def test_rejects_non_coprime():
    with pytest.raises(ValueError):
        gauss_general(ONE, E(3))
    with pytest.raises(ValueError):
        gauss_naive(ONE, 1, E(4))
