from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from theta6.dirichlet import a_of_k, b_of_k, coeff_a, coeff_b, ideal_count
from theta6.eisenstein import E


def _count_ideals(k):
    # generators a + b w up to units with norm k
    n = 0
    lim = 2 * int(k ** 0.5) + 2
    for a, b in product(range(-lim, lim + 1), repeat=2):
        if a * a + a * b + b * b == k:
            n += 1
    return n // 6


@pytest.mark.parametrize("k", list(range(1, 120)))
def test_ideal_count_oracle(k):
    assert ideal_count(k) == _count_ideals(k)


def test_examples():
    assert ideal_count(1) == 1 and ideal_count(7) == 2
    assert ideal_count(4) == 1 and ideal_count(2) == 0
    assert coeff_a(1) == coeff_b(1) == 1
    assert coeff_a(7 ** 6) == Fraction(2, 7)
    assert coeff_a(2 ** 6) == 0 and coeff_b(2 ** 6) == 0
    assert coeff_b(3 ** 6) == Fraction(1, 3) and coeff_a(3 ** 6) == 0
    assert coeff_a(7) == 0 and coeff_b(64 * 729 + 1) == 0


@given(st.integers(1, 300))
def test_a_equals_b_coprime_to_6(k):
    if k % 2 and k % 3:
        assert coeff_a(k ** 6) == coeff_b(k ** 6) == a_of_k(k) == b_of_k(k)
    assert coeff_b(k ** 6) == b_of_k(k)


def test_zeta_K_euler_product():
    # sum_k I(k)/k * k^-6s at s = 1 is zeta_K(7) = zeta(7) L(7, chi_-3)
    from mpmath import mp, zeta, mpf
    mp.dps = 30
    s = 7
    lhs = sum(mpf(ideal_count(k)) / k ** s for k in range(1, 5000))
    L = sum(mpf(1) / (3 * n + 1) ** s - mpf(1) / (3 * n + 2) ** s for n in range(0, 5000))
    assert abs(lhs - zeta(s) * L) < 1e-20
    tot = sum(b_of_k(k) * Fraction(1, k ** 6) for k in range(1, 200))
    assert abs(float(tot) - float(lhs)) < 1e-12
