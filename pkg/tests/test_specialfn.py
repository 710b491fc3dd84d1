import math

import gmpy2
import mpmath as mp
import pytest

from theta6.specialfn import F1, F2, ctx, gamma_constants, quotient_table


def _contour(x, sign, dps=30):
    """(1/2 pi i) int_(1) Gamma(6s)/(Gamma(s) Gamma(1 +- s)) x^-s ds."""
    mp.mp.dps = dps
    x = mp.mpf(x)

    def f(t):
        s = mp.mpc(1, t)
        g = mp.gamma(6 * s) / mp.gamma(s) / mp.gamma(1 + sign * s)
        return g * mp.power(x, -s)
    return mp.re(mp.quad(f, [-mp.inf, -20, 0, 20, mp.inf])) / (2 * mp.pi)


@pytest.mark.parametrize("x", [0.5, 10, 1000])
def test_F1_contour(x):
    assert abs(float(F1(x)) - float(_contour(x, +1))) < 1e-15


@pytest.mark.parametrize("x", [1, 50])
def test_F2_contour(x):
    assert abs(float(F2(x)) - float(_contour(x, -1))) < 1e-15


def test_F2_closed_form():
    assert abs(float(F2(1)) - math.exp(-math.sqrt(3) / 2) * math.sin(0.5) / (6 * math.pi)) < 1e-16
    with ctx(300):
        x = (2 * gmpy2.const_pi()) ** 6
    assert abs(F2(x, 300)) < 1e-80
    assert abs(float(F2(1e-30))) < 1e-6


def test_F1_precision_stable():
    a, b = F1(10 ** 6, 200), F1(10 ** 6, 300)
    assert abs(a - b) < 1e-20


def test_F1_decays():
    vals = [abs(float(F1(10 ** k))) for k in range(4, 10)]
    assert all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))


def test_real_valued():
    assert isinstance(F1(3.0), gmpy2.mpfr) and isinstance(F2(3.0), gmpy2.mpfr)


def test_rejects_nonpositive():
    with pytest.raises(ValueError):
        F1(0)
    with pytest.raises(ValueError):
        F2(-1)
    with pytest.raises(ValueError):
        ctx(32)


def test_gamma_constants():
    g = gamma_constants(200)
    with ctx(200):
        assert abs(g["g76"] - g["g16"] / 6) < gmpy2.mpfr(2) ** -190
    mp.mp.dps = 60
    assert abs(float(g["g16g76"] - gmpy2.mpfr(str(mp.gamma(mp.mpf(1) / 6) * mp.gamma(mp.mpf(7) / 6)), 200))) < 1e-50
    for k in range(1, 6):
        # Gamma(-k/6) Gamma(1 + k/6) = -pi / sin(pi k/6)
        lhs = 1 / mp.sqrt(mp.mpf(str(g["inv_gamma_sq"][k]))) * mp.gamma(1 + mp.mpf(k) / 6)
        assert abs(abs(lhs) - mp.pi / mp.sin(mp.pi * k / 6)) < 1e-40


def test_quotient_recurrence():
    tab = quotient_table(256)
    with ctx(256):
        for k in range(1, 6):
            for i in (1, 7, 300, 650):
                m = k + 6 * i
                den = 1
                for j in range(m, m + 6):
                    den *= j
                ratio = tab(k, i + 1) / tab(k, i)
                assert abs(ratio / (gmpy2.mpfr(m * m) / den) - 1) < gmpy2.mpfr(2) ** -240
            assert tab(k, 1) == 1 / gmpy2.fac(k + 5)
