"""Acceptance runs.  Each test prints one PASS/FAIL line.

The heavy sweeps at B = 10^5 are shared through session fixtures.  Column sums
are read from (and written to) the theta6 cache directory.  The B = 10^6
stretch run only happens with THETA6_STRETCH=1.
"""
import math
import os
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from theta6 import engine
from theta6.cli import (ZERO_LIMIT, SNAP_LIMIT, cache_dir, classify_pi2, lemma51_primes,
                        verify_gauss, verify_hilbert, verify_vproperty)
from theta6.cosets import normalize_to_V
from theta6.eisenstein import ONE, E, enumerate_primes, format_elt, prime_record
from theta6.gauss import gauss_prime
from theta6.localfields import HILBERT_MATRIX
from theta6.transition import cached_column_sums, check_diagonal, check_integrality, check_support

TAU1 = 0.1358547858696091
B = 10 ** 5
X_TAU = Fraction(1, 300)
# x for the r != 1 runs: the grid point where tau(1, V) is best converged at B = 10^5
X_RATIO = Fraction(1, 10)

H_TABLE = {7: (E(-2, 3), 9), 19: (E(2, 3), 11), 31: (E(-1, 6), 3), 43: (E(7, -6), 1),
           67: (E(7, -9), 9)}
G_TABLE = {61: (E(4, -9), 5), 157: (E(13, -12), 2)}
ZERO_NORMS = (37, 313)
INERT_NONZERO = (11, 23)
INERT_ZERO = (5, 17, 29)

USED_R = []     # r values whose column sums the runs relied on (criterion 8)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def _cs(r):
    USED_R.append(r)
    return cached_column_sums(r, cache_dir())


@pytest.fixture(scope="session")
def state1():
    return engine.sweep(engine.EngineConfig(ONE, B))


@pytest.fixture(scope="session")
def tau1_at(state1):
    cs = _cs(ONE)
    memo = {}

    def get(x):
        x = Fraction(x)
        if x not in memo:
            memo[x] = complex(engine.tau(engine.EngineConfig(ONE, B, x), cs=cs, state=state1))
        return memo[x]
    return get


def _ratio(r, tau1_at, x=X_RATIO):
    v = complex(engine.tau(engine.EngineConfig(r, B, x), cs=_cs(r)))
    return v / tau1_at(x)


def test_c1_constant_term(tau1_at, report):
    t = tau1_at(X_TAU)
    err = abs(t - TAU1)
    ok = err <= 1e-4
    report(1, ok, f"tau(1,V) = {t.real:.12f}{t.imag:+.1e}j at B=1e5 x=1/300, |error| = {err:.2e} (limit 1e-4)")
    assert ok


@pytest.mark.skipif(os.environ.get("THETA6_STRETCH") != "1", reason="set THETA6_STRETCH=1")
def test_c1_stretch(report):
    t = complex(engine.tau(engine.EngineConfig(ONE, 10 ** 6, X_TAU), cs=_cs(ONE)))
    err = abs(t - TAU1)
    ok = err <= 1e-6
    report("1 (stretch)", ok, f"tau(1,V) = {t.real:.12f} at B=1e6, |error| = {err:.2e} (limit 1e-6)")
    assert ok


def test_c2_x_stability(tau1_at, report):
    vals = {x: tau1_at(x) for x in engine.X_GRID}
    dev = max(abs(a - b) for a in vals.values() for b in vals.values())
    ok = dev <= 1e-4
    shown = " ".join(f"{x}:{v.real:.7f}" for x, v in vals.items())
    report(2, ok, f"max pairwise deviation {dev:.2e} (limit 1e-4); {shown}")
    assert ok


def test_c3_lemma51(tau1_at, report):
    errs = []
    for rec in lemma51_primes(50):
        pi = rec.generator
        q = _ratio(pi ** 4, tau1_at)
        want = complex(gauss_prime(pi, 1)).conjugate() / math.sqrt(rec.norm)
        errs.append((rec.norm, format_elt(pi), abs(q - want) / abs(want)))
    ok = bool(errs) and all(e <= 1e-2 for *_, e in errs)
    shown = " ".join(f"{n}/{p}:{e:.1e}" for n, p, e in errs)
    report(3, ok, f"relative errors (limit 1e-2, x={X_RATIO}): {shown}")
    assert ok


def _pi2(pi, tau1_at):
    rec = prime_record(normalize_to_V(pi).element)
    q = _ratio(rec.generator ** 2, tau1_at)
    return rec, q, classify_pi2(rec, q)


def test_c4_conjecture_h(tau1_at, report):
    rows = []
    for N, (pi, h) in H_TABLE.items():
        rec, q, (name, _, e, res, _) = _pi2(pi, tau1_at)
        rows.append((N, format_elt(rec.generator), name, e, h, res))
    ok = all(name == "5.6" and e == h and res <= SNAP_LIMIT for _, _, name, e, h, res in rows)
    shown = " ".join(f"{N}:h={e}/{h},res={res:.1e}" for N, _, _, e, h, res in rows)
    report(4, ok, f"h(pi) got/table: {shown}")
    assert ok


def test_c5_conjecture_g_and_zeros(tau1_at, report):
    rows, zeros = [], []
    for N, (pi, g) in G_TABLE.items():
        rec, q, (name, _, e, res, _) = _pi2(pi, tau1_at)
        rows.append((N, name, e, g, res))
    for N in ZERO_NORMS:
        for rec in enumerate_primes(N):
            if rec.norm == N:
                q = _ratio(rec.generator ** 2, tau1_at)
                zeros.append((N, format_elt(rec.generator), abs(q)))
    ok = all(name == "5.4" and e == g and res <= SNAP_LIMIT for _, name, e, g, res in rows)
    ok &= len(zeros) == 2 * len(ZERO_NORMS) and all(a <= ZERO_LIMIT for *_, a in zeros)
    shown = " ".join(f"{N}:g={e}/{g},res={res:.1e}" for N, _, e, g, res in rows)
    shown += " " + " ".join(f"{N}/{p}:|ratio|={a:.1e}" for N, p, a in zeros)
    report(5, ok, shown)
    assert ok


def test_c6_conjecture_inert(tau1_at, report):
    rows = []
    for p in INERT_NONZERO + INERT_ZERO:
        r = normalize_to_V(E(p)).element ** 2
        q = _ratio(r, tau1_at)
        rows.append((p, q))
    ok = all(abs(q + 2) <= 1e-2 for p, q in rows if p in INERT_NONZERO)
    ok &= all(abs(q) <= ZERO_LIMIT for p, q in rows if p in INERT_ZERO)
    shown = " ".join(f"{p}:{q.real:+.4f}{q.imag:+.4f}j" for p, q in rows)
    report(6, ok, f"ratios (-2 for 11, 23; 0 for 5, 17, 29): {shown}")
    assert ok


def test_c7_gauss_oracle(report):
    t0 = time.perf_counter()
    res = verify_gauss(10 ** 4, 100, 1e-8)
    ok = all(p for _, p in res)
    report(7, ok, "; ".join(n for n, _ in res) + f"; {time.perf_counter() - t0:.0f}s")
    assert ok


def test_c8_transition_checks(report):
    rs = list(dict.fromkeys([ONE] + USED_R))
    classes, bad = set(), []
    for r in rs:
        cs = cached_column_sums(r, cache_dir())
        if cs.rcls in classes:
            continue
        classes.add(cs.rcls)
        if not (check_support(cs) and check_integrality(cs) and check_diagonal(r)):
            bad.append(format_elt(r))
    ok = not bad
    report(8, ok, f"{len(classes)} r-classes checked (support, Z[zeta36], diagonal); failures: {bad or 'none'}")
    assert ok


def test_c9_symbols(report):
    res = verify_hilbert(1000, 50) + verify_vproperty()
    for v, M in HILBERT_MATRIX.items():
        M = np.array(M)
        res.append((f"matrix at {v} antisymmetric", bool(((M + M.T) % 6 == 0).all())))
    ok = all(p for _, p in res)
    report(9, ok, "; ".join(f"{n}: {'ok' if p else 'FAILED'}" for n, p in res))
    assert ok


def test_c10_module_suite(report):
    here = Path(__file__).parent
    t0 = time.perf_counter()
    p = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here),
                        "--ignore", str(here / "test_acceptance.py")],
                       capture_output=True, text=True, cwd=here.parent)
    dt = time.perf_counter() - t0
    tail = p.stdout.strip().splitlines()[-1] if p.stdout.strip() else p.stderr[-200:]
    ok = p.returncode == 0 and dt <= 600
    report(10, ok, f"module invariant suite: {tail} in {dt:.0f}s (limit 600s)")
    assert ok
