"""theta6 command line: Gauss-sum cache, tau(r, V), verification suites and
the coefficient scans for r = pi, pi^2, pi^4."""
from __future__ import annotations

import argparse
import cmath
import math
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import engine
from .cosets import v_property_check
from .eisenstein import (ONE, EisensteinInt, canonical, enumerate_primes,
                         format_elt, parse_elt)
from .gauss import DEFAULT_SIGN, PREC, GaussTable, gauss_naive, gauss_prime, prime_values
from .localfields import HILBERT_MATRIX, hilbert_S
from .symbols import product_formula, residue_symbol_prime
from .transition import (cached_column_sums, check_diagonal, check_integrality,
                         check_support)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SNAP_LIMIT = 0.2
ZERO_LIMIT = 1e-2


class ConfigError(ValueError):
    pass


def cache_dir(arg=None) -> Path:
    d = arg or os.environ.get("THETA6_CACHE_DIR") or Path.home() / ".cache" / "theta6"
    return Path(d)


def _elt(s: str) -> EisensteinInt:
    try:
        x = parse_elt(s)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    n = x.norm()
    if n == 0 or n % 2 == 0 or n % 3 == 0:
        raise ConfigError(f"r = {s} is not coprime to 6")
    return x


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad rational {s!r}") from None


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _header(args, names) -> str:
    cfg = " ".join(f"{k}={getattr(args, k)}" for k in names)
    return f"# theta6 {args.command} {cfg}"


# ---------------------------------------------------------------- gauss cache

def _values_for(args):
    a, b, sigma, prec = args
    return (a, b), prime_values(EisensteinInt(a, b), sigma, prec)


def precompute_gauss(bound: int, out, jobs: int = 1, sigma: int = DEFAULT_SIGN,
                     prec: int = PREC) -> tuple[GaussTable, int]:
    """Fill (or extend) the cache at ``out``; returns the table and the
    number of primes added."""
    path = Path(out)
    tab = GaussTable.load(path, prec, sigma) if path.exists() else GaussTable(prec, sigma)
    records = enumerate_primes(bound)
    if jobs > 1:
        done = tab.primes()
        todo = []
        for rec in records:
            g = rec.generator
            other = canonical(g.conj())
            if (g.a, g.b) in done or (rec.splitting == "split" and (other.a, other.b) in done):
                continue
            done.add((g.a, g.b))
            todo.append((g.a, g.b, sigma, prec))
        with ProcessPoolExecutor(jobs) as ex:
            for (a, b), vals in ex.map(_values_for, todo, chunksize=64):
                for k, v in vals.items():
                    tab.values[(a, b, k)] = v
    added = tab.fill(records)
    if jobs > 1:
        added += len(todo)
    path.parent.mkdir(parents=True, exist_ok=True)
    tab.save(path)
    return tab, added


def gauss_cache_path(sigma: int = DEFAULT_SIGN, prec: int = PREC, d=None) -> Path:
    return cache_dir(d) / f"gauss_{sigma:+d}_{prec}.txt"


def load_gauss(path=None, bound: int | None = None) -> GaussTable | None:
    if path is None:
        return None
    tab = GaussTable.load(path)
    if bound is not None:
        missing = [r for r in enumerate_primes(bound) if (r.generator.a, r.generator.b) not in tab.primes()]
        if missing:
            raise ConfigError(f"Gauss cache {path} lacks {len(missing)} primes up to norm {bound}")
    return tab


def cmd_precompute_gauss(args) -> int:
    out = args.out or gauss_cache_path()
    t0 = time.perf_counter()
    tab, added = precompute_gauss(args.bound, out, args.jobs)
    print(f"# theta6 precompute-gauss bound={args.bound} out={out} primes={len(tab.primes())} "
          f"added={added} seconds={time.perf_counter() - t0:.1f}")
    return EXIT_OK


# ---------------------------------------------------------------- tau

def cmd_tau(args) -> int:
    cfg = engine.EngineConfig(_elt(args.r), args.bound, _fraction(args.x), args.cutoff, args.precision)
    gauss = load_gauss(args.gauss, args.bound)
    tdir = cache_dir(args.tmat)
    t0 = time.perf_counter()
    if args.stability:
        vals, dev = engine.x_stability(cfg, gauss=gauss, cache_dir=tdir)
        res = engine.TauResult(cfg, vals[cfg.x] if cfg.x in vals else engine.tau(cfg, gauss, cache_dir=tdir),
                               time.perf_counter() - t0, dev)
    else:
        res = engine.run_tau(cfg, gauss, cache_dir=tdir)
    lines = [_header(args, ["r", "bound", "x", "cutoff", "precision"]), engine.TauResult.HEADER, res.csv()]
    _emit(lines, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- verify

def verify_hilbert(n_pairs: int = 1000, n_recip: int = 50, seed: int = 0) -> list[tuple[str, bool]]:
    import numpy as np
    out = []
    for v, M in HILBERT_MATRIX.items():
        M = np.array(M)
        out.append((f"matrix at {v} antisymmetric mod 6", bool(((M + M.T) % 6 == 0).all())))
    rng = random.Random(seed)

    def rand_elt(lim):
        while True:
            x = EisensteinInt(rng.randint(-lim, lim), rng.randint(-lim, lim))
            if not x.is_zero():
                return x
    ok = True
    for _ in range(n_pairs):
        x, y = rand_elt(10 ** 4), rand_elt(10 ** 4)
        ok &= (hilbert_S(x, y) + hilbert_S(y, x)) % 6 == 0
    out.append((f"(x,y)_S (y,x)_S = 1 on {n_pairs} pairs", ok))
    ok = True
    for _ in range(n_recip):
        x, y = rand_elt(500), rand_elt(500)
        ok &= product_formula(x, y) == 0
    out.append((f"product formula on {n_recip} pairs", ok))
    return out


def verify_gauss(split_bound: int = 10 ** 4, inert_bound: int = 100, tol: float = 1e-8):
    ok_split, worst = True, 0.0
    for rec in enumerate_primes(split_bound):
        if rec.splitting != "split":
            continue
        pi = rec.generator
        d = abs(complex(gauss_prime(pi, 1)) - gauss_naive(ONE, 1, pi))
        worst = max(worst, d)
        ok_split &= d <= tol
    ok_inert = True
    for rec in enumerate_primes(inert_bound ** 2):
        if rec.splitting != "inert":
            continue
        for k in range(1, 6):
            v = complex(gauss_prime(rec.generator, k))
            ok_inert &= abs(abs(v.real) - rec.p) == 0 and v.imag == 0
            ok_inert &= abs(v - gauss_naive(ONE, k, rec.generator)) <= 1e-6 * rec.p
    return [(f"theta vs naive, split p < {split_bound} (worst {worst:.1e})", ok_split),
            (f"closed form +-p, inert p < {inert_bound}", ok_inert)]


def verify_tmatrix(rs=None, d=None):
    rs = rs or [ONE]
    out = []
    for r in rs:
        cs = cached_column_sums(r, cache_dir(d))
        tag = format_elt(r)
        out.append((f"support window r={tag}", check_support(cs)))
        out.append((f"Z[zeta36] integrality r={tag}", check_integrality(cs)))
        out.append((f"T(s)T(-s) diagonal r={tag}", check_diagonal(r)))
    return out


def lemma51_primes(max_norm: int = 50):
    return [rec for rec in enumerate_primes(max_norm) if rec.norm % 4 == 1]


def verify_lemma51(B: int = 10 ** 5, x=Fraction(1, 300), max_norm: int = 50, tol: float = 1e-2,
                   gauss=None, d=None):
    cfg1 = engine.EngineConfig(ONE, B, x)
    t1 = complex(engine.tau(cfg1, gauss, cache_dir=cache_dir(d)))
    out = []
    for rec in lemma51_primes(max_norm):
        pi = rec.generator
        q = complex(engine.tau(engine.EngineConfig(pi ** 4, B, x), gauss, cache_dir=cache_dir(d))) / t1
        want = complex(gauss_prime(pi, 1)).conjugate() / math.sqrt(rec.norm)
        err = abs(q - want) / abs(want)
        out.append((f"Lemma ratio pi={format_elt(pi)} N={rec.norm} rel.err {err:.1e}", err <= tol))
    return out


def verify_vproperty():
    return [("(v,w)_S = 1 or (v,-w)_S = 1 on V x V", v_property_check())]


SUITES = {"hilbert": verify_hilbert, "gauss": verify_gauss, "tmatrix": verify_tmatrix,
          "lemma51": verify_lemma51, "vproperty": verify_vproperty}


def cmd_verify(args) -> int:
    if args.suite == "lemma51":
        results = verify_lemma51(args.bound, _fraction(args.x), gauss=load_gauss(args.gauss), d=args.tmat)
    elif args.suite == "tmatrix":
        results = verify_tmatrix(d=args.tmat)
    else:
        results = SUITES[args.suite]()
    ok = True
    for name, passed in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}")
        ok &= passed
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- scans

ZETA6 = cmath.exp(1j * math.pi / 3)
ZETA12 = cmath.exp(1j * math.pi / 6)


def snap_root(u: complex, n: int) -> tuple[int, float]:
    """Exponent e of the n-th root of unity nearest to u and |u - zeta_n^e|."""
    e = round(cmath.phase(u) * n / (2 * math.pi)) % n
    return e, abs(u - cmath.exp(2j * math.pi * e / n))


def cubic_conj(pi: EisensteinInt) -> complex:
    """g3(1, eps^2, conj(pi)) for the literal conjugate of pi."""
    return complex(gauss_prime(canonical(pi.conj()), 2))


def classify_pi2(rec, ratio: complex):
    """(conjecture, exponent name, exponent, residual, note) for tau(pi^2)/tau(1)."""
    pi, N = rec.generator, rec.norm
    if rec.splitting == "inert":
        if rec.p % 12 == 5:
            return "5.5 zero", "", "", abs(ratio), "zero" if abs(ratio) <= ZERO_LIMIT else "NONZERO"
        return "5.5", "", "", abs(ratio + 2), ""
    base = 2 * cubic_conj(pi) / math.sqrt(N)
    if N % 12 == 1:
        if residue_symbol_prime(pi.conj(), pi) != 0:
            return "5.3 zero", "", "", abs(ratio), "zero" if abs(ratio) <= ZERO_LIMIT else "NONZERO"
        if abs(ratio) <= ZERO_LIMIT:
            return "5.4", "g", "", abs(ratio), "zero"
        e, res = snap_root(ratio / base, 6)
        return "5.4", "g", e, res, "" if res <= SNAP_LIMIT else "AMBIGUOUS"
    e, res = snap_root(ratio / (base / math.sqrt(3)), 12)
    return "5.6", "h", e, res, "" if res <= SNAP_LIMIT else "AMBIGUOUS"


def classify_pi4(rec, ratio: complex):
    pi, N = rec.generator, rec.norm
    pred = complex(gauss_prime(pi, 1)).conjugate() / math.sqrt(N)
    if N % 4 == 1:
        name = "5.1"
    else:
        name = "5.2"
        pred *= cmath.exp(1j * math.pi * residue_symbol_prime(EisensteinInt(-1, 0), pi) / 3) / math.sqrt(3)
    res = abs(ratio / pred - 1)
    return name, "", "", res, "" if res <= SNAP_LIMIT else "MISMATCH"


def classify_pi(rec, ratio: complex):
    """Search (k, l, m, n) for (tau(pi)/tau(1))^2."""
    pi, N = rec.generator, rec.norm
    base = cubic_conj(pi) / math.sqrt(N)
    if N % 4 == 1:
        e1, e2 = EisensteinInt(1, -3), EisensteinInt(-2, 3)
    else:
        e1, e2 = EisensteinInt(1, 3), EisensteinInt(4, -3)
    sq = ratio * ratio
    best = None
    for l in (-1, 0):
        for m, n in ((0, 0), (2, 0), (0, 2)):
            f = base * 3.0 ** l * e1.to_complex() ** m * e2.to_complex() ** n
            k, res = snap_root(sq / f, 6)
            k = k or 6
            if best is None or res < best[1]:
                best = ((k, l, m, n), res)
    (k, l, m, n), res = best
    return "5.7", "k,l,m,n", f"{k};{l};{m};{n}", res, "" if res <= SNAP_LIMIT else "AMBIGUOUS"


FAMILIES = {"pi2": (2, classify_pi2), "pi4": (4, classify_pi4), "pi": (1, classify_pi)}
SCAN_HEADER = ("N,pi,conjecture,ratio_re_hex,ratio_im_hex,ratio_re,ratio_im,"
               "exponent_name,exponent,residual,note")


def scan(family: str, max_norm: int, B: int, x: Fraction, gauss=None, d=None):
    power, classify = FAMILIES[family]
    t1 = complex(engine.tau(engine.EngineConfig(ONE, B, x), gauss, cache_dir=d))
    rows = []
    for rec in enumerate_primes(max_norm):
        pi = rec.generator
        v = complex(engine.tau(engine.EngineConfig(pi ** power, B, x), gauss, cache_dir=d))
        q = v / t1
        conj_name, ename, e, res, note = classify(rec, q)
        rows.append((rec.norm, pi, conj_name, q, ename, e, res, note))
    return t1, rows


def format_scan_row(row) -> str:
    N, pi, name, q, ename, e, res, note = row
    return ",".join([str(N), format_elt(pi), name, float(q.real).hex(), float(q.imag).hex(),
                     f"{q.real:.10f}", f"{q.imag:.10f}", ename, str(e), f"{res:.3e}", note])


def cmd_scan(args) -> int:
    gauss = load_gauss(args.gauss)
    t1, rows = scan(args.family, args.max_norm, args.bound, _fraction(args.x), gauss, cache_dir(args.tmat))
    lines = [_header(args, ["family", "max_norm", "bound", "x"]) + f" tau1={t1.real:.16g}", SCAN_HEADER]
    lines += [format_scan_row(r) for r in rows]
    _emit(lines, args.out)
    return EXIT_FAIL if any(r[7] in ("AMBIGUOUS", "MISMATCH") for r in rows) else EXIT_OK


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="theta6", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("precompute-gauss", help="compute and store g6(1, eps^k, pi)")
    g.add_argument("--bound", type=int, required=True)
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(func=cmd_precompute_gauss)

    t = sub.add_parser("tau", help="approximate tau(r, V)")
    t.add_argument("--r", default="1+0*w")
    t.add_argument("--bound", type=int, default=10 ** 5)
    t.add_argument("--x", default="1/300")
    t.add_argument("--cutoff", type=float, default=1e-20)
    t.add_argument("--precision", type=int, default=PREC)
    t.add_argument("--gauss", help="Gauss-sum cache file (default: compute on the fly)")
    t.add_argument("--tmat", help="column-sum cache directory")
    t.add_argument("--stability", action="store_true", help="also run the x grid 1/500..1/100")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tau)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--bound", type=int, default=10 ** 5)
    v.add_argument("--x", default="1/300")
    v.add_argument("--gauss")
    v.add_argument("--tmat")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", help="tau(pi^k, V)/tau(1, V) against the conjectured forms")
    s.add_argument("--family", choices=sorted(FAMILIES), required=True)
    s.add_argument("--max-norm", type=int, required=True)
    s.add_argument("--bound", type=int, default=10 ** 5)
    s.add_argument("--x", default="1/300")
    s.add_argument("--gauss")
    s.add_argument("--tmat")
    s.add_argument("--out")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        print(f"theta6: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
