"""Counting every surface of a Cartesian product of form lists over F_p at once.

For q1 in list 1, q2 in list 2 the fibre sums

    lambda_u = sum_t chi(q1(u,t)) chi(q2(1,t)),   lambda_01 = chi(c2) sum_{t != 0} chi(q1(1,t))

are computed once per pair; each q3 contributes a row w = (chi(q3(1,u)))_u
with chi(c3) appended, so that

    #V(F_p) = p^2 + p + 1 + <lambda, w>.

All pairs against all q3 is one matrix product.  Character tables are kept
as int8 and widened for the product; with |lambda_u| <= p every partial sum
is an integer below p (p + 1), exact in float32 while that is < 2^24.
"""
from __future__ import annotations

import csv
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .ffield import build_character_table, is_inert
from .surface import (
    BadDenominator,
    BinaryQuadraticForm,
    SixLineSurface,
    ZeroDiscriminant,
    format_rational,
    rational_square_class,
)

FLOAT32_EXACT = 1 << 24


@dataclass
class ScanConfig:
    primes: list
    height: int | None = None
    product_square: bool = False
    disc_class_d: int | None = None
    workers: int = 1

    def __post_init__(self):
        ps = list(self.primes)
        if any(p % 2 == 0 for p in ps) or len(set(ps)) != len(ps) or ps != sorted(ps):
            raise ValueError("primes must be odd, distinct and ascending")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("RMK3_WORKERS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# per-prime tables


def reduce_forms(forms, p: int):
    """(array of reduced coefficients, kept indices, skipped indices)."""
    rows, kept, skipped = [], [], []
    for i, f in enumerate(forms):
        try:
            rows.append(f.reduce(p))
            kept.append(i)
        except BadDenominator:
            skipped.append(i)
    arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
    return arr, kept, skipped


def _values(coeffs: np.ndarray, u: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """a u^2 + b u v + c v^2 mod p, broadcast over forms (leading axis)."""
    a, b, c = (coeffs[:, i].reshape((-1,) + (1,) * u.ndim) for i in range(3))
    return (a * (u * u % p) + b * (u * v % p) + c * (v * v % p)) % p


def q1_tables(coeffs, p, chi):
    """chi(q1(u, t)) as (n, p, p) int8 and chi(q1(1, t)) summed over t != 0."""
    u = np.arange(p, dtype=np.int64)[:, None]
    t = np.arange(p, dtype=np.int64)[None, :]
    full = chi[_values(coeffs, u, t, p)]
    row = chi[_values(coeffs, np.ones(p, dtype=np.int64), np.arange(p, dtype=np.int64), p)]
    sums = row[:, 1:].astype(np.int64).sum(axis=1)
    return full, sums


def q2_tables(coeffs, p, chi):
    """chi(q2(1, t)) as (n, p) int8 and chi(c2)."""
    t = np.arange(p, dtype=np.int64)
    return chi[_values(coeffs, np.ones(p, dtype=np.int64), t, p)], chi[coeffs[:, 2] % p]


def q3_tables(coeffs, p, chi):
    """Rows (chi(q3(1, u)))_u followed by chi(c3), int8 of shape (n, p + 1)."""
    u = np.arange(p, dtype=np.int64)
    w = chi[_values(coeffs, np.ones(p, dtype=np.int64), u, p)]
    return np.concatenate([w, chi[coeffs[:, 2] % p][:, None]], axis=1)


def _dtype(p: int):
    return np.float32 if p * (p + 1) < FLOAT32_EXACT else np.float64


def pair_lambdas(A1, s1, B2, c2chi, p):
    """Lambda rows (n1, n2, p + 1) for every pair."""
    dt = _dtype(p)
    n1, n2 = A1.shape[0], B2.shape[0]
    out = np.empty((n1, n2, p + 1), dtype=dt)
    Bt = B2.astype(dt).T
    for i in range(n1):
        out[i, :, :p] = (A1[i].astype(dt) @ Bt).T
    out[:, :, p] = c2chi.astype(dt)[None, :] * s1.astype(dt)[:, None]
    return out


def _scan_block(args):
    c1, c2, c3, p = args
    chi = build_character_table(p).values
    A1, s1 = q1_tables(c1, p, chi)
    B2, c2chi = q2_tables(c2, p, chi)
    W = q3_tables(c3, p, chi).astype(_dtype(p))
    L = pair_lambdas(A1, s1, B2, c2chi, p)
    S = L.reshape(-1, p + 1) @ W.T
    base = p * p + p + 1
    return (np.rint(S).astype(np.int64) + base).reshape(len(c1), len(c2), len(c3))


@dataclass
class ScanResult:
    p: int
    counts: np.ndarray  # (n1, n2, n3) over the kept forms
    kept: tuple
    skipped: tuple


def scan_prime(q1_list, q2_list, q3_list, p: int, workers: int = 1) -> ScanResult:
    """#V(F_p) for every (q1, q2, q3) in the product of the three lists."""
    reduced = [reduce_forms(lst, p) for lst in (q1_list, q2_list, q3_list)]
    (c1, k1, s1), (c2, k2, s2), (c3, k3, s3) = reduced
    if min(len(c1), len(c2), len(c3)) == 0:
        counts = np.zeros((len(c1), len(c2), len(c3)), dtype=np.int64)
    elif workers <= 1 or len(c1) < 2:
        counts = _scan_block((c1, c2, c3, p))
    else:
        chunks = [c for c in np.array_split(c1, min(workers, len(c1))) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_block, [(c, c2, c3, p) for c in chunks]))
        counts = np.concatenate(parts, axis=0)
    return ScanResult(p, counts, (k1, k2, k3), (s1, s2, s3))


def count_triples(forms3, triples: np.ndarray, p: int) -> np.ndarray:
    """Counts for selected index triples (m, 3) into the three lists, all reducing mod p."""
    chi = build_character_table(p).values
    c = [np.array([f.reduce(p) for f in lst], dtype=np.int64).reshape(-1, 3) for lst in forms3]
    out = np.empty(len(triples), dtype=np.int64)
    if not len(triples):
        return out
    dt = _dtype(p)
    W = q3_tables(c[2], p, chi).astype(dt)
    B2, c2chi = q2_tables(c[1], p, chi)
    order = np.argsort(triples[:, 0], kind="stable")
    i_sorted = triples[order, 0]
    bounds = np.flatnonzero(np.diff(i_sorted)) + 1
    for group in np.split(order, bounds):
        i = triples[group[0], 0]
        A1, s1 = q1_tables(c[0][i : i + 1], p, chi)
        js, ks = triples[group, 1], triples[group, 2]
        lam = np.empty((len(group), p + 1), dtype=dt)
        lam[:, :p] = (A1[0].astype(dt) @ B2[js].astype(dt).T).T
        lam[:, p] = c2chi[js].astype(dt) * dt(s1[0])
        out[group] = np.rint(np.einsum("sp,sp->s", lam, W[ks])).astype(np.int64) + p * p + p + 1
    return out


# ---------------------------------------------------------------------------
# discriminant filters and the inert-prime sieve


def _class_bits(lists):
    """Square classes of the discriminants as XOR-able bitmasks (sign is bit 0)."""
    from sympy import factorint

    classes = [[rational_square_class(f.discriminant) for f in lst] for lst in lists]
    primes = sorted({q for lst in classes for c in lst for q in factorint(abs(c))})
    bit = {q: 1 << (n + 1) for n, q in enumerate(primes)}

    def mask(c):
        m = 1 if c < 0 else 0
        for q in factorint(abs(c)):
            m |= bit[q]
        return m

    dtype = np.int64 if len(primes) < 62 else object
    return classes, [np.array([mask(c) for c in lst], dtype=dtype) for lst in classes]


def _block_mask(i, classes, bits, config: ScanConfig) -> np.ndarray:
    """Filter mask over (j, k) for a fixed q1 index i."""
    n2, n3 = len(classes[1]), len(classes[2])
    mask = np.ones((n2, n3), dtype=bool)
    if config.product_square:
        mask &= (bits[0][i] ^ bits[1][:, None] ^ bits[2][None, :]) == 0
    if config.disc_class_d:
        d = config.disc_class_d
        c2 = np.array([c == d for c in classes[1]])
        c3 = np.array([c == d for c in classes[2]])
        mask &= (classes[0][i] == d) | c2[:, None] | c3[None, :]
    return mask


def filter_mask(lists, config: ScanConfig) -> np.ndarray:
    n = tuple(len(x) for x in lists)
    if not (config.product_square or config.disc_class_d):
        return np.ones(n, dtype=bool)
    classes, bits = _class_bits(lists)
    return np.stack([_block_mask(i, classes, bits, config) for i in range(n[0])]).reshape(n)


@dataclass
class Survivor:
    q1: BinaryQuadraticForm
    q2: BinaryQuadraticForm
    q3: BinaryQuadraticForm
    counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "q1": self.q1.to_json(),
            "q2": self.q2.to_json(),
            "q3": self.q3.to_json(),
            "counts": {str(p): int(n) for p, n in self.counts.items()},
        }


def rm_sieve(lists, d: int, config: ScanConfig):
    """Triples with count = 1 (mod p) at every prime of the config (all inert in Q(sqrt d)).

    Survivors are streamed block by block over the first list; primes are
    taken in ascending order.  A triple containing a form that does not
    reduce at some prime is kept without a count there, since the congruence
    cannot be tested.
    """
    for p in config.primes:
        if is_inert(p, d) != "inert":
            raise ValueError(f"{p} is not inert in Q(sqrt {d})")
    lists = [list(x) for x in lists]
    filtering = config.product_square or config.disc_class_d
    if filtering:
        classes, bits = _class_bits(lists)
    per_prime = []
    for p in config.primes:
        ok = [np.array([_reduces(f, p) for f in lst], dtype=bool) for lst in lists]
        per_prime.append((p, ok, [_safe_list(lst, p) for lst in lists]))
    n2, n3 = len(lists[1]), len(lists[2])
    jk = np.indices((n2, n3)).reshape(2, -1).T
    for i in range(len(lists[0])):
        alive = jk if not filtering else jk[_block_mask(i, classes, bits, config).reshape(-1)]
        alive = np.column_stack([np.full(len(alive), i), alive])
        counts = np.full((len(alive), len(per_prime)), -1, dtype=np.int64)
        for col, (p, ok, safe) in enumerate(per_prime):
            if not len(alive):
                break
            testable = ok[0][alive[:, 0]] & ok[1][alive[:, 1]] & ok[2][alive[:, 2]]
            sel = np.flatnonzero(testable)
            if not len(sel):
                continue
            n = count_triples(safe, alive[sel], p)
            counts[sel, col] = n
            keep = np.ones(len(alive), dtype=bool)
            keep[sel] = n % p == 1
            alive, counts = alive[keep], counts[keep]
        for t, row in zip(alive, counts):
            record = {p: int(v) for (p, _, _), v in zip(per_prime, row) if v >= 0}
            yield Survivor(lists[0][t[0]], lists[1][t[1]], lists[2][t[2]], record)


def _reduces(f, p):
    try:
        f.reduce(p)
        return True
    except BadDenominator:
        return False


def _safe_list(lst, p):
    """Replace forms that do not reduce by the unit form so indices stay aligned."""
    out = []
    for f in lst:
        out.append(f if _reduces(f, p) else BinaryQuadraticForm(1, 0, 1))
    return out


# ---------------------------------------------------------------------------
# form lists


def forms_of_height(H: int, primitive: bool = True):
    """Integer forms a U^2 + b UV + c V^2 with max |coefficient| <= H and nonzero discriminant."""
    out = []
    for a in range(-H, H + 1):
        for b in range(-H, H + 1):
            for c in range(-H, H + 1):
                if b * b - 4 * a * c == 0:
                    continue
                if primitive and gcd(gcd(a, b), c) != 1:
                    continue
                out.append(BinaryQuadraticForm(a, b, c))
    return out


def random_forms(n: int, H: int, rng: random.Random):
    out = []
    while len(out) < n:
        a, b, c = (rng.randint(-H, H) for _ in range(3))
        if b * b - 4 * a * c != 0:
            out.append(BinaryQuadraticForm(a, b, c))
    return out


def random_surface(H: int, rng: random.Random) -> SixLineSurface:
    while True:
        try:
            return SixLineSurface(*random_forms(3, H, rng))
        except ZeroDiscriminant:  # pragma: no cover - random_forms already excludes it
            continue


def read_forms_csv(path):
    out = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            out.append(BinaryQuadraticForm(*[x.strip() for x in row[:3]]))
    return out


def write_forms_csv(path, forms):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for f in forms:
            w.writerow([format_rational(x) for x in f.coefficients])


def write_survivors_jsonl(fh, survivors, extra: dict | None = None):
    rows = [s.to_json() for s in survivors]
    rows.sort(key=lambda r: json.dumps([r["q1"], r["q2"], r["q3"]]))
    for r in rows:
        if extra:
            r = {**r, **extra}
        fh.write(json.dumps(r, sort_keys=True) + "\n")
    return len(rows)
