"""Exact linear algebra for real multiplication on a rank-6 rational quadratic space.

A self-adjoint phi with phi o phi = d on (Q^6, diag(1, 1, -1, -1, -1, -1))
forces d to be a sum of two rational squares.  Conversely a witness
u^2 + v^2 = d gives phi as three copies of the block (u v; v -u).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from sympy import factorint
from sympy.solvers.diophantine.diophantine import sum_of_squares as _sympy_two_squares

from .ffield import squarefree_part


class NotSumOfTwoSquares(ValueError):
    pass


class ZeroNorm(ValueError):
    pass


# ---------------------------------------------------------------------------
# sums of two squares


def _prime_two_squares(p: int) -> tuple[int, int]:
    if p == 2:
        return 1, 1
    a, b = next(_sympy_two_squares(p, 2, zeros=False))
    return a, b


def _integer_two_squares(n: int) -> tuple[int, int] | None:
    """(x, y) with x^2 + y^2 = n, by multiplying Gaussian integers prime by prime."""
    if n == 0:
        return 0, 0
    x, y = 1, 0
    for p, e in factorint(n).items():
        if p % 4 == 3:
            if e % 2:
                return None
            x, y = x * p ** (e // 2), y * p ** (e // 2)
            continue
        a, b = _prime_two_squares(p)
        for _ in range(e):
            x, y = x * a - y * b, x * b + y * a
    x, y = sorted((abs(x), abs(y)))
    return x, y


def sum_of_two_squares(d) -> tuple[Fraction, Fraction] | None:
    """(u, v) with u^2 + v^2 = d and 0 <= u <= v, or None when d has no such witness.

    d = n/m is a sum of two rational squares iff n*m is one; then
    d = (x/m)^2 + (y/m)^2 for n*m = x^2 + y^2.
    """
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    n, m = d.numerator, d.denominator
    xy = _integer_two_squares(n * m)
    if xy is None:
        return None
    u, v = Fraction(xy[0], m), Fraction(xy[1], m)
    assert u * u + v * v == d
    return u, v


def is_sum_of_two_squares(d) -> bool:
    """Criterion on the square-free part: no prime factor 3 (mod 4)."""
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    core = squarefree_part(d.numerator * d.denominator)
    return all(p % 4 != 3 for p in factorint(core))


# ---------------------------------------------------------------------------
# quadratic spaces and endomorphisms


@dataclass(frozen=True)
class QuadraticSpace:
    diagonal: tuple

    def __post_init__(self):
        diag = tuple(Fraction(g) for g in self.diagonal)
        if not diag or any(g == 0 for g in diag):
            raise ValueError("degenerate form")
        object.__setattr__(self, "diagonal", diag)

    @property
    def dimension(self) -> int:
        return len(self.diagonal)

    def pair(self, x, y) -> Fraction:
        return sum((g * a * b for g, a, b in zip(self.diagonal, x, y)), Fraction(0))

    @property
    def signature(self) -> tuple[int, int]:
        pos = sum(g > 0 for g in self.diagonal)
        return pos, self.dimension - pos


T_SPACE = QuadraticSpace((1, 1, -1, -1, -1, -1))


def _matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))] for i in range(len(A))]


@dataclass
class RMEndomorphism:
    matrix: list
    d: Fraction
    space: QuadraticSpace = T_SPACE

    def __post_init__(self):
        self.matrix = [[Fraction(x) for x in row] for row in self.matrix]
        self.d = Fraction(self.d)

    @property
    def blocks(self) -> list:
        """The 2x2 diagonal blocks (meaningful for block-diagonal matrices)."""
        M = self.matrix
        return [[M[i][i : i + 2], M[i + 1][i : i + 2]] for i in range(0, len(M) - 1, 2)]

    def to_json(self) -> dict:
        return {
            "d": str(self.d),
            "form": [str(g) for g in self.space.diagonal],
            "matrix": [[str(x) for x in row] for row in self.matrix],
        }


def build_rm_endomorphism(d, space: QuadraticSpace = T_SPACE) -> RMEndomorphism:
    if space.dimension % 2:
        raise ValueError("needs an even-dimensional space")
    for i in range(0, space.dimension, 2):
        if space.diagonal[i] != space.diagonal[i + 1]:
            raise ValueError("blocks must be scalar multiples of the identity form")
    w = sum_of_two_squares(d)
    if w is None:
        raise NotSumOfTwoSquares(f"{d} is not a sum of two rational squares")
    u, v = w
    n = space.dimension
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(0, n, 2):
        M[i][i], M[i][i + 1] = u, v
        M[i + 1][i], M[i + 1][i + 1] = v, -u
    phi = RMEndomorphism(M, d, space)
    report = verify_rm_endomorphism(space, phi.matrix, d)
    if not report.passed:
        raise AssertionError(f"construction failed its own check: {report.failures}")
    return phi


@dataclass
class VerificationReport:
    self_adjoint: bool
    squares_to_d: bool
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.self_adjoint and self.squares_to_d

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "self_adjoint": self.self_adjoint,
            "squares_to_d": self.squares_to_d,
            "failures": self.failures,
        }


def verify_rm_endomorphism(space: QuadraticSpace, phi, d) -> VerificationReport:
    """<phi e_i, e_j> = <e_i, phi e_j> for all i, j, and phi^2 = d I, exactly."""
    if isinstance(phi, RMEndomorphism):
        phi = phi.matrix
    M = [[Fraction(x) for x in row] for row in phi]
    n = space.dimension
    if len(M) != n or any(len(row) != n for row in M):
        raise ValueError("dimension mismatch")
    d = Fraction(d)
    g = space.diagonal
    failures = []
    for i in range(n):
        for j in range(i + 1, n):
            # <phi e_i, e_j> = g_j phi_ji
            if g[j] * M[j][i] != g[i] * M[i][j]:
                failures.append({"check": "self_adjoint", "pair": [i, j]})
    square_failures = []
    sq = _matmul(M, M)
    for i in range(n):
        for j in range(n):
            if sq[i][j] != (d if i == j else 0):
                square_failures.append({"check": "square", "pair": [i, j], "value": str(sq[i][j])})
    return VerificationReport(not failures, not square_failures, failures + square_failures)


def search_block_endomorphisms(d, height: int = 6, trials: int = 20000, seed: int = 0) -> list:
    """Random search for phi = blocks (u v; v -u) with u, v of height <= height and phi^2 = d.

    Evidence only: a miss says nothing about larger heights or other shapes of phi.
    """
    d = Fraction(d)
    rng = random.Random(seed)
    hits = set()
    for _ in range(trials):
        c = rng.randint(1, height)
        u = Fraction(rng.randint(-height, height), c)
        v = Fraction(rng.randint(-height, height), c)
        if u * u + v * v == d:
            hits.add((u, v))
    return sorted(hits)


# ---------------------------------------------------------------------------
# r + s sqrt(d) for any positive rational d (d may be a square)


@dataclass(frozen=True)
class Surd:
    r: Fraction
    s: Fraction
    d: Fraction

    def __post_init__(self):
        for name in ("r", "s", "d"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.d <= 0:
            raise ValueError("radicand must be positive")

    def _lift(self, o):
        if isinstance(o, Surd):
            if o.d != self.d:
                raise ValueError("different radicands")
            return o
        return Surd(o, 0, self.d)

    def __add__(self, o):
        o = self._lift(o)
        return Surd(self.r + o.r, self.s + o.s, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.r, -self.s, self.d)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Surd(self.r * o.r + self.d * self.s * o.s, self.r * o.s + self.s * o.r, self.d)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Surd):
            raise NotImplementedError("division by a surd")
        return Surd(self.r / o, self.s / o, self.d)

    def conj(self):
        return Surd(self.r, -self.s, self.d)

    def norm(self) -> Fraction:
        return self.r * self.r - self.d * self.s * self.s

    def is_rational(self) -> bool:
        return self.s == 0

    def value_bounds(self, sqrt_lo: Fraction, sqrt_hi: Fraction) -> tuple[Fraction, Fraction]:
        a, b = self.r + self.s * sqrt_lo, self.r + self.s * sqrt_hi
        return min(a, b), max(a, b)

    def sign(self, embedding: int = 1) -> int:
        """Sign under sqrt(d) -> embedding * |sqrt(d)|, by interval refinement."""
        x = Surd(self.r, embedding * self.s, self.d)
        lo, hi = sqrt_interval(self.d)
        if lo * lo == self.d:  # rational square root: exact
            value = x.r + x.s * lo
            return (value > 0) - (value < 0)
        if x.r == 0 and x.s == 0:
            return 0
        k = 1
        while True:
            lo, hi = sqrt_interval(self.d, k)
            a, b = x.value_bounds(lo, hi)
            if a > 0:
                return 1
            if b < 0:
                return -1
            k *= 4

    def __str__(self):
        if self.s == 0:
            return str(self.r)
        sign = "-" if self.s < 0 else "+"
        return f"{self.r} {sign} {abs(self.s)}*sqrt({self.d})"


def sqrt_interval(d: Fraction, scale: int = 1) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(d) <= hi of width at most 2 / (scale * 10^6)."""
    d = Fraction(d)
    N = scale * 10**6
    num = d.numerator * d.denominator * N * N
    r = isqrt(num)
    den = d.denominator * N
    return Fraction(r, den), Fraction(r + 1, den)


# ---------------------------------------------------------------------------
# discriminant classes of the rank-2 pieces


@dataclass
class DiscClassReport:
    d: Fraction
    blocks: list
    determinants: list
    expected: list
    classes: list
    product_class: int
    formula_class: int

    @property
    def passed(self) -> bool:
        return self.determinants == self.expected and self.product_class == self.formula_class

    def to_json(self) -> dict:
        return {
            "d": str(self.d),
            "passed": self.passed,
            "determinants": [str(x) for x in self.determinants],
            "expected": [str(x) for x in self.expected],
            "classes": self.classes,
            "product_class": self.product_class,
            "formula_class": self.formula_class,
        }


def _as_surd(a, d: Fraction) -> Surd:
    if isinstance(a, Surd):
        return a
    if isinstance(a, tuple):
        return Surd(a[0], a[1], d)
    if hasattr(a, "r") and hasattr(a, "s"):
        return Surd(a.r, a.s, d)
    return Surd(a, 0, d)


def block_matrix(a: Surd) -> list:
    """((a + a', sqrt d (a - a')), (sqrt d (a - a'), d (a + a'))) over Q(sqrt d)."""
    root = Surd(0, 1, a.d)
    tr, diff = a + a.conj(), a - a.conj()
    return [[tr, root * diff], [root * diff, tr * a.d]]


def disc_class_identities(d, elements) -> DiscClassReport:
    """det of each block equals 4 d N(a_i); the classes multiply to that of (4d)^n N(a_1 ... a_n)."""
    d = Fraction(d)
    surds = [_as_surd(a, d) for a in elements]
    dets, expected, classes, blocks = [], [], [], []
    prod = Surd(1, 0, d)
    for a in surds:
        if a.norm() == 0:
            raise ZeroNorm(f"{a} has norm 0")
        B = block_matrix(a)
        det = B[0][0] * B[1][1] - B[0][1] * B[1][0]
        if not det.is_rational():
            raise AssertionError("block determinant is not rational")
        blocks.append([[str(x) for x in row] for row in B])
        dets.append(det.r)
        expected.append(4 * d * a.norm())
        classes.append(squarefree_part(det.r.numerator * det.r.denominator))
        prod = prod * a
    product_class = squarefree_part(_prod_int(classes))
    total = (4 * d) ** len(surds) * prod.norm()
    formula_class = squarefree_part(total.numerator * total.denominator)
    return DiscClassReport(d, blocks, dets, expected, classes, product_class, formula_class)


def _prod_int(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


# ---------------------------------------------------------------------------
# the form on T_+


@dataclass
class TPlusReport:
    d: Fraction
    u: Fraction
    v: Fraction
    diagonal: list
    signs: dict
    nondegenerate: bool

    @property
    def indefinite(self) -> bool:
        return all(sorted(s) == [-1, -1, 1] for s in self.signs.values())

    def to_json(self) -> dict:
        return {
            "d": str(self.d),
            "u": str(self.u),
            "v": str(self.v),
            "diagonal": [str(x) for x in self.diagonal],
            "signs": {k: v for k, v in self.signs.items()},
            "nondegenerate": self.nondegenerate,
            "indefinite": self.indefinite,
        }


def t_plus_form_matrix(d, u, v) -> TPlusReport:
    """diag(1 + w^2, -1 - w^2, -1 - w^2) with w = (u - sqrt d) / v, and its signs in both real embeddings."""
    d, u, v = Fraction(d), Fraction(u), Fraction(v)
    if v == 0:
        raise ValueError("v must be nonzero")
    if u * u + v * v != d:
        raise ValueError("u^2 + v^2 must equal d")
    w = (Surd(u, -1, d)) / v
    a = 1 + w * w
    diagonal = [a, -a, -a]
    signs = {
        "+sqrt": [x.sign(1) for x in diagonal],
        "-sqrt": [x.sign(-1) for x in diagonal],
    }
    nondegenerate = all(0 not in s for s in signs.values())
    return TPlusReport(d, u, v, diagonal, signs, nondegenerate)
