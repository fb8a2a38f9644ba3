"""Binary quadratic forms and the double cover w^2 = q1(y,z) q2(x,z) q3(x,y).

The branch locus is six lines in three pairs: q1 cuts two lines through
e1 = (1:0:0), q2 two lines through e2 = (0:1:0), q3 two lines through
e3 = (0:0:1).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from sympy import sqrt_mod

from .ffield import FieldError, legendre, squarefree_part


class SurfaceError(ValueError):
    pass


class ZeroDiscriminant(SurfaceError):
    pass


class BadDenominator(SurfaceError):
    def __init__(self, p: int):
        super().__init__(f"a coefficient denominator vanishes modulo {p}")
        self.p = p


class NotGoodPrime(SurfaceError):
    pass


def parse_rational(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s).strip())


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rational_square_class(x: Fraction) -> int:
    """Square-free integer representing x modulo (Q*)^2."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("square class of 0")
    return squarefree_part(x.numerator * x.denominator)


def is_rational_square(x: Fraction) -> bool:
    x = Fraction(x)
    return x == 0 or rational_square_class(x) == 1


def reduce_rational(x: Fraction, p: int) -> int:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise BadDenominator(p)
    return x.numerator * pow(x.denominator, -1, p) % p


@dataclass(frozen=True)
class BinaryQuadraticForm:
    """a*U^2 + b*U*V + c*V^2 with exact rational coefficients."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __init__(self, a, b, c):
        object.__setattr__(self, "a", parse_rational(a))
        object.__setattr__(self, "b", parse_rational(b))
        object.__setattr__(self, "c", parse_rational(c))
        if self.a == self.b == self.c == 0:
            raise SurfaceError("the zero form is not allowed")

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c)

    @cached_property
    def discriminant(self) -> Fraction:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, u, v):
        return self.a * u * u + self.b * u * v + self.c * v * v

    def reduce(self, p: int) -> tuple[int, int, int]:
        return tuple(reduce_rational(x, p) for x in self.coefficients)

    def scaled(self, s) -> "BinaryQuadraticForm":
        s = parse_rational(s)
        return BinaryQuadraticForm(s * self.a, s * self.b, s * self.c)

    def to_json(self) -> list[str]:
        return [format_rational(x) for x in self.coefficients]

    @classmethod
    def from_json(cls, data: Iterable) -> "BinaryQuadraticForm":
        a, b, c = data
        return cls(a, b, c)


def form_discriminant(f: BinaryQuadraticForm) -> Fraction:
    return f.discriminant


@dataclass(frozen=True)
class SixLineSurface:
    q1: BinaryQuadraticForm  # in (y, z)
    q2: BinaryQuadraticForm  # in (x, z)
    q3: BinaryQuadraticForm  # in (x, y)

    def __post_init__(self):
        for name, f in self.items():
            if f.discriminant == 0:
                raise ZeroDiscriminant(f"{name} has zero discriminant (double line)")

    def items(self):
        return (("q1", self.q1), ("q2", self.q2), ("q3", self.q3))

    @property
    def forms(self) -> tuple[BinaryQuadraticForm, BinaryQuadraticForm, BinaryQuadraticForm]:
        return (self.q1, self.q2, self.q3)

    @cached_property
    def discriminants(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(f.discriminant for f in self.forms)

    @cached_property
    def discriminant_classes(self) -> tuple[int, int, int]:
        return tuple(rational_square_class(D) for D in self.discriminants)

    @cached_property
    def discriminant_product_is_square(self) -> bool:
        D1, D2, D3 = self.discriminants
        return is_rational_square(D1 * D2 * D3)

    def branch_value(self, x, y, z):
        return self.q1(y, z) * self.q2(x, z) * self.q3(x, y)

    def to_json(self) -> dict:
        return {name: f.to_json() for name, f in self.items()}

    @classmethod
    def from_json(cls, data: dict) -> "SixLineSurface":
        return cls(*(BinaryQuadraticForm.from_json(data[n]) for n in ("q1", "q2", "q3")))

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def make_surface(q1, q2, q3) -> SixLineSurface:
    def coerce(f):
        return f if isinstance(f, BinaryQuadraticForm) else BinaryQuadraticForm(*f)

    return SixLineSurface(coerce(q1), coerce(q2), coerce(q3))


def load_surface(path) -> SixLineSurface:
    with open(path) as fh:
        return SixLineSurface.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# reduction modulo p


@dataclass(frozen=True)
class SurfaceModP:
    p: int
    forms: tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]
    source: SixLineSurface | None = field(default=None, compare=False)

    def __post_init__(self):
        forms = tuple(tuple(int(c) % self.p for c in f) for f in self.forms)
        if len(forms) != 3 or any(len(f) != 3 for f in forms):
            raise SurfaceError("expected three binary quadratic forms")
        object.__setattr__(self, "forms", forms)

    @property
    def q1(self):
        return self.forms[0]

    @property
    def q2(self):
        return self.forms[1]

    @property
    def q3(self):
        return self.forms[2]

    @cached_property
    def good(self) -> bool:
        return line_configuration(self) is not None


def reduce_mod_p(X: SixLineSurface, p: int) -> SurfaceModP:
    if p == 2:
        raise FieldError("characteristic 2 is not supported")
    return SurfaceModP(p, tuple(f.reduce(p) for f in X.forms), X)


def as_mod_p(X, p: int) -> SurfaceModP:
    if isinstance(X, SurfaceModP):
        if X.p != p:
            raise SurfaceError(f"surface is reduced modulo {X.p}, not {p}")
        return X
    return reduce_mod_p(X, p)


# ---------------------------------------------------------------------------
# F_{p^2} = F_p(sqrt(delta)) for the line configuration


@dataclass(frozen=True, order=True)
class Fp2:
    """a + b*sqrt(delta) with delta the least quadratic non-residue mod p."""

    a: int
    b: int
    p: int = field(compare=False)
    delta: int = field(compare=False)

    def __add__(self, o):
        return Fp2((self.a + o.a) % self.p, (self.b + o.b) % self.p, self.p, self.delta)

    def __sub__(self, o):
        return Fp2((self.a - o.a) % self.p, (self.b - o.b) % self.p, self.p, self.delta)

    def __mul__(self, o):
        p = self.p
        return Fp2(
            (self.a * o.a + self.delta * self.b * o.b) % p,
            (self.a * o.b + self.b * o.a) % p,
            p,
            self.delta,
        )

    def inverse(self):
        p = self.p
        n = (self.a * self.a - self.delta * self.b * self.b) % p
        if n == 0:
            raise ZeroDivisionError("inverse of zero in F_p^2")
        ni = pow(n, -1, p)
        return Fp2(self.a * ni % p, -self.b * ni % p, p, self.delta)

    def __truediv__(self, o):
        return self * o.inverse()

    def frobenius(self):
        return Fp2(self.a, -self.b % self.p, self.p, self.delta)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def key(self) -> tuple[int, int]:
        return (self.a, self.b)


def least_nonresidue(p: int) -> int:
    for n in range(2, p):
        if legendre(n, p) == -1:
            return n
    raise FieldError(f"no non-residue modulo {p}")


def _sqrt_fp2(D: int, p: int, delta: int) -> Fp2:
    D %= p
    if D == 0:
        return Fp2(0, 0, p, delta)
    if legendre(D, p) == 1:
        return Fp2(int(sqrt_mod(D, p)), 0, p, delta)
    # D = delta * s^2
    s = int(sqrt_mod(D * pow(delta, -1, p) % p, p))
    return Fp2(0, s, p, delta)


def quadratic_roots(form: tuple[int, int, int], p: int, delta: int) -> tuple[Fp2, Fp2]:
    """Roots r of a*r^2 + b*r + c over F_{p^2} (a != 0 mod p)."""
    a, b, c = form
    root = _sqrt_fp2(b * b - 4 * a * c, p, delta)
    inv2a = Fp2(pow(2 * a, -1, p), 0, p, delta)
    mb = Fp2(-b % p, 0, p, delta)
    return ((mb + root) * inv2a, (mb - root) * inv2a)


@dataclass(frozen=True)
class LineConfiguration:
    """The six lines over F_{p^2} and their 15 intersection points.

    Line (1, i): y = r_i z; line (2, j): x = s_j z; line (3, k): x = u_k y.
    Cross points are affine (z = 1) and stored as coordinate pairs (x, y).
    """

    p: int
    roots: tuple[tuple[Fp2, Fp2], tuple[Fp2, Fp2], tuple[Fp2, Fp2]]
    cross: dict  # ((form, idx), (form, idx)) -> (x, y)


def line_configuration(X: SurfaceModP) -> LineConfiguration | None:
    """Lines and nodes of the reduced branch sextic, or None if p is bad."""
    p = X.p
    for a, b, c in X.forms:
        if a == 0 or c == 0 or (b * b - 4 * a * c) % p == 0:
            return None
    delta = least_nonresidue(p)
    r, s, u = (quadratic_roots(f, p, delta) for f in X.forms)
    cross = {}
    for i in range(2):
        for j in range(2):
            cross[((1, i), (2, j))] = (s[j], r[i])
    for i in range(2):
        for k in range(2):
            cross[((1, i), (3, k))] = (u[k] * r[i], r[i])
    for j in range(2):
        for k in range(2):
            cross[((2, j), (3, k))] = (s[j], s[j] / u[k])
    points = {(x.key, y.key) for x, y in cross.values()}
    if len(points) != 12:
        return None
    return LineConfiguration(p, (r, s, u), cross)


def is_good_prime(X, p: int) -> bool:
    """True iff the reduced six lines meet in exactly 15 distinct nodes."""
    if p == 2:
        return False
    return as_mod_p(X, p).good
