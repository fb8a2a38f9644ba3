"""Arithmetic in F_p and its small extensions F_{p^k}, k <= 4.

Elements of F_{p^k} are coefficient vectors over F_p with respect to the basis
1, U, ..., U^{k-1} of F_p[U]/(modulus).  The integer encoding
``sum(c_i * p**i)`` gives the canonical element order used throughout the
package (0 .. q-1).

Two layers live here: :class:`FieldElement` for exact scalar work (oracles,
small sweeps) and :class:`FieldTables` for vectorized evaluation over the
whole field (point counting).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np
from sympy import factorint, isprime

MAX_DEGREE = 4


class FieldError(ValueError):
    pass


# ---------------------------------------------------------------------------
# quadratic character over the prime field


@dataclass(frozen=True)
class CharacterTable:
    """Quadratic character of F_p as a table of 8-bit signed integers."""

    p: int
    values: np.ndarray

    def __getitem__(self, x: int) -> int:
        return int(self.values[x % self.p])

    def __len__(self) -> int:
        return self.p


def _require_odd_prime(p: int) -> None:
    if p == 2 or not isprime(p):
        raise FieldError(f"{p} is not an odd prime")


@lru_cache(maxsize=256)
def build_character_table(p: int) -> CharacterTable:
    _require_odd_prime(p)
    values = np.full(p, -1, dtype=np.int8)
    values[0] = 0
    x = np.arange(1, p, dtype=np.int64)
    values[(x * x) % p] = 1
    values.setflags(write=False)
    return CharacterTable(p, values)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def squarefree_part(n: int) -> int:
    """Signed square-free part of a nonzero integer."""
    if n == 0:
        raise ValueError("square-free part of 0")
    sign = -1 if n < 0 else 1
    out = 1
    for r, e in factorint(abs(n)).items():
        if e % 2:
            out *= r
    return sign * out


def is_inert(p: int, d: int) -> str:
    """Splitting type of the prime p in Q(sqrt(d)): 'inert', 'split' or 'ramified'."""
    if d in (0, 1):
        raise FieldError("d must be a square-free integer other than 0 and 1")
    if squarefree_part(d) != d:
        raise FieldError(f"{d} is not square-free")
    if not isprime(p):
        raise FieldError(f"{p} is not prime")
    if p == 2:
        if d % 4 != 1:
            return "ramified"
        return "split" if d % 8 == 1 else "inert"
    if d % p == 0:
        return "ramified"
    return "split" if legendre(d, p) == 1 else "inert"


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, low degree first)


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _ptrim(a)
    inv = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _ptrim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a, b = a + [0] * (n - len(a)), b + [0] * (n - len(b))
    return _ptrim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim([c % p for c in a]), _ptrim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p (low degree first)."""
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    # f | U^{p^k} - U
    h = x
    for _ in range(k):
        h = _ppowmod(h, p, f, p)
    if _psub(h, x, p):
        return False
    for r in factorint(k):
        h = x
        for _ in range(k // r):
            h = _ppowmod(h, p, f, p)
        if len(_pgcd(f, _psub(h, x, p), p)) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# field descriptors and scalar elements


@dataclass(frozen=True)
class FieldDescriptor:
    p: int
    k: int = 1
    modulus: tuple[int, ...] | None = None  # monic, low degree first, length k+1

    @property
    def q(self) -> int:
        return self.p**self.k

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (tuple, list)):
            coeffs = [int(c) % self.p for c in value] + [0] * (self.k - len(value))
            return FieldElement(tuple(coeffs[: self.k]), self)
        return FieldElement((int(value) % self.p,) + (0,) * (self.k - 1), self)

    def from_int(self, n: int) -> "FieldElement":
        """Element with integer encoding n (base-p digits)."""
        coeffs = []
        for _ in range(self.k):
            n, r = divmod(n, self.p)
            coeffs.append(r)
        return FieldElement(tuple(coeffs), self)

    def elements(self):
        for n in range(self.q):
            yield self.from_int(n)

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    def __repr__(self) -> str:
        if self.k == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.k}[mod {self.modulus}]"


@lru_cache(maxsize=None)
def build_extension(p: int, k: int = 1) -> FieldDescriptor:
    """F_{p^k} with the lexicographically least irreducible monic modulus.

    Candidates U^k + c_{k-1}U^{k-1} + ... + c_0 are ordered by the tuple
    (c_{k-1}, ..., c_0).
    """
    _require_odd_prime(p)
    if not 1 <= k <= MAX_DEGREE:
        raise FieldError(f"extension degree {k} outside 1..{MAX_DEGREE}")
    if k == 1:
        return FieldDescriptor(p, 1, None)
    for n in range(p**k):
        # base-p digits of n, c_0 fastest: lexicographic in (c_{k-1}, ..., c_0)
        low_first = [(n // p**i) % p for i in range(k)]
        f = low_first + [1]
        if f[0] and is_irreducible(f, p):
            return FieldDescriptor(p, k, tuple(f))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, ...]
    field: FieldDescriptor

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other
        return self.field.element(other)

    def __add__(self, other):
        other = self._coerce(other)
        p = self.field.p
        return FieldElement(tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)), self.field)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(tuple((-a) % p for a in self.coeffs), self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        F = self.field
        if F.k == 1:
            return FieldElement(((self.coeffs[0] * other.coeffs[0]) % F.p,), F)
        prod = _pmod(_pmul(list(self.coeffs), list(other.coeffs), F.p), list(F.modulus), F.p)
        return F.element(prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        F = self.field
        if e < 0:
            return self.inverse() ** (-e)
        result, base = F.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_int(self) -> int:
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.p + c
        return n

    def __repr__(self) -> str:
        if self.field.k == 1:
            return str(self.coeffs[0])
        return f"{list(self.coeffs)}"


def quad_char(x: FieldElement, F: FieldDescriptor | None = None) -> int:
    """Quadratic character via Euler's criterion x^((q-1)/2)."""
    F = F or x.field
    x = F.element(x)
    if x.is_zero():
        return 0
    r = x ** ((F.q - 1) // 2)
    if r == F.one:
        return 1
    if r == -F.one:
        return -1
    raise AssertionError("Euler criterion returned neither 1 nor -1")  # pragma: no cover


def primitive_element(F: FieldDescriptor) -> FieldElement:
    """Smallest element (in canonical order) generating the multiplicative group."""
    n = F.q - 1
    exponents = [n // r for r in factorint(n)]
    for code in range(2 if F.k == 1 else F.p, F.q):
        g = F.from_int(code)
        if all(g**e != F.one for e in exponents):
            return g
    if F.q == 3:
        return F.element(2)
    raise AssertionError("no primitive element")  # pragma: no cover


# ---------------------------------------------------------------------------
# vectorized tables


class FieldTables:
    """Exp/log/character tables for F_q with vectorized arithmetic on integer codes."""

    def __init__(self, F: FieldDescriptor):
        self.field = F
        self.p, self.k, self.q = F.p, F.k, F.q
        self.weights = self.p ** np.arange(self.k, dtype=np.int64)
        self.generator = primitive_element(F)
        n = self.q - 1
        self.exp = self._exp_table(n)
        log = np.full(self.q, -1, dtype=np.int64)
        log[self.exp] = np.arange(n, dtype=np.int64)
        self.log = log
        chi = np.zeros(self.q, dtype=np.int8)
        chi[self.exp] = np.where(np.arange(n) % 2 == 0, 1, -1).astype(np.int8)
        self.chi = chi

    def _exp_table(self, n: int) -> np.ndarray:
        # baby steps sequentially, giant steps vectorized
        g = self.generator
        b = max(1, isqrt(n))
        baby = [self.field.one]
        for _ in range(b - 1):
            baby.append(baby[-1] * g)
        baby_codes = np.array([e.to_int() for e in baby], dtype=np.int64)
        giant = (g**b).to_int()
        rows = []
        cur = baby_codes
        total = 0
        while total < n:
            rows.append(cur)
            total += b
            cur = self.mul(cur, np.full_like(cur, giant))
        return np.concatenate(rows)[:n]

    # -- code <-> digit conversions

    def digits(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[..., None] // self.weights) % self.p

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return (np.asarray(digits, dtype=np.int64) * self.weights).sum(axis=-1)

    # -- arithmetic on code arrays

    def add(self, a, b) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        return self.encode((self.digits(a) + self.digits(b)) % self.p)

    def add_prime_scalar(self, a, c: int) -> np.ndarray:
        """a + c for c in the prime field."""
        a = np.asarray(a, dtype=np.int64)
        low = a % self.p
        return a - low + (low + c) % self.p

    def scale(self, a, c: int) -> np.ndarray:
        """c * a for c in the prime field."""
        a = np.asarray(a, dtype=np.int64)
        c %= self.p
        if self.k == 1:
            return (a * c) % self.p
        if c == 0:
            return np.zeros_like(a)
        if hasattr(self, "log"):
            out = self.exp[(self.log[a] + self.log[c]) % (self.q - 1)]
            return np.where(a == 0, 0, out)
        return self.encode((self.digits(a) * c) % self.p)

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a * b) % self.p
        if hasattr(self, "log"):
            la, lb = self.log[a], self.log[b]
            out = self.exp[(la + lb) % (self.q - 1)]
            return np.where((a == 0) | (b == 0), 0, out)
        # schoolbook product, used while the tables are being built
        A, B = self.digits(a), self.digits(b)
        k, p = self.k, self.p
        A, B = np.broadcast_arrays(A, B)
        prod = np.zeros(A.shape[:-1] + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[..., i + j] += A[..., i] * B[..., j]
        prod %= p
        m = self.field.modulus
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[..., deg].copy()
            for j in range(k):
                prod[..., deg - k + j] -= c * m[j]
            prod[..., deg] = 0
            prod %= p
        return self.encode(prod[..., :k])

    def square(self, a) -> np.ndarray:
        return self.mul(a, a)

    def character(self, a) -> np.ndarray:
        return self.chi[np.asarray(a, dtype=np.int64)]


@lru_cache(maxsize=32)
def field_tables(p: int, k: int = 1) -> FieldTables:
    return FieldTables(build_extension(p, k))
