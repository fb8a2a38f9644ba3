"""Exact polynomial algebra over Q for characteristic polynomials of degree <= 6.

Polynomials are lists of ints/Fractions, lowest degree first:
``[c0, c1, ..., cn]`` is c0 + c1*Z + ... + cn*Z^n.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt, lcm

import mpmath

from .ffield import squarefree_part

CYCLOTOMIC_ORDERS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 18)


class NotIrreducible(ValueError):
    pass


class InconsistentPowerSums(ValueError):
    pass


# ---------------------------------------------------------------------------
# basic arithmetic


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a) -> int:
    return len(trim(a)) - 1


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def normalize(a):
    return [_norm(x) for x in trim(a)]


def padd(a, b):
    n = max(len(a), len(b))
    return normalize([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def psub(a, b):
    return padd(a, [-x for x in b])


def pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return normalize(out)


def pscale(a, c):
    return normalize([c * x for x in a])


def pdivmod(a, b):
    a = [Fraction(x) for x in trim(a)]
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead = Fraction(b[-1])
    db = len(b) - 1
    quot = [Fraction(0)] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        c = a[-1] / lead
        shift = len(a) - 1 - db
        quot[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        a = trim(a)
    return normalize(quot), normalize(a)


def pexact_div(a, b):
    quot, rem = pdivmod(a, b)
    if rem:
        raise ArithmeticError("division is not exact")
    return quot


def divides(b, a) -> bool:
    return not pdivmod(a, b)[1]


def pderiv(a):
    return normalize([i * a[i] for i in range(1, len(a))])


def pgcd(a, b):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    if not a:
        return []
    return pscale(a, Fraction(1) / Fraction(a[-1]))


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def ppow(a, e: int):
    out = [1]
    for _ in range(e):
        out = pmul(out, a)
    return out


def from_roots(roots):
    out = [1]
    for r in roots:
        out = pmul(out, [-r, 1])
    return out


def is_monic(a) -> bool:
    return bool(a) and a[-1] == 1


def is_integral(a) -> bool:
    return all(Fraction(x).denominator == 1 for x in a)


def monic_integer_scaling(h):
    """(m, H) with H(W) = m^n h(W/m) monic integral, for monic rational h."""
    n = degree(h)
    m = 1
    for c in h:
        m = lcm(m, Fraction(c).denominator)
    while True:
        H = normalize([Fraction(h[i]) * m ** (n - i) for i in range(n + 1)])
        if is_integral(H):
            return m, H
        m *= m  # pragma: no cover - m = lcm of denominators always suffices


def format_poly(a, var: str = "Z") -> str:
    a = normalize(a)
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and c == 1:
            s = mono
        elif mono and c == -1:
            s = "-" + mono
        else:
            s = f"{c}{'*' + mono if mono else ''}"
        terms.append(s)
    return " + ".join(terms).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Newton identities


def power_sums(a, m: int):
    """Power sums s_1..s_m of the roots of the monic polynomial a."""
    n = degree(a)
    if not is_monic(a):
        raise ValueError("power sums need a monic polynomial")
    # e_k = (-1)^k * coefficient of Z^{n-k}
    e = [(-1) ** k * a[n - k] if k <= n else 0 for k in range(m + 1)]
    s = [0] * (m + 1)
    for k in range(1, m + 1):
        acc = (-1) ** (k - 1) * k * e[k]
        for i in range(1, k):
            acc += (-1) ** (i - 1) * e[i] * s[k - i]
        # s_k = sum_{i=1}^{k-1} (-1)^{i-1} e_i s_{k-i} + (-1)^{k-1} k e_k
        s[k] = _norm(acc)
    return s[1:]


def elementary_from_power_sums(t):
    """e_1..e_m from power sums t_1..t_m (exact rationals)."""
    m = len(t)
    e = [Fraction(1)] + [Fraction(0)] * m
    for k in range(1, m + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * t[i - 1]
        e[k] = acc / k
    return e


def newton_to_poly(power_sums_, n: int, tail=None, require_integral: bool = True):
    """Monic degree-n polynomial from power sums t_1..t_m, m <= n.

    Coefficients of Z^{n-1}..Z^{n-m} come from Newton's identities; if m < n
    ``tail(top)`` receives ``top = [c_0=1, c_1, ..., c_m]`` (c_k the
    coefficient of Z^{n-k}) and must return the full list c_0..c_n.
    """
    t = list(power_sums_)
    m = len(t)
    if m > n:
        raise ValueError("more power sums than the degree")
    e = elementary_from_power_sums(t)
    top = [(-1) ** k * e[k] for k in range(m + 1)]
    if require_integral and any(c.denominator != 1 for c in top):
        raise InconsistentPowerSums(f"non-integral elementary symmetric functions {top}")
    if m == n:
        full = top
    else:
        if tail is None:
            raise ValueError("a tail rule is needed when fewer power sums than the degree are given")
        full = list(tail(top))
    if len(full) != n + 1:
        raise ValueError("tail rule returned the wrong number of coefficients")
    return normalize(list(reversed(full)))


def functional_equation_tail(p: int, eps: int, n: int = 6):
    """Tail rule c_{n-k} = eps * p^{n-2k} * c_k for a Weil polynomial of weight 2."""

    def tail(top):
        c = list(top) + [None] * (n + 1 - len(top))
        for k in range(n + 1):
            j = n - k
            if c[j] is None:
                if c[k] is None:
                    raise ValueError("tail rule needs c_0..c_{n/2}")
                c[j] = Fraction(eps) * Fraction(p) ** (n - 2 * k) * c[k]
            elif c[k] is not None and j > k and c[j] != eps * Fraction(p) ** (n - 2 * k) * c[k]:
                raise InconsistentPowerSums("known coefficients violate the functional equation")
        return c

    return tail


# ---------------------------------------------------------------------------
# numerics (always followed by exact verification)


def complex_roots(a, dps: int = 60):
    a = trim(a)
    if len(a) <= 1:
        return []
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator for c in reversed(a)]
        return mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)


def squarefree_kernel(a):
    g = pgcd(a, pderiv(a))
    if degree(g) <= 0:
        return normalize(a)
    return pexact_div(a, g)


def rational_roots(a):
    """All rational roots of a (without multiplicity), found numerically and verified exactly."""
    a = trim(a)
    if degree(a) < 1:
        return []
    found = set()
    z = 0
    while a and a[0] == 0:
        a = a[1:]
        z += 1
    if z:
        found.add(Fraction(0))
    if degree(a) >= 1:
        a = squarefree_kernel(a)
        scale = lcm(*[Fraction(c).denominator for c in a])
        A = [int(Fraction(c) * scale) for c in a]
        lead = abs(A[-1])
        # r * lead is an integer for a rational root r; keep enough digits for it
        dps = 60 + len(str(lead))
        with mpmath.workdps(dps):
            for r in complex_roots(A, dps):
                if abs(mpmath.im(r)) > mpmath.mpf(10) ** (-dps // 3) * max(1, abs(r)):
                    continue
                base = int(mpmath.nint(mpmath.re(r) * lead))
                for cand_num in (base - 1, base, base + 1):
                    cand = Fraction(cand_num, lead)
                    if peval(A, cand) == 0:
                        found.add(cand)
    return sorted(found)


def has_rational_root(a) -> bool:
    return bool(rational_roots(a))


def quadratic_factor(h, weil_p: int | None = None):
    """A monic rational quadratic factor of the monic quartic h, or None.

    With ``weil_p`` (all roots known to have modulus p) the search is the
    exhaustive one over Z^2 + uZ + v with v = +-p^2, |u| <= 2p; otherwise the
    roots are paired numerically and every candidate verified exactly.
    """
    if degree(h) != 4 or not is_monic(h):
        raise ValueError("quadratic_factor expects a monic quartic")
    m, H = monic_integer_scaling(h)
    if weil_p is not None and m == 1:
        P2 = weil_p * weil_p
        for v in (P2, -P2):
            for u in range(-2 * weil_p, 2 * weil_p + 1):
                g = [v, u, 1]
                if divides(g, H):
                    return g
        return None
    roots = complex_roots(H)
    tried = set()
    for i, j in combinations(range(4), 2):
        u = -(roots[i] + roots[j])
        v = roots[i] * roots[j]
        cand = (int(mpmath.nint(mpmath.re(u))), int(mpmath.nint(mpmath.re(v))))
        if cand in tried:
            continue
        tried.add(cand)
        G = [cand[1], cand[0], 1]
        if divides(G, H):
            # undo the scaling: G(W) with W = mZ, divided by m^2
            return normalize([Fraction(G[0], m * m), Fraction(G[1], m), 1])
    return None


def is_irreducible_quartic(h, weil_p: int | None = None) -> bool:
    return not has_rational_root(h) and quadratic_factor(h, weil_p) is None


# ---------------------------------------------------------------------------
# quartic invariants


def quartic_discriminant(h):
    if degree(h) != 4:
        raise ValueError("quartic_discriminant expects degree 4")
    e, d, c, b, a = [Fraction(x) for x in h]
    disc = (
        256 * a**3 * e**3 - 192 * a**2 * b * d * e**2 - 128 * a**2 * c**2 * e**2
        + 144 * a**2 * c * d**2 * e - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
        - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e + 18 * a * b * c * d**3
        + 16 * a * c**4 * e - 4 * a * c**3 * d**2 - 27 * b**4 * e**2 + 18 * b**3 * c * d * e
        - 4 * b**3 * d**3 - 4 * b**2 * c**3 * e + b**2 * c**2 * d**2
    )
    return _norm(disc)


def is_square_of_quadratic(h):
    """g with g^2 = h for a monic quartic h, else None."""
    if degree(h) != 4 or not is_monic(h):
        raise ValueError("expects a monic quartic")
    a3, a2 = Fraction(h[3]), Fraction(h[2])
    half = a3 / 2
    c = (a2 - half * half) / 2
    g = normalize([c, half, 1])
    return g if pmul(g, g) == normalize(h) else None


def resolvent_cubic(h):
    """x^3 - b x^2 + (ac - 4d) x - (a^2 d - 4bd + c^2) for h = Z^4 + aZ^3 + bZ^2 + cZ + d.

    Its roots are r1r2 + r3r4, r1r3 + r2r4, r1r4 + r2r3.
    """
    if degree(h) != 4 or not is_monic(h):
        raise ValueError("expects a monic quartic")
    d, c, b, a = [Fraction(x) for x in h[:4]]
    return normalize([-(a * a * d - 4 * b * d + c * c), a * c - 4 * d, -b, 1])


def rational_square_root(x):
    x = Fraction(x)
    if x < 0:
        return None
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def square_class(x) -> int:
    x = Fraction(x)
    return squarefree_part(x.numerator * x.denominator)


# ---------------------------------------------------------------------------
# quadratic fields


@dataclass(frozen=True)
class QuadFieldElement:
    """r + s*sqrt(d), d square-free and not 0 or 1."""

    r: Fraction
    s: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "s", Fraction(self.s))
        if self.d in (0, 1) or squarefree_part(self.d) != self.d:
            raise ValueError(f"bad radicand {self.d}")

    def _lift(self, o):
        if isinstance(o, QuadFieldElement):
            if o.d != self.d:
                raise ValueError("different quadratic fields")
            return o
        return QuadFieldElement(Fraction(o), 0, self.d)

    def __add__(self, o):
        o = self._lift(o)
        return QuadFieldElement(self.r + o.r, self.s + o.s, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElement(-self.r, -self.s, self.d)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return QuadFieldElement(self.r * o.r + self.d * self.s * o.s, self.r * o.s + self.s * o.r, self.d)

    __rmul__ = __mul__

    def conj(self):
        return QuadFieldElement(self.r, -self.s, self.d)

    def norm(self) -> Fraction:
        return self.r * self.r - self.d * self.s * self.s

    def trace(self) -> Fraction:
        return 2 * self.r

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero norm")
        return QuadFieldElement(self.r / n, -self.s / n, self.d)

    def __truediv__(self, o):
        return self * self._lift(o).inverse()

    def is_rational(self) -> bool:
        return self.s == 0

    def __eq__(self, o):
        if isinstance(o, QuadFieldElement):
            return (self.r, self.s, self.d) == (o.r, o.s, o.d)
        return self.s == 0 and self.r == o

    def __hash__(self):
        return hash((self.r, self.s, self.d))

    def __repr__(self):
        return f"({self.r} + {self.s}*sqrt({self.d}))"


def qpoly_conj(g):
    return [c.conj() for c in g]


def qpoly_mul(a, b):
    d = next(c.d for c in list(a) + list(b) if isinstance(c, QuadFieldElement))
    zero = QuadFieldElement(0, 0, d)
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def split_over_quadratic(h, d: int):
    """(g, g^sigma) with g monic quadratic over Q(sqrt d) and g * g^sigma = h, else None.

    Writing g = Z^2 + (A + B sqrt d) Z + (C + E sqrt d), the product g g^sigma
    has coefficients 2A, A^2 - dB^2 + 2C, 2(AC - dBE), C^2 - dE^2.  A is
    forced; B = 0 is handled directly, B != 0 reduces to a cubic in X = B^2.
    """
    if degree(h) != 4 or not is_monic(h):
        raise ValueError("expects a monic quartic")
    if d in (0, 1) or squarefree_part(d) != d:
        raise ValueError(f"bad radicand {d}")
    a0, a1, a2, a3 = [Fraction(x) for x in h[:4]]
    A = a3 / 2
    alpha = (a2 - A * A) / 2
    beta = Fraction(d, 2)
    gamma = A * alpha - a1 / 2
    solutions = []
    # B = 0
    if gamma == 0:
        E2 = (alpha * alpha - a0) / d
        E = rational_square_root(E2)
        if E is not None:
            solutions.append((Fraction(0), alpha, E))
    # B != 0: d X (alpha + beta X)^2 - (gamma + A beta X)^2 - a0 d X = 0
    cubic = normalize([
        -gamma * gamma,
        d * alpha * alpha - 2 * gamma * A * beta - a0 * d,
        2 * d * alpha * beta - A * A * beta * beta,
        d * beta * beta,
    ])
    for X in rational_roots(cubic):
        if X <= 0:
            continue
        B = rational_square_root(X)
        if B is None:
            continue
        C = alpha + beta * X
        E = (A * C - a1 / 2) / (d * B)
        solutions.append((B, C, E))
    for B, C, E in solutions:
        g = [QuadFieldElement(C, E, d), QuadFieldElement(A, B, d), QuadFieldElement(1, 0, d)]
        gs = qpoly_conj(g)
        prod = qpoly_mul(g, gs)
        if all(c.s == 0 for c in prod) and normalize([c.r for c in prod]) == normalize(h):
            return g, gs
    return None


# ---------------------------------------------------------------------------
# Galois groups of quartics


def galois_group_quartic(h, weil_p: int | None = None) -> str:
    """One of 'C4', 'V4', 'D4', 'A4', 'S4' for an irreducible monic quartic over Q."""
    if not is_irreducible_quartic(h, weil_p):
        raise NotIrreducible(format_poly(h))
    disc = quartic_discriminant(h)
    disc_square = rational_square_root(disc) is not None
    roots = rational_roots(resolvent_cubic(h))
    if not roots:
        return "A4" if disc_square else "S4"
    if len(roots) == 3:
        return "V4"
    if disc_square:  # pragma: no cover - a square disc forces 0 or 3 rational roots
        raise AssertionError("inconsistent resolvent data")
    return "C4" if split_over_quadratic(h, square_class(disc)) is not None else "D4"


def _pairing_classes(h, theta):
    """Square classes of the quadratic field fixed by the pairing with resolvent root theta."""
    d0, c, b, a = [Fraction(x) for x in h[:4]]
    classes = set()
    for value in (theta * theta - 4 * d0, a * a - 4 * (b - theta)):
        if value != 0:
            classes.add(square_class(value))
    return classes


def quadratic_subfields(h, weil_p: int | None = None) -> list[int]:
    """Square-free d with Q(sqrt d) inside the splitting field of the irreducible quartic h."""
    group = galois_group_quartic(h, weil_p)
    disc_class = square_class(quartic_discriminant(h))
    if group == "A4":
        return []
    if group in ("S4", "C4"):
        return [disc_class]
    classes = set()
    for theta in rational_roots(resolvent_cubic(h)):
        classes |= {cl for cl in _pairing_classes(h, theta) if cl != 1}
    if group == "D4":
        classes.add(disc_class)
        classes |= {square_class(disc_class * cl) for cl in list(classes)}
    classes.discard(1)
    return sorted(classes)


def real_quadratic_subfields(h, weil_p: int | None = None) -> list[int]:
    """Real quadratic subfields of the splitting field, each one checked exactly.

    A class is confirmed when it is the discriminant class, when h splits
    over it, or when it is the product of two confirmed classes.
    """
    candidates = quadratic_subfields(h, weil_p)
    disc_class = square_class(quartic_discriminant(h))
    confirmed = {d for d in candidates if d == disc_class or split_over_quadratic(h, d) is not None}
    confirmed |= {square_class(a * b) for a in confirmed for b in confirmed if a != b}
    out = []
    for d in candidates:
        if d not in confirmed:  # pragma: no cover - defensive
            raise AssertionError(f"subfield Q(sqrt {d}) failed verification")
        if d > 1:
            out.append(d)
    return out


# ---------------------------------------------------------------------------
# cyclotomic stripping and root powering


def _cyclotomic(n: int):
    poly = [-1] + [0] * (n - 1) + [1]
    for k in range(1, n):
        if n % k == 0:
            poly = pexact_div(poly, _cyclotomic(k))
    return poly


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def scaled_cyclotomic(k: int, p: int, n: int = 1):
    """p^{n phi(k)} Phi_k(Z / p^n) as an integer polynomial."""
    phi = _cyclotomic(k)
    deg = len(phi) - 1
    P = p**n
    return normalize([c * P ** (deg - i) for i, c in enumerate(phi)])


def strip_p_cyclotomic(P, p: int, n: int = 1):
    """Remove every factor whose roots are p^n times a root of unity.

    Returns (quotient, Counter of stripped orders k).
    """
    P = normalize(P)
    stripped = Counter()
    changed = True
    while changed:
        changed = False
        for k in CYCLOTOMIC_ORDERS:
            if euler_phi(k) > degree(P):
                continue
            factor = scaled_cyclotomic(k, p, n)
            quot, rem = pdivmod(P, factor)
            if not rem:
                P = quot
                stripped[k] += 1
                changed = True
    return P, stripped


def root_power(h, f: int):
    """Monic polynomial whose roots are the f-th powers of the roots of h.

    Equivalent to the resultant Res_Y(h(Y), Z - Y^f); computed through the
    power sums s_{f}, s_{2f}, ..., which stays exact.
    """
    n = degree(h)
    s = power_sums(h, n * f)
    t = [s[f * j - 1] for j in range(1, n + 1)]
    return newton_to_poly(t, n, require_integral=False)
