"""The explicit families X^(2,t), X^(5,t), X^(13) and the elliptic fibration of X^(2,t).

Family coefficients are polynomials in t (lowest degree first, Fraction
coefficients), so a family can be specialised at t in Q or reduced modulo p
at every t in F_p.

The fibration of the Q(sqrt 2) family is y : x = l.  Its fibre is
w^2 = F(x, z; l) with F = (1 + l)(2 + t^2 l) q1(lx, z) q2(x, z); near l = oo
the chart x = m y gives F' = (m + 1)(2m + t^2) q1(y, z) q2(my, z).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import isprime, primerange

from .counter import count_singular
from .ffield import build_character_table
from .ratpoly import normalize, padd, peval, pmul, pscale, psub, ppow
from .surface import SixLineSurface, SurfaceModP, make_surface, reduce_rational

F_ = Fraction

# coefficient polynomials in t, lowest degree first
FAMILY_FORMS = {
    "x2": (
        ([F_(1, 4), F_(-1, 2), F_(1, 8)], [2, -2, 1], [2, -4, 1]),
        ([F_(1, 4), F_(1, 2), F_(1, 8)], [2, 2, 1], [2, 4, 1]),
        ([2], [2, 0, 1], [0, 0, 1]),
    ),
    "x5": (
        ([1], [0, 1], [F_(5, 4), F_(5, 4), F_(5, 16)]),
        ([1], [1], [F_(5, 16), F_(1, 16), F_(1, 320)]),
        ([1], [1], [F_(1, 20)]),
    ),
    "x13": (
        ([25], [26], [13]),
        ([1], [2], [13]),
        ([9], [26], [13]),
    ),
}

# residues r mod m for which the congruence #X_p(F_p) = 1 (mod p) is expected
FAMILY_RESIDUES = {
    "x2": (8, (3, 5)),
    "x5": (5, (2, 3)),
    "x13": (13, (2, 5, 6, 7, 8, 11)),
}

FAMILY_FIELD = {"x2": 2, "x5": 5, "x13": 13}


@dataclass(frozen=True)
class FamilyId:
    name: str
    t: Fraction | None = None

    def __post_init__(self):
        if self.name not in FAMILY_FORMS:
            raise ValueError(f"unknown family {self.name!r}")
        if self.name == "x13":
            if self.t is not None:
                raise ValueError("x13 takes no parameter")
        else:
            if self.t is None:
                raise ValueError(f"{self.name} needs a parameter t")
            object.__setattr__(self, "t", Fraction(self.t))

    @property
    def special(self) -> str | None:
        """Cases singled out for the Q(sqrt 2) family (t = 0; t^2 = -2 has no rational t)."""
        if self.name == "x2" and self.t == 0:
            return "t=0"
        return None


def make_family(name: str, t=None) -> SixLineSurface:
    fid = FamilyId(name, t)
    value = 0 if fid.t is None else fid.t
    return make_surface(*(tuple(peval(c, value) for c in form) for form in FAMILY_FORMS[name]))


def family_mod_p(name: str, p: int, t: int | None = None) -> SurfaceModP:
    """The family reduced modulo p at t in F_p."""
    tv = 0 if t is None else t % p
    forms = tuple(
        tuple(peval([reduce_rational(c, p) for c in coeff], tv) % p for coeff in form)
        for form in FAMILY_FORMS[name]
    )
    return SurfaceModP(p, forms)


def qualifying_primes(name: str, bound: int) -> list[int]:
    m, residues = FAMILY_RESIDUES[name]
    return [p for p in primerange(3, bound + 1) if p % m in residues]


@dataclass
class CongruenceReport:
    family: str
    bound: int
    primes: list = field(default_factory=list)
    cells: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "bound": self.bound,
            "primes": len(self.primes),
            "cells": self.cells,
            "failures": self.failures,
            "passed": self.passed,
        }


def verify_family_congruences(name: str, prime_bound: int) -> CongruenceReport:
    """Check count = 1 (mod p) at every qualifying p <= bound and every t in F_p."""
    report = CongruenceReport(name, prime_bound)
    for p in qualifying_primes(name, prime_bound):
        report.primes.append(p)
        ts = [None] if name == "x13" else range(p)
        for t in ts:
            N = count_singular(family_mod_p(name, p, t), 1)
            report.cells += 1
            if N % p != 1:
                report.failures.append({"p": p, "t": t, "count": N})
    return report


# ---------------------------------------------------------------------------
# the point count of the Q(sqrt 2) family


def two_is_square(q: int) -> bool:
    from sympy import factorint

    (p, k), = factorint(q).items()
    return k % 2 == 0 or p % 8 in (1, 7)


def theorem73_forms(t: int, p: int) -> tuple:
    """Reduced forms with q3 built from its linear factors (x + y)(2x + t^2 y)."""
    X = family_mod_p("x2", p, t)
    lin1, lin2 = (1, 1), (2, t * t % p)
    q3 = (
        lin1[0] * lin2[0] % p,
        (lin1[0] * lin2[1] + lin1[1] * lin2[0]) % p,
        lin1[1] * lin2[1] % p,
    )
    return (X.q1, X.q2, q3)


@dataclass(frozen=True)
class Theorem73Result:
    q: int
    t: int
    count: int
    expected: int
    case: str

    @property
    def passed(self) -> bool:
        return self.count == self.expected


def theorem73_count(q: int, t: int) -> Theorem73Result:
    """Count the model over F_q for t in the prime field and compare with the predicted value."""
    from sympy import factorint

    fac = factorint(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, k), = fac.items()
    if p in (2, 3):
        raise ValueError("characteristic 2 and 3 are excluded")
    if two_is_square(q):
        raise ValueError(f"2 is a square in F_{q}")
    t %= p
    X = SurfaceModP(p, theorem73_forms(t, p))
    N = count_singular(X, (p, k))
    if t == 0:
        case, expected = "t=0", q * q + 2 * q + 1
    elif (t * t + 2) % p == 0:
        case, expected = "t^2=-2", q * q + q + 1
    else:
        case, expected = "generic", q * q + q + 1
    return Theorem73Result(q, t, N, expected, case)


# ---------------------------------------------------------------------------
# binary quartic invariants


def binary_quartic_invariants(a, b, c, d, e, p: int | None = None):
    """(c4, c6, Delta) of a x^4 + b x^3 z + c x^2 z^2 + d x z^3 + e z^4.

    c4 = 16 I and c6 = 32 J for the classical invariants
    I = 12ae - 3bd + c^2, J = 72ace + 9bcd - 27ad^2 - 27eb^2 - 2c^3; with
    this scaling Delta = (c4^3 - c6^2)/1728 and w^2 = x^3 - 27 c4 x - 54 c6
    is the Jacobian.  With ``p`` the values are reduced mod p.
    """
    I = 12 * a * e - 3 * b * d + c * c
    J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c**3
    c4, c6 = 16 * I, 32 * J
    if p is None:
        return c4, c6, Fraction(c4**3 - c6**2, 1728)
    c4, c6 = c4 % p, c6 % p
    return c4, c6, (c4**3 - c6**2) * pow(1728, -1, p) % p


def _form_product(f, g):
    """Coefficients of (A x^2 + B xz + C z^2)(D x^2 + E xz + G z^2), each a polynomial."""
    A, B, C = f
    D, E, G = g
    return [
        pmul(A, D),
        padd(pmul(A, E), pmul(B, D)),
        padd(padd(pmul(A, G), pmul(B, E)), pmul(C, D)),
        padd(pmul(B, G), pmul(C, E)),
        pmul(C, G),
    ]


def x2_forms_at(t):
    return tuple(tuple(peval(c, t) for c in form) for form in FAMILY_FORMS["x2"])


def fibre_quartic_poly(t):
    """F(x, z; l) as five polynomials in l (coefficients of x^4, ..., z^4)."""
    (a1, b1, c1), (a2, b2, c2), _ = x2_forms_at(Fraction(t))
    k = pmul([1, 1], [2, Fraction(t) ** 2])
    quartic = _form_product(([0, 0, a1], [0, b1], [c1]), ([a2], [b2], [c2]))
    return [pmul(k, c) for c in quartic]


def fibre_quartic_at_infinity(t):
    """F'(y, z; m) at m = 0: t^2 c2 z^2 q1(y, z)."""
    (a1, b1, c1), (a2, b2, c2), _ = x2_forms_at(Fraction(t))
    s = Fraction(t) ** 2 * c2
    return [0, 0, s * a1, s * b1, s * c1]


def invariant_polys(t):
    """(c4(l), c6(l)) as exact polynomials in l."""
    a, b, c, d, e = fibre_quartic_poly(t)
    I = psub(padd(pscale(pmul(a, e), 12), pmul(c, c)), pscale(pmul(b, d), 3))
    J = pscale(pmul(pmul(a, c), e), 72)
    J = padd(J, pscale(pmul(pmul(b, c), d), 9))
    J = psub(J, pscale(pmul(pmul(a, d), d), 27))
    J = psub(J, pscale(pmul(pmul(e, b), b), 27))
    J = psub(J, pscale(ppow(c, 3), 2))
    return pscale(I, 16), pscale(J, 32)


# ---------------------------------------------------------------------------
# fibre-by-fibre Jacobian check


@dataclass
class JacobianReport:
    t: int
    q: int
    fibres: list = field(default_factory=list)  # (l, #C_l, #I_l or None)
    singular: list = field(default_factory=list)
    smooth_sum: int = 0
    total: int = 0
    model_count: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def expected_smooth_sum(self) -> int:
        return (self.q - 3) * (self.q + 1)

    @property
    def passed(self) -> bool:
        return (
            not self.mismatches
            and self.smooth_sum == self.expected_smooth_sum
            and self.total - self.q == self.model_count
        )

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "q": self.q,
            "singular_fibres": [str(l) for l in self.singular],
            "smooth_sum": self.smooth_sum,
            "expected_smooth_sum": self.expected_smooth_sum,
            "mismatches": self.mismatches,
            "passed": self.passed,
        }


def _curve_count(coeffs, p, chi):
    """#{w^2 = F(x, z)} over P^1(F_p) for a binary quartic F."""
    a, b, c, d, e = (int(x) % p for x in coeffs)
    x = np.arange(p, dtype=np.int64)
    vals = ((((a * x + b) % p * x + c) % p * x + d) % p * x + e) % p
    return p + int(chi[vals].sum()) + 1 + int(chi[a])


def _weierstrass_count(c4, c6, p, chi):
    x = np.arange(p, dtype=np.int64)
    A, B = (-27 * c4) % p, (-54 * c6) % p
    vals = ((x * x % p * x) % p + A * x + B) % p
    return 1 + p + int(chi[vals].sum())


def jacobian_count_check(t: int, q: int) -> JacobianReport:
    """Compare #C_l with #I_l on every smooth fibre over the prime field F_q."""
    if not isprime(q) or q in (2, 3):
        raise ValueError("jacobian_count_check works over prime fields of characteristic > 3")
    if two_is_square(q):
        raise ValueError(f"2 is a square in F_{q}")
    p = q
    t %= p
    chi = build_character_table(p).values.astype(np.int64)
    forms = [tuple(_eval_mod(c, t, p) for c in form) for form in FAMILY_FORMS["x2"]]
    (a1, b1, c1), (a2, b2, c2), _ = forms
    report = JacobianReport(t, q)
    fibres = [(l, None) for l in range(p)] + [("oo", None)]
    for l, _ in fibres:
        if l == "oo":
            s = t * t * c2 % p
            coeffs = [0, 0, s * a1 % p, s * b1 % p, s * c1 % p]
        else:
            k = (1 + l) * (2 + t * t * l) % p
            A, B, C = a1 * l * l % p, b1 * l % p, c1
            coeffs = [
                k * A * a2 % p,
                k * (A * b2 + B * a2) % p,
                k * (A * c2 + B * b2 + C * a2) % p,
                k * (B * c2 + C * b2) % p,
                k * C * c2 % p,
            ]
        c4, c6, delta = binary_quartic_invariants(*coeffs, p=p)
        nC = _curve_count(coeffs, p, chi)
        report.total += nC
        if delta == 0:
            report.singular.append(l)
            report.fibres.append((l, nC, None))
            continue
        nI = _weierstrass_count(c4, c6, p, chi)
        report.fibres.append((l, nC, nI))
        report.smooth_sum += nC
        if nC != nI:
            report.mismatches.append({"l": l, "curve": nC, "jacobian": nI})
    report.model_count = count_singular(SurfaceModP(p, theorem73_forms(t, p)), 1)
    return report


def _eval_mod(coeff, t, p):
    return peval([reduce_rational(c, p) for c in coeff], t) % p


# ---------------------------------------------------------------------------
# exact identities from the proof of the point count


@dataclass(frozen=True)
class IdentityVerdict:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"identity": self.name, "passed": self.passed, "detail": self.detail}


def _binary_disc(form):
    a, b, c = form
    return psub(pmul(b, b), pscale(pmul(a, c), 4))


def _homogenize(poly, N, D, deg):
    """D^deg * poly(N/D) for polynomials N, D in a new variable."""
    out = []
    for i, c in enumerate(poly):
        out = padd(out, pscale(pmul(ppow(N, i), ppow(D, deg - i)), c))
    return out


def _reverse(poly, deg):
    """l^deg * poly(1/l)."""
    padded = list(poly) + [0] * (deg + 1 - len(poly))
    return normalize(list(reversed(padded)))


def verify_fibration_identities(t) -> list[IdentityVerdict]:
    """Exact polynomial checks of the identities behind the point count, at parameter t."""
    t = Fraction(t)
    if t == 0:
        raise ValueError("the identities need t != 0")
    out = []
    T = [0, 1]
    q1, q2, q3 = FAMILY_FORMS["x2"]

    # discriminants, as identities in t
    half_sq = pscale(ppow(psub(pmul(T, T), [2]), 2), Fraction(1, 2))
    out.append(IdentityVerdict("disc q1 = (t^2-2)^2/2", _binary_disc(q1) == half_sq))
    out.append(IdentityVerdict("disc q2 = (t^2-2)^2/2", _binary_disc(q2) == half_sq))
    alt = psub(ppow(q2[1], 2), pscale(ppow(q2[2], 2), Fraction(1, 2)))
    out.append(IdentityVerdict("disc q1 = (t^2+2t+2)^2 - (t^2+4t+2)^2/2", _binary_disc(q1) == alt))
    factored = ([2], padd([2], [0, 0, 1]), [0, 0, 1])
    out.append(IdentityVerdict("q3 = (x+y)(2x+t^2 y)", tuple(map(normalize, q3)) == tuple(map(normalize, factored))))
    quartic_t = padd(padd(ppow(T, 4), pscale(ppow(T, 2), -12)), [4])
    out.append(IdentityVerdict(
        "t^4-12t^2+4 = (t^2-6)^2-32", quartic_t == psub(ppow(psub(ppow(T, 2), [6]), 2), [32])
    ))

    # resultant of q1(lx, z) and q2(x, z) as a polynomial in l
    (a1, b1, c1), (a2, b2, c2), _ = x2_forms_at(t)
    A, B, C = [0, 0, a1], [0, b1], [c1]
    res = psub(
        ppow(psub(pscale(A, c2), [a2 * c1]), 2),
        pmul(psub(pscale(A, b2), pscale(B, a2)), psub(pscale(B, c2), [b2 * c1])),
    )
    T4 = t**4 - 12 * t**2 + 4
    al = (-6 * t**4 + 8 * t**2 - 24) / T4
    be = (-2 * t**4 - 8 * t**2 - 8) / T4
    quad1, quad2 = [1, al, 1], [1, be, 1]
    predicted = pscale(pmul(quad1, quad2), T4**2 / 64)
    out.append(IdentityVerdict("resultant factorization", res == normalize(predicted)))
    d1 = al * al - 4
    d2 = be * be - 4
    ok = d1 == 32 * (t * t - 2) ** 2 * (t * t + 2) ** 2 / T4**2 and d2 == 128 * t * t * (t * t - 2) ** 2 / T4**2
    out.append(IdentityVerdict("discriminants of the resultant factors", ok))

    # Delta factorization
    c4, c6 = invariant_polys(t)
    delta = pscale(psub(ppow(c4, 3), ppow(c6, 2)), Fraction(1, 1728))
    pred = pscale(
        pmul(
            pmul(pmul([0, 0, 1], ppow([2 / t**2, 1], 6)), ppow([1, 1], 6)),
            pmul(ppow(quad1, 2), ppow(quad2, 2)),
        ),
        t**12 * (t * t - 2) ** 4 * T4**4 / 1024,
    )
    out.append(IdentityVerdict("Delta factorization", delta == normalize(pred)))

    # l <-> 1/l twist by K = (2l + t^2) / (l^4 (t^2 l + 2))
    num, den = [t * t, 2], [2, t * t]
    ok4 = pmul(_reverse(c4, 8), ppow(den, 2)) == pmul(ppow(num, 2), c4)
    ok6 = pmul(_reverse(c6, 12), ppow(den, 3)) == pmul(ppow(num, 3), c6)
    out.append(IdentityVerdict("K-twist c4(1/l) = K^2 c4(l)", ok4))
    out.append(IdentityVerdict("K-twist c6(1/l) = K^3 c6(l)", ok6))

    # Moebius reparametrization and its inverse
    out.append(IdentityVerdict("Moebius determinant 4 - t^4 != 0", 4 - t**4 != 0))

    # pairing of squares: s1 = a^2, s2 = ((a-1)/(a+1))^2 and l(s) = (t^2 - 2s)/(t^2 s - 2)
    a = [0, 1]
    ap, am = [1, 1], [-1, 1]
    N1, D1 = psub([t * t], pscale(pmul(a, a), 2)), psub(pscale(pmul(a, a), t * t), [2])
    N2 = psub(pscale(pmul(ap, ap), t * t), pscale(pmul(am, am), 2))
    D2 = psub(pscale(pmul(am, am), t * t), pscale(pmul(ap, ap), 2))
    Q = [1, -(2 * t * t + 4) / (t * t - 2), 1]
    disc_Q = Q[1] ** 2 - 4
    out.append(IdentityVerdict("disc of the pairing denominator = 32t^2/(t^2-2)^2",
                               disc_Q == 32 * t * t / (t * t - 2) ** 2))
    # F = 8 (a+1)^2 (a^2 - 2/t^2)^4 / Q^4 times the square (t^2/(t^2-2))^4
    Fnum = pscale(pmul(pmul(ap, ap), ppow(psub(pmul(a, a), [2 / t**2]), 4)), 8 * (t * t / (t * t - 2)) ** 4)
    Fden = ppow(Q, 4)
    for name, poly, deg, w in (("c4", c4, 8, 2), ("c6", c6, 12, 3)):
        H1 = _homogenize(poly, N1, D1, deg)
        H2 = _homogenize(poly, N2, D2, deg)
        lhs = pmul(pmul(H2, ppow(D1, deg)), ppow(Fden, w))
        rhs = pmul(pmul(H1, ppow(D2, deg)), ppow(Fnum, w))
        out.append(IdentityVerdict(
            f"F-pairing {name}(s2) = F^{w} {name}(s1)",
            normalize(lhs) == normalize(rhs),
            "F carries the extra square factor (t^2/(t^2-2))^4",
        ))
    return out
