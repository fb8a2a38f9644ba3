"""Frobenius on H^2 of the resolved double cover: the 16 explicit classes and the rest.

The hyperplane class and the 15 exceptional curves span a 16-dimensional
piece on which Frobenius acts as p times the permutation of the nodes.  The
remaining six eigenvalues have power sums

    t_i = #X(F_{p^i}) - 1 - p^{2i} - p^i (1 + Fix(sigma^i))
        = #V(F_{p^i}) - 1 - p^{2i} - p^i,

with X the resolution and V the singular model, since each rational node
adds p^i points.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .counter import count_singular
from .ffield import squarefree_part
from .ratpoly import (
    InconsistentPowerSums,
    degree,
    functional_equation_tail,
    is_integral,
    is_monic,
    newton_to_poly,
    normalize,
    peval,
    power_sums,
    squarefree_kernel,
    strip_p_cyclotomic,
)
from .surface import NotGoodPrime, as_mod_p, line_configuration

WEIL_TOLERANCE = 1e-6
K4_FIELD_CAP = 2 * 10**7


class WeilBoundViolation(ValueError):
    pass


class NoValidSign(ValueError):
    pass


class Ambiguous(ValueError):
    pass


class ZeroValue(ValueError):
    pass


class ArtinTateRefused(ValueError):
    pass


# ---------------------------------------------------------------------------
# nodes


@dataclass(frozen=True)
class NodePermutation:
    """Frobenius on the 15 nodes: e1, e2, e3, then the 12 cross points in coordinate order."""

    p: int
    labels: tuple
    perm: tuple[int, ...]

    def power_fixed(self, i: int) -> int:
        fixed = 0
        for start in range(len(self.perm)):
            j = start
            for _ in range(i):
                j = self.perm[j]
            fixed += j == start
        return fixed

    @property
    def fix(self) -> tuple[int, int, int, int]:
        """Fix(sigma^i) for i = 1..4."""
        return tuple(self.power_fixed(i) for i in range(1, 5))

    @property
    def cycle_type(self) -> tuple[int, ...]:
        seen, lengths = set(), []
        for start in range(len(self.perm)):
            if start in seen:
                continue
            n, j = 0, start
            while j not in seen:
                seen.add(j)
                j = self.perm[j]
                n += 1
            lengths.append(n)
        return tuple(sorted(lengths, reverse=True))


def picard_permutation(X, p: int | None = None) -> NodePermutation:
    Xp = as_mod_p(X, p) if p is not None else X
    config = line_configuration(Xp)
    if config is None:
        raise NotGoodPrime(f"p={Xp.p} is not a good prime")
    cross = sorted(config.cross.items(), key=lambda kv: (kv[1][0].key, kv[1][1].key))
    labels = ("e1", "e2", "e3") + tuple(pair for pair, _ in cross)
    index = {(x.key, y.key): 3 + n for n, (_, (x, y)) in enumerate(cross)}
    perm = [0, 1, 2]
    for _, (x, y) in cross:
        perm.append(index[(x.frobenius().key, y.frobenius().key)])
    return NodePermutation(Xp.p, labels, tuple(perm))


# ---------------------------------------------------------------------------
# traces


def trace_from_count(count: int, p: int, i: int) -> int:
    q = p**i
    return count - 1 - q * q - q


def lefschetz_traces(X, p: int, up_to: int = 3, counts=None) -> list[int]:
    """t_1..t_k from singular-model counts over F_{p^i} (computed unless given)."""
    if not 1 <= up_to <= 4:
        raise ValueError("traces are available for k <= 4")
    Xp = as_mod_p(X, p)
    if not Xp.good:
        raise NotGoodPrime(f"p={p} is not a good prime")
    if counts is None:
        counts = [count_singular(Xp, (p, i)) for i in range(1, up_to + 1)]
    traces = []
    for i, N in enumerate(counts[:up_to], start=1):
        t = trace_from_count(N, p, i)
        if abs(t) > 6 * p**i:
            raise WeilBoundViolation(f"|t_{i}| = {abs(t)} exceeds 6 p^{i}")
        traces.append(t)
    return traces


# ---------------------------------------------------------------------------
# Weil polynomials


def functional_sign(P, p: int) -> int | None:
    """eps with constant term eps * p^n, or None."""
    n = degree(P)
    c0 = P[0]
    if c0 == p**n:
        return 1
    if c0 == -(p**n):
        return -1
    return None


def weil_validate(P, p: int, eps: int | None = None) -> bool:
    """Exact coefficient symmetry plus all roots of modulus p (within 1e-6 p)."""
    P = normalize(P)
    if not P or not is_monic(P) or not is_integral(P):
        return False
    n = degree(P)
    sign = functional_sign(P, p)
    if sign is None or (eps is not None and sign != eps):
        return False
    # coefficient of Z^{n-k} is P[n-k]; symmetry c_{n-k} = eps p^{n-2k} c_k
    for k in range(n + 1):
        lhs, rhs = Fraction(P[k]), sign * Fraction(p) ** (n - 2 * k) * P[n - k]
        if lhs != rhs:
            return False
    if n == 0:
        return True
    # simple roots of the scaled kernel, where double precision is reliable
    kernel = squarefree_kernel(P)
    m = degree(kernel)
    if m == 0:
        return True
    lead = Fraction(kernel[-1])
    scaled = [float(Fraction(kernel[i]) / lead / Fraction(p) ** (m - i)) for i in range(m, -1, -1)]
    roots = np.roots(scaled)
    return bool(np.all(np.abs(np.abs(roots) - 1.0) <= WEIL_TOLERANCE))


@dataclass
class TranscendentalCharPoly:
    p: int
    chiT: list
    chitr: list
    eps: int
    stripped: Counter
    traces: list
    counts: list = field(default_factory=list)

    @property
    def degree(self) -> int:
        return degree(self.chitr)

    @property
    def stripped_roots(self) -> int:
        from .ratpoly import euler_phi

        return sum(euler_phi(k) * m for k, m in self.stripped.items())

    @property
    def geometric_rank(self) -> int:
        """22 - deg chi^tr, the rank over the algebraic closure under the Tate conjecture."""
        return 22 - self.degree

    def rank_parity_ok(self) -> bool:
        return self.geometric_rank % 4 == 2

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "chiT": [int(c) for c in reversed(self.chiT)],
            "chitr": [int(c) for c in reversed(self.chitr)],
            "eps": self.eps,
            "stripped": {str(k): m for k, m in sorted(self.stripped.items())},
            "traces": list(self.traces),
        }


def _candidates(traces, p):
    out = []
    for eps in (1, -1):
        try:
            P = newton_to_poly(traces[:3], 6, tail=functional_equation_tail(p, eps))
        except InconsistentPowerSums:
            continue
        if eps == -1 and P[3] != 0:
            continue
        if weil_validate(P, p, eps):
            out.append((eps, P))
    return out


def transcendental_charpoly(X, p: int, counts=None, k4_cap: int = K4_FIELD_CAP) -> TranscendentalCharPoly:
    """chi^T of degree 6 from counts over F_p, F_{p^2}, F_{p^3}, and its stripped part chi^tr."""
    Xp = as_mod_p(X, p)
    if not Xp.good:
        raise NotGoodPrime(f"p={p} is not a good prime")
    counts = list(counts) if counts is not None else [count_singular(Xp, (p, i)) for i in (1, 2, 3)]
    traces = lefschetz_traces(Xp, p, 3, counts[:3])
    cands = _candidates(traces, p)
    if not cands:
        raise NoValidSign(f"no functional-equation sign gives a Weil polynomial at p={p}")
    if len(cands) > 1:
        if p**4 > k4_cap:
            raise Ambiguous(f"both signs valid at p={p} and F_p^4 exceeds the cap")
        if len(counts) < 4:
            counts.append(count_singular(Xp, (p, 4)))
        t4 = trace_from_count(counts[3], p, 4)
        traces = traces + [t4]
        cands = [(e, P) for e, P in cands if power_sums(P, 4)[3] == t4]
        if len(cands) != 1:
            raise Ambiguous(f"sign not determined by counts over F_p^4 at p={p}")
    eps, chiT = cands[0]
    chitr, stripped = strip_p_cyclotomic(chiT, p)
    return TranscendentalCharPoly(p, chiT, chitr, eps, stripped, traces, counts)


# ---------------------------------------------------------------------------
# Artin-Tate


def artin_tate_class(chitr, p: int | None = None, stripped=None) -> int:
    """Square class of disc Pic over the algebraic closure, as the square-free part of p * chi^tr(p).

    Milne's form of the Artin-Tate formula, for a K3 surface whose Neron-Severi
    group is spanned by rational classes with trivial torsion, alpha = 1 and
    square Brauer order, leaves |disc NS| = p * chi^tr(p) up to squares: the
    rank-18 sublattice contributes (1 - q^{-s})^18 and the transcendental
    quartic gives chi^tr(p) / p^4 at s = 1.  Used only in that setting.
    """
    if isinstance(chitr, TranscendentalCharPoly):
        stripped = chitr.stripped if stripped is None else stripped
        p = chitr.p if p is None else p
        chitr = chitr.chitr
    if p is None:
        raise ValueError("p is required")
    if degree(chitr) != 4:
        raise ArtinTateRefused("needs a transcendental factor of degree 4")
    if stripped is not None and Counter(stripped) != Counter({1: 2}):
        raise ArtinTateRefused(f"stripped part {dict(stripped)} is not (Z - p)^2")
    value = peval(chitr, p)
    if value == 0:
        raise ZeroValue("chi^tr(p) = 0")
    return squarefree_part(int(p * value))
