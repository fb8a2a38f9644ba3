"""Statistical and deterministic tests for real multiplication, and their survival probabilities.

A K3 surface whose transcendental part has real multiplication by Q(sqrt d)
is non-ordinary at every prime inert in Q(sqrt d), i.e. #X_p(F_p) = 1 (mod p).
Counts use the singular model; the congruence does not depend on the model
since each rational node adds a multiple of p.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, prod

import mpmath
from sympy import primerange

from .charpoly import Ambiguous, NoValidSign, TranscendentalCharPoly, WeilBoundViolation, transcendental_charpoly
from .counter import count_singular
from .ffield import is_inert
from .ratpoly import (
    NotIrreducible,
    degree,
    format_poly,
    galois_group_quartic,
    is_irreducible_quartic,
    is_square_of_quadratic,
    quadratic_factor,
    real_quadratic_subfields,
    split_over_quadratic,
    square_class,
)
from .surface import BadDenominator, as_mod_p, is_good_prime


class ExhaustedPrimes(RuntimeError):
    pass


@dataclass
class StatisticalParams:
    window: tuple[int, int] = (40, 300)
    residue: tuple[int, int] = (1, 4)  # p = 1 (mod 4)
    threshold: int = 5
    inert_bound: int = 300
    max_iterations: int = 10
    p0_bound: int = 1000


@dataclass
class DeterministicParams:
    inert_bound: int = 300
    good_bound: int = 100


@dataclass
class DetectionReport:
    mode: str
    outcome: str  # "candidate", "rejected", "ambiguous"
    step: str | None = None
    reason: str = ""
    d: int | None = None
    witnesses: list = field(default_factory=list)
    charpolys: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    real_subfields: list = field(default_factory=list)

    @property
    def candidate(self) -> bool:
        return self.outcome == "candidate"

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "outcome": self.outcome,
            "step": self.step,
            "reason": self.reason,
            "d": self.d,
            "witnesses": self.witnesses,
            "charpolys": self.charpolys,
            "skipped": self.skipped,
            "real_subfields": self.real_subfields,
        }


def is_nonordinary(X, p: int, k: int = 1) -> bool:
    """True iff #V(F_p) = 1 (mod p)."""
    if p == 2:
        raise ValueError("p must be odd")
    return count_singular(as_mod_p(X, p), (p, k)) % p == 1


def _congruence(X, p: int):
    """(count, holds) or None when the surface does not reduce mod p."""
    try:
        N = count_singular(as_mod_p(X, p), 1)
    except BadDenominator:
        return None
    return N, N % p == 1


def inert_primes(d: int, bound: int = 300) -> list[int]:
    return [p for p in primerange(2, bound) if is_inert(p, d) == "inert"]


# ---------------------------------------------------------------------------
# chi^tr analysis


def splitting_group(h) -> str:
    """Galois group of a monic quartic; reducible products of two quadratics are reported too."""
    if is_irreducible_quartic(h):
        return galois_group_quartic(h)
    g = quadratic_factor(h)
    if g is None:
        return "reducible"
    from .ratpoly import pexact_div

    other = pexact_div(h, g)
    classes = set()
    for f in (g, other):
        disc = f[1] ** 2 - 4 * f[0]
        classes.add(1 if disc == 0 else square_class(disc))
    if 1 in classes:
        return "reducible"
    return "V4" if len(classes) == 2 else "C2"


def summarize_chitr(T: TranscendentalCharPoly, d: int | None = None) -> dict:
    h = T.chitr
    info = {
        "p": T.p,
        "degree": degree(h),
        "chitr": format_poly(h),
        "eps": T.eps,
        "stripped": {str(k): m for k, m in sorted(T.stripped.items())},
    }
    if degree(h) == 4:
        info["square_of_quadratic"] = is_square_of_quadratic(h) is not None
        info["irreducible"] = is_irreducible_quartic(h)
        info["galois"] = splitting_group(h)
        if d is not None:
            info["splits_over_sqrt_d"] = split_over_quadratic(h, d) is not None
    return info


# ---------------------------------------------------------------------------
# statistical version


def _good_ordinary_primes(X, start: int, bound: int):
    for p in primerange(max(start, 3), bound):
        try:
            if not is_good_prime(X, p):
                continue
        except BadDenominator:
            continue
        if count_singular(as_mod_p(X, p), 1) % p != 1:
            yield p


def detect_statistical(X, params: StatisticalParams | None = None) -> DetectionReport:
    params = params or StatisticalParams()
    report = DetectionReport("statistical", "rejected")
    lo, hi = params.window
    r, m = params.residue
    hits = 0
    for p in primerange(lo + 1, hi):
        if p % m != r:
            continue
        res = _congruence(X, p)
        if res is None:
            report.skipped.append({"p": p, "reason": "bad denominator"})
            continue
        N, ok = res
        report.witnesses.append({"step": "i", "p": p, "count": N, "holds": ok})
        hits += ok
    if hits <= params.threshold:
        report.step, report.reason = "i", f"only {hits} congruences hold"
        return report

    # steps ii and iii: smallest good ordinary prime, move on past squares and Klein four groups
    chitr = None
    primes = _good_ordinary_primes(X, 3, params.p0_bound)
    for iteration in range(params.max_iterations):
        p0 = next(primes, None)
        if p0 is None:
            break
        try:
            T = transcendental_charpoly(X, p0)
        except (Ambiguous, NoValidSign, WeilBoundViolation) as exc:
            report.skipped.append({"p": p0, "reason": f"{type(exc).__name__}: {exc}"})
            continue
        info = summarize_chitr(T)
        report.charpolys.append(info)
        if T.degree != 4:
            report.step, report.reason = "iii", f"deg chi^tr = {T.degree} at p0 = {p0}"
            return report
        if info["square_of_quadratic"] or info["galois"] in ("V4", "C2", "reducible"):
            continue
        chitr = T
        break
    else:
        raise ExhaustedPrimes(f"no suitable p0 after {params.max_iterations} good ordinary primes")
    if chitr is None:
        raise ExhaustedPrimes("ran out of good ordinary primes")

    # step iv: the real quadratic subfield
    reals = real_quadratic_subfields(chitr.chitr)
    report.real_subfields = reals
    if not reals:
        report.step, report.reason = "iv", "no real quadratic subfield"
        return report
    if len(reals) > 1:
        splitting = [d for d in reals if split_over_quadratic(chitr.chitr, d) is not None]
        if len(splitting) != 1:
            report.outcome, report.step = "ambiguous", "iv"
            report.reason = f"several real quadratic subfields {reals}"
            return report
        reals = splitting
    d = reals[0]
    report.d = d

    # step v: inert primes
    failure = _inert_screen(X, d, params.inert_bound, report)
    if failure is not None:
        report.step, report.reason = "v", f"congruence fails at p = {failure}"
        return report
    report.outcome, report.step = "candidate", "vi"
    return report


def _inert_screen(X, d: int, bound: int, report: DetectionReport):
    """First inert prime where the congruence fails, or None."""
    for p in inert_primes(d, bound):
        if p == 2:
            report.skipped.append({"p": 2, "reason": "characteristic 2 is not counted"})
            continue
        res = _congruence(X, p)
        if res is None:
            report.skipped.append({"p": p, "reason": "bad denominator"})
            continue
        N, ok = res
        report.witnesses.append({"step": "inert", "p": p, "count": N, "holds": ok})
        if not ok:
            return p
    return None


# ---------------------------------------------------------------------------
# deterministic version


def detect_deterministic(X, d: int, params: DeterministicParams | None = None) -> DetectionReport:
    params = params or DeterministicParams()
    if d <= 1 or square_class(d) != d:
        raise ValueError("d must be a square-free integer > 1")
    report = DetectionReport("deterministic", "rejected", d=d)
    failure = _inert_screen(X, d, params.inert_bound, report)
    if failure is not None:
        report.step, report.reason = "i", f"congruence fails at p = {failure}"
        return report
    for p in primerange(3, params.good_bound):
        try:
            if not is_good_prime(X, p):
                continue
        except BadDenominator:
            continue
        try:
            T = transcendental_charpoly(X, p)
        except (Ambiguous, NoValidSign, WeilBoundViolation) as exc:
            report.skipped.append({"p": p, "reason": f"{type(exc).__name__}: {exc}"})
            continue
        info = summarize_chitr(T, d)
        report.charpolys.append(info)
        if T.degree == 0:
            continue
        if T.degree != 4:
            report.step, report.reason = "ii", f"deg chi^tr = {T.degree} at p = {p}"
            return report
        if info["square_of_quadratic"]:
            continue
        if not (info["splits_over_sqrt_d"] or info["galois"] == "V4"):
            report.step = "ii"
            report.reason = f"chi^tr at p = {p} neither splits over Q(sqrt {d}) nor has group V4"
            return report
    report.outcome, report.step = "candidate", "iii"
    return report


# ---------------------------------------------------------------------------
# survival probabilities


def statistical_primes(window=(40, 300), residue=(1, 4)) -> list[int]:
    r, m = residue
    return [p for p in primerange(window[0] + 1, window[1]) if p % m == r]


def poisson_binomial(probs) -> list[Fraction]:
    """Exact distribution of the number of successes of independent events."""
    dist = [Fraction(1)]
    for pr in probs:
        pr = Fraction(pr)
        new = [Fraction(0)] * (len(dist) + 1)
        for k, v in enumerate(dist):
            new[k] += v * (1 - pr)
            new[k + 1] += v * pr
        dist = new
    return dist


def inclusion_exclusion_exactly(probs, m: int) -> Fraction:
    """Sum over r >= m of (-1)^(r-m) C(r, m) S_r, S_r the r-th elementary sum (exponential cost)."""
    probs = [Fraction(x) for x in probs]
    total = Fraction(0)
    for r in range(m, len(probs) + 1):
        S = sum((prod(c) for c in combinations(probs, r)), Fraction(0))
        total += (-1) ** (r - m) * comb(r, m) * S
    return total


def survival_probabilities(mode: str = "statistical", d: int | None = None, threshold: int = 5):
    """Survival probability of a surface without RM, as an exact Fraction.

    statistical: the inclusion-exclusion sum with C(r, 6), which is the
    probability that exactly threshold + 1 of the events p | (#X_p - 1) occur.
    inert: the product of 1/p over the primes p < 300 inert in Q(sqrt d).
    """
    if mode == "statistical":
        probs = [Fraction(1, p) for p in statistical_primes()]
        return poisson_binomial(probs)[threshold + 1]
    if mode == "inert":
        if d is None:
            raise ValueError("inert mode needs d")
        return Fraction(1, prod(inert_primes(d, 300)))
    raise ValueError(f"unknown mode {mode!r}")


def survival_tail(threshold: int = 5) -> Fraction:
    """Probability that more than ``threshold`` congruences hold."""
    probs = [Fraction(1, p) for p in statistical_primes()]
    return sum(poisson_binomial(probs)[threshold + 1:], Fraction(0))


def format_probability(x: Fraction, digits: int = 3) -> str:
    with mpmath.workdps(30):
        return mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, digits, min_fixed=0, max_fixed=0)
