from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmk3.families import (
    FamilyId,
    binary_quartic_invariants,
    invariant_polys,
    jacobian_count_check,
    make_family,
    qualifying_primes,
    theorem73_count,
    two_is_square,
    verify_family_congruences,
    verify_fibration_identities,
)
from rmk3.ratpoly import degree, pscale, psub, ppow, rational_roots


def test_make_family_examples():
    assert make_family("x2", 1).to_json() == {"q1": ["-1/8", "1", "-1"], "q2": ["7/8", "5", "7"], "q3": ["2", "3", "1"]}
    assert make_family("x13").to_json() == {"q1": ["25", "26", "13"], "q2": ["1", "2", "13"], "q3": ["9", "26", "13"]}
    assert make_family("x5", 0).to_json() == {"q1": ["1", "0", "5/4"], "q2": ["1", "1", "5/16"], "q3": ["1", "1", "1/20"]}


def test_family_id_validation():
    assert FamilyId("x2", 0).special == "t=0"
    assert FamilyId("x2", 1).special is None
    with pytest.raises(ValueError):
        FamilyId("x13", 1)
    with pytest.raises(ValueError):
        FamilyId("x5")
    with pytest.raises(ValueError):
        FamilyId("x7", 1)


def test_qualifying_primes():
    assert qualifying_primes("x2", 30) == [3, 5, 11, 13, 19, 29]
    assert qualifying_primes("x5", 20) == [3, 7, 13, 17]
    assert qualifying_primes("x13", 50) == [5, 7, 11, 19, 31, 37, 41, 47]


@pytest.mark.parametrize("name,bound", [("x2", 100), ("x5", 100), ("x13", 300)])
def test_congruences(name, bound):
    rep = verify_family_congruences(name, bound)
    assert rep.passed, rep.failures[:3]
    assert rep.cells == (len(rep.primes) if name == "x13" else sum(rep.primes))


def test_theorem73_examples():
    assert theorem73_count(5, 3).count == 31
    r = theorem73_count(11, 0)
    assert r.count == 144 and r.case == "t=0" and r.passed
    assert {theorem73_count(13, t).count for t in range(1, 13)} == {183}


def test_theorem73_t_squared_minus_two():
    # t^2 = -2 has solutions mod 11 (t = 3, 8)
    for t in (3, 8):
        r = theorem73_count(11, t)
        assert r.case == "t^2=-2" and r.passed


def test_theorem73_prime_power():
    assert two_is_square(9) and not two_is_square(125) and not two_is_square(5)
    assert all(theorem73_count(125, t).passed for t in (0, 1, 2))


def test_theorem73_rejects_bad_q():
    with pytest.raises(ValueError):
        theorem73_count(7, 1)  # 2 = 3^2 mod 7
    with pytest.raises(ValueError):
        theorem73_count(27, 1)
    with pytest.raises(ValueError):
        theorem73_count(15, 1)


def test_invariants_repeated_root():
    # (x - z)^2 (x^2 + z^2) = x^4 - 2x^3 z + 2x^2 z^2 - 2x z^3 + z^4
    assert binary_quartic_invariants(1, -2, 2, -2, 1)[2] == 0
    assert binary_quartic_invariants(1, -2, 2, -2, 1, p=13)[2] == 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=5, max_size=5), st.integers(1, 7))
def test_invariant_weights(coeffs, s):
    """Scaling the quartic by s^2 scales c4 by s^4 and c6 by s^6."""
    c4, c6, delta = binary_quartic_invariants(*coeffs)
    C4, C6, D = binary_quartic_invariants(*(s * s * c for c in coeffs))
    assert C4 == s**4 * c4 and C6 == s**6 * c6 and D == s**12 * delta


@pytest.mark.parametrize("t", [1, 3, Fraction(1, 2), 5])
def test_rational_singular_fibres(t):
    c4, c6 = invariant_polys(t)
    delta = pscale(psub(ppow(c4, 3), ppow(c6, 2)), Fraction(1, 1728))
    t = Fraction(t)
    assert rational_roots(delta) == sorted([Fraction(-1), -2 / t**2, Fraction(0)])
    # homogeneous degree 24: a drop of two marks the fibre at infinity
    assert degree(c4) == 8 and degree(delta) == 22


@pytest.mark.parametrize("t", [1, 3, 5, 7])
def test_fibration_identities(t):
    verdicts = verify_fibration_identities(t)
    assert len(verdicts) >= 10
    assert all(v.passed for v in verdicts), [v.name for v in verdicts if not v.passed]


@pytest.mark.parametrize("t,q", [(1, 5), (3, 5), (1, 11), (3, 11), (1, 13), (3, 13), (2, 19)])
def test_jacobian_count_check(t, q):
    rep = jacobian_count_check(t, q)
    assert rep.passed, rep.mismatches
    assert rep.smooth_sum == (q - 3) * (q + 1)


def test_four_rational_singular_fibres():
    rep = jacobian_count_check(1, 11)
    assert rep.singular == [0, 9, 10, "oo"]  # 0, -2/t^2, -1, infinity


@pytest.mark.parametrize("q", [p for p in range(5, 120) if all(p % r for r in range(2, p)) and p % 8 in (3, 5)])
def test_square_pairing_fixed_points(q):
    """a^2 = ((a - 1)/(a + 1))^2 forces a^2 = -1 when 2 is a non-square."""
    for a in range(q):
        if (a + 1) % q == 0:
            continue
        b = (a - 1) * pow(a + 1, -1, q) % q
        if a * a % q == b * b % q:
            assert (a * a + 1) % q == 0
