from collections import Counter

import pytest
from oracles import rational_node_count

from rmk3.charpoly import (
    Ambiguous,
    ArtinTateRefused,
    NoValidSign,
    WeilBoundViolation,
    ZeroValue,
    artin_tate_class,
    functional_sign,
    lefschetz_traces,
    picard_permutation,
    trace_from_count,
    transcendental_charpoly,
    weil_validate,
)
from rmk3.ratpoly import from_roots, functional_equation_tail, pmul, power_sums
from rmk3.surface import NotGoodPrime, SurfaceModP, make_surface

CHI17 = [83521, 8092, 646, 28, 1]
CHI23 = [279841, 27508, 1702, 52, 1]


def counts_for(P, p, upto=3):
    """Singular-model counts whose traces are the power sums of P."""
    t = power_sums(P, upto)
    return [t[i - 1] + 1 + p ** (2 * i) + p**i for i in range(1, upto + 1)]


def test_x21_at_17(x21):
    T = transcendental_charpoly(x21, 17)
    assert T.counts[:3] == [313, 83881, 24160345]
    assert T.traces == [6, 70, 17862]
    assert T.eps == 1
    assert T.chitr == CHI17
    assert T.chiT == pmul(CHI17, from_roots([17, 17]))
    assert T.stripped == Counter({1: 2})
    assert T.geometric_rank == 18 and T.rank_parity_ok()
    js = T.to_json()
    assert js["chitr"] == [1, 28, 646, 8092, 83521]
    assert js["chiT"][0] == 1 and js["chiT"][-1] == 17**6


def test_x21_at_23(x21):
    T = transcendental_charpoly(x21, 23)
    assert T.traces[0] == -6
    assert T.counts[:3] == [547, 280729, 148114771]
    assert T.chitr == CHI23 and T.eps == 1 and T.stripped == Counter({1: 2})


def test_traces_round_trip(x21):
    T = transcendental_charpoly(x21, 17)
    assert power_sums(T.chiT, 3) == T.traces
    assert lefschetz_traces(x21, 17, 3, T.counts) == [6, 70, 17862]
    assert trace_from_count(313, 17, 1) == 6


@pytest.mark.parametrize("p", [5, 11, 13, 17, 19, 23])
def test_picard_permutation_fix_matches_enumeration(x21, p):
    perm = picard_permutation(x21, p)
    assert perm.fix[0] == rational_node_count(x21, p)
    assert perm.fix[1] == 15
    assert perm.fix[0] <= perm.fix[1]
    assert sum(perm.cycle_type) == 15


def test_all_lines_conjugate_gives_six_transpositions():
    # every discriminant a non-square mod 5 (disc 8 = 3, disc 12 = 2, disc 28 = 3)
    X = make_surface((1, 0, -2), (1, 0, -3), (1, 2, -6))
    perm = picard_permutation(X, 5)
    assert perm.fix == (3, 15, 3, 15)
    assert perm.cycle_type == (2,) * 6 + (1,) * 3


def test_bad_prime_refused(x21):
    with pytest.raises(NotGoodPrime):
        picard_permutation(x21, 7)
    with pytest.raises(NotGoodPrime):
        transcendental_charpoly(x21, 3)


def test_weil_validate_examples():
    assert weil_validate(CHI17, 17)
    assert weil_validate(from_roots([17] * 6), 17, eps=1)
    assert not weil_validate([-1, 0, 0, 0, 1], 17)
    assert not weil_validate([1, 0, 1], 17)
    assert functional_sign(CHI17, 17) == 1
    assert functional_sign(from_roots([17, -17]), 17) == -1


def test_weil_bound_violation(x21):
    bad = [17 * 17 + 17 + 1 + 7 * 17, 83881, 24160345]
    with pytest.raises(WeilBoundViolation):
        transcendental_charpoly(x21, 17, counts=bad)


def test_no_valid_sign(x21):
    # t = (100, 0, 0) violates |alpha| = p for every choice of sign
    counts = [100 + 1 + 17**2 + 17, 1 + 17**4 + 17**2, 1 + 17**6 + 17**3]
    with pytest.raises(NoValidSign):
        transcendental_charpoly(x21, 17, counts=counts)


def test_fully_algebraic_strips_to_constant(x21):
    P = from_roots([17] * 6)
    T = transcendental_charpoly(x21, 17, counts=counts_for(P, 17))
    assert T.chitr == [1] and T.degree == 0 and T.stripped == Counter({1: 6})


def test_sign_ambiguity_resolved_by_fourth_count(x21):
    p = 5
    top = [1, -10, 25, 0]
    plus = [int(c) for c in reversed(functional_equation_tail(p, 1)(top))]
    minus = [int(c) for c in reversed(functional_equation_tail(p, -1)(top))]
    assert weil_validate(plus, p, 1) and weil_validate(minus, p, -1)
    counts = counts_for(plus, p)
    with pytest.raises(Ambiguous):
        transcendental_charpoly(x21, p, counts=counts, k4_cap=100)
    for P, eps in ((plus, 1), (minus, -1)):
        T = transcendental_charpoly(x21, p, counts=counts_for(P, p, 4))
        assert T.eps == eps and T.chiT == P


def test_artin_tate_classes():
    assert 17 * 628864 == 2**7 * 17**4
    assert artin_tate_class(CHI17, 17) == 2
    assert artin_tate_class(CHI23, 23) == 14
    assert artin_tate_class(CHI17, 17, stripped={1: 2}) == 2


def test_artin_tate_refusals():
    with pytest.raises(ArtinTateRefused):
        artin_tate_class([1, 0, 1], 17)
    with pytest.raises(ArtinTateRefused):
        artin_tate_class(CHI17, 17, stripped={1: 1, 2: 1})
    with pytest.raises(ZeroValue):
        artin_tate_class(from_roots([17, 1, 2, 3]), 17)


def test_square_multiple_keeps_class():
    # chi^tr(p) enters only through its square class
    from rmk3.ffield import squarefree_part

    v = 17 * 628864
    assert squarefree_part(v * 9) == squarefree_part(v) == 2


def test_charpoly_from_reduced_surface(x21):
    Xp = SurfaceModP(17, tuple(f.reduce(17) for f in x21.forms))
    assert transcendental_charpoly(Xp, 17).chitr == CHI17
