from fractions import Fraction
from math import isqrt

import pytest

from rmk3.ffield import squarefree_part
from rmk3.hodge import (
    T_SPACE,
    NotSumOfTwoSquares,
    QuadraticSpace,
    Surd,
    ZeroNorm,
    build_rm_endomorphism,
    disc_class_identities,
    is_sum_of_two_squares,
    search_block_endomorphisms,
    sum_of_two_squares,
    t_plus_form_matrix,
    verify_rm_endomorphism,
)


def brute_two_squares(n):
    return any(isqrt(n - x * x) ** 2 == n - x * x for x in range(isqrt(n) + 1))


@pytest.mark.parametrize(
    "d, uv",
    [(2, (1, 1)), (13, (2, 3)), (25, (3, 4)), (Fraction(5, 9), (Fraction(1, 3), Fraction(2, 3)))],
)
def test_two_squares_examples(d, uv):
    assert sum_of_two_squares(d) == tuple(Fraction(x) for x in uv)


def test_two_squares_against_brute_force():
    for n in range(1, 501):
        w = sum_of_two_squares(n)
        assert (w is not None) == brute_two_squares(n) == is_sum_of_two_squares(n), n
        if w:
            assert w[0] ** 2 + w[1] ** 2 == n and 0 <= w[0] <= w[1]


def test_rational_two_squares_round_trip():
    for num in range(1, 60):
        for den in range(1, 17):
            d = Fraction(num, den)
            w = sum_of_two_squares(d)
            assert (w is not None) == is_sum_of_two_squares(d)
            if w:
                assert w[0] ** 2 + w[1] ** 2 == d


def test_two_squares_rejects_nonpositive():
    with pytest.raises(ValueError):
        sum_of_two_squares(0)
    with pytest.raises(ValueError):
        is_sum_of_two_squares(-5)


def test_build_and_verify_up_to_1000():
    for d in range(2, 1001):
        if not is_sum_of_two_squares(d):
            continue
        phi = build_rm_endomorphism(d)
        report = verify_rm_endomorphism(T_SPACE, phi, d)
        assert report.passed
        assert len(phi.blocks) == 3


@pytest.mark.parametrize("d", [3, 7, 21])
def test_no_witness(d):
    assert sum_of_two_squares(d) is None
    with pytest.raises(NotSumOfTwoSquares):
        build_rm_endomorphism(d)


def test_perturbation_breaks_self_adjointness():
    phi = build_rm_endomorphism(2)
    M = [row[:] for row in phi.matrix]
    M[0][3] += 1
    report = verify_rm_endomorphism(T_SPACE, M, 2)
    assert not report.self_adjoint
    assert {"check": "self_adjoint", "pair": [0, 3]} in report.failures


def test_wrong_square_is_reported():
    phi = build_rm_endomorphism(2)
    report = verify_rm_endomorphism(T_SPACE, phi, 5)
    assert report.self_adjoint and not report.squares_to_d and not report.passed


def test_identity_is_rm_by_one():
    eye = [[int(i == j) for j in range(6)] for i in range(6)]
    assert verify_rm_endomorphism(T_SPACE, eye, 1).passed


def test_space_shape():
    assert T_SPACE.signature == (2, 4)
    assert T_SPACE.dimension == 6
    with pytest.raises(ValueError):
        build_rm_endomorphism(2, QuadraticSpace((1, -1, 1, 1)))


def test_disc_class_example():
    rep = disc_class_identities(2, [(1, 1)])
    assert rep.determinants == [-8] and rep.classes == [-2] and rep.passed


def test_disc_class_random(rng):
    for _ in range(20):
        d = rng.choice([2, 3, 5, 6, 7, 10, 13])
        elems = []
        while len(elems) < rng.randint(1, 4):
            r = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            s = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            if r * r - d * s * s != 0:
                elems.append((r, s))
        rep = disc_class_identities(d, elems)
        assert rep.passed
        # product class agrees with the norm computed independently
        norm = Fraction(1)
        for r, s in elems:
            norm *= r * r - d * s * s
        total = (4 * d) ** len(elems) * norm
        assert rep.formula_class == squarefree_part(total.numerator * total.denominator)


def test_disc_class_zero_norm():
    with pytest.raises(ZeroNorm):
        disc_class_identities(4, [(2, 1)])


def test_surd_sign_and_str():
    x = Surd(4, -2, 2)
    assert x.sign(1) == 1 and x.sign(-1) == 1
    assert Surd(1, -1, 2).sign(1) == -1 and Surd(1, -1, 2).sign(-1) == 1
    assert Surd(3, -1, 9).sign(1) == 0
    assert str(x) == "4 - 2*sqrt(2)"
    assert (x * x.conj()).r == x.norm() == 8


@pytest.mark.parametrize("d, u, v", [(2, 1, 1), (5, 1, 2), (13, 2, 3), (25, 3, 4)])
def test_t_plus_signature(d, u, v):
    rep = t_plus_form_matrix(d, u, v)
    assert rep.nondegenerate and rep.indefinite
    assert rep.signs["+sqrt"] == [1, -1, -1] == rep.signs["-sqrt"]


def test_t_plus_rejects_bad_witness():
    with pytest.raises(ValueError):
        t_plus_form_matrix(2, 1, 2)
    with pytest.raises(ValueError):
        t_plus_form_matrix(1, 1, 0)


def test_search_evidence():
    hits = search_block_endomorphisms(2, height=3, trials=20000)
    assert (Fraction(1), Fraction(1)) in hits
    assert search_block_endomorphisms(3, height=4, trials=5000) == []
