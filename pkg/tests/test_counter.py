import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmk3.batchscan import random_surface
from rmk3.charpoly import picard_permutation
from rmk3.counter import count_bruteforce, count_singular, count_smooth
from rmk3.families import make_family
from rmk3.surface import SurfaceModP, reduce_mod_p


def test_x21_counts_over_f17(x21):
    assert count_singular(x21, (17, 1)) == 313
    assert count_singular(x21, (17, 2)) == 83881


def test_x23_over_f5_generic_case():
    assert count_singular(make_family("x2", 3), (5, 1)) == 31


@pytest.mark.parametrize("name,t,p", [("x2", 1, 5), ("x13", None, 7), ("x5", 0, 7), ("x2", 1, 3)])
def test_bruteforce_agrees_on_families(name, t, p):
    X = make_family(name, t)
    assert count_singular(X, (p, 1)) == count_bruteforce(X, (p, 1))


@pytest.mark.parametrize("q", [(5, 1), (7, 1), (3, 2), (5, 2), (3, 3), (7, 2)])
def test_methods_agree_on_random_surfaces(q):
    rng = random.Random(q[0] * 100 + q[1])
    for _ in range(6):
        X = random_surface(9, rng)
        try:
            Xp = reduce_mod_p(X, q[0])
        except Exception:
            continue
        fft = count_singular(Xp, q)
        assert fft == count_singular(Xp, q, method="direct")
        assert fft == count_bruteforce(Xp, q)


def test_degenerate_forms_still_agree():
    # repeated lines and lines through the coordinate points: bad reduction
    for forms in [((1, 2, 1), (0, 1, 0), (1, 0, 0)), ((0, 0, 1), (1, 0, 2), (2, 2, 2)), ((1, 0, 0), (1, 0, 0), (1, 0, 0))]:
        Xp = SurfaceModP(5, forms)
        assert not Xp.good
        assert count_singular(Xp, 1) == count_bruteforce(Xp, 1)
        assert count_singular(Xp, 2) == count_bruteforce(Xp, 2)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([5, 7, 11]), st.lists(st.integers(0, 10), min_size=9, max_size=9), st.integers(1, 10))
def test_square_scaling_invariance(p, coeffs, s):
    """chi(s^2 x) = chi(x): scaling a form by a nonzero square leaves the count unchanged."""
    forms = tuple(tuple(coeffs[3 * i : 3 * i + 3]) for i in range(3))
    if any(f == (0, 0, 0) for f in forms) or s % p == 0:
        return
    Xp = SurfaceModP(p, forms)
    scaled = SurfaceModP(p, (forms[0], forms[1], tuple(c * s * s % p for c in forms[2])))
    assert count_singular(Xp, 1) == count_singular(scaled, 1)


def test_smooth_model_bookkeeping(x21):
    perm = picard_permutation(x21, 17)
    assert perm.fix[0] == 15 and perm.fix[1] == 15
    assert count_smooth(x21, 17, 1, 15) == 568
    assert count_smooth(x21, 17, 2, 15) == 88216
    assert count_smooth(x21, 17, 1, 0) == 313
    for k in (1, 2):
        assert count_smooth(x21, 17, k, 15) % 17 == count_singular(x21, (17, k)) % 17


def test_smooth_trace_bound(x21):
    for p in (11, 13, 17, 19):
        fix = picard_permutation(x21, p).fix
        for k in (1, 2):
            N = count_smooth(x21, p, k, fix[k - 1])
            q = p**k
            assert abs(N - 1 - q * q - q * (1 + fix[k - 1])) <= 6 * q


def test_unknown_method(x21):
    with pytest.raises(ValueError):
        count_singular(x21, (17, 1), method="nope")
