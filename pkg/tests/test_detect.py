import random
from fractions import Fraction

import pytest

from rmk3.batchscan import random_surface
from rmk3.detect import (
    DeterministicParams,
    ExhaustedPrimes,
    StatisticalParams,
    detect_deterministic,
    detect_statistical,
    format_probability,
    inclusion_exclusion_exactly,
    inert_primes,
    is_nonordinary,
    poisson_binomial,
    splitting_group,
    statistical_primes,
    survival_probabilities,
    survival_tail,
)
from rmk3.families import make_family
from rmk3.ratpoly import pmul


def test_is_nonordinary_examples(x21):
    assert is_nonordinary(x21, 3)
    assert not is_nonordinary(x21, 17)
    assert is_nonordinary(make_family("x13"), 5)
    with pytest.raises(ValueError):
        is_nonordinary(x21, 2)


def test_statistical_window():
    S = statistical_primes()
    assert S[0] == 41 and S[-1] == 293
    assert all(p % 4 == 1 for p in S)
    assert len(S) == 24


@pytest.mark.parametrize("name,t,d", [("x2", 1, 2), ("x5", 0, 5), ("x2", 3, 2)])
def test_statistical_candidates(name, t, d):
    r = detect_statistical(make_family(name, t))
    assert r.candidate and r.d == d and r.step == "vi"
    assert d in r.real_subfields


def test_statistical_x13_prefers_splitting_subfield():
    r = detect_statistical(make_family("x13"))
    assert r.candidate and r.d == 13
    assert 13 in r.real_subfields


def test_statistical_records_p2_skip():
    r = detect_statistical(make_family("x5", 0))
    assert {"p": 2, "reason": "characteristic 2 is not counted"} in r.skipped


def test_random_surfaces_rejected_at_step_one():
    rng = random.Random(7)
    for _ in range(10):
        r = detect_statistical(random_surface(12, rng))
        assert r.outcome == "rejected" and r.step == "i"


def test_deterministic_short_run():
    params = DeterministicParams(inert_bound=120, good_bound=30)
    r = detect_deterministic(make_family("x2", 1), 2, params)
    assert r.candidate
    summaries = [c for c in r.charpolys if c["degree"] == 4]
    assert summaries and all(c["splits_over_sqrt_d"] or c["galois"] == "V4" for c in summaries)
    assert all(w["holds"] for w in r.witnesses)


def test_deterministic_rejection_carries_witness(x21):
    r = detect_deterministic(x21, 5)
    assert r.outcome == "rejected" and r.step == "i"
    assert r.witnesses[-1] == {"step": "inert", "p": 17, "count": 313, "holds": False}


def test_deterministic_bad_d(x21):
    with pytest.raises(ValueError):
        detect_deterministic(x21, 8)


def test_exhausted_primes():
    # a step-iii loop bound of zero cannot pick any p0
    with pytest.raises(ExhaustedPrimes):
        detect_statistical(make_family("x2", 1), StatisticalParams(max_iterations=0))


def test_splitting_group_reducible_cases():
    assert splitting_group(pmul([1, 0, 1], [2, 0, 1])) == "V4"  # Q(i) and Q(sqrt -2)
    assert splitting_group(pmul([1, 0, 1], [4, 0, 1])) == "C2"  # both Q(i)
    assert splitting_group(pmul([-1, 0, 1], [2, 0, 1])) == "reducible"
    assert splitting_group([1, 1, 1, 1, 1]) == "C4"


def test_inert_primes():
    assert inert_primes(2, 30) == [3, 5, 11, 13, 19, 29]
    assert inert_primes(5, 20) == [2, 3, 7, 13, 17]


def test_poisson_binomial_against_inclusion_exclusion():
    probs = [Fraction(1, p) for p in statistical_primes()[:10]]
    dist = poisson_binomial(probs)
    assert sum(dist) == 1
    for m in (2, 3, 6):
        assert inclusion_exclusion_exactly(probs, m) == dist[m]


def test_survival_probabilities_statistical():
    x = survival_probabilities("statistical")
    assert format_probability(x) == "2.66e-8"
    assert abs(float(x) / 2.66e-8 - 1) < 0.01
    # the tail P(>= 6) is a different, slightly larger number
    assert survival_tail() > x
    assert format_probability(survival_tail()) == "2.71e-8"


@pytest.mark.parametrize("d,expected", [(2, 3.26e-64), (5, 2.69e-63), (13, 4.07e-61), (17, 1.30e-63)])
def test_survival_probabilities_inert(d, expected):
    x = survival_probabilities("inert", d)
    assert abs(float(x) / expected - 1) < 0.02


def test_survival_probabilities_errors():
    with pytest.raises(ValueError):
        survival_probabilities("inert")
    with pytest.raises(ValueError):
        survival_probabilities("other")
