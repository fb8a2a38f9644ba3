import io
import random

import numpy as np
import pytest

from rmk3.batchscan import (
    ScanConfig,
    count_triples,
    filter_mask,
    forms_of_height,
    random_forms,
    read_forms_csv,
    rm_sieve,
    scan_prime,
    write_forms_csv,
    write_survivors_jsonl,
)
from rmk3.counter import count_bruteforce, count_singular
from rmk3.families import make_family
from rmk3.surface import BinaryQuadraticForm, SixLineSurface, rational_square_class

D2_INERT = [3, 5, 11, 13, 19, 29]


def test_singleton_scan(x21):
    res = scan_prime([x21.q1], [x21.q2], [x21.q3], 17)
    assert res.counts.shape == (1, 1, 1) and res.counts[0, 0, 0] == 313


def test_scan_matches_bruteforce():
    rng = random.Random(7)
    lists = [random_forms(10, 6, rng) for _ in range(3)]
    p = 13
    res = scan_prime(*lists, p)
    k1, k2, k3 = res.kept
    for a, i in enumerate(k1):
        for b, j in enumerate(k2):
            for c, k in enumerate(k3):
                X = SixLineSurface(lists[0][i], lists[1][j], lists[2][k])
                assert res.counts[a, b, c] == count_bruteforce(X, (p, 1))


def test_skipped_forms_are_reported():
    good = BinaryQuadraticForm(1, 0, -2)
    bad = BinaryQuadraticForm("1/5", 0, 1)
    res = scan_prime([good, bad], [good], [good, good], 5)
    assert res.kept[0] == [0] and res.skipped[0] == [1]
    assert res.counts.shape == (1, 1, 2)


def test_scaling_q3_by_a_square():
    rng = random.Random(11)
    q1, q2, q3 = (random_forms(4, 5, rng) for _ in range(3))
    scaled = [BinaryQuadraticForm(*(4 * x for x in f.coefficients)) for f in q3]
    a = scan_prime(q1, q2, q3, 11).counts
    b = scan_prime(q1, q2, scaled, 11).counts
    assert np.array_equal(a, b)


def test_workers_agree():
    rng = random.Random(3)
    lists = [random_forms(6, 7, rng) for _ in range(3)]
    one = scan_prime(*lists, 17, workers=1).counts
    two = scan_prime(*lists, 17, workers=2).counts
    assert np.array_equal(one, two)


def test_count_triples_matches_scan():
    rng = random.Random(5)
    lists = [random_forms(5, 4, rng) for _ in range(3)]
    p = 23
    full = scan_prime(*lists, p)
    if any(full.skipped):
        pytest.skip("random forms did not all reduce")
    triples = np.array([[i, j, k] for i in range(5) for j in range(5) for k in range(5)][::7])
    got = count_triples(lists, triples, p)
    assert list(got) == [full.counts[i, j, k] for i, j, k in triples]


def test_sieve_keeps_known_families():
    x21 = make_family("x2", 1)
    x13 = make_family("x13")
    rng = random.Random(2)
    noise = [random_forms(4, 5, rng) for _ in range(3)]
    lists = [[x21.q1, x13.q1] + noise[0], [x21.q2, x13.q2] + noise[1], [x21.q3, x13.q3] + noise[2]]
    survivors = list(rm_sieve(lists, 2, ScanConfig(D2_INERT)))
    triples = {(s.q1, s.q2, s.q3) for s in survivors}
    assert (x21.q1, x21.q2, x21.q3) in triples
    for s in survivors:
        X = SixLineSurface(s.q1, s.q2, s.q3)
        for p, n in s.counts.items():
            assert n % p == 1 and n == count_singular(X, (p, 1))
    # a random triple almost never satisfies six congruences
    assert len(survivors) < 10


def test_sieve_rejects_split_primes():
    with pytest.raises(ValueError):
        list(rm_sieve([[BinaryQuadraticForm(1, 0, 1)]] * 3, 2, ScanConfig([3, 7])))


def test_config_validation():
    with pytest.raises(ValueError):
        ScanConfig([5, 3])
    with pytest.raises(ValueError):
        ScanConfig([2, 3])
    with pytest.raises(ValueError):
        ScanConfig([3, 3])


def test_filter_mask_product_square():
    lists = [forms_of_height(1)[:12], forms_of_height(1)[5:15], forms_of_height(1)[2:9]]
    mask = filter_mask(lists, ScanConfig([3], product_square=True))
    for i, f in enumerate(lists[0]):
        for j, g in enumerate(lists[1]):
            for k, h in enumerate(lists[2]):
                prod = f.discriminant * g.discriminant * h.discriminant
                assert mask[i, j, k] == (rational_square_class(prod) == 1)


def test_filter_mask_disc_class():
    lists = [forms_of_height(1)[:8]] * 3
    mask = filter_mask(lists, ScanConfig([3], disc_class_d=2))
    cls = [rational_square_class(f.discriminant) == 2 for f in lists[0]]
    for i in range(8):
        for j in range(8):
            for k in range(8):
                assert mask[i, j, k] == (cls[i] or cls[j] or cls[k])


def test_forms_of_height_counts():
    forms = forms_of_height(1)
    assert all(f.discriminant != 0 for f in forms)
    assert len(forms) == len(set(forms))
    assert len(forms_of_height(1, primitive=False)) >= len(forms)


def test_csv_round_trip(tmp_path):
    forms = [BinaryQuadraticForm("-1/8", 1, -1), BinaryQuadraticForm(2, 3, 1)]
    path = tmp_path / "forms.csv"
    write_forms_csv(path, forms)
    assert read_forms_csv(path) == forms


def test_survivor_jsonl_is_deterministic():
    x21 = make_family("x2", 1)
    lists = [[x21.q1], [x21.q2], [x21.q3]]
    outs = []
    for _ in range(2):
        fh = io.StringIO()
        write_survivors_jsonl(fh, rm_sieve(lists, 2, ScanConfig([3, 5, 11])), {"d": 2})
        outs.append(fh.getvalue())
    assert outs[0] == outs[1] and outs[0].count("\n") == 1
    assert '"d": 2' in outs[0]
