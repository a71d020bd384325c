import json

import pytest

from edslab.elliptic import CurveQ, PointQ
from edslab.galois_density import (
    affine_witness,
    conjugacy_type_count,
    count_affine,
    count_gl2,
    empirical_density,
    gl2_histogram,
    gl2_order,
)

E = CurveQ(0, 3)
P = PointQ(1, 2, 1)


def test_gl2_order():
    assert gl2_order(3) == 48
    assert gl2_order(5) == 480


def test_count_gl2_fixture():
    report = count_gl2(3, 0, 2)
    assert report.numerator == 12
    assert report.denominator == 48
    assert report.delta == 0.25


def test_count_gl2_rejects_zero_determinant():
    with pytest.raises(ValueError):
        count_gl2(5, 1, 0)
    with pytest.raises(ValueError):
        count_gl2(4, 1, 1)
    with pytest.raises(ValueError):
        count_gl2(37, 1, 1)  # beyond the default cap


def test_histogram_partitions_group():
    for q in (3, 5, 7):
        hist = gl2_histogram(q)
        assert sum(hist.values()) == gl2_order(q)
        for (a, b), count in hist.items():
            assert count == conjugacy_type_count(q, a, b)
            assert count_gl2(q, a, b).numerator == count


def test_positivity_small_q():
    for q in (3, 5, 7):
        for a in range(q):
            for b in range(1, q):
                assert count_gl2(q, a, b).delta > 0


def test_affine_fixture_positive():
    report = count_affine(5, 3, 2)
    assert report.denominator == 480 * 25
    assert report.delta > 0


def test_affine_witness_structure():
    for q in (3, 5, 7):
        for a in range(q):
            if (a - 1) % q == 0:
                continue
            j, u, outside = affine_witness(q, a)
            assert (j[0] + j[3]) % q == a % q
            assert (j[0] * j[3] - j[1] * j[2]) % q == (a - 1) % q
            assert outside  # the image is {(x, 0)} and u = (1, 1)


def test_affine_counts_witness():
    # the witness pair contributes, so the count is at least 1 when b = a-1
    for q in (3, 5):
        for a in range(q):
            b = (a - 1) % q
            if b == 0:
                continue
            assert count_affine(q, a, b).numerator >= 1


def test_empirical_scan_fixture():
    report = empirical_density(E, P, 3, 3, 3000)
    assert report.b == 2
    scan = report.empirical
    assert scan is not None
    assert scan.scanned > 300
    assert scan.hits > 0
    assert 0 < scan.frequency < 1
    # deterministic rerun
    again = empirical_density(E, P, 3, 3, 3000)
    assert again.empirical.hits == scan.hits
    assert again.empirical.scanned == scan.scanned


def test_empirical_hits_verified_independently():
    from edslab.elliptic import CurveFp, count_points, point_order_fp, reduce_point
    from edslab.ntkernel import sieve_primes

    q, a, x = 5, 3, 2000
    report = empirical_density(E, P, q, a, x)
    recount = 0
    for p in sieve_primes(x):
        if p == 2 or p == q or E.disc % p == 0:
            continue
        if p % q != (a - 1) % q:
            continue
        cfp = CurveFp.from_curve(E, p)
        n_points, trace = count_points(cfp)
        if trace % q != a % q:
            continue
        order = point_order_fp(reduce_point(P, E, p), cfp, n_points)
        if order % q == 0:
            recount += 1
    assert report.empirical.hits == recount


def test_empirical_rejects_a_equal_one():
    with pytest.raises(ValueError):
        empirical_density(E, P, 5, 1, 100)


def test_report_json_shape():
    report = count_gl2(3, 0, 2)
    payload = report.to_json_dict()
    assert payload == {
        "q": 3,
        "a": 0,
        "b": 2,
        "numerator": 12,
        "denominator": 48,
        "delta_num": 1,
        "delta_den": 4,
    }
    emp = empirical_density(E, P, 3, 3, 500).to_json_dict()
    assert set(emp["empirical"]) == {"x", "hits", "scanned"}
    json.dumps(emp)  # serializable
