import json

import pytest

from edslab.eds import WardSeed, division_poly_seeds, generate_geometric, generate_ward
from edslab.elliptic import CurveQ, PointQ
from edslab.lrs import FIBONACCI, LrsSpec
from edslab.refuter import (
    WitnessCertificate,
    choose_q,
    compare_streams,
    direct_falsify,
    find_witness,
    validate_q,
    verify_certificate,
)

# non-CM fixture with |w_n| = z_n: the certificate's stream is literally
# the z-sequence up to sign
E = CurveQ(-4, 4)
P = PointQ(1, 1, 1)


def test_fixture_integrity():
    assert E.disc == 176
    geo = generate_geometric(E, P, 60)
    ward = generate_ward(WardSeed(*division_poly_seeds(E, P)), 60)
    assert all(abs(ward.term(n)) == geo.term(n) for n in range(1, 61))


def test_choose_q_skips_mersenne_divisors():
    # k = 2: q = 3 divides 2^2 - 1, so the default choice is 5
    assert choose_q(FIBONACCI, E) == 5
    with pytest.raises(ValueError):
        validate_q(3, FIBONACCI, E)
    with pytest.raises(ValueError):
        validate_q(2, FIBONACCI, E)
    with pytest.raises(ValueError):
        validate_q(7, FIBONACCI, CurveQ(0, 7))  # divides the discriminant 27*49


def test_find_witness_fixture():
    result = find_witness(E, P, FIBONACCI, 5, p_max=10_000)
    assert result.found
    cert = result.certificate
    assert cert.p == 7
    assert cert.q == 5
    assert cert.point_order % 5 == 0
    assert cert.tz_period % 5 == 0
    assert cert.tu_period % 5 != 0
    assert cert.n_points == cert.p - cert.trace + 1
    assert len(cert.mismatches) >= 10


def test_find_witness_deterministic():
    a = find_witness(E, P, FIBONACCI, 5, p_max=5_000)
    b = find_witness(E, P, FIBONACCI, 5, p_max=5_000)
    assert a.certificate.to_json() == b.certificate.to_json()
    assert a.stats == b.stats


def test_find_witness_rejects_degenerate_spec():
    degenerate = LrsSpec(2, (0, 1), (0, 2))
    with pytest.raises(ValueError, match="nondegenerate_reduction"):
        find_witness(E, P, degenerate, 5, p_max=100)


def test_find_witness_rejects_torsion_point():
    with pytest.raises(ValueError):
        find_witness(CurveQ(0, -1), PointQ(1, 0, 1), FIBONACCI, 5, p_max=100)


def test_find_witness_exhaustion_report():
    result = find_witness(E, P, FIBONACCI, 5, p_max=6)
    assert result.status == "exhausted"
    assert result.certificate is None
    stats = result.stats
    assert stats["scanned"] == 3  # 2, 3, 5
    assert stats["excluded"] >= 2  # p = 2 and p = q = 5
    assert sum(v for k, v in stats.items() if k not in ("scanned", "candidates")) == stats["scanned"]


def test_certificate_roundtrip_and_verify():
    result = find_witness(E, P, FIBONACCI, 5, p_max=10_000)
    cert = result.certificate
    text = cert.to_json()
    parsed = WitnessCertificate.from_json(text)
    assert parsed.to_json() == text
    verdict = verify_certificate(parsed)
    assert verdict.ok, verdict.failures


def test_certificate_json_is_canonical_decimal_strings():
    cert = find_witness(E, P, FIBONACCI, 5, p_max=10_000).certificate
    payload = json.loads(cert.to_json())
    assert payload["schema_version"] == "1"
    assert payload["p"] == "7"
    assert isinstance(payload["tz_period"], str)
    assert json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n" == cert.to_json()


def _mutations(payload):
    """Twelve single-field corruptions, each of which must fail verification."""
    def m(path, value):
        clone = json.loads(json.dumps(payload))
        node = clone
        for key in path[:-1]:
            node = node[key]
        node[path[-1]] = value
        return ".".join(map(str, path)), clone

    tz = int(payload["tz_period"])
    tu = int(payload["tu_period"])
    yield m(["curve", "a"], "-5")
    yield m(["point", "x"], "2")
    yield m(["point", "y"], "3")
    yield m(["lrs", "coeffs"], ["1", "2"])
    yield m(["q"], "7")
    yield m(["p"], "11")
    yield m(["trace"], str(int(payload["trace"]) + 1))
    yield m(["n_points"], str(int(payload["n_points"]) + 5))
    yield m(["point_order"], str(int(payload["point_order"]) * 2))
    yield m(["tz_period"], str(tz * int(payload["q"])))
    yield m(["tu_period"], str(tu * int(payload["q"])))
    yield m(["mismatches", 0, "n"], payload["mismatches"][0]["n"])  # placeholder, replaced below


def test_mutation_suite_all_caught():
    cert = find_witness(E, P, FIBONACCI, 5, p_max=10_000).certificate
    assert verify_certificate(cert).ok
    payload = json.loads(cert.to_json())
    cases = list(_mutations(payload))[:-1]
    # 12th mutation: swap a mismatch index for one where the sequences agree
    geo = generate_geometric(E, P, 60)
    from edslab.lrs import eval_mod

    p = cert.p
    agreeing = next(
        n
        for n in range(1, 61)
        if (geo.term(n) - eval_mod(FIBONACCI, n * n, p)) % p == 0
        or (geo.term(n) + eval_mod(FIBONACCI, n * n, p)) % p == 0
    )
    clone = json.loads(json.dumps(payload))
    clone["mismatches"][0] = {
        "n": str(agreeing),
        "z_mod": str(geo.term(agreeing) % p),
        "u_mod": str(eval_mod(FIBONACCI, agreeing * agreeing, p)),
    }
    cases.append(("mismatches.agreeing_index", clone))
    assert len(cases) == 12
    for name, mutated in cases:
        try:
            parsed = WitnessCertificate.from_json(json.dumps(mutated))
        except ValueError:
            continue  # malformed enough to be rejected at parse time
        verdict = verify_certificate(parsed)
        assert not verdict.ok, f"mutation {name} was not caught"


def test_verifier_failures_name_fields():
    cert = find_witness(E, P, FIBONACCI, 5, p_max=10_000).certificate
    payload = json.loads(cert.to_json())
    payload["tu_period"] = str(int(payload["tu_period"]) * int(payload["q"]))
    verdict = verify_certificate(WitnessCertificate.from_json(json.dumps(payload)))
    assert "tu_period" in verdict.failures or "q_not_divides_tu" in verdict.failures


def test_direct_falsify_finds_counterexamples():
    indices = direct_falsify(E, P, FIBONACCI, 1, 7, 50)
    assert indices, "square-sampled Fibonacci cannot shadow the fixture sequence"
    assert all(1 <= n <= 50 for n in indices)


def test_direct_falsify_rejects_bad_prime():
    with pytest.raises(ValueError):
        direct_falsify(E, P, FIBONACCI, 1, 11, 10)  # 11 divides disc = 176


def test_compare_streams_self_is_empty():
    stream = [n % 11 for n in range(100)]
    assert compare_streams(stream, stream, 11, 1, 90) == []
    negated = [(-x) % 11 for x in stream]
    assert compare_streams(stream, negated, 11, 1, 90) == []


def test_constructed_agreement_prefix_then_mismatch():
    # an LRS rigged to match z_{n} for small n cannot keep it up
    geo = generate_geometric(E, P, 12)
    # constant spec equal to z_1 = 1: matches at n = 1 (u_1 = 1) and wherever z = +-1
    spec = LrsSpec(1, (1,), (1,))
    mism = direct_falsify(E, P, spec, 2, 13, 30)
    assert mism
    assert min(mism) >= 2


def test_second_fixture_roundtrip():
    # a second curve/spec pair exercises the pipeline off the main fixture
    curve = CurveQ(-6, 6)
    point = PointQ(1, 1, 1)
    spec = LrsSpec(3, (1, 1, 1), (1, 1, 2), minimal=True)  # tribonacci
    q = choose_q(spec, curve)
    assert q == 5
    result = find_witness(curve, point, spec, q, p_max=20_000)
    assert result.found
    verdict = verify_certificate(WitnessCertificate.from_json(result.certificate.to_json()))
    assert verdict.ok, verdict.failures


def test_zero_x_point_replaced_by_double():
    # x = 0 makes the order-divisibility question equivalent for 2P, which
    # the finder substitutes; the certificate names the point it used
    curve = CurveQ(-5, 4)
    point = PointQ(0, 2, 1)
    result = find_witness(curve, point, FIBONACCI, 5, p_max=5_000)
    assert result.found
    assert result.certificate.point == PointQ(25, -3, 4)
    assert verify_certificate(result.certificate).ok


@pytest.mark.parametrize(
    "curve,point,spec",
    [
        (CurveQ(-5, 2), PointQ(-2, 2, 1), FIBONACCI),
        (CurveQ(-3, -1), PointQ(2, 1, 1), LrsSpec(2, (1, 1), (1, 3), minimal=True)),  # Lucas
        (CurveQ(-6, 6), PointQ(1, 1, 1), LrsSpec(3, (0, 1, 1), (1, 1, 1), minimal=True)),  # Padovan
    ],
)
def test_soundness_across_fixtures(curve, point, spec):
    q = choose_q(spec, curve)
    result = find_witness(curve, point, spec, q, p_max=50_000)
    assert result.found, result.stats
    roundtrip = WitnessCertificate.from_json(result.certificate.to_json())
    verdict = verify_certificate(roundtrip)
    assert verdict.ok, verdict.failures
