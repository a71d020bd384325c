"""Exact matrix and affine-group densities over F_q, and empirical prime scans.

The linear density counts J in GL2(F_q) with prescribed trace and
determinant; the affine variant additionally counts translation parts u
outside the column space of J - I.  Every density is an exact rational.
Empirical scans tally primes p with matching Frobenius data (a_p, p mod q)
and with q dividing the order of a fixed rational point modulo p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .elliptic import CurveFp, CurveQ, PointQ, count_points, point_order_fp, reduce_point
from .ntkernel import is_prime, sieve_primes

DEFAULT_LINEAR_CAP = 31
DEFAULT_AFFINE_CAP = 13


@dataclass
class EmpiricalScan:
    x: int  # prime bound
    hits: int
    scanned: int
    small_sample: bool

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.hits, self.scanned) if self.scanned else Fraction(0)


@dataclass
class DensityReport:
    q: int
    a: int
    b: int
    numerator: int
    denominator: int
    kind: str  # "gl2" | "affine"
    empirical: EmpiricalScan | None = None

    @property
    def delta(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def to_json_dict(self) -> dict:
        delta = self.delta
        payload = {
            "q": self.q,
            "a": self.a,
            "b": self.b,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "delta_num": delta.numerator,
            "delta_den": delta.denominator,
        }
        if self.empirical is not None:
            payload["empirical"] = {
                "x": self.empirical.x,
                "hits": self.empirical.hits,
                "scanned": self.empirical.scanned,
            }
        return payload


def gl2_order(q: int) -> int:
    return (q * q - 1) * (q * q - q)


def _validate_q(q: int, cap: int) -> None:
    if not is_prime(q):
        raise ValueError(f"q={q} must be prime")
    if q > cap:
        raise ValueError(f"q={q} exceeds the enumeration cap {cap}")


def count_gl2(q: int, a: int, b: int, cap: int = DEFAULT_LINEAR_CAP) -> DensityReport:
    """Exact count of J in GL2(F_q) with tr(J) = a and det(J) = b != 0.

    Plain exhaustive enumeration of all q^4 matrices.
    """
    _validate_q(q, cap)
    a %= q
    b %= q
    if b == 0:
        raise ValueError("the determinant class must be non-zero")
    count = 0
    for m11 in range(q):
        m22 = (a - m11) % q
        diag = m11 * m22
        for m12 in range(q):
            for m21 in range(q):
                if (diag - m12 * m21) % q == b:
                    count += 1
    return DensityReport(q, a, b, count, gl2_order(q), "gl2")


def gl2_histogram(q: int, cap: int = DEFAULT_LINEAR_CAP) -> dict[tuple[int, int], int]:
    """Counts of invertible matrices by (trace, determinant) in one pass."""
    _validate_q(q, cap)
    hist: dict[tuple[int, int], int] = {}
    for m11 in range(q):
        for m12 in range(q):
            for m21 in range(q):
                for m22 in range(q):
                    det = (m11 * m22 - m12 * m21) % q
                    if det:
                        key = ((m11 + m22) % q, det)
                        hist[key] = hist.get(key, 0) + 1
    return hist


def conjugacy_type_count(q: int, a: int, b: int) -> int:
    """Predicted (trace, det) cell size from the factorization of x^2 - ax + b.

    Distinct roots in F_q: q^2 + q; irreducible: q^2 - q; double root: q^2.
    """
    disc = (a * a - 4 * b) % q
    if disc == 0:
        return q * q
    if pow(disc, (q - 1) // 2, q) == 1:
        return q * q + q
    return q * q - q


def _image_of(mat: tuple[int, int, int, int], q: int) -> set[tuple[int, int]]:
    m11, m12, m21, m22 = mat
    return {((m11 * s + m12 * t) % q, (m21 * s + m22 * t) % q) for s in range(q) for t in range(q)}


def count_affine(q: int, a: int, b: int, cap: int = DEFAULT_AFFINE_CAP) -> DensityReport:
    """Pairs (J, u) with tr(J) = a, det(J) = b, and u outside Im(J - I).

    For each qualifying J the translation parts u are enumerated against the
    exact image set of J - I; the denominator is |GL2(F_q)| * q^2.
    """
    _validate_q(q, cap)
    a %= q
    b %= q
    if b == 0:
        raise ValueError("the determinant class must be non-zero")
    count = 0
    for m11 in range(q):
        m22 = (a - m11) % q
        diag = m11 * m22
        for m12 in range(q):
            for m21 in range(q):
                if (diag - m12 * m21) % q != b:
                    continue
                image = _image_of(((m11 - 1) % q, m12, m21, (m22 - 1) % q), q)
                for u1 in range(q):
                    for u2 in range(q):
                        if (u1, u2) not in image:
                            count += 1
    return DensityReport(q, a, b, count, gl2_order(q) * q * q, "affine")


def affine_witness(q: int, a: int) -> tuple[tuple[int, int, int, int], tuple[int, int], bool]:
    """The explicit qualifying pair for b = a - 1: J = [[a-1, -1], [0, 1]], u = (1, 1).

    Returns (J, u, outside) where outside says u avoids Im(J - I); the image
    is the line {(x, 0)}, so the pair always qualifies.
    """
    j = ((a - 1) % q, (-1) % q, 0, 1)
    u = (1, 1)
    image = _image_of(((j[0] - 1) % q, j[1], j[2], (j[3] - 1) % q), q)
    return j, u, u not in image


def _scan_one_prime(curve: CurveQ, point: PointQ, q: int, a: int, b: int, p: int) -> bool:
    if p % q != b:
        return False
    cfp = CurveFp.from_curve(curve, p)
    n_points, trace = count_points(cfp)
    if trace % q != a % q:
        return False
    # matching congruences force q | #E = p - a_p + 1
    assert n_points % q == 0
    order = point_order_fp(reduce_point(point, curve, p), cfp, n_points)
    return order % q == 0


def _empirical_chunk(args) -> tuple[int, int]:
    curve_a, curve_b, px, py, pz, q, a, b, primes = args
    curve = CurveQ(curve_a, curve_b)
    point = PointQ(px, py, pz)
    hits = sum(1 for p in primes if _scan_one_prime(curve, point, q, a, b, p))
    return hits, len(primes)


def empirical_density(
    curve: CurveQ,
    point: PointQ,
    q: int,
    a: int,
    x: int,
    exclusions: tuple[int, ...] = (),
    jobs: int = 1,
) -> DensityReport:
    """Frequency of primes p <= x with a_p = a, p = a-1 (mod q), q | ord(P mod p).

    Reported beside the exact affine density for (q, a, b = a-1).  Only
    odd primes of good reduction coprime to z1 are scanned; a configurable
    exclusion list stands in for the finitely many primes where the
    group-theoretic model is not available.  With jobs > 1 the primes are
    partitioned across worker processes and the tallies summed, which is
    order-independent, so reruns are deterministic either way.
    """
    if not is_prime(q):
        raise ValueError("q must be prime")
    b = (a - 1) % q
    if b == 0:
        raise ValueError("need a != 1 (mod q) so that the determinant class b = a-1 is non-zero")
    exact = count_affine(q, a % q, b)
    primes = [
        p
        for p in sieve_primes(x)
        if p != 2 and p != q and p not in exclusions and curve.disc % p and point.z % p
    ]
    if jobs > 1 and len(primes) > 64:
        import multiprocessing

        chunks = [primes[i::jobs] for i in range(jobs)]
        payload = [(curve.a, curve.b, point.x, point.y, point.z, q, a, b, c) for c in chunks]
        with multiprocessing.Pool(jobs) as pool:
            results = pool.map(_empirical_chunk, payload)
        hits = sum(h for h, _ in results)
        scanned = sum(s for _, s in results)
    else:
        hits = sum(1 for p in primes if _scan_one_prime(curve, point, q, a, b, p))
        scanned = len(primes)
    scan = EmpiricalScan(x, hits, scanned, small_sample=hits < 30)
    return DensityReport(q, a % q, b, exact.numerator, exact.denominator, "affine", scan)
