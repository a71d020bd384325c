"""Exact elliptic curve arithmetic over Q and over prime fields F_p.

Rational points are kept in the normalized shape (x/z^2, y/z^3) with
gcd(x, y, z) = 1 and z > 0, so the z-coordinate of nP is exactly the
denominator term of the associated divisibility sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .ntkernel import factorize, invmod, is_prime

# uniform bound on the order of rational torsion points, with margin
TORSION_SEARCH_BOUND = 16


class BadReductionError(ValueError):
    """Raised when an operation requires good reduction at p and lacks it."""


@dataclass(frozen=True)
class CurveQ:
    """Short Weierstrass curve y^2 = x^3 + a*x + b over Q with a, b integers."""

    a: int
    b: int

    def __post_init__(self):
        if self.disc == 0:
            raise ValueError("singular curve: 4a^3 + 27b^2 = 0")

    @property
    def disc(self) -> int:
        return 4 * self.a**3 + 27 * self.b**2

    def contains(self, point: "PointQ") -> bool:
        if point.is_infinity:
            return True
        x, y, z = point.x, point.y, point.z
        return y * y == x**3 + self.a * x * z**4 + self.b * z**6

    def __str__(self):
        return f"y^2 = x^3 + {self.a}*x + {self.b}"


@dataclass(frozen=True)
class PointQ:
    """Point (x/z^2, y/z^3) with gcd(x, y, z) = 1, z > 0; z = 0 is infinity."""

    x: int
    y: int
    z: int

    def __post_init__(self):
        if self.z < 0:
            raise ValueError("z must be non-negative (0 means infinity)")
        if self.z > 0 and math.gcd(math.gcd(self.x, self.y), self.z) != 1:
            raise ValueError("coordinates must be coprime")

    @classmethod
    def infinity(cls) -> "PointQ":
        return cls(1, 1, 0)

    @property
    def is_infinity(self) -> bool:
        return self.z == 0

    def affine(self) -> tuple[Fraction, Fraction]:
        if self.is_infinity:
            raise ValueError("infinity has no affine coordinates")
        return Fraction(self.x, self.z**2), Fraction(self.y, self.z**3)

    def __neg__(self) -> "PointQ":
        if self.is_infinity:
            return self
        return PointQ(self.x, -self.y, self.z)

    def __str__(self):
        return "O" if self.is_infinity else f"({self.x}:{self.y}:{self.z})"


def point_from_affine(xa: Fraction, ya: Fraction) -> PointQ:
    """Normalize affine rational coordinates into (x, y, z) form.

    On an integral short Weierstrass model the reduced denominator of x is
    always a perfect square z^2 and the denominator of y is z^3.
    """
    xa, ya = Fraction(xa), Fraction(ya)
    z = math.isqrt(xa.denominator)
    if z * z != xa.denominator:
        raise ValueError(f"denominator {xa.denominator} is not a perfect square")
    x = xa.numerator
    yz3 = ya * z**3
    if yz3.denominator != 1:
        raise ValueError("y denominator is not the cube of z")
    return PointQ(x, int(yz3), z)


def add(p: PointQ, q: PointQ, curve: CurveQ) -> PointQ:
    """Chord-tangent sum of two points, renormalized."""
    if p.is_infinity:
        return q
    if q.is_infinity:
        return p
    x1, y1 = p.affine()
    x2, y2 = q.affine()
    if x1 == x2:
        if y1 == -y2:
            return PointQ.infinity()
        lam = (3 * x1 * x1 + curve.a) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    y3 = lam * (x1 - x3) - y1
    return point_from_affine(x3, y3)


def scalar_mul(n: int, p: PointQ, curve: CurveQ) -> PointQ:
    """n*P by double-and-add; n may be any integer."""
    if n < 0:
        return scalar_mul(-n, -p, curve)
    result = PointQ.infinity()
    base = p
    while n:
        if n & 1:
            result = add(result, base, curve)
        n >>= 1
        if n:
            base = add(base, base, curve)
    return result


def is_torsion(p: PointQ, curve: CurveQ, bound: int = TORSION_SEARCH_BOUND) -> tuple[bool, int | None]:
    """Detect torsion by checking nP = O for n <= bound.

    Rational torsion orders are at most 12; the default bound 16 leaves margin.
    """
    if p.is_infinity:
        return True, 1
    current = p
    for n in range(2, bound + 1):
        current = add(current, p, curve)
        if current.is_infinity:
            return True, n
    return False, None


# ---------------------------------------------------------------------------
# reduction modulo p

PointFp = tuple[int, int] | None  # None is the point at infinity


@dataclass(frozen=True)
class CurveFp:
    """Reduction of a curve modulo an odd prime; `good` records p ∤ disc."""

    p: int
    a: int
    b: int
    good: bool

    @classmethod
    def from_curve(cls, curve: CurveQ, p: int) -> "CurveFp":
        if p == 2 or not is_prime(p):
            raise ValueError("p must be an odd prime")
        return cls(p, curve.a % p, curve.b % p, curve.disc % p != 0)

    def contains(self, pt: PointFp) -> bool:
        if pt is None:
            return True
        x, y = pt
        return (y * y - (x * x * x + self.a * x + self.b)) % self.p == 0


def reduce_point(p: PointQ, curve: CurveQ, prime: int) -> PointFp:
    """Reduce a rational point mod prime; needs prime ∤ z."""
    if p.is_infinity:
        return None
    if p.z % prime == 0:
        return None  # reduces into the identity
    z2 = invmod(p.z * p.z, prime)
    z3 = z2 * invmod(p.z, prime)
    return (p.x * z2 % prime, p.y * z3 % prime)


def fp_add(p1: PointFp, p2: PointFp, curve: CurveFp) -> PointFp:
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    p = curve.p
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + curve.a) * invmod(2 * y1, p) % p
    else:
        lam = (y2 - y1) * invmod(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return (x3, y3)


def fp_scalar_mul(n: int, pt: PointFp, curve: CurveFp) -> PointFp:
    if n < 0:
        pt = None if pt is None else (pt[0], (-pt[1]) % curve.p)
        n = -n
    result: PointFp = None
    base = pt
    while n:
        if n & 1:
            result = fp_add(result, base, curve)
        n >>= 1
        if n:
            base = fp_add(base, base, curve)
    return result


def count_points(curve: CurveFp) -> tuple[int, int]:
    """(#E(F_p), a_p) by the naive quadratic-character sum over all x.

    #E = p + 1 + sum_x chi(x^3 + ax + b); for good reduction Hasse gives
    |a_p| < 2*sqrt(p).
    """
    p, a, b = curve.p, curve.a, curve.b
    qr = bytearray(p)  # 2 marks a nonzero square
    for i in range(1, (p - 1) // 2 + 1):
        qr[i * i % p] = 2
    qr[0] = 1
    total = p + 1
    for x in range(p):
        total += qr[(x * x * x + a * x + b) % p] - 1
    return total, p + 1 - total


def hasse_window(n_points: int, p: int) -> bool:
    a_p = p + 1 - n_points
    return a_p * a_p < 4 * p


def point_order_fp(pt: PointFp, curve: CurveFp, n_points: int | None = None) -> int:
    """Exact order of a point in E(F_p), by stripping primes from #E."""
    if not curve.good:
        raise BadReductionError(f"bad reduction at {curve.p}")
    if pt is None:
        return 1
    if n_points is None:
        n_points, _ = count_points(curve)
    order = n_points
    for ell in factorize(n_points):
        while order % ell == 0 and fp_scalar_mul(order // ell, pt, curve) is None:
            order //= ell
    assert fp_scalar_mul(order, pt, curve) is None
    return order


# ---------------------------------------------------------------------------
# growth of the denominator sequence


def log_bigint(n: int) -> float:
    """Natural log of a positive big integer without float overflow."""
    if n <= 0:
        raise ValueError("need a positive integer")
    bl = n.bit_length()
    if bl <= 512:
        return math.log(n)
    shift = bl - 64
    return math.log(n >> shift) + shift * math.log(2)


@dataclass
class HeightReport:
    estimates: list[tuple[int, float]]  # (n, log z_n / n^2)
    limit: float
    convergence_gap: float  # |c_{n_max} - c_{n_max/2}|


def canonical_height_estimate(p: PointQ, curve: CurveQ, n_max: int) -> HeightReport:
    """Estimates c_n = log z_n / n^2; the limit is the height of the point.

    Only the z-coordinates of the exact multiples are used; torsion input
    is rejected because its z-sequence does not grow.
    """
    torsion, _ = is_torsion(p, curve)
    if torsion:
        raise ValueError("height growth estimate needs a non-torsion point")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    estimates = []
    current = p
    zs = {}
    for n in range(1, n_max + 1):
        if n > 1:
            current = add(current, p, curve)
        zs[n] = current.z
        if current.z > 1:
            estimates.append((n, log_bigint(current.z) / n**2))
    if not estimates:
        raise ValueError("sequence did not grow within the range")
    limit = estimates[-1][1]
    half = next((c for n, c in reversed(estimates) if n <= n_max // 2), estimates[0][1])
    return HeightReport(estimates, limit, abs(limit - half))


# ---------------------------------------------------------------------------
# text ingestion


def parse_curve(text: str) -> CurveQ:
    """Parse `curve A B` with arbitrary-precision decimal integers."""
    parts = text.split()
    if len(parts) != 3 or parts[0] != "curve":
        raise ValueError(f"expected 'curve A B', got {text!r}")
    return CurveQ(int(parts[1]), int(parts[2]))


def parse_point(text: str) -> PointQ:
    """Parse `point x y z` with arbitrary-precision decimal integers."""
    parts = text.split()
    if len(parts) != 4 or parts[0] != "point":
        raise ValueError(f"expected 'point x y z', got {text!r}")
    return PointQ(int(parts[1]), int(parts[2]), int(parts[3]))
