"""Elliptic divisibility sequences: geometric and bilinear-recurrence generation,
growth, primitive divisors, and periods modulo p.

A geometric sequence stores the positive denominators z_n of nP.  Reductions
modulo p are computed on the canonical signed companion sequence w_n obtained
from the normalized division-polynomial seed values; |w_n| = z_n away from bad
primes, and the sign ambiguity is irrelevant to every question asked here
(zeros, divisibility, periods up to sign).
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

from .elliptic import (
    CurveFp,
    CurveQ,
    PointQ,
    add,
    count_points,
    is_torsion,
    point_order_fp,
    reduce_point,
    scalar_mul,
)
from .ntkernel import IncompleteFactorization, factorize, invmod, is_prime


class InexactDivisionError(ValueError):
    """A bilinear recurrence step did not divide exactly."""

    def __init__(self, index: int, numerator: int, denominator: int):
        super().__init__(f"inexact division at index {index}: {numerator} / {denominator}")
        self.index = index


@dataclass(frozen=True)
class WardSeed:
    """Four initial integer values w1..w4 with w1*w2*w3 != 0 and w2 | w4."""

    w1: int
    w2: int
    w3: int
    w4: int

    def __post_init__(self):
        if self.w1 * self.w2 * self.w3 == 0:
            raise ValueError("w1, w2, w3 must be non-zero")
        if self.w4 % self.w2 != 0:
            raise ValueError("w2 must divide w4")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.w1, self.w2, self.w3, self.w4)


@dataclass
class EdsSequence:
    """A generated prefix of an elliptic divisibility sequence (1-based)."""

    source: str  # "geometric" | "ward"
    terms: list[int]
    curve: CurveQ | None = None
    point: PointQ | None = None
    seed: WardSeed | None = None
    degenerate_at: int | None = None  # first index with a zero term, if any

    def term(self, n: int) -> int:
        if not 1 <= n <= len(self.terms):
            raise IndexError(f"term {n} not generated (have 1..{len(self.terms)})")
        return self.terms[n - 1]

    def __len__(self) -> int:
        return len(self.terms)


def division_poly_seeds(curve: CurveQ, point: PointQ) -> tuple[int, int, int, int]:
    """Integer seed values of the division-polynomial sequence at the point.

    These are the evaluations of the first four division polynomials at
    (x/z^2, y/z^3), cleared of denominators by the weight z^(n^2-1); they
    start the bilinear recurrences and satisfy |w_n| = z_n at primes of
    good reduction.
    """
    a, b = curve.a, curve.b
    x1, y1, z1 = point.x, point.y, point.z
    if z1 == 0:
        raise ValueError("need an affine point")
    w2 = 2 * y1
    w3 = 3 * x1**4 + 6 * a * x1**2 * z1**4 + 12 * b * x1 * z1**6 - a**2 * z1**8
    w4 = 4 * y1 * (
        x1**6
        + 5 * a * x1**4 * z1**4
        + 20 * b * x1**3 * z1**6
        - 5 * a**2 * x1**2 * z1**8
        - 4 * a * b * x1 * z1**10
        - 8 * b**2 * z1**12
        - a**3 * z1**12
    )
    return (1, w2, w3, w4)


def generate_geometric(curve: CurveQ, point: PointQ, n_terms: int) -> EdsSequence:
    """z_1..z_N extracted from exact scalar multiples, each positive."""
    if n_terms < 1:
        raise ValueError("need at least one term")
    torsion, order = is_torsion(point, curve)
    if torsion:
        raise ValueError(f"point is torsion (order {order}); the sequence degenerates")
    if not curve.contains(point):
        raise ValueError("point is not on the curve")
    terms = []
    current = point
    for n in range(1, n_terms + 1):
        if n > 1:
            current = add(current, point, curve)
        terms.append(current.z)
    return EdsSequence("geometric", terms, curve=curve, point=point)


def generate_ward(seed: WardSeed, n_terms: int) -> EdsSequence:
    """Extend four seed values by the bilinear recurrences, checking exactness.

    Odd step:  w(2n+1) * w1^3      = w(n+2)*w(n)^3 - w(n+1)^3*w(n-1)
    Even step: w(2n)   * w2 * w1^2 = w(n+2)*w(n)*w(n-1)^2 - w(n)*w(n-2)*w(n+1)^2
    """
    if n_terms < 1:
        raise ValueError("need at least one term")
    w = [0, *seed.as_tuple()]
    degenerate_at = next((i for i in range(1, min(4, n_terms) + 1) if w[i] == 0), None)
    for m in range(5, n_terms + 1):
        if m % 2:
            n = (m - 1) // 2
            num = w[n + 2] * w[n] ** 3 - w[n + 1] ** 3 * w[n - 1]
            den = seed.w1**3
        else:
            n = m // 2
            num = w[n + 2] * w[n] * w[n - 1] ** 2 - w[n] * w[n - 2] * w[n + 1] ** 2
            den = seed.w2 * seed.w1**2
        if num % den != 0:
            raise InexactDivisionError(m, num, den)
        w.append(num // den)
        if w[m] == 0 and degenerate_at is None:
            degenerate_at = m
    return EdsSequence("ward", w[1 : n_terms + 1], seed=seed, degenerate_at=degenerate_at)


# ---------------------------------------------------------------------------
# reductions modulo p


def stream_mod_p(seeds: tuple[int, int, int, int], p: int, horizon: int) -> list[int]:
    """w_1..w_horizon modulo p (index 0 unused); needs p coprime to w1*w2."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    w1, w2 = seeds[0] % p, seeds[1] % p
    if w1 == 0 or w2 == 0:
        raise ValueError(f"stream modulo {p} needs p coprime to w1*w2")
    w = [0] * (max(horizon, 4) + 1)
    w[1], w[2], w[3], w[4] = (s % p for s in seeds)
    inv_odd = invmod(pow(w1, 3, p), p)
    inv_even = invmod(w2 * w1 * w1 % p, p)
    for m in range(5, horizon + 1):
        if m % 2:
            n = (m - 1) // 2
            w[m] = (w[n + 2] * w[n] ** 3 - w[n + 1] ** 3 * w[n - 1]) * inv_odd % p
        else:
            n = m // 2
            w[m] = (w[n + 2] * w[n] * w[n - 1] ** 2 - w[n] * w[n - 2] * w[n + 1] ** 2) * inv_even % p
    return w[: horizon + 1]


def _minimal_stream_period(stream: list[int], step: int, horizon: int) -> int | None:
    """Smallest period that is a multiple of `step`, verified on the window.

    Any period maps the zero set onto itself, and the zeros sit exactly on
    the multiples of the rank of apparition, so only multiples of the rank
    can be periods.
    """
    t = step
    while 2 * t <= horizon:
        if all(stream[n + t] == stream[n] for n in range(1, horizon - t + 1)):
            return t
        t += step
    return None


@dataclass
class EdsPeriodResult:
    p: int
    status: str  # "confirmed" | "unconfirmed"
    period: int | None
    rank: int | None  # rank of apparition (first zero index)
    window: tuple[int, int]
    n_points: int | None = None
    trace: int | None = None
    period_bound: int | None = None  # 2*(p-1)*#E(F_p) for geometric sources
    divides_bound: bool | None = None
    zeros_consistent: bool | None = None

    @property
    def confirmed(self) -> bool:
        return self.status == "confirmed"


def eds_period_mod_p(seq: EdsSequence, p: int, horizon: int | None = None) -> EdsPeriodResult:
    """Minimal verified period of the sequence modulo p.

    The period is computed on the canonical signed stream; for a geometric
    source it divides 2*(p-1)*#E(F_p), and the zeros fall exactly on the
    multiples of the order of the reduced point.  When the horizon cannot
    confirm a full period twice the status is "unconfirmed" and no period
    is reported.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if seq.source == "geometric":
        curve, point = seq.curve, seq.point
        if curve.disc % p == 0 or point.z % p == 0:
            raise ValueError(f"need p coprime to the discriminant and to z1 (p={p})")
        seeds = division_poly_seeds(curve, point)
        cfp = CurveFp.from_curve(curve, p)
        n_points, trace = count_points(cfp)
        rank = point_order_fp(reduce_point(point, curve, p), cfp, n_points)
        bound = 2 * (p - 1) * n_points
        if horizon is None:
            horizon = 2 * rank * (p - 1) + 2 * rank + 16
    else:
        seeds = seq.seed.as_tuple()
        n_points = trace = bound = None
        rank = None
        if horizon is None:
            horizon = max(4096, 16 * p)

    stream = stream_mod_p(seeds, p, horizon)
    first_zero = next((n for n in range(1, horizon + 1) if stream[n] == 0), None)
    zeros_consistent = None
    if seq.source == "geometric":
        zeros_consistent = all(
            (stream[n] == 0) == (n % rank == 0) for n in range(1, horizon + 1)
        )
        step = rank
    else:
        rank = first_zero
        step = first_zero if first_zero is not None else 1

    period = _minimal_stream_period(stream, step, horizon)
    if period is None:
        return EdsPeriodResult(
            p, "unconfirmed", None, rank, (1, horizon), n_points, trace, bound, None, zeros_consistent
        )
    return EdsPeriodResult(
        p,
        "confirmed",
        period,
        rank,
        (1, horizon),
        n_points,
        trace,
        bound,
        None if bound is None else bound % period == 0,
        zeros_consistent,
    )


# ---------------------------------------------------------------------------
# primitive (Zsigmondy) divisors


@dataclass
class PrimitiveReport:
    n: int
    term: int
    primitive_part: int  # product of the primitive prime powers of |term|
    primes: list[int]
    complete: bool  # False when factoring the primitive part timed out
    has_primitive: bool


def primitive_divisor_scan(seq: EdsSequence, *, rho_iters: int = 200_000) -> list[PrimitiveReport]:
    """Per-index primitive primes: divisors of z_n dividing no earlier term.

    The primitive part is isolated exactly with gcds against the running
    product of earlier terms, so `has_primitive` never depends on factoring;
    only the listed primes can be incomplete under the effort cap.
    """
    reports = []
    running = 1
    for n in range(1, len(seq) + 1):
        t = abs(seq.term(n))
        if t == 0:
            reports.append(PrimitiveReport(n, 0, 0, [], True, False))
            continue
        prim = t
        g = math.gcd(prim, running)
        while g > 1:
            prim //= g
            g = math.gcd(prim, g)
        primes: list[int] = []
        complete = True
        if prim > 1:
            try:
                primes = sorted(factorize(prim, rho_iters=rho_iters))
            except IncompleteFactorization as exc:
                primes = sorted(exc.factors)
                complete = False
        reports.append(PrimitiveReport(n, seq.term(n), prim, primes, complete, prim > 1))
        running *= t
    return reports


# ---------------------------------------------------------------------------
# sequence cache


def cache_key(curve: CurveQ, point: PointQ) -> str:
    payload = f"curve {curve.a} {curve.b} point {point.x} {point.y} {point.z}"
    return hashlib.sha256(payload.encode()).hexdigest()


def cache_path(cache_dir: str, curve: CurveQ, point: PointQ) -> str:
    return os.path.join(cache_dir, cache_key(curve, point) + ".eds")


def save_sequence(cache_dir: str, seq: EdsSequence) -> str:
    if seq.source != "geometric":
        raise ValueError("only geometric sequences are cached")
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, seq.curve, seq.point)
    with open(path, "w") as fh:
        for n in range(1, len(seq) + 1):
            fh.write(f"{n} {seq.term(n)}\n")
    return path


def load_sequence(cache_dir: str, curve: CurveQ, point: PointQ, n_terms: int) -> EdsSequence | None:
    """Load a cached prefix; revalidates the first and last term exactly.

    Returns None on a miss or on corruption (the caller regenerates).
    """
    path = cache_path(cache_dir, curve, point)
    if not os.path.exists(path):
        return None
    terms: dict[int, int] = {}
    try:
        with open(path) as fh:
            for line in fh:
                n_str, z_str = line.split()
                terms[int(n_str)] = int(z_str)
    except (ValueError, OSError):
        return None
    if not terms or any(n not in terms for n in range(1, n_terms + 1)):
        return None
    last = max(n for n in terms if n <= n_terms)
    for n in (1, last):
        if scalar_mul(n, point, curve).z != terms[n]:
            return None
    return EdsSequence("geometric", [terms[n] for n in range(1, n_terms + 1)], curve=curve, point=point)
