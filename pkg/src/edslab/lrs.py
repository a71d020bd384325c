"""Integer linear recurrence sequences: evaluation, minimal fitting,
decimation, degeneracy detection, and periods modulo p.

Root-sensitive questions (degeneracy, root-of-unity ratios) are answered
with exact resultants and cyclotomic divisibility, never with floating
point; numerical root finding only ever appears in tests as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .ntkernel import (
    Poly,
    cyclotomic_polynomial,
    cyclotomic_root_of_unity_test,
    factorize,
    is_prime,
    lcm_tower,
    rref_fraction,
    solve_exact,
)

DEFAULT_FIT_BOUND = 12


@dataclass(frozen=True)
class LrsSpec:
    """Order-k recurrence u(n+k) = c1*u(n+k-1) + ... + ck*u(n), with u(1..k).

    `minimal` records whether no shorter integer recurrence fits the
    generated terms; it is set by the fitter, not asserted at construction.
    """

    order: int
    coeffs: tuple[int, ...]
    initial: tuple[int, ...]
    minimal: bool = False

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if len(self.coeffs) != self.order or len(self.initial) != self.order:
            raise ValueError("coefficients and initial terms must have length = order")
        if self.coeffs[-1] == 0:
            raise ValueError("the last coefficient must be non-zero")

    def __str__(self):
        return f"lrs {self.order} {' '.join(map(str, self.coeffs))} {' '.join(map(str, self.initial))}"


FIBONACCI = LrsSpec(2, (1, 1), (1, 1), minimal=True)


def generate(spec: LrsSpec, n_terms: int) -> list[int]:
    """u_1..u_N by linear iteration (exact)."""
    terms = list(spec.initial[:n_terms])
    while len(terms) < n_terms:
        terms.append(sum(c * terms[-i] for i, c in enumerate(spec.coeffs, start=1)))
    return terms


def eval_exact(spec: LrsSpec, n: int) -> int:
    if n < 1:
        raise ValueError("indices start at 1")
    return generate(spec, n)[-1]


def char_poly(spec: LrsSpec) -> Poly:
    """x^k - c1*x^(k-1) - ... - ck; never has a zero root since ck != 0."""
    coeffs = [-c for c in reversed(spec.coeffs)] + [1]
    return Poly(*coeffs)


def companion_matrix(spec: LrsSpec) -> list[list[int]]:
    k = spec.order
    mat = [[0] * k for _ in range(k)]
    mat[0] = list(spec.coeffs)
    for i in range(1, k):
        mat[i][i - 1] = 1
    return mat


def _mat_mul_mod(a, b, p):
    n = len(a)
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % p for col in bt] for row in a]


def _mat_vec_mod(a, v, p):
    return [sum(x * y for x, y in zip(row, v)) % p for row in a]


def _mat_pow_mod(m, e, p):
    n = len(m)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [[x % p for x in row] for row in m]
    while e:
        if e & 1:
            result = _mat_mul_mod(result, base, p)
        e >>= 1
        if e:
            base = _mat_mul_mod(base, base, p)
    return result


def eval_mod(spec: LrsSpec, n: int, p: int) -> int:
    """u_n mod p by companion-matrix exponentiation; n may be astronomically large."""
    if n < 1:
        raise ValueError("indices start at 1")
    k = spec.order
    if n <= k:
        return spec.initial[n - 1] % p
    # state s_m = (u_{m+k-1}, ..., u_m); s_n = M^(n-1) s_1, u_n is its last entry
    mat = _mat_pow_mod(companion_matrix(spec), n - 1, p)
    state = [spec.initial[k - 1 - i] % p for i in range(k)]
    return _mat_vec_mod(mat, state, p)[-1]


# ---------------------------------------------------------------------------
# minimal-recurrence fitting


@dataclass
class FitResult:
    status: str  # "ok" | "no_fit"
    spec: LrsSpec | None
    bound: int
    fatou_violations: list[tuple[int, tuple[Fraction, ...]]]  # (order, rational coeffs)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def hankel_rank(terms: list[int]) -> int:
    """Rank of the Hankel matrix of the terms: the detectable minimal order."""
    n = len(terms)
    if n == 0:
        return 0
    rows = (n + 1) // 2
    mat = [[Fraction(terms[i + j]) for j in range(n - rows + 1)] for i in range(rows)]
    _, pivots = rref_fraction(mat)
    return len(pivots)


def _fit_order(terms: list[int], k: int) -> tuple[Fraction, ...] | None:
    """Solve for order-k coefficients reproducing all windows, or None."""
    rows = [[Fraction(terms[i + k - j]) for j in range(1, k + 1)] for i in range(len(terms) - k)]
    rhs = [Fraction(terms[i + k]) for i in range(len(terms) - k)]
    solved = solve_exact(rows, rhs)
    if solved is None:
        return None
    particular, null_basis = solved
    coeffs = list(particular)
    if coeffs[-1] == 0:
        # prefer a representative with a non-zero trailing coefficient
        for vec in null_basis:
            if vec[-1] != 0:
                coeffs = [c + v for c, v in zip(coeffs, vec)]
                break
        else:
            return None
    return tuple(coeffs)


def fit_minimal_recurrence(terms: list[int], bound: int = DEFAULT_FIT_BOUND) -> FitResult:
    """Smallest-order integer recurrence reproducing every supplied term.

    Orders are tried in ascending order; a consistent rational solution with
    non-integer coefficients is recorded as a Fatou violation for that order
    (an integer sequence that truly satisfies an integer recurrence has
    integer minimal coefficients) and the search continues.
    """
    if len(terms) < 2:
        raise ValueError("need at least two terms")
    violations: list[tuple[int, tuple[Fraction, ...]]] = []
    for k in range(1, bound + 1):
        if 2 * k > len(terms):
            break
        coeffs = _fit_order(terms, k)
        if coeffs is None:
            continue
        if any(c.denominator != 1 for c in coeffs):
            violations.append((k, coeffs))
            continue
        spec = LrsSpec(k, tuple(int(c) for c in coeffs), tuple(terms[:k]), minimal=True)
        if generate(spec, len(terms)) == terms:
            return FitResult("ok", spec, bound, violations)
    return FitResult("no_fit", None, bound, violations)


# ---------------------------------------------------------------------------
# decimation and degeneracy


def _char_poly_of_matrix(mat: list[list[int]]) -> Poly:
    """Characteristic polynomial of an integer matrix (Faddeev-LeVerrier)."""
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(1)]  # leading coefficient of x^n
    for k in range(1, n + 1):
        am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
        m = [[am[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    poly = Poly(*reversed(coeffs))
    assert all(c.denominator == 1 for c in poly.coeffs)
    return poly


def _mat_pow_int(mat: list[list[int]], e: int) -> list[list[int]]:
    n = len(mat)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [row[:] for row in mat]
    while e:
        if e & 1:
            result = [
                [sum(result[i][t] * base[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)
            ]
        e >>= 1
        if e:
            base = [
                [sum(base[i][t] * base[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)
            ]
    return result


def decimate(spec: LrsSpec, m: int) -> LrsSpec:
    """A spec whose terms are u_{m*n}, re-minimized on generated terms.

    The decimated sequence satisfies the characteristic polynomial of the
    m-th power of the companion matrix (degree k), so a fit with bound k
    on 2k + 8 terms always succeeds.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return spec
    k = spec.order
    power = _mat_pow_int(companion_matrix(spec), m)
    chi = _char_poly_of_matrix(power)
    coeffs = tuple(int(-chi[k - i]) for i in range(1, k + 1))
    need = 2 * k + 8
    sample = generate(spec, m * need)
    terms = [sample[m * n - 1] for n in range(1, need + 1)]
    assert coeffs[-1] != 0  # det(C^m) = (+-ck)^m never vanishes
    assert generate(LrsSpec(k, coeffs, tuple(terms[:k])), need) == terms
    fit = fit_minimal_recurrence(terms, bound=k)
    assert fit.ok, "decimated sequence must fit within the original order"
    return fit.spec


def _ratio_polynomial(psi: Poly) -> Poly:
    """Polynomial whose roots are all ratios r/s of roots of the squarefree psi.

    Computed as Res_y(psi(y), psi(x*y)) by evaluation at deg^2 + 1 points and
    exact interpolation; the full ratio set includes 1 with multiplicity
    exactly deg(psi), which the caller strips.
    """
    s = psi.degree
    npoints = s * s + 1
    xs: list[Fraction] = []
    v = 1
    while len(xs) < npoints:
        xs.append(Fraction(v))
        if len(xs) < npoints:
            xs.append(Fraction(-v))
        v += 1
    ys = []
    for x0 in xs:
        scaled = Poly(*[c * x0**i for i, c in enumerate(psi.coeffs)])
        ys.append(psi.resultant(scaled))
    # Lagrange interpolation on (xs, ys)
    result = Poly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        li = Poly(yi)
        for j, xj in enumerate(xs):
            if j != i:
                li = li * Poly(-xj, 1) * Fraction(1, xi - xj)
        result = result + li
    return result


def is_degenerate(spec: LrsSpec) -> tuple[bool, int | None]:
    """Is some ratio of distinct characteristic roots a root of unity?

    Exact: the ratio polynomial is built by resultants, the trivial factor
    (x-1)^s is stripped, and the remainder is tested for cyclotomic factors
    with phi(m) <= k^2 (a ratio of two degree-<=k algebraic numbers that is
    a root of unity has order m with phi(m) <= k^2).  Returns the smallest
    witness order when degenerate.
    """
    if spec.order < 2:
        return False, None
    psi = char_poly(spec).squarefree_part()
    s = psi.degree
    if s < 2:
        return False, None
    ratio = _ratio_polynomial(psi)
    one = Poly(-1, 1)
    for _ in range(s):
        q, r = ratio.divmod_exact(one)
        assert r.is_zero(), "ratio polynomial must vanish to order deg(psi) at 1"
        ratio = q
    assert ratio(1) != 0
    bound = spec.order**2
    found, order = cyclotomic_root_of_unity_test(ratio, bound)
    return (found, order) if found else (False, None)


def nondegenerate_reduction(spec: LrsSpec) -> tuple[int, LrsSpec]:
    """(M, decimation by M^2) with every root-of-unity ratio collapsed.

    M is the lcm of all cyclotomic orders dividing the stripped ratio
    polynomial; after decimating by M^2 those ratios become 1 and the
    corresponding roots merge, so the result is non-degenerate.
    """
    degenerate, _ = is_degenerate(spec)
    if not degenerate:
        return 1, spec
    psi = char_poly(spec).squarefree_part()
    ratio = _ratio_polynomial(psi)
    one = Poly(-1, 1)
    for _ in range(psi.degree):
        ratio = ratio.divmod_exact(one)[0]
    bound = spec.order**2
    orders = []
    probe = ratio
    while True:
        found, order = cyclotomic_root_of_unity_test(probe, bound)
        if not found:
            break
        orders.append(order)
        q, r = probe.divmod_exact(cyclotomic_polynomial(order))
        assert r.is_zero()
        probe = q
        if probe.degree < 1:
            break
    m = math.lcm(*orders)
    reduced = decimate(spec, m * m)
    still_degenerate, _ = is_degenerate(reduced)
    assert not still_degenerate, "reduction must produce a non-degenerate sequence"
    return m, reduced


# ---------------------------------------------------------------------------
# periods modulo p


def _state_seq_period_iterative(spec: LrsSpec, p: int, cap: int = 10_000_000) -> int:
    k = spec.order
    coeffs = [c % p for c in spec.coeffs]
    start = tuple(u % p for u in spec.initial)
    window = list(start)
    steps = 0
    while steps < cap:
        nxt = sum(c * window[-i] for i, c in enumerate(coeffs, start=1)) % p
        window.append(nxt)
        window.pop(0)
        steps += 1
        if tuple(window) == start:
            return steps
    raise RuntimeError(f"no period found within {cap} steps")


def _state_seq_period_matrix(spec: LrsSpec, p: int) -> int:
    """Minimal T with M^T s = s via divisor refinement of a known multiple.

    The companion matrix order divides p^ceil(log_p k) * lcm(p^j - 1, j<=k),
    so the orbit period divides that too; strip prime factors while the
    state still returns.
    """
    k = spec.order
    mat = companion_matrix(spec)
    state = [spec.initial[k - 1 - i] % p for i in range(k)]
    bound = lcm_tower(p, k)
    pk = 1
    while pk < k:
        pk *= p
    bound *= pk
    t = bound
    assert _mat_vec_mod(_mat_pow_mod(mat, t, p), state, p) == state
    for ell, e in sorted(factorize(bound).items()):
        for _ in range(e):
            if t % ell:
                break
            candidate = t // ell
            if _mat_vec_mod(_mat_pow_mod(mat, candidate, p), state, p) == state:
                t = candidate
            else:
                break
    return t


def lrs_period_mod_p(spec: LrsSpec, p: int, method: str = "matrix") -> int:
    """Minimal period of (u_n mod p); requires p not dividing the last coefficient.

    Two implementations: "iteration" walks states until the initial state
    returns; "matrix" refines a divisor bound on the companion-matrix order.
    They agree and can cross-check each other.
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    if spec.coeffs[-1] % p == 0:
        raise ValueError(
            f"p={p} divides the last coefficient: the reduction is not purely periodic"
        )
    if method == "iteration":
        return _state_seq_period_iterative(spec, p)
    if method == "matrix":
        return _state_seq_period_matrix(spec, p)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class SquarePeriodResult:
    p: int
    lrs_period: int  # minimal period of u_n mod p
    period: int  # minimal period of n -> u_{n^2} mod p
    window: tuple[int, int]


def square_sampled_period(spec: LrsSpec, p: int) -> SquarePeriodResult:
    """Minimal T with u_{(n+T)^2} = u_{n^2} (mod p) for all n, fully verified.

    The square-sampled stream is purely periodic with period dividing the
    period L of u itself; the minimal divisor is found by checking each
    candidate against one complete L-cycle.
    """
    lam = lrs_period_mod_p(spec, p)
    table = [u % p for u in generate(spec, lam)]  # u_1..u_lam

    def u_sq(n: int) -> int:
        return table[(n * n - 1) % lam]

    values = [u_sq(n) for n in range(1, 2 * lam + 1)]
    for d in _divisors(lam):
        if all(values[n + d - 1] == values[n - 1] for n in range(1, lam + 1)):
            return SquarePeriodResult(p, lam, d, (1, lam + d))
    raise AssertionError("the full period always verifies")


def _divisors(n: int) -> list[int]:
    divs = [1]
    for q, e in factorize(n).items():
        divs = [d * q**i for d in divs for i in range(e + 1)]
    return sorted(divs)


# ---------------------------------------------------------------------------
# ingestion


def parse_lrs_spec(text: str) -> LrsSpec:
    """Parse `lrs k c1..ck u1..uk` with decimal integers."""
    parts = text.split()
    if not parts or parts[0] != "lrs":
        raise ValueError(f"expected 'lrs k c1..ck u1..uk', got {text!r}")
    try:
        k = int(parts[1])
        numbers = [int(x) for x in parts[2:]]
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed lrs line {text!r}") from exc
    if len(numbers) != 2 * k:
        raise ValueError(f"expected {2 * k} integers after the order, got {len(numbers)}")
    return LrsSpec(k, tuple(numbers[:k]), tuple(numbers[k:]))


def parse_terms(lines) -> list[int]:
    """One integer per line; blank lines and '#' comments are skipped."""
    terms = []
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        terms.append(int(stripped))
    return terms
