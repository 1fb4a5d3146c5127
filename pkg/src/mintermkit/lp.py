"""Fractional expectation: the covering LP over subset weights and its dual.

For a family with minterms ``M`` the covering program is

    minimize   sum_B beta(B) q**|B|
    subject to sum_{B subset of A} beta(B) >= 1   for every minterm A,

and its dual maximizes ``sum_A nu(A)`` subject to
``sum_{A superset of B} nu(A) <= q**|B|`` for every ``B``.  Only ``B`` below
some minterm matter (any other weight can move to the empty set), so both
programs live on the lattice of subsets of minterms.  The dual has a
feasible origin and is solved with the exact simplex in
:mod:`mintermkit.simplex`; the covering weights are read off its optimal
multipliers and both certificates are re-checked against the raw
constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import CapacityError, DomainError, UndefinedThresholdError
from .family import MintermFamily, popcount, set_key, submasks
from .measure import THRESHOLD_TOL, delta_eps, measure, threshold_point
from .simplex import maximize

LP_SUPPORT_LIMIT = 200_000
INVERSE_TOL = 1e-12
CHECK_TOL = 1e-9


def _rational(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    return Fraction(v)


def lattice_support(fam: MintermFamily, limit=LP_SUPPORT_LIMIT) -> tuple[int, ...]:
    """The empty set plus every subset of every minterm, canonically ordered."""
    seen = {0}
    for m in fam.minterms:
        seen.update(submasks(m))
        if len(seen) > limit:
            raise CapacityError(
                f"LP support exceeds {limit} subsets; the exact solver is not "
                "meant for families this large")
    return tuple(sorted(seen, key=set_key))


@dataclass(frozen=True)
class CoverWeighting:
    q: Fraction
    beta: dict = field(hash=False)

    @property
    def objective(self) -> Fraction:
        return sum((w * self.q ** popcount(b) for b, w in self.beta.items()), Fraction(0))


@dataclass(frozen=True)
class DualWeighting:
    q: Fraction
    nu: dict = field(hash=False)

    @property
    def value(self) -> Fraction:
        return sum(self.nu.values(), Fraction(0))


@dataclass(frozen=True)
class LPOutcome:
    q: Fraction
    primal: CoverWeighting
    dual: DualWeighting
    value: Fraction
    duality_gap: Fraction
    support_size: int
    pivots: int


def cover_violations(fam: MintermFamily, beta: dict) -> list[int]:
    """Minterms whose covering constraint fails under ``beta``."""
    if any(w < 0 for w in beta.values()):
        return [b for b, w in beta.items() if w < 0]
    bad = []
    for a in fam.minterms:
        total = sum((w for b, w in beta.items() if b & a == b), Fraction(0))
        if total < 1:
            bad.append(a)
    return bad


def spread_violations(fam: MintermFamily, nu: dict, q) -> list[int]:
    """Sets ``B`` whose dual (spread) constraint fails under ``nu``."""
    q = _rational(q)
    if any(w < 0 for w in nu.values()):
        return [a for a, w in nu.items() if w < 0]
    if any(a not in fam.minterms for a in nu):
        return [a for a in nu if a not in fam.minterms]
    bad = []
    for b in lattice_support(fam):
        load = sum((w for a, w in nu.items() if a & b == b), Fraction(0))
        if load > q ** popcount(b):
            bad.append(b)
    return bad


@lru_cache(maxsize=4096)
def _solve(fam: MintermFamily, q: Fraction, limit: int) -> LPOutcome:
    support = lattice_support(fam, limit)
    row_of = {b: r for r, b in enumerate(support)}
    rows: list[dict] = [{} for _ in support]
    for j, m in enumerate(fam.minterms):
        for sub in submasks(m):
            rows[row_of[sub]][j] = 1
    rhs = [q ** popcount(b) for b in support]
    res = maximize([1] * len(fam.minterms), rows, rhs)
    if res.status != "optimal":  # pragma: no cover - the empty-set row bounds the program
        raise RuntimeError("dual program reported unbounded")
    nu = {m: w for m, w in zip(fam.minterms, res.x) if w}
    beta = {b: w for b, w in zip(support, res.y) if w}
    primal = CoverWeighting(q, beta)
    dual = DualWeighting(q, nu)
    if cover_violations(fam, beta):
        raise ArithmeticError("covering certificate failed re-verification")
    if spread_violations(fam, nu, q):
        raise ArithmeticError("dual certificate failed re-verification")
    gap = primal.objective - dual.value
    return LPOutcome(q, primal, dual, dual.value, gap, len(support), res.pivots)


def fractional_expectation(fam: MintermFamily, q, max_support=LP_SUPPORT_LIMIT) -> LPOutcome:
    """Solve the covering LP exactly at rational ``q`` in (0, 1]."""
    q = _rational(q)
    if not 0 < q <= 1:
        raise DomainError(f"q must lie in (0, 1], got {q}")
    return _solve(fam, q, max_support)


def dual_value(fam: MintermFamily, q, max_support=LP_SUPPORT_LIMIT) -> DualWeighting:
    return fractional_expectation(fam, q, max_support).dual


def expectation_threshold_inverse(fam: MintermFamily, x, tol=INVERSE_TOL,
                                  max_support=LP_SUPPORT_LIMIT) -> Fraction:
    """Smallest ``q`` with fractional expectation at least ``x`` (bisection).

    Midpoints are dyadic rationals so each LP stays exact.  Returns an upper
    end of a bracket of width at most ``tol``, or the exact root when a
    midpoint hits it.
    """
    if fam.is_trivial:
        raise UndefinedThresholdError("the expectation threshold needs a nontrivial family")
    x = _rational(x)
    if not 0 < x <= 1:
        raise DomainError("x must lie in (0, 1]")
    if fractional_expectation(fam, 1, max_support).value < x:
        raise DomainError(f"x={x} exceeds the largest attainable value")
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = fractional_expectation(fam, mid, max_support).value
        if v == x and x < 1:
            return mid
        if v < x:
            lo = mid
        else:
            hi = mid
    return hi


# -- weighted second moment witness ----------------------------------------

@dataclass(frozen=True)
class WitnessMoments:
    """Moments of ``g = sum_A nu(A) p**-|A| 1[A in X]`` for the optimal dual ``nu`` at ``q``.

    ``chain`` lists, in order, the successive upper bounds on ``E_p(g^2)``:
    the lattice sum over common subsets, the max-times-layer-sum bound, the
    ``(1+alpha)^|A|`` weighted sum and finally ``L*_q (1+alpha)^k``.
    """

    p: Fraction
    q: Fraction
    alpha: Fraction
    nu: dict = field(hash=False)
    e_g: Fraction
    e_g2: Fraction
    chain: tuple
    bound: Fraction

    @property
    def chain_ok(self) -> bool:
        vals = (self.e_g2,) + self.chain
        return all(a <= b for a, b in zip(vals, vals[1:]))

    @property
    def pz(self):
        return self.e_g ** 2 / self.e_g2 if self.e_g2 else Fraction(0)


def weighted_witness_moments(fam: MintermFamily, p, q, k=None) -> WitnessMoments:
    p = _rational(p)
    q = _rational(q)
    if not 0 < p <= 1:
        raise DomainError("p must lie in (0, 1]")
    k = fam.k if k is None else k
    alpha = q / p
    nu = dual_value(fam, q).nu
    items = list(nu.items())
    e_g = sum((w * p ** -popcount(a) * p ** popcount(a) for a, w in items), Fraction(0))
    e_g2 = sum((wa * wb * p ** -popcount(a & b) for a, wa in items for b, wb in items),
               Fraction(0))

    load: dict[int, Fraction] = {}
    for a, w in items:
        for sub in submasks(a):
            load[sub] = load.get(sub, Fraction(0)) + w
    lattice = sum((p ** -popcount(i) * s * s for i, s in load.items()), Fraction(0))
    by_size: dict[int, list] = {}
    for i, s in load.items():
        by_size.setdefault(popcount(i), []).append(s)
    layered = sum((p ** -i * max(v) * sum(v) for i, v in by_size.items()), Fraction(0))
    weighted = sum((w * (1 + alpha) ** popcount(a) for a, w in items), Fraction(0))
    bound = e_g * (1 + alpha) ** k
    return WitnessMoments(p, q, alpha, dict(nu), e_g, e_g2,
                          (lattice, layered, weighted, bound), bound)


# -- bounds relating measure and fractional expectation ---------------------

def lp_measure_bracket(fam: MintermFamily, p, alpha) -> tuple[Fraction, Fraction]:
    """``(E*_{alpha p} (1+alpha)^-k, E*_p)``, which must bracket ``mu_p``."""
    p = _rational(p)
    alpha = _rational(alpha)
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    if not 0 < p <= 1 or alpha * p > 1:
        raise DomainError("need 0 < p and alpha * p <= 1")
    lower = fractional_expectation(fam, alpha * p).value / (1 + alpha) ** fam.k
    upper = fractional_expectation(fam, p).value
    return lower, upper


@dataclass(frozen=True)
class KahnKalaiResult:
    applicable: bool
    q1: Fraction | None = None
    point: float | None = None
    clamped: bool = False
    mu: float | None = None
    passed: bool = True


def kahn_kalai_check(fam: MintermFamily, tol=INVERSE_TOL) -> KahnKalaiResult:
    """Locate ``q1`` with fractional expectation 1 and test ``mu`` at ``k q1`` against 1/e."""
    if fam.is_trivial or fractional_expectation(fam, 1).value < 1:
        return KahnKalaiResult(False)
    q1 = expectation_threshold_inverse(fam, 1, tol=tol)
    point = fam.k * q1
    clamped = point > 1
    point = min(point, Fraction(1))
    mu = float(measure(fam, point))
    return KahnKalaiResult(True, q1, float(point), clamped, mu, mu > 1 / math.e)


def _k_constant(k: int) -> float:
    # k^k / (k-1)^(k-1); at k = 1 this is the limit value 1 (0**0 == 1)
    return k ** k / (k - 1) ** (k - 1)


@dataclass(frozen=True)
class RatioBounds:
    a: float
    b: float
    ratio: float
    lower: float
    upper: float
    limit_convention: bool
    lower_ok: bool
    upper_ok: bool

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok


def ratio_bounds_check(fam: MintermFamily, a, b, tol=CHECK_TOL) -> RatioBounds:
    """Compare ``p_a / p_b`` with ``(a/b)^(1/k) - 1`` and ``k^k/(k-1)^(k-1) * a/b``."""
    a, b = float(a), float(b)
    if not 0 < b < a < 1:
        raise DomainError("need 0 < b < a < 1")
    k = fam.k
    pa = threshold_point(fam, a)
    pb = threshold_point(fam, b)
    ratio = pa / pb
    lower = (a / b) ** (1 / k) - 1
    upper = _k_constant(k) * a / b
    return RatioBounds(a, b, ratio, lower, upper, k == 1,
                       ratio >= lower - tol, ratio <= upper + tol)


@dataclass(frozen=True)
class WidthCheck:
    eps: float
    delta: float
    bound: float
    limit_convention: bool
    passed: bool


def width_upper_check(fam: MintermFamily, eps, tol=CHECK_TOL) -> WidthCheck:
    """``delta_eps <= 1 - 2 eps (k-1)^(k-1) / k^k``."""
    eps = float(eps)
    k = fam.k
    delta = delta_eps(fam, eps, tol=THRESHOLD_TOL)
    bound = 1 - 2 * eps / _k_constant(k)
    return WidthCheck(eps, delta, bound, k == 1, delta <= bound + tol)
