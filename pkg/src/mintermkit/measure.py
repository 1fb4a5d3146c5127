"""Exact product measure of an upset, its derivative, pivotality and thresholds.

Exact quantities come from the layer counts ``a_t`` (the number of ``t``-sets
in the upset), obtained by sweeping the full subset lattice with numpy.  When
``p`` is a :class:`~fractions.Fraction` (or int) every result is an exact
rational; floats give floats.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from .errors import CapacityError, DomainError, UndefinedThresholdError
from .family import MintermFamily, members

ENUMERATION_LIMIT = 24

THRESHOLD_TOL = 1e-12
MAX_BISECTION = 200


def as_probability(p, *, open_interval=False):
    """Normalize ``p``: strings become exact Fractions; range is checked."""
    if isinstance(p, str):
        p = Fraction(p)
    elif isinstance(p, bool):
        raise DomainError("probability must be a number")
    elif isinstance(p, np.floating):
        p = float(p)
    if open_interval:
        if not 0 < p < 1:
            raise DomainError(f"probability must lie in (0, 1), got {p}")
    elif not 0 <= p <= 1:
        raise DomainError(f"probability must lie in [0, 1], got {p}")
    return p


def _check_capacity(fam: MintermFamily, max_n):
    limit = ENUMERATION_LIMIT if max_n is None else max_n
    if fam.n > limit:
        raise CapacityError(
            f"n={fam.n} exceeds the exact enumeration limit {limit}; "
            "use estimate_measure (CLI: sample) instead")


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.uint8)
    for i in range(n):
        pc.reshape(-1, 2, 1 << i)[:, 1, :] += 1
    return pc


@lru_cache(maxsize=8)
def _upset_indicator(fam: MintermFamily) -> np.ndarray:
    arr = np.zeros(1 << fam.n, dtype=bool)
    arr[list(fam.minterms)] = True
    # superset closure, one coordinate at a time
    for i in range(fam.n):
        view = arr.reshape(-1, 2, 1 << i)
        view[:, 1, :] |= view[:, 0, :]
    arr.setflags(write=False)
    return arr


def upset_indicator(fam: MintermFamily, max_n=None) -> np.ndarray:
    """Boolean array over all ``2**n`` masks marking members of the upset."""
    _check_capacity(fam, max_n)
    return _upset_indicator(fam)


@dataclass(frozen=True)
class MeasurePolynomial:
    """``mu_p = sum_t a_t p**t (1-p)**(n-t)`` with integer layer counts."""

    n: int
    layer_counts: tuple[int, ...]

    def __call__(self, p):
        n = self.n
        q = 1 - p
        return sum(a * p ** t * q ** (n - t)
                   for t, a in enumerate(self.layer_counts) if a)

    def derivative(self, p):
        n = self.n
        q = 1 - p
        total = 0
        for t, a in enumerate(self.layer_counts):
            if not a:
                continue
            if t:
                total += a * t * p ** (t - 1) * q ** (n - t)
            if n - t:
                total -= a * (n - t) * p ** t * q ** (n - t - 1)
        return total

    @property
    def upset_size(self) -> int:
        return sum(self.layer_counts)


@lru_cache(maxsize=256)
def _layer_counts(fam: MintermFamily) -> MeasurePolynomial:
    arr = _upset_indicator(fam)
    counts = np.bincount(_popcounts(fam.n)[arr], minlength=fam.n + 1)
    return MeasurePolynomial(fam.n, tuple(int(c) for c in counts))


def layer_counts(fam: MintermFamily, max_n=None) -> MeasurePolynomial:
    _check_capacity(fam, max_n)
    return _layer_counts(fam)


def measure(fam: MintermFamily, p, max_n=None):
    """Probability that a ``p``-random subset lies in the upset."""
    p = as_probability(p)
    if fam.is_empty:
        return 0 * p
    if fam.is_full:
        return 1 + 0 * p
    return layer_counts(fam, max_n)(p)


def measure_derivative(fam: MintermFamily, p, max_n=None):
    """d mu / dp, taken symbolically from the layer polynomial."""
    p = as_probability(p, open_interval=True)
    return layer_counts(fam, max_n).derivative(p)


@dataclass(frozen=True)
class InfluenceProfile:
    """Per-element pivotal probabilities ``b_i`` and the expected pivot count."""

    p: object
    b: tuple
    e_piv: object

    @property
    def total_influence(self):
        return sum(self.b)


@lru_cache(maxsize=128)
def _pivotal_counts(fam: MintermFamily) -> tuple[tuple[int, ...], ...]:
    # c[i][t]: number of t-subsets S of the other n-1 elements with
    # S + {i} in the upset and S not in it.
    n = fam.n
    if n == 0:
        return ()
    arr = _upset_indicator(fam)
    pc = _popcounts(n)
    out = []
    for i in range(n):
        view = arr.reshape(-1, 2, 1 << i)
        piv = view[:, 1, :] & ~view[:, 0, :]
        sizes = pc.reshape(-1, 2, 1 << i)[:, 0, :][piv]
        counts = np.bincount(sizes, minlength=n)
        out.append(tuple(int(c) for c in counts))
    return tuple(out)


def pivotal_expectation(fam: MintermFamily, p, max_n=None) -> InfluenceProfile:
    p = as_probability(p, open_interval=True)
    _check_capacity(fam, max_n)
    n = fam.n
    q = 1 - p
    b = tuple(sum((c * p ** t * q ** (n - 1 - t) for t, c in enumerate(row) if c), 0 * p)
              for row in _pivotal_counts(fam))
    return InfluenceProfile(p, b, p * sum(b))


def _float_poly(fam, max_n):
    poly = layer_counts(fam, max_n)
    coeffs = [float(a) for a in poly.layer_counts]
    n = poly.n

    def mu(p: float) -> float:
        q = 1.0 - p
        return math.fsum(a * p ** t * q ** (n - t) for t, a in enumerate(coeffs) if a)
    return mu


def _bisect_increasing(fn, x, tol, max_iter):
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        v = fn(mid)
        if abs(v - x) <= tol:
            return mid
        if v < x:
            lo = mid
        else:
            hi = mid
    return mid


def threshold_point(fam: MintermFamily, x, tol=THRESHOLD_TOL, max_iter=MAX_BISECTION,
                    max_n=None) -> float:
    """The probability ``p`` at which the measure equals ``x`` (bisection)."""
    if fam.is_trivial:
        raise UndefinedThresholdError("threshold points need a nontrivial family")
    x = float(as_probability(x, open_interval=True))
    return _bisect_increasing(_float_poly(fam, max_n), x, tol, max_iter)


def delta_eps(fam: MintermFamily, eps, tol=THRESHOLD_TOL, max_n=None) -> float:
    """Relative width ``(p_1/2 - p_eps) / p_1/2`` of the threshold window."""
    eps = float(eps)
    if not 0 < eps < 0.5:
        raise DomainError("eps must lie in (0, 1/2)")
    half = threshold_point(fam, 0.5, tol=tol, max_n=max_n)
    low = threshold_point(fam, eps, tol=tol, max_n=max_n)
    return (half - low) / half


@dataclass(frozen=True)
class RatioCheck:
    ok: bool
    ratios: tuple
    violation: tuple | None = None  # (p_i, p_j, ratio_i, ratio_j) with ratio_j > ratio_i


def mu_over_pk(fam: MintermFamily, p, max_n=None):
    p = as_probability(p)
    if p == 0:
        raise DomainError("mu/p^k is undefined at p = 0")
    return measure(fam, p, max_n) / p ** fam.k


def monotone_ratio_check(fam: MintermFamily, grid, max_n=None) -> RatioCheck:
    """Check that ``mu_p / p**k`` never increases along a sorted grid.

    Floats in the grid are converted to their exact binary rationals so the
    comparison is exact throughout.
    """
    pts = [Fraction(as_probability(p)) for p in grid]
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise DomainError("grid must be strictly increasing")
    ratios = tuple(mu_over_pk(fam, p, max_n) for p in pts)
    for i in range(len(pts) - 1):
        if ratios[i + 1] > ratios[i]:
            return RatioCheck(False, ratios, (pts[i], pts[i + 1], ratios[i], ratios[i + 1]))
    return RatioCheck(True, ratios)


# -- Monte Carlo ------------------------------------------------------------

BLOCK_SIZE = 1 << 15
_Z99 = NormalDist().inv_cdf(0.995)


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    hits: int
    samples: int
    stderr: float
    ci_low: float
    ci_high: float


def _block_hits(minterm_idx, n, p, seed, block, size):
    # Philox is counter based; keying it by (seed, block) fixes the draws of
    # every sample index independently of how blocks are scheduled.
    rng = np.random.Generator(np.random.Philox(key=(seed << 64) | block))
    present = rng.random((size, n)) < p
    if not minterm_idx:
        return 0
    hit = np.zeros(size, dtype=bool)
    for idx in minterm_idx:
        if idx.size == 0:
            return size
        hit |= present[:, idx].all(axis=1)
    return int(hit.sum())


def estimate_measure(fam: MintermFamily, p, samples: int, seed: int,
                     threads: int | None = None) -> MonteCarloEstimate:
    """Unbiased sampling estimate of the measure with a 99% normal interval.

    Results depend only on ``(seed, samples)``; ``threads`` changes speed, not
    output.
    """
    p = float(as_probability(p))
    if samples < 100:
        raise DomainError("need at least 100 samples")
    if seed < 0:
        raise DomainError("seed must be nonnegative")
    idx = [np.array(members(m), dtype=np.intp) for m in fam.minterms]
    blocks = [(b, min(BLOCK_SIZE, samples - b * BLOCK_SIZE))
              for b in range(-(-samples // BLOCK_SIZE))]

    def run(job):
        b, size = job
        return _block_hits(idx, fam.n, p, seed, b, size)

    if threads is None or threads <= 1:
        hits = sum(map(run, blocks))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(run, blocks))
    est = hits / samples
    se = math.sqrt(est * (1 - est) / samples)
    return MonteCarloEstimate(est, hits, samples, se,
                              max(0.0, est - _Z99 * se), min(1.0, est + _Z99 * se))
