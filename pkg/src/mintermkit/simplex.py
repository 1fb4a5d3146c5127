"""Exact rational primal simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

The origin is feasible, so no phase one is needed.  Pivoting follows Bland's
rule (smallest eligible label enters; ratio ties leave by smallest label),
which rules out cycling and makes the returned vertex reproducible.  Arithmetic
uses gmpy2 rationals when available and :class:`fractions.Fraction` otherwise;
results are always returned as Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


def _q(v):
    if isinstance(v, Fraction):
        return _Q(v.numerator, v.denominator)
    return _Q(v)


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


@dataclass
class SimplexResult:
    status: str  # "optimal" or "unbounded"
    value: Fraction
    x: list  # primal solution, one entry per column
    y: list  # optimal multipliers, one entry per row
    pivots: int


def maximize(c, A, b, max_pivots=None) -> SimplexResult:
    """Solve the LP exactly.

    ``A`` is a list of rows; each row is either a dense sequence of length
    ``len(c)`` or a dict ``{column: coefficient}``.
    """
    ncols = len(c)
    nrows = len(A)
    if len(b) != nrows:
        raise ValueError("b must have one entry per row of A")
    if any(v < 0 for v in b):
        raise ValueError("right-hand side must be nonnegative")

    zero = _Q(0)
    tab = []
    for row in A:
        if isinstance(row, dict):
            dense = [zero] * ncols
            for j, v in row.items():
                dense[j] = _q(v)
        else:
            if len(row) != ncols:
                raise ValueError("row length does not match the objective")
            dense = [_q(v) for v in row]
        tab.append(dense)
    rhs = [_q(v) for v in b]
    obj = [_q(v) for v in c]
    z = zero
    nonbasic = list(range(ncols))
    basic = list(range(ncols, ncols + nrows))
    pivots = 0

    while True:
        entering = [(nonbasic[j], j) for j in range(ncols) if obj[j] > 0]
        if not entering:
            break
        _, j = min(entering)
        candidates = [(rhs[i] / tab[i][j], basic[i], i)
                      for i in range(nrows) if tab[i][j] > 0]
        if not candidates:
            return SimplexResult("unbounded", None, None, None, pivots)
        _, _, r = min(candidates)

        prow = tab[r]
        piv = prow[j]
        inv = 1 / piv
        for l in range(ncols):
            if l != j and prow[l]:
                prow[l] *= inv
        prow[j] = inv
        rhs[r] *= inv
        for i in range(nrows):
            if i == r:
                continue
            row = tab[i]
            f = row[j]
            if not f:
                continue
            for l in range(ncols):
                if l != j and prow[l]:
                    row[l] -= f * prow[l]
            row[j] = -f * inv
            rhs[i] -= f * rhs[r]
        f = obj[j]
        for l in range(ncols):
            if l != j and prow[l]:
                obj[l] -= f * prow[l]
        obj[j] = -f * inv
        z += f * rhs[r]

        nonbasic[j], basic[r] = basic[r], nonbasic[j]
        pivots += 1
        if max_pivots is not None and pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")

    x = [Fraction(0)] * ncols
    for i, lab in enumerate(basic):
        if lab < ncols:
            x[lab] = _frac(rhs[i])
    y = [Fraction(0)] * nrows
    for j, lab in enumerate(nonbasic):
        if lab >= ncols:
            y[lab - ncols] = _frac(-obj[j])
    return SimplexResult("optimal", _frac(z), x, y, pivots)
