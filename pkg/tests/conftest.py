"""Shared instances and brute-force oracles.

The oracles deliberately avoid the package internals: they loop over every
subset of the ground set with plain Python integers and Fractions.
"""

from fractions import Fraction
from itertools import combinations

import pytest

from mintermkit import MintermFamily, gen_star


def fam_of(n, *sets):
    return MintermFamily(n, tuple(sets))


@pytest.fixture
def f1():
    return fam_of(3, (0, 1), (1, 2))


@pytest.fixture
def s9():
    return gen_star(9)


def in_upset(sets, x):
    return any(s <= x for s in sets)


def _as_sets(fam):
    return [frozenset(s) for s in fam.sets()]


def all_subsets(n):
    for r in range(n + 1):
        for c in combinations(range(n), r):
            yield frozenset(c)


def brute_measure(fam, p):
    p = Fraction(p)
    sets = _as_sets(fam)
    return sum((p ** len(x) * (1 - p) ** (fam.n - len(x))
                for x in all_subsets(fam.n) if in_upset(sets, x)), Fraction(0))


def brute_influences(fam, p):
    """b_i = Pr[i pivotal for X u {i}], by direct enumeration over the other elements."""
    p = Fraction(p)
    sets = _as_sets(fam)
    out = []
    for i in range(fam.n):
        others = [j for j in range(fam.n) if j != i]
        b = Fraction(0)
        for r in range(len(others) + 1):
            for c in combinations(others, r):
                x = frozenset(c)
                if in_upset(sets, x | {i}) and not in_upset(sets, x):
                    b += p ** r * (1 - p) ** (len(others) - r)
        out.append(b)
    return out


def brute_moments(fam, p):
    p = Fraction(p)
    sets = _as_sets(fam)
    first = sum((p ** len(s) for s in sets), Fraction(0))
    second = sum((p ** len(a | b) for a in sets for b in sets), Fraction(0))
    return first, second


def solve_exact(a, b):
    """Gaussian elimination over Fractions; None if singular."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def vertex_enumeration_min(c, a_ge, b_ge):
    """min c.x subject to A x >= b, x >= 0 by enumerating every basic solution."""
    nv = len(c)
    rows = [(list(r), v) for r, v in zip(a_ge, b_ge)]
    rows += [([1 if j == i else 0 for j in range(nv)], 0) for i in range(nv)]
    best = None
    for tight in combinations(range(len(rows)), nv):
        x = solve_exact([rows[t][0] for t in tight], [rows[t][1] for t in tight])
        if x is None:
            continue
        if all(sum(Fraction(ai) * xi for ai, xi in zip(r, x)) >= v for r, v in rows):
            val = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
            best = val if best is None else min(best, val)
    return best
