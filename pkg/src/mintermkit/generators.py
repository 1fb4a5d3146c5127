"""Family instances: single minterms, stars, uniform layers, random and graph families."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

from .errors import DomainError
from .family import MintermFamily, mask_of, minimalize


def gen_single(n: int, k: int) -> MintermFamily:
    """One minterm ``{0, ..., k-1}``."""
    if not 1 <= k <= n:
        raise DomainError("need 1 <= k <= n")
    return MintermFamily(n, (mask_of(range(k)),))


def gen_star(n: int) -> MintermFamily:
    """Minterms ``{0, i}`` for ``i = 1..n-1``."""
    if n < 3:
        raise DomainError("a star needs n >= 3")
    return MintermFamily(n, tuple(mask_of((0, i)) for i in range(1, n)))


def gen_all_k_subsets(n: int, k: int) -> MintermFamily:
    if not 1 <= k <= n:
        raise DomainError("need 1 <= k <= n")
    return MintermFamily(n, tuple(mask_of(c) for c in combinations(range(n), k)))


def gen_singletons(n: int) -> MintermFamily:
    return gen_all_k_subsets(n, 1)


def gen_random(n: int, k: int, count: int, seed: int) -> MintermFamily:
    """Minimalized family of ``count`` uniformly random ``k``-subsets."""
    if count < 1 or not 1 <= k <= n:
        raise DomainError("need count >= 1 and 1 <= k <= n")
    rng = random.Random(seed)
    sets = [mask_of(rng.sample(range(n), k)) for _ in range(count)]
    return minimalize(sets, n)


def gen_random_mixed(n: int, k: int, count: int, seed: int) -> MintermFamily:
    """Like :func:`gen_random` but each set size is drawn from ``1..k``."""
    if count < 1 or not 1 <= k <= n:
        raise DomainError("need count >= 1 and 1 <= k <= n")
    rng = random.Random(seed)
    sets = [mask_of(rng.sample(range(n), rng.randint(1, k))) for _ in range(count)]
    return minimalize(sets, n)


# -- graph families -----------------------------------------------------------

PATTERNS = {
    "triangle": (3, ((0, 1), (0, 2), (1, 2))),
    "k4": (4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))),
    # K4 plus a fifth vertex joined to exactly one of the four
    "k4_tail": (5, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4))),
}


@dataclass(frozen=True)
class GraphSpec:
    """Pattern copies inside the complete graph on ``vertices`` vertices.

    ``pattern`` is ``"triangle"``, ``"k4"``, ``"k4_tail"``, ``"path_r"``
    (a path with ``r`` edges, e.g. ``"path_3"``) or ``"custom"`` with
    ``edges`` given on vertices ``0..v-1``.
    """

    vertices: int
    pattern: str
    edges: tuple = ()


def edge_index(i: int, j: int, m: int) -> int:
    """Lexicographic index of edge ``{i, j}`` among the ``C(m, 2)`` edges of ``K_m``."""
    if i == j:
        raise DomainError("loops are not edges")
    if i > j:
        i, j = j, i
    return i * m - i * (i + 1) // 2 + (j - i - 1)


def edge_list(m: int) -> list[tuple[int, int]]:
    return list(combinations(range(m), 2))


def pattern_edges(spec: GraphSpec) -> tuple[int, tuple]:
    if spec.pattern in PATTERNS:
        return PATTERNS[spec.pattern]
    if spec.pattern.startswith("path_"):
        r = int(spec.pattern[5:])
        if r < 1:
            raise DomainError("a path needs at least one edge")
        return r + 1, tuple((i, i + 1) for i in range(r))
    if spec.pattern == "custom":
        if not spec.edges:
            raise DomainError("custom pattern needs an edge list")
        edges = tuple((min(a, b), max(a, b)) for a, b in spec.edges)
        if any(a == b for a, b in edges):
            raise DomainError("custom pattern has a loop")
        verts = sorted({v for e in edges for v in e})
        relabel = {v: i for i, v in enumerate(verts)}
        return len(verts), tuple((relabel[a], relabel[b]) for a, b in edges)
    raise DomainError(f"unknown pattern {spec.pattern!r}")


def gen_graph(spec: GraphSpec) -> MintermFamily:
    """Minterms are the edge sets of all copies of the pattern in ``K_m``."""
    m = spec.vertices
    v, edges = pattern_edges(spec)
    if v > m:
        raise DomainError(f"pattern on {v} vertices does not fit in K_{m}")
    copies = set()
    for image in permutations(range(m), v):
        copies.add(mask_of(edge_index(image[a], image[b], m) for a, b in edges))
    return minimalize(copies, comb(m, 2))
