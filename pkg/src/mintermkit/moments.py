"""First and second moments of the number of minterms inside a random set.

``X`` counts minterms ``M`` with ``M`` contained in the ``p``-random subset.
Pair sums are exact over all ordered pairs of minterms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .family import MintermFamily, popcount
from .measure import as_probability, measure


@dataclass(frozen=True)
class MomentReport:
    p: object
    first: object
    second: object
    diagonal: object
    overlapping: object
    disjoint: object
    pz_bound: object
    minterm_size_histogram: dict

    def as_row(self, mu=None) -> dict:
        row = {"p": self.p, "first": self.first, "second": self.second,
               "diagonal": self.diagonal, "overlapping": self.overlapping,
               "disjoint": self.disjoint, "pz_bound": self.pz_bound}
        if mu is not None:
            row["mu_exact"] = mu
        return row


def first_moment(fam: MintermFamily, p):
    """Expected number of minterms contained in the random set."""
    p = as_probability(p)
    return sum((c * p ** m for m, c in fam.size_histogram().items()), 0 * p)


def second_moment(fam: MintermFamily, p) -> MomentReport:
    """E[X^2] split into the diagonal, overlapping and disjoint pair sums."""
    p = as_probability(p)
    ms = fam.minterms
    sizes = [popcount(m) for m in ms]
    # p ** |A u B| only depends on the union size, so count pairs by size first
    overlap_by_size: dict[int, int] = {}
    disjoint_by_size: dict[int, int] = {}
    for i, a in enumerate(ms):
        for j in range(i + 1, len(ms)):
            b = ms[j]
            u = sizes[i] + sizes[j] - popcount(a & b)
            bucket = disjoint_by_size if a & b == 0 else overlap_by_size
            bucket[u] = bucket.get(u, 0) + 2
    diagonal = sum((p ** s for s in sizes), 0 * p)
    overlapping = sum((c * p ** u for u, c in overlap_by_size.items()), 0 * p)
    disjoint = sum((c * p ** u for u, c in disjoint_by_size.items()), 0 * p)
    second = diagonal + overlapping + disjoint
    first = diagonal
    pz = first * first / second if first else None
    return MomentReport(p, first, second, diagonal, overlapping, disjoint, pz,
                        fam.size_histogram())


def paley_zygmund_bound(fam: MintermFamily, p):
    """Lower bound ``E[X]^2 / E[X^2]`` on the measure."""
    rep = second_moment(fam, p)
    if not rep.first:
        raise DomainError("the Paley-Zygmund bound needs a positive first moment")
    return rep.pz_bound


def tame_second_moment_cap(fam: MintermFamily, p, k=None):
    """``((k-1) 2^k + 1) E[X] + E[X]^2``, the cap on E[X^2] for tame families."""
    k = fam.k if k is None else k
    e = first_moment(fam, p)
    return ((k - 1) * 2 ** k + 1) * e + e * e


def moment_row(fam: MintermFamily, p) -> dict:
    rep = second_moment(fam, p)
    return rep.as_row(measure(fam, p))
