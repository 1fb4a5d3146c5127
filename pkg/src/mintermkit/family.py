"""Monotone families stored as antichains of minterms.

Subsets of the ground set ``{0, ..., n-1}`` are plain Python ints used as
bitmasks (bit ``i`` set means element ``i`` is present).  Every public
function that takes a set also accepts an iterable of element indices.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import MalformedInputError

log = logging.getLogger(__name__)

SetLike = Union[int, Iterable[int]]


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        e = int(e)
        if e < 0:
            raise MalformedInputError(f"negative element index {e}")
        m |= 1 << e
    return m


def as_mask(s: SetLike) -> int:
    if isinstance(s, int):
        if s < 0:
            raise MalformedInputError("set masks must be nonnegative")
        return s
    return mask_of(s)


def members(mask: int) -> tuple[int, ...]:
    """Element indices of ``mask`` in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> Iterator[int]:
    """All subsets of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def set_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Canonical sort key: by size, then lexicographically by elements."""
    return popcount(mask), members(mask)


@dataclass(frozen=True)
class MintermFamily:
    """The upset generated by an antichain of minterms on ``n`` elements.

    ``minterms`` is stored in canonical order (size, then lexicographic).
    An empty ``minterms`` tuple is the empty family; the single minterm ``0``
    (the empty set) is the full power set.
    """

    n: int
    minterms: tuple[int, ...]
    k: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise MalformedInputError("ground set size must be nonnegative")
        raw = tuple(as_mask(m) for m in self.minterms)
        ms = tuple(sorted(set(raw), key=set_key))
        if len(ms) != len(raw):
            raise MalformedInputError("duplicate minterms")
        limit = 1 << self.n
        for m in ms:
            if m >= limit:
                raise MalformedInputError(
                    f"minterm {list(members(m))} uses an element >= n={self.n}")
        for i, a in enumerate(ms):
            for b in ms[i + 1:]:
                if a & b == a:
                    raise MalformedInputError(
                        f"not an antichain: {list(members(a))} is contained "
                        f"in {list(members(b))}")
        object.__setattr__(self, "minterms", ms)
        object.__setattr__(self, "k", max((popcount(m) for m in ms), default=0))

    @property
    def is_empty(self) -> bool:
        return not self.minterms

    @property
    def is_full(self) -> bool:
        return self.minterms == (0,)

    @property
    def is_trivial(self) -> bool:
        return self.is_empty or self.is_full

    def sets(self) -> list[tuple[int, ...]]:
        return [members(m) for m in self.minterms]

    def size_histogram(self) -> dict[int, int]:
        """Number of minterms of each size ``1..k``."""
        hist = {m: 0 for m in range(1, self.k + 1)}
        for mt in self.minterms:
            c = popcount(mt)
            hist[c] = hist.get(c, 0) + 1
        return hist

    def __len__(self):
        return len(self.minterms)

    def __contains__(self, s) -> bool:
        return contains(self, s)

    def __repr__(self):
        return f"MintermFamily(n={self.n}, minterms={self.sets()})"


def minimalize(sets: Iterable[SetLike], n: int) -> MintermFamily:
    """Reduce arbitrary generating sets to the antichain of their minimal members."""
    masks = sorted({as_mask(s) for s in sets}, key=set_key)
    limit = 1 << n
    kept: list[int] = []
    for m in masks:
        if m >= limit:
            raise MalformedInputError(
                f"set {list(members(m))} uses an element >= n={n}")
        if not any(k & m == k for k in kept):
            kept.append(m)
    return MintermFamily(n, tuple(kept))


def is_antichain(sets: Iterable[SetLike]) -> bool:
    masks = [as_mask(s) for s in sets]
    if len(set(masks)) != len(masks):
        return False
    return all(a & b != a for a in masks for b in masks if a != b)


def contains(fam: MintermFamily, s: SetLike) -> bool:
    """True when ``s`` lies in the upset, i.e. some minterm is a subset of it."""
    a = as_mask(s)
    if a >> fam.n:
        raise MalformedInputError("set is not inside the ground set")
    return any(m & a == m for m in fam.minterms)


def supplements(fam: MintermFamily, v: SetLike, m: int) -> tuple[int, ...]:
    """The ``m``-sets ``W`` disjoint from ``v`` whose union with ``v`` is a minterm."""
    vm = as_mask(v)
    size = popcount(vm) + m
    return tuple(mt & ~vm for mt in fam.minterms
                 if mt & vm == vm and popcount(mt) == size)


def upset_of(sets: Iterable[SetLike], n: int) -> MintermFamily:
    return minimalize(sets, n)


# -- JSON family files ----------------------------------------------------

def family_to_dict(fam: MintermFamily) -> dict:
    return {"n": fam.n, "minterms": [list(s) for s in fam.sets()]}


def dumps_family(fam: MintermFamily) -> str:
    """Canonical JSON text (one line plus trailing newline)."""
    return json.dumps(family_to_dict(fam)) + "\n"


def family_from_dict(obj) -> MintermFamily:
    if not isinstance(obj, dict) or "n" not in obj or "minterms" not in obj:
        raise MalformedInputError('family JSON needs keys "n" and "minterms"')
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise MalformedInputError('"n" must be a nonnegative integer')
    raw = obj["minterms"]
    if not isinstance(raw, list):
        raise MalformedInputError('"minterms" must be a list of lists')
    sets = []
    for i, s in enumerate(raw):
        if not isinstance(s, list) or not all(
                isinstance(e, int) and not isinstance(e, bool) for e in s):
            raise MalformedInputError(f"minterm #{i} is not a list of integers")
        if any(e < 0 or e >= n for e in s):
            raise MalformedInputError(f"minterm #{i} has an index outside 0..{n - 1}")
        if len(set(s)) != len(s) or s != sorted(s):
            log.warning("minterm #%d is not strictly increasing; normalized", i)
        sets.append(mask_of(s))
    fam = minimalize(sets, n)
    if len(fam) != len(sets):
        log.warning("input minterms were not an antichain; reduced %d sets to %d",
                    len(sets), len(fam))
    return fam


def loads_family(text: str) -> MintermFamily:
    return family_from_dict(json.loads(text))


def load_family(path) -> MintermFamily:
    with open(path, encoding="utf-8") as fh:
        return loads_family(fh.read())


def save_family(fam: MintermFamily, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_family(fam))
