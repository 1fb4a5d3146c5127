"""Tameness, the tame-family measure bound, and the structural decomposition.

A family is tame at ``p`` when every supplement family ``N^m(V)`` with
``1 <= m <= k-1`` has fewer than ``p**-m`` members.  All threshold
comparisons are exact (``p`` is converted to a Fraction).

:func:`decompose` builds the chain ``A_1 >= A_2 >= ... >= A_k`` by repeatedly
stripping minterms that sit above a set with too many supplements, then
certifies one of the two outcomes.  Certificates are re-checked with
:func:`is_tame` and :func:`verify_tame_approximation`, which scan supplements
directly and do not reuse the census the construction runs on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DecompositionError, DomainError, PreconditionError
from .family import MintermFamily, members, minimalize, popcount, set_key, submasks, supplements
from .measure import measure
from .moments import first_moment

log = logging.getLogger(__name__)


def _prob(p) -> Fraction:
    p = Fraction(p)
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return p


@dataclass(frozen=True)
class TamenessReport:
    tame: bool
    p: Fraction
    k: int
    witness: tuple | None = None  # (V, m, count) with count >= p**-m


def is_tame(fam: MintermFamily, p, k=None) -> TamenessReport:
    """Exhaustive tameness test.

    Only sets lying below some minterm can have a nonempty supplement
    family, so candidates are the subsets of minterms (the empty set
    included).  ``k`` defaults to the family's largest minterm size.
    """
    p = _prob(p)
    k = fam.k if k is None else k
    candidates = set()
    for mt in fam.minterms:
        candidates.update(submasks(mt))
    for m in range(1, k):
        need = p ** -m
        for v in sorted(candidates, key=set_key):
            count = len(supplements(fam, v, m))
            if count >= need:
                return TamenessReport(False, p, k, (v, m, count))
    return TamenessReport(True, p, k)


def tame_lower_bound(fam: MintermFamily, p, k=None) -> Fraction:
    """``min(E_p[X], 1) / (k 2^k)`` for a family that is tame at ``p``."""
    rep = is_tame(fam, p, k)
    if not rep.tame:
        v, m, count = rep.witness
        raise PreconditionError(
            f"family is not tame at p={rep.p}: V={list(members(v))} has {count} "
            f"supplements of size {m}", witness=rep)
    k = max(rep.k, 1)
    return min(first_moment(fam, rep.p), Fraction(1)) / (k * 2 ** k)


# -- tame approximations ----------------------------------------------------

@dataclass(frozen=True)
class ApproximationCheck:
    ok: bool
    violations: tuple = ()


def verify_tame_approximation(fam: MintermFamily, candidate: MintermFamily, m: int, p,
                              witness: MintermFamily) -> ApproximationCheck:
    """Check that ``candidate`` is a tame ``m``-approximation of ``fam`` at ``p`` via ``witness``.

    Every minterm ``B`` of ``candidate`` needs at least ``p**-m`` supplements
    of size ``m`` inside ``witness``, and the family those supplements span
    must itself be tame at ``p``.
    """
    p = _prob(p)
    if not 1 <= m <= fam.k - 1:
        raise PreconditionError(f"m={m} is outside 1..k-1 (k={fam.k})")
    if not set(witness.minterms) <= set(fam.minterms):
        raise PreconditionError("witness is not a subfamily of fam")
    need = p ** -m
    bad = []
    for b in candidate.minterms:
        sup = supplements(witness, b, m)
        if len(sup) < need:
            bad.append({"set": members(b), "kind": "too_few_supplements",
                        "count": len(sup), "needed": need})
            continue
        rep = is_tame(MintermFamily(fam.n, sup), p)
        if not rep.tame:
            v, mm, count = rep.witness
            bad.append({"set": members(b), "kind": "supplements_not_tame",
                        "V": members(v), "m": mm, "count": count})
    return ApproximationCheck(not bad, tuple(bad))


# -- decomposition ----------------------------------------------------------

@dataclass(frozen=True)
class DecompositionOutcome:
    """Result of :func:`decompose`.

    ``case`` is ``"tame_subfamily"`` (``subfamily`` is ``A_k``, tame at p/2)
    or ``"tame_approximation"`` (``subfamily`` is the upset of ``B_m``, a tame
    ``m``-approximation at p/2 with witness ``A_m``).
    """

    case: str
    p: Fraction
    k: int
    chain: tuple            # A_1, ..., A_k
    stages: tuple           # B_1, ..., B_{k-1} as tuples of masks (unminimalized)
    chain_measures: tuple   # mu_p(A_i)
    mu: Fraction            # mu_p(A)
    subfamily: MintermFamily
    subfamily_measure: Fraction
    m: int | None = None
    witness: MintermFamily | None = None
    certificate: dict = field(default_factory=dict, hash=False)


def _stage_sets(fam: MintermFamily, m: int, half: Fraction) -> list[int]:
    counts: dict[int, int] = {}
    for mt in fam.minterms:
        size = popcount(mt)
        if size < m:
            continue
        for v in submasks(mt):
            if popcount(v) == size - m:
                counts[v] = counts.get(v, 0) + 1
    need = half ** -m
    return sorted((v for v, c in counts.items() if c >= need), key=set_key)


def decompose(fam: MintermFamily, p) -> DecompositionOutcome:
    p = _prob(p)
    half = p / 2
    k = fam.k
    chain = [fam]
    stages = []
    for m in range(1, k):
        cur = chain[-1]
        stage = _stage_sets(cur, m, half)
        keep = [mt for mt in cur.minterms if not any(v & mt == v for v in stage)]
        stages.append(tuple(stage))
        chain.append(MintermFamily(fam.n, tuple(keep)))
    mus = tuple(measure(a, p) for a in chain)
    total = mus[0]
    last = chain[-1]

    if 2 * mus[-1] >= total:
        tame = is_tame(last, half, k=k)
        cert = {"tame_at_half": tame.tame, "measure_ok": 2 * mus[-1] >= total}
        if not tame.tame:
            raise DecompositionError(
                f"A_k failed the tameness re-check at p/2: {tame.witness}")
        return DecompositionOutcome("tame_subfamily", p, k, tuple(chain), tuple(stages),
                                    mus, total, last, mus[-1], certificate=cert)

    for m in range(1, k):
        drop = mus[m - 1] - mus[m]
        if drop * 2 ** (m + 1) >= total:
            approx = minimalize(stages[m - 1], fam.n)
            mu_b = measure(approx, p)
            if mu_b != drop:
                log.info("stage %d: mu(B_m)=%s, measure drop=%s", m, mu_b, drop)
            check = verify_tame_approximation(fam, approx, m, half, chain[m - 1])
            cert = {"approximation_ok": check.ok, "violations": check.violations,
                    "measure_ok": mu_b * 2 ** (m + 1) >= total,
                    "covers_drop": mu_b >= drop, "drop": drop}
            if not (check.ok and cert["measure_ok"] and cert["covers_drop"]):
                raise DecompositionError(f"stage {m} approximation failed re-check: {cert}")
            return DecompositionOutcome("tame_approximation", p, k, tuple(chain),
                                        tuple(stages), mus, total, approx, mu_b, m,
                                        chain[m - 1], certificate=cert)
    raise DecompositionError("neither outcome of the decomposition could be certified")


# -- measure transfer checks ------------------------------------------------

@dataclass(frozen=True)
class InequalityResult:
    applicable: bool
    lhs: object = None
    rhs: object = None

    @property
    def passed(self) -> bool:
        return not self.applicable or self.lhs >= self.rhs

    @property
    def margin(self):
        return None if not self.applicable else self.lhs - self.rhs


@dataclass(frozen=True)
class HalvingCheck:
    p: Fraction
    structural: InequalityResult   # mu_{p/2} >= mu_p / (k 2^(3k-1))
    power: InequalityResult        # mu_{p/2} >= mu_p / 2^k

    @property
    def passed(self) -> bool:
        return self.structural.passed and self.power.passed


def halving_check(fam: MintermFamily, p) -> HalvingCheck:
    p = _prob(p)
    k = max(fam.k, 1)
    mu = measure(fam, p)
    mu_half = measure(fam, p / 2)
    return HalvingCheck(p, InequalityResult(True, mu_half, mu / (k * 2 ** (3 * k - 1))),
                        InequalityResult(True, mu_half, mu / 2 ** k))


@dataclass(frozen=True)
class TransferCheck:
    p: Fraction
    tame_clause: InequalityResult
    approximation_clause: InequalityResult

    @property
    def passed(self) -> bool:
        return self.tame_clause.passed and self.approximation_clause.passed


def tame_transfer_check(fam: MintermFamily, p, approximation=None) -> TransferCheck:
    """Measure transfer through tameness and through a tame approximation.

    Tame clause: if the family is tame at p/2 then
    ``mu_{p/2} >= mu_p / (k 2^{2k})``.

    Approximation clause: if ``B`` is a tame ``m``-approximation at ``p``
    then ``mu_p(A) >= mu_p(B) / (m 2^m)``.  ``approximation`` is a tuple
    ``(B, m, witness)``; by default the case-2 output of ``decompose(fam, p)``
    is tried.  The hypothesis is always re-verified at ``p``; when it fails
    the clause is reported as not applicable.
    """
    p = _prob(p)
    k = max(fam.k, 1)
    half = p / 2
    if is_tame(fam, half).tame:
        tame = InequalityResult(True, measure(fam, half), measure(fam, p) / (k * 2 ** (2 * k)))
    else:
        tame = InequalityResult(False)

    if approximation is None:
        out = decompose(fam, p)
        if out.case == "tame_approximation":
            approximation = (out.subfamily, out.m, out.witness)
    if approximation is None:
        return TransferCheck(p, tame, InequalityResult(False))
    b, m, witness = approximation
    if not verify_tame_approximation(fam, b, m, p, witness).ok:
        return TransferCheck(p, tame, InequalityResult(False))
    clause = InequalityResult(True, measure(fam, p), measure(b, p) / (m * 2 ** m))
    return TransferCheck(p, tame, clause)
