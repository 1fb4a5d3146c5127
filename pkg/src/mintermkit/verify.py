"""Run every inequality and identity on concrete families and collect a ledger.

Each record names the check, the instance, the parameters, both sides of
the relation, the margin and the verdict.  Rationals are serialized as
``"num/den"`` strings and floats as JSON numbers, so a saved ledger can be
re-checked later with :func:`recheck_ledger`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import DecompositionError
from .family import MintermFamily, mask_of
from .generators import (GraphSpec, gen_all_k_subsets, gen_graph, gen_random, gen_random_mixed,
                         gen_single, gen_singletons, gen_star)
from .lp import (CHECK_TOL, cover_violations, fractional_expectation, kahn_kalai_check,
                 lp_measure_bracket, ratio_bounds_check, spread_violations,
                 weighted_witness_moments, width_upper_check)
from .measure import (delta_eps, estimate_measure, measure, measure_derivative,
                      monotone_ratio_check, pivotal_expectation)
from .moments import first_moment, second_moment
from .structure import decompose, halving_check, is_tame, tame_lower_bound, tame_transfer_check

PIVOT_POINTS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
RATIO_GRID = tuple(Fraction(i, 18) for i in range(1, 18))
GRID = tuple(Fraction(i, 10) for i in range(1, 10))
EPSILONS = (0.01, 0.05, 0.1)
RATIO_PAIRS = ((0.5, 0.1), (0.5, 0.25))
WITNESS_POINTS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
MC_SAMPLES = 100_000

_OPS = {
    "==": lambda a, b, tol: a == b if tol is None else abs(a - b) <= tol,
    "<=": lambda a, b, tol: a <= b if tol is None else a <= b + tol,
    ">=": lambda a, b, tol: a >= b if tol is None else a >= b - tol,
    ">": lambda a, b, tol: a > b,
}


def _margin(lhs, rhs, relation):
    if relation in (">=", ">"):
        return lhs - rhs
    if relation == "<=":
        return rhs - lhs
    return -abs(lhs - rhs)


@dataclass
class Record:
    check: str
    ref: str
    instance: str
    params: dict
    lhs: object
    rhs: object
    relation: str
    tol: float | None = None
    flag: str | None = None
    passed: bool = field(init=False)
    margin: object = field(init=False)

    def __post_init__(self):
        self.passed = bool(_OPS[self.relation](self.lhs, self.rhs, self.tol))
        self.margin = _margin(self.lhs, self.rhs, self.relation)

    def to_json(self) -> dict:
        out = {"check": self.check, "ref": self.ref, "instance": self.instance,
               "params": {k: encode(v) for k, v in self.params.items()},
               "lhs": encode(self.lhs), "relation": self.relation, "rhs": encode(self.rhs),
               "margin": encode(self.margin), "tol": self.tol, "pass": self.passed}
        if self.flag:
            out["flag"] = self.flag
        return out


def encode(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return v
    if isinstance(v, (tuple, list)):
        return [encode(x) for x in v]
    return str(v)


def decode(v):
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    return v


# -- per-family checks ----------------------------------------------------------

def check_margulis_russo(fam, name):
    for p in PIVOT_POINTS:
        lhs = p * measure_derivative(fam, p)
        prof = pivotal_expectation(fam, p)
        yield Record("margulis_russo", "Margulis-Russo lemma", name, {"p": p},
                     lhs, prof.e_piv, "==")
        yield Record("pivot_count_cap", "E[Piv] <= k mu_p", name, {"p": p},
                     prof.e_piv, fam.k * measure(fam, p), "<=")


def check_ratio_monotone(fam, name):
    res = monotone_ratio_check(fam, RATIO_GRID)
    steps = list(zip(RATIO_GRID, res.ratios, RATIO_GRID[1:], res.ratios[1:]))
    # report the tightest step (or the first violation)
    if res.violation:
        p0, p1, r0, r1 = res.violation
    else:
        p0, r0, p1, r1 = min(steps, key=lambda s: s[1] - s[3])
    yield Record("ratio_monotone", "mu_p / p^k is nonincreasing", name,
                 {"p": p0, "p_next": p1}, r1, r0, "<=")
    for eps in EPSILONS:
        yield Record("width_lower", "delta_eps >= 1 - (2 eps)^(1/k)", name, {"eps": eps},
                     delta_eps(fam, eps), 1 - (2 * eps) ** (1 / fam.k), ">=", tol=CHECK_TOL)


def check_width_upper(fam, name):
    for eps in EPSILONS:
        w = width_upper_check(fam, eps)
        yield Record("width_upper", "delta_eps <= 1 - 2 eps (k-1)^(k-1)/k^k", name,
                     {"eps": eps}, w.delta, w.bound, "<=", tol=CHECK_TOL,
                     flag="limit convention (k=1, 0^0=1)" if w.limit_convention else None)


def _lp_points(fam):
    qs = set(GRID) | {Fraction(1)}
    for p in GRID:
        for a in _alphas(fam):
            if a * p <= 1:
                qs.add(a * p)
    return sorted(qs)


def _alphas(fam):
    out = [Fraction(1, 2), Fraction(1), Fraction(2)]
    if fam.k >= 2 and Fraction(1, fam.k - 1) not in out:
        out.append(Fraction(1, fam.k - 1))
    return out


def check_lp(fam, name):
    for q in _lp_points(fam):
        out = fractional_expectation(fam, q)
        certs_ok = not cover_violations(fam, out.primal.beta) and \
            not spread_violations(fam, out.dual.nu, q)
        yield Record("lp_duality", "strong duality of the covering LP", name,
                     {"q": q, "support": out.support_size},
                     out.primal.objective, out.dual.value, "==")
        yield Record("lp_certificates", "certificates satisfy raw constraints", name,
                     {"q": q}, certs_ok, True, "==")
        if q in GRID:
            yield Record("lp_sandwich_low", "mu_q <= E*_q", name, {"q": q},
                         measure(fam, q), out.value, "<=")
            yield Record("lp_sandwich_high", "E*_q <= min(1, E_q[X])", name, {"q": q},
                         out.value, min(Fraction(1), first_moment(fam, q)), "<=")


def check_lp_bracket(fam, name):
    for p in GRID:
        mu = measure(fam, p)
        for a in _alphas(fam):
            if a * p > 1:
                continue
            lower, upper = lp_measure_bracket(fam, p, a)
            yield Record("lp_bracket_low", "E*_{alpha p} (1+alpha)^-k <= mu_p", name,
                         {"p": p, "alpha": a}, lower, mu, "<=")
            yield Record("lp_bracket_high", "mu_p <= E*_p", name,
                         {"p": p, "alpha": a}, mu, upper, "<=")


def check_witness(fam, name):
    for p in WITNESS_POINTS:
        for q in WITNESS_POINTS:
            w = weighted_witness_moments(fam, p, q)
            lstar = fractional_expectation(fam, q).value
            params = {"p": p, "q": q}
            yield Record("witness_first", "E_p(g) = L*_q", name, params, w.e_g, lstar, "==")
            yield Record("witness_second", "E_p(g^2) <= L*_q (1+alpha)^k", name, params,
                         w.e_g2, w.bound, "<=")
            yield Record("witness_chain", "weighted second moment chain is ordered", name,
                         params, w.chain_ok, True, "==")
            if w.e_g2:
                yield Record("witness_pz", "E(g)^2/E(g^2) <= mu_p", name, params,
                             w.pz, measure(fam, p), "<=")


def check_kahn_kalai(fam, name):
    res = kahn_kalai_check(fam)
    if not res.applicable:
        return
    yield Record("kahn_kalai", "E*_q = 1 implies mu_{kq} > 1/e", name,
                 {"q1": float(res.q1), "point": res.point}, res.mu, 1 / math.e, ">",
                 flag="clamped to 1" if res.clamped else None)


def check_threshold_ratio(fam, name):
    for a, b in RATIO_PAIRS:
        r = ratio_bounds_check(fam, a, b)
        flag = "limit convention (k=1)" if r.limit_convention else None
        yield Record("threshold_ratio_low", "(a/b)^(1/k) - 1 <= p_a/p_b", name,
                     {"a": a, "b": b}, r.lower, r.ratio, "<=", tol=CHECK_TOL)
        yield Record("threshold_ratio_high", "p_a/p_b <= k^k/(k-1)^(k-1) a/b", name,
                     {"a": a, "b": b}, r.ratio, r.upper, "<=", tol=CHECK_TOL, flag=flag)


def check_structure(fam, name):
    for p in GRID:
        if is_tame(fam, p).tame:
            yield Record("tame_lower_bound", "tame: mu_p >= min(E_p[X],1)/(k 2^k)", name,
                         {"p": p}, measure(fam, p), tame_lower_bound(fam, p), ">=")
            rep = second_moment(fam, p)
            k = max(fam.k, 1)
            yield Record("tame_second_moment", "tame: E[X^2] <= ((k-1)2^k+1)E[X]+E[X]^2",
                         name, {"p": p}, rep.second,
                         ((k - 1) * 2 ** k + 1) * rep.first + rep.first ** 2, "<=")
        try:
            out = decompose(fam, p)
        except DecompositionError as exc:
            yield Record("decomposition", "decomposition", name,
                         {"p": p, "error": str(exc)}, False, True, "==")
            continue
        if out.case == "tame_subfamily":
            yield Record("decomposition", "decomposition: tame subfamily", name,
                         {"p": p, "case": 1, "tame_at_half": out.certificate["tame_at_half"]},
                         out.subfamily_measure, out.mu / 2, ">=")
        else:
            yield Record("decomposition", "decomposition: tame approximation", name,
                         {"p": p, "case": 2, "m": out.m,
                          "approximation_ok": out.certificate["approximation_ok"]},
                         out.subfamily_measure, out.mu / 2 ** (out.m + 1), ">=")
        tr = tame_transfer_check(fam, p)
        if tr.tame_clause.applicable:
            yield Record("transfer_tame", "tame at p/2: mu_{p/2} >= mu_p/(k 2^{2k})", name,
                         {"p": p}, tr.tame_clause.lhs, tr.tame_clause.rhs, ">=")
        if tr.approximation_clause.applicable:
            yield Record("transfer_approximation", "mu_p(A) >= mu_p(B)/(m 2^m)", name,
                         {"p": p, "m": out.m}, tr.approximation_clause.lhs,
                         tr.approximation_clause.rhs, ">=")
        if out.case == "tame_approximation":
            # the decomposition's approximation is certified at p/2; test the clause there too
            trh = tame_transfer_check(fam, p / 2, (out.subfamily, out.m, out.witness))
            if trh.approximation_clause.applicable:
                yield Record("transfer_approximation", "mu_r(A) >= mu_r(B)/(m 2^m)", name,
                             {"p": p, "r": p / 2, "m": out.m},
                             trh.approximation_clause.lhs, trh.approximation_clause.rhs, ">=")
        h = halving_check(fam, p)
        yield Record("halving_structural", "mu_{p/2} >= mu_p/(k 2^{3k-1})", name, {"p": p},
                     h.structural.lhs, h.structural.rhs, ">=")
        yield Record("halving_power", "mu_{p/2} >= mu_p/2^k", name, {"p": p},
                     h.power.lhs, h.power.rhs, ">=")


def check_monte_carlo(fam, name, samples=MC_SAMPLES, seed=0, threads=None):
    for p in (0.5,):
        est = estimate_measure(fam, p, samples, seed, threads=threads)
        mu = float(measure(fam, Fraction(p)))
        sigma = math.sqrt(mu * (1 - mu) / samples)
        yield Record("monte_carlo", "sampling agrees with the exact measure", name,
                     {"p": p, "samples": samples, "seed": seed},
                     abs(est.estimate - mu), 4 * sigma, "<=")


FAMILY_CHECKS = (check_margulis_russo, check_ratio_monotone, check_width_upper, check_lp,
                 check_lp_bracket, check_witness, check_kahn_kalai, check_threshold_ratio,
                 check_structure)


def verify_family(fam: MintermFamily, name="family", mc_samples=MC_SAMPLES, threads=None):
    """All per-family records.  Trivial families only get the sampling check."""
    records = []
    if not fam.is_trivial:
        for chk in FAMILY_CHECKS:
            records.extend(chk(fam, name))
    if mc_samples:
        records.extend(check_monte_carlo(fam, name, mc_samples, threads=threads))
    return records


# -- suite ------------------------------------------------------------------

def builtin_suite() -> list[tuple[str, MintermFamily]]:
    """Deterministic instance list, every generator represented, all with n <= 12."""
    suite = [("F1", MintermFamily(3, (mask_of((0, 1)), mask_of((1, 2)))))]
    for n, k in ((1, 1), (2, 2), (3, 2), (4, 3), (5, 3), (6, 4), (8, 2), (4, 1)):
        suite.append((f"single({n},{k})", gen_single(n, k)))
    for n in range(3, 11):
        suite.append((f"star({n})", gen_star(n)))
    for n, k in ((2, 1), (5, 1), (10, 1), (4, 2), (5, 2), (6, 2), (7, 2), (4, 3), (5, 3),
                 (6, 3), (8, 3)):
        suite.append((f"all({n},{k})", gen_all_k_subsets(n, k)))
    for m, pat in ((4, "triangle"), (5, "triangle"), (5, "k4"), (5, "k4_tail"),
                   (4, "path_2"), (4, "path_3"), (5, "path_2")):
        suite.append((f"graph(K{m},{pat})", gen_graph(GraphSpec(m, pat))))
    suite.append(("graph(K4,claw)",
                  gen_graph(GraphSpec(4, "custom", ((0, 1), (0, 2), (0, 3))))))
    for i, (n, k, count) in enumerate(((6, 2, 4), (7, 2, 6), (8, 3, 5), (9, 3, 6),
                                       (10, 2, 8), (10, 3, 6), (11, 4, 5), (12, 3, 6),
                                       (12, 4, 4), (8, 2, 10), (9, 4, 4), (12, 2, 7))):
        suite.append((f"random({n},{k},{count},seed={i})", gen_random(n, k, count, seed=i)))
    for i, (n, k, count) in enumerate(((6, 3, 5), (8, 3, 6), (10, 4, 6), (12, 3, 8),
                                       (9, 2, 6), (11, 3, 7))):
        suite.append((f"mixed({n},{k},{count},seed={100 + i})",
                      gen_random_mixed(n, k, count, seed=100 + i)))
    return suite


def suite_records():
    """Checks that concern named instances rather than every family."""
    for n in (5, 10, 20):
        yield from check_kahn_kalai(gen_singletons(n), f"singletons({n})")
    for m in range(6, 13):
        fam = gen_graph(GraphSpec(m, "k4"))
        p = m ** (-2 / 3)
        e = float(first_moment(fam, p))
        params = {"m": m, "p": p}
        yield Record("k4_first_moment", "E[X] = C(m,4) m^-4 in [0.001, 1/24]",
                     f"graph(K{m},k4)", params, e, comb(m, 4) * m ** -4.0, "==", tol=1e-12)
        yield Record("k4_first_moment_range", "E[X] >= 0.001", f"graph(K{m},k4)", params,
                     e, 0.001, ">=")
        yield Record("k4_first_moment_range", "E[X] <= 1/24", f"graph(K{m},k4)", params,
                     e, 1 / 24, "<=")
    for m in (5, 6, 7):
        k4 = gen_graph(GraphSpec(m, "k4"))
        tail = gen_graph(GraphSpec(m, "k4_tail"))
        contained = all(any(a & t == a for a in k4.minterms) for t in tail.minterms)
        yield Record("k4_tail_containment", "k4_tail upset is inside the K4 upset",
                     f"graph(K{m},k4_tail)", {"m": m}, contained, True, "==")


@dataclass
class Ledger:
    records: list

    @property
    def failures(self):
        return [r for r in self.records if not r.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        checks: dict[str, dict] = {}
        for r in self.records:
            c = checks.setdefault(r.check, {"total": 0, "failed": 0})
            c["total"] += 1
            c["failed"] += not r.passed
        return {"schema": 1,
                "summary": {"total": len(self.records), "failed": len(self.failures),
                            "flagged": sum(1 for r in self.records if r.flag),
                            "checks": checks},
                "records": [r.to_json() for r in self.records]}


def run_builtin(mc_samples=MC_SAMPLES, threads=None) -> Ledger:
    records = []
    for name, fam in builtin_suite():
        records.extend(verify_family(fam, name, mc_samples, threads))
    records.extend(suite_records())
    return Ledger(records)


def recheck_ledger(obj: dict) -> list[dict]:
    """Records of a saved ledger that fail, re-deciding each from its stored sides."""
    bad = []
    for rec in obj.get("records", []):
        lhs, rhs = decode(rec["lhs"]), decode(rec["rhs"])
        ok = bool(_OPS[rec["relation"]](lhs, rhs, rec.get("tol")))
        if not ok or not rec.get("pass", False):
            bad.append(rec)
    return bad
