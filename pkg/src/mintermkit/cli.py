"""Command line front end.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input
error, 3 the instance is beyond the exact enumeration/LP capacity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction

from . import generators as gen
from .errors import CapacityError, MintermError
from .family import dumps_family, loads_family, members
from .lp import dual_value, fractional_expectation
from .measure import (ENUMERATION_LIMIT, delta_eps, estimate_measure, measure,
                      measure_derivative, pivotal_expectation, threshold_point)
from .moments import second_moment
from .structure import decompose
from .verify import Ledger, encode, recheck_ledger, run_builtin, verify_family

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

log = logging.getLogger("mintermkit")


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _grid(args) -> list[Fraction]:
    if args.p is not None:
        return [_fraction(args.p)]
    if args.grid is None:
        raise UsageError("give --p or --grid START:END:STEP")
    parts = args.grid.split(":")
    if len(parts) != 3:
        raise UsageError("--grid expects START:END:STEP")
    start, end, step = map(_fraction, parts)
    if step <= 0 or end < start:
        raise UsageError("--grid needs STEP > 0 and END >= START")
    count = int((end - start) / step) + 1
    return [start + i * step for i in range(count)]


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return loads_family(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except MintermError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _emit(text: str, path=None):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _num(v) -> str:
    return repr(float(v))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rat(v) -> str:
    return f"{v.numerator}/{v.denominator}"


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return encode(v)


# -- commands -----------------------------------------------------------------

def cmd_analyze(args):
    fam = _load(args.family)
    rows = []
    for p in _grid(args):
        mu = measure(fam, p, args.max_n)
        if 0 < p < 1:
            d = measure_derivative(fam, p, args.max_n)
            e_piv = pivotal_expectation(fam, p, args.max_n).e_piv
        else:
            d = e_piv = float("nan")
        ratio = mu / p ** fam.k if p > 0 else float("nan")
        rows.append([_num(p), _num(mu), _num(d), _num(e_piv), _num(ratio)])
    _emit(_csv(["p", "mu", "dmu_dp", "e_piv", "ratio_mu_over_pk"], rows), args.out)
    return EXIT_OK


def cmd_moments(args):
    fam = _load(args.family)
    rows = []
    for p in _grid(args):
        rep = second_moment(fam, p)
        pz = rep.pz_bound if rep.pz_bound is not None else float("nan")
        rows.append([_num(v) for v in (p, rep.first, rep.second, rep.diagonal,
                                       rep.overlapping, rep.disjoint, pz,
                                       measure(fam, p, args.max_n))])
    _emit(_csv(["p", "first", "second", "diagonal", "overlapping", "disjoint", "pz_bound",
                "mu_exact"], rows), args.out)
    return EXIT_OK


def cmd_threshold(args):
    fam = _load(args.family)
    print(repr(threshold_point(fam, float(_fraction(args.x)), max_n=args.max_n)))
    return EXIT_OK


def cmd_delta(args):
    fam = _load(args.family)
    print(repr(delta_eps(fam, float(_fraction(args.eps)), max_n=args.max_n)))
    return EXIT_OK


def _weights(d: dict) -> list[dict]:
    return [{"set": list(members(s)), "w": _rat(w)} for s, w in d.items()]


def cmd_lp(args):
    fam = _load(args.family)
    q = _fraction(args.q)
    if args.dual_only:
        dual = dual_value(fam, q)
        out = {"q": _rat(q), "value": _rat(dual.value), "nu": _weights(dual.nu)}
    else:
        res = fractional_expectation(fam, q)
        out = {"q": _rat(q), "value": _rat(res.value), "beta": _weights(res.primal.beta),
               "nu": _weights(res.dual.nu), "duality_gap": _rat(res.duality_gap)}
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_decompose(args):
    fam = _load(args.family)
    out = decompose(fam, _fraction(args.p))
    doc = {"case": out.case, "p": _rat(out.p), "k": out.k, "m": out.m,
           "chain": [[list(s) for s in a.sets()] for a in out.chain],
           "stages": [[list(members(v)) for v in st] for st in out.stages],
           "chain_measures": [_rat(v) for v in out.chain_measures],
           "mu": _rat(out.mu),
           "subfamily": [list(s) for s in out.subfamily.sets()],
           "subfamily_measure": _rat(out.subfamily_measure),
           "witness": None if out.witness is None else [list(s) for s in out.witness.sets()],
           "certificate": _jsonable(out.certificate)}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sample(args):
    fam = _load(args.family)
    est = estimate_measure(fam, float(_fraction(args.p)), args.samples, args.seed,
                           threads=args.threads)
    row = [_num(_fraction(args.p)), str(est.samples), str(args.seed), str(est.hits),
           repr(est.estimate), repr(est.stderr), repr(est.ci_low), repr(est.ci_high)]
    _emit(_csv(["p", "samples", "seed", "hits", "estimate", "stderr", "ci99_low",
                "ci99_high"], [row]), args.out)
    return EXIT_OK


def cmd_generate(args):
    kind = args.kind
    need = {"single": ("n", "k"), "star": ("n",), "all": ("n", "k"), "singletons": ("n",),
            "random": ("n", "k", "count"), "mixed": ("n", "k", "count"),
            "graph": ("vertices", "pattern")}[kind]
    missing = [f"--{a}" for a in need if getattr(args, a) is None]
    if missing:
        raise UsageError(f"--kind {kind} needs {' '.join(missing)}")
    if kind == "single":
        fam = gen.gen_single(args.n, args.k)
    elif kind == "star":
        fam = gen.gen_star(args.n)
    elif kind == "all":
        fam = gen.gen_all_k_subsets(args.n, args.k)
    elif kind == "singletons":
        fam = gen.gen_singletons(args.n)
    elif kind == "random":
        fam = gen.gen_random(args.n, args.k, args.count, args.seed)
    elif kind == "mixed":
        fam = gen.gen_random_mixed(args.n, args.k, args.count, args.seed)
    else:
        edges = ()
        if args.edges:
            try:
                edges = tuple(tuple(int(v) for v in e.split("-")) for e in args.edges.split(","))
            except ValueError:
                raise UsageError("--edges expects a list like 0-1,1-2,2-0") from None
        fam = gen.gen_graph(gen.GraphSpec(args.vertices, args.pattern, edges))
    _emit(dumps_family(fam), args.out)
    return EXIT_OK


def cmd_verify(args):
    if args.recheck:
        try:
            with open(args.recheck, encoding="utf-8") as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.recheck}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.recheck}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        bad = recheck_ledger(obj)
        total = len(obj.get("records", []))
        print(f"rechecked {total} records: {len(bad)} failing")
        for rec in bad[:20]:
            print(f"FAIL {rec['check']} {rec['instance']} {rec.get('params')}")
        return EXIT_FAIL if bad or not total else EXIT_OK

    if args.family:
        fam = _load(args.family)
        ledger = Ledger(verify_family(fam, os.path.basename(args.family), args.mc_samples,
                                      args.threads))
    elif args.suite == "builtin":
        ledger = run_builtin(args.mc_samples, args.threads)
    else:
        raise UsageError("give --family PATH or --suite builtin")
    doc = ledger.to_json()
    if args.out:
        _emit(json.dumps(doc, indent=1) + "\n", args.out)
    for name, c in sorted(doc["summary"]["checks"].items()):
        status = "ok" if not c["failed"] else f"{c['failed']} FAILED"
        print(f"{name:28s} {c['total']:6d}  {status}")
    print(f"total {doc['summary']['total']}, failed {doc['summary']['failed']}")
    return EXIT_OK if ledger.ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-n", type=int, default=ENUMERATION_LIMIT,
                        help="largest ground set enumerated exactly (default %(default)s)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for sampling (output does not depend on it)")
    common.add_argument("--out", help="output file (default: standard output)")

    parser = argparse.ArgumentParser(prog="mintermkit",
                                     description="Thresholds of monotone set families.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    for name, fn, help_ in (("analyze", cmd_analyze, "measure, derivative, pivot counts"),
                            ("moments", cmd_moments, "first/second moments and PZ bound")):
        p = add(name, fn, help_)
        p.add_argument("--family", required=True)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--p")
        g.add_argument("--grid", help="START:END:STEP, inclusive")

    p = add("threshold", cmd_threshold, "p at which the measure equals x")
    p.add_argument("--family", required=True)
    p.add_argument("--x", required=True)

    p = add("delta", cmd_delta, "relative threshold width")
    p.add_argument("--family", required=True)
    p.add_argument("--eps", required=True)

    p = add("lp", cmd_lp, "fractional expectation with certificates")
    p.add_argument("--family", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--dual-only", action="store_true")

    p = add("decompose", cmd_decompose, "tame subfamily or tame approximation")
    p.add_argument("--family", required=True)
    p.add_argument("--p", required=True)

    p = add("sample", cmd_sample, "Monte Carlo measure estimate")
    p.add_argument("--family", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)

    p = add("generate", cmd_generate, "write a generated family as JSON")
    p.add_argument("--kind", required=True,
                   choices=["single", "star", "all", "singletons", "random", "mixed", "graph"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vertices", type=int)
    p.add_argument("--pattern", help="triangle, k4, k4_tail, path_R or custom")
    p.add_argument("--edges", help="custom pattern edges, e.g. 0-1,1-2,2-0")

    p = add("verify", cmd_verify, "run every check and write a ledger")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--family")
    g.add_argument("--suite", choices=["builtin"])
    g.add_argument("--recheck", metavar="LEDGER", help="re-decide a saved ledger")
    p.add_argument("--mc-samples", type=int, default=100_000,
                   help="samples for the sampling check, 0 to skip")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s",
                        stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, MintermError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
