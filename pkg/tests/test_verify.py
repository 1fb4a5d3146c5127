import json
from fractions import Fraction

from mintermkit import gen_single, gen_singletons
from mintermkit.verify import (Ledger, Record, builtin_suite, decode, encode, recheck_ledger,
                               verify_family)


def test_record_relations():
    assert Record("c", "r", "i", {}, Fraction(1, 2), Fraction(1, 3), ">=").passed
    assert Record("c", "r", "i", {}, 0.3, 0.2995, "<=", tol=1e-3).passed
    r = Record("c", "r", "i", {}, 1.0, 1.0 + 1e-12, "==", tol=1e-9)
    assert r.passed and r.margin < 0
    assert not Record("c", "r", "i", {}, 1, 1, ">").passed


def test_encoding_round_trip():
    assert encode(Fraction(3, 8)) == "3/8" and decode("3/8") == Fraction(3, 8)
    assert encode(0.1) == 0.1 and encode([Fraction(1), 2]) == ["1/1", 2]


def test_ledger_json_and_recheck():
    ledger = Ledger(verify_family(gen_single(4, 2), "single", mc_samples=2000))
    doc = json.loads(json.dumps(ledger.to_json()))
    assert doc["schema"] == 1 and doc["summary"]["failed"] == 0
    assert {"check", "ref", "instance", "params", "lhs", "rhs", "relation", "margin",
            "tol", "pass"} <= set(doc["records"][0])
    assert recheck_ledger(doc) == []
    doc["records"][0]["pass"] = False
    assert len(recheck_ledger(doc)) == 1


def test_k1_flags():
    recs = verify_family(gen_singletons(4), "sing4", mc_samples=0)
    flagged = [r for r in recs if r.flag]
    assert flagged and all(r.check in ("width_upper", "threshold_ratio_high") for r in flagged)


def test_builtin_suite_shape():
    suite = builtin_suite()
    assert len(suite) >= 50
    assert all(fam.n <= 12 for _, fam in suite)
    names = " ".join(n for n, _ in suite)
    for part in ("single", "star", "all", "graph", "random", "mixed"):
        assert part in names
