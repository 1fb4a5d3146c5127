import csv
import io
import json

import pytest

from mintermkit.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def f1_path(tmp_path):
    path = tmp_path / "f1.json"
    path.write_text('{"n": 3, "minterms": [[0, 1], [1, 2]]}\n')
    return path


def test_generate_round_trip(tmp_path, capsys):
    path = tmp_path / "k4.json"
    assert run(capsys, "generate", "--kind", "graph", "--vertices", 6, "--pattern", "k4",
               "--out", path)[0] == 0
    text = path.read_text()
    again = tmp_path / "again.json"
    code, out, _ = run(capsys, "generate", "--kind", "graph", "--vertices", 6,
                       "--pattern", "k4")
    assert out == text
    from mintermkit import dumps_family, load_family
    assert dumps_family(load_family(path)) == text


def test_analyze(f1_path, capsys):
    code, out, _ = run(capsys, "analyze", "--family", f1_path, "--grid", "0.1:0.9:0.1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    mus = [float(r["mu"]) for r in rows]
    assert mus == sorted(mus)
    code, out, _ = run(capsys, "analyze", "--family", f1_path, "--p", "0.5")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row == {"p": "0.5", "mu": "0.375", "dmu_dp": "1.25", "e_piv": "0.625",
                   "ratio_mu_over_pk": "1.5"}
    code, out, _ = run(capsys, "analyze", "--family", f1_path, "--p", "0")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["mu"] == "0.0" and row["ratio_mu_over_pk"] == "nan"


def test_moments_csv(f1_path, capsys):
    code, out, _ = run(capsys, "moments", "--family", f1_path, "--p", "1/2")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["second"] == "0.75" and row["pz_bound"] == repr(1 / 3)


def test_threshold_and_delta(tmp_path, f1_path, capsys):
    single = tmp_path / "s.json"
    single.write_text('{"n": 2, "minterms": [[0, 1]]}')
    code, out, _ = run(capsys, "threshold", "--family", single, "--x", "0.5")
    assert abs(float(out) - 0.5 ** 0.5) <= 1e-9
    code, out, _ = run(capsys, "delta", "--family", f1_path, "--eps", "0.1")
    assert abs(float(out) - 0.600) < 1e-3


def test_lp(f1_path, capsys):
    code, out, _ = run(capsys, "lp", "--family", f1_path, "--q", "0.25")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == "1/8" and doc["duality_gap"] == "0/1"
    assert {tuple(b["set"]) for b in doc["beta"]} == {(0, 1), (1, 2)}
    code, out, _ = run(capsys, "lp", "--family", f1_path, "--q", "1/4", "--dual-only")
    assert "beta" not in json.loads(out)


def test_decompose(tmp_path, capsys):
    path = tmp_path / "s9.json"
    run(capsys, "generate", "--kind", "star", "--n", 9, "--out", path)
    code, out, _ = run(capsys, "decompose", "--family", path, "--p", "0.5")
    doc = json.loads(out)
    assert doc["case"] == "tame_approximation" and doc["m"] == 1
    assert doc["subfamily"] == [[0]] and doc["subfamily_measure"] == "1/2"


def test_sample_deterministic(f1_path, capsys):
    argv = ("sample", "--family", f1_path, "--p", "0.5", "--samples", 50000, "--seed", 4)
    a = run(capsys, *argv, "--threads", 1)[1]
    b = run(capsys, *argv, "--threads", 3)[1]
    assert a == b


def test_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3,\n "minterms": [[0, 1],]}')
    code, _, err = run(capsys, "analyze", "--family", bad, "--p", "0.5")
    assert code == 2 and "bad.json:2:" in err
    big = tmp_path / "big.json"
    run(capsys, "generate", "--kind", "singletons", "--n", 30, "--out", big)
    code, _, err = run(capsys, "analyze", "--family", big, "--p", "0.5")
    assert code == 3 and "sample" in err
    assert run(capsys, "analyze", "--family", big)[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_verify_family_and_recheck(tmp_path, f1_path, capsys):
    ledger = tmp_path / "ledger.json"
    code, out, _ = run(capsys, "verify", "--family", f1_path, "--out", ledger,
                       "--mc-samples", 10000)
    assert code == 0 and "failed 0" in out
    doc = json.loads(ledger.read_text())
    assert doc["schema"] == 1 and doc["summary"]["failed"] == 0
    assert run(capsys, "verify", "--recheck", ledger)[0] == 0

    # flip one record so that lhs < rhs under a ">=" relation
    rec = next(r for r in doc["records"] if r["relation"] == ">=" and r["lhs"] != r["rhs"])
    rec["lhs"], rec["rhs"] = rec["rhs"], rec["lhs"]
    corrupt = tmp_path / "corrupt.json"
    corrupt.write_text(json.dumps(doc))
    assert run(capsys, "verify", "--recheck", corrupt)[0] == 1


def test_verify_single_minterm_is_tight(tmp_path, capsys):
    path = tmp_path / "single.json"
    path.write_text('{"n": 4, "minterms": [[0, 1, 2]]}')
    ledger = tmp_path / "l.json"
    assert run(capsys, "verify", "--family", path, "--out", ledger, "--mc-samples", 0)[0] == 0
    doc = json.loads(ledger.read_text())
    rec = next(r for r in doc["records"] if r["check"] == "ratio_monotone")
    assert rec["margin"] == "0/1"
