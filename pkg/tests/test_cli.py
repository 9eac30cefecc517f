import csv
import json

import numpy as np
import pytest

from ptflab import concepts as cc
from ptflab.cli import main
from ptflab.construct import verify_ptf_exhaustive
from ptflab.parity import parity_oracle
from ptflab.poly import from_text


def files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_construct_oddmaxbit(tmp_path, capsys):
    assert main(["construct", "--kind", "oddmaxbit", "--k", "12", "--h", "3", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["verify"]["valid"] and report["verify"]["mismatches"] == 0
    poly = from_text((tmp_path / "ptf.txt").read_text(), 12)
    assert verify_ptf_exhaustive(poly, cc.oddmaxbit(12)).valid
    assert str(poly.weight()) == report["ptf"]["weight"]


def test_construct_corrupted(tmp_path, capsys):
    code = main(["construct", "--kind", "oddmaxbit", "--k", "6", "--h", "3", "--corrupt", "--out", str(tmp_path)])
    assert code != 0
    assert "witness 000000" in capsys.readouterr().err
    assert json.loads((tmp_path / "report.json").read_text())["verify"]["witness"] == "000000"


def test_construct_from_file_and_tree(tmp_path):
    concept = tmp_path / "list.json"
    concept.write_text(cc.dumps(cc.random_decision_list(5, 7, 3)))
    assert main(["construct", "--kind", "file", "--concept-file", str(concept), "--h", "2",
                 "--out", str(tmp_path / "a")]) == 0
    assert main(["construct", "--kind", "tree", "--s", "10", "--n", "7", "--out", str(tmp_path / "b")]) == 0
    assert json.loads((tmp_path / "b" / "report.json").read_text())["ptf"]["construction"] == "rdl"


def test_construct_is_deterministic(tmp_path):
    args = ["construct", "--kind", "random", "--k", "8", "--seed", "4"]
    main(args + ["--out", str(tmp_path / "1")])
    main(args + ["--out", str(tmp_path / "2")])
    assert files(tmp_path / "1") == files(tmp_path / "2")


def test_profile_rows(tmp_path):
    args = ["profile", "--family", "oddmaxbit", "--ks", "8,10,12", "--hs", "2,3,4"]
    assert main(args + ["--out", str(tmp_path / "1")]) == 0
    with open(tmp_path / "1" / "profile.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 9 and all(r["verified"] == "true" for r in rows)
    assert (tmp_path / "1" / "profile.png").stat().st_size > 0
    main(args + ["--out", str(tmp_path / "2")])
    assert files(tmp_path / "1") == files(tmp_path / "2")


def test_learn_dl(tmp_path):
    assert main(["learn-dl", "--k", "4", "--n", "10", "--teacher", "adversarial", "--out", str(tmp_path)]) == 0
    rec = json.loads((tmp_path / "record.json").read_text())
    assert rec["final_consistent"] is True
    assert rec["config"]["alpha"] == "3/2"
    assert {"target_weight", "target_weight_plus_theta", "envelope_ratio"} <= set(rec["extra"])
    assert (tmp_path / "mistakes.png").exists() and (tmp_path / "record.csv").exists()


def test_learn_parity(tmp_path):
    assert main(["learn-parity", "--n", "128", "--k", "3", "--eps", "0.1", "--delta", "0.1",
                 "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["m"] == 1854 and rep["ℓ"] == 26
    assert rep["hypothesis_weight"] <= 26
    assert rep["hypothesis_support"] == rep["target_support"]


def test_learn_parity_from_sample_file(tmp_path):
    sample = parity_oracle(cc.random_parity(2, 40, 0))(400, np.random.default_rng(0))
    path = tmp_path / "sample.txt"
    path.write_text(sample.dumps())
    assert main(["learn-parity", "--sample-file", str(path), "--k", "2", "--out", str(tmp_path / "o")]) == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["n"] == 40 and rep["hypothesis_support"] == [v + 1 for v in sorted(cc.random_parity(2, 40, 0).support)]


def test_compare_reports(tmp_path):
    assert main(["compare", "--k", "3", "--n", "8", "--out", str(tmp_path / "1")]) == 0
    main(["compare", "--k", "3", "--n", "8", "--out", str(tmp_path / "2")])
    a, b = files(tmp_path / "1"), files(tmp_path / "2")
    for name in ("comparison.csv", "comparison.json", "comparison.png"):
        assert a[name] == b[name]
    assert "timings.json" in a


def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": 6, "h": 2, "kind": "random", "seed": 9}))
    assert main(["--config", str(cfg), "construct", "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["ptf"]["h"] == 2 and len(report["concept"]["items"]) == 6


def test_exhaustion_limit_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PTFLAB_EXHAUSTION_LIMIT", "8")
    assert main(["construct", "--kind", "oddmaxbit", "--k", "10", "--h", "2", "--out", str(tmp_path)]) == 2
    assert "exhaustion limit" in capsys.readouterr().err


def test_bad_subcommand():
    with pytest.raises(SystemExit):
        main(["nope"])
