"""Command line interface: configs in, JSON and CSV reports out, exit codes."""

import csv
import json

import pytest

from nestalg.cli import main


def write_cfg(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


FLAGSHIP = {
    "name": "flagship",
    "nest": {"basis": "N", "cuts": "all"},
    "a": {"op": "identity"},
    "b": {"op": "diag", "rule": {"kind": "harmonic"}},
}


def test_decide_flagship_exits_zero(tmp_path, capsys):
    cfg = write_cfg(tmp_path, FLAGSHIP)
    rc = main(["decide", "--config", cfg])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdicts"]["compact"]["status"] == "Compact"
    assert report["open_questions"] == []


def test_decide_writes_json_and_csv(tmp_path):
    cfg = write_cfg(tmp_path, FLAGSHIP)
    out = tmp_path / "report.json"
    rc = main(["decide", "--config", cfg, "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["all_consistent"] is True
    mirror = tmp_path / "report.csv"
    assert mirror.exists()
    with open(mirror) as fh:
        rows = list(csv.DictReader(fh))
    questions = {r["question"] for r in rows}
    assert "compact" in questions and "zero" in questions


def test_decide_question_subset(tmp_path):
    cfg = write_cfg(tmp_path, dict(FLAGSHIP, questions=["zero", "compact"]))
    assert main(["decide", "--config", cfg]) == 0


def test_missing_config_exits_one(capsys):
    rc = main(["decide"])
    assert rc == 1
    assert capsys.readouterr().err != ""


def test_malformed_config_exits_one(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["decide", "--config", str(p)]) == 1


def test_nonmember_config_exits_one(tmp_path):
    bad = dict(
        FLAGSHIP,
        a={"op": "wshift", "direction": "raise", "rule": {"kind": "const", "c": 1.0}},
    )
    cfg = write_cfg(tmp_path, bad)
    assert main(["decide", "--config", cfg]) == 1


def test_ideal_report(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "nest": {"basis": "N", "cuts": "all"},
            "operator": {"op": "diag", "rule": {"kind": "harmonic"}},
            "depth": 3,
            "subnest": [4, 9],
        },
    )
    out = tmp_path / "ideal.json"
    rc = main(["ideal", "--config", cfg, "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["decomposition"]["status"] == "Inside"
    assert report["subnest"]["reconstruction_residual"] <= 1e-12
    assert (tmp_path / "ideal.csv").exists()


def test_witness_certificate(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "nest": {"basis": "N", "cuts": "all"},
            "a": {"op": "identity"},
            "b": {"op": "identity"},
            "eps": 1.0,
            "count": 10,
        },
    )
    out = tmp_path / "wit.json"
    rc = main(["witness", "--config", cfg, "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["status"] == "ok"
    assert report["min_value"] >= report["value_floor"] - 1e-9


def test_witness_exhausted_exits_three(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "nest": {"basis": "N", "cuts": "all"},
            "a": {"op": "diag", "rule": {"kind": "harmonic"}},
            "b": {"op": "diag", "rule": {"kind": "harmonic"}},
            "eps": 0.9,
            "count": 10,
            "window": [1, 128],
        },
    )
    assert main(["witness", "--config", cfg]) == 3


def test_refute_family(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "pairs": [{"c": {"op": "identity"}, "d": {"op": "identity"}}],
        },
    )
    out = tmp_path / "ref.json"
    rc = main(["refute", "--config", cfg, "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["status"] == "refuted"
    w = report["witness"]
    assert w["residual"] >= w["threshold"]


def test_embed_bounds(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "nest": {"basis": "N", "cuts": "all"},
            "a": {"op": "identity"},
            "b": {"op": "identity"},
            "x": [1.0, -0.5, 0.25],
            "block_size": 8,
        },
    )
    out = tmp_path / "emb.json"
    rc = main(["embed", "--config", cfg, "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["bounds"]["upper"] <= 1.0 + 1e-9
    assert report["bounds"]["lower"] > 0.0


def test_verify_passes(tmp_path):
    out = tmp_path / "ver.json"
    rc = main(["verify", "--out", str(out), "--seed", "0"])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["all_pass"] is True
    with open(tmp_path / "ver.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert all(r["pass"] == "True" for r in rows)


def test_verify_fault_injection_exits_three(tmp_path):
    rc = main(["verify", "--inject-fault", "--out", str(tmp_path / "v.json")])
    assert rc == 3


def test_unknown_subcommand_errors():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
