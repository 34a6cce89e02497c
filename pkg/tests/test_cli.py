import json
import os
import xml.etree.ElementTree as ET

import pytest

from scforge.automata import network_text
from scforge.cli import main
from scforge.transform import transform_stages

TWO_CHARTS = "fixture:two_charts.scn"
CARDIAC = "fixture:cardiac.scn"
MUTATED = "fixture:cardiac_mutated.scn"
PROPS = "fixture:cardiac.q"


def test_validate(capsys, tmp_path):
    assert main(["validate", TWO_CHARTS]) == 0
    bad = tmp_path / "bad.scn"
    bad.write_text("var x : int[0..3] = 0;\nstatechart A priority 1 {\n  state s0\n}\n")
    assert main(["validate", str(bad)]) == 2
    err = capsys.readouterr().err
    assert f"{bad}:3:" in err or f"{bad}:4:" in err
    assert main(["validate", str(tmp_path / "missing.scn")]) == 3


def test_validate_json(capsys):
    assert main(["validate", TWO_CHARTS, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["valid"] is True and doc["diagnostics"] == []


def test_transform_stages(capsys, two_charts):
    stages, _ = transform_stages(two_charts)
    for k in (2, 7):
        assert main(["transform", TWO_CHARTS, "--emit-stage", str(k)]) == 0
        assert capsys.readouterr().out == network_text(stages[k - 1])
    assert main(["transform", TWO_CHARTS, "--emit-stage", "0"]) == 2


def test_transform_to_file(tmp_path):
    out = tmp_path / "stage.txt"
    assert main(["transform", TWO_CHARTS, "--out", str(out)]) == 0
    assert out.read_text().startswith("// stage 7\n")


def test_simulate_both_sides(capsys, tmp_path):
    sched = tmp_path / "s.txt"
    sched.write_text("cycle 1: eventA\n")
    assert main(["simulate", TWO_CHARTS, "--schedule", str(sched), "--horizon", "3"]) == 0
    sc = capsys.readouterr().out.splitlines()
    assert sc[3] == "1.1 | (s2,s3) | x=5 | t2" and len(sc) == 7
    assert main(["simulate", TWO_CHARTS, "--side", "ta", "--project", "--schedule", str(sched),
                 "--horizon", "3"]) == 0
    ta = capsys.readouterr().out.splitlines()
    strip = lambda rows: [r.rsplit(" | ", 1)[0] for r in rows]
    assert strip(ta) == strip(sc)
    assert main(["simulate", TWO_CHARTS, "--side", "ta", "--horizon", "1"]) == 0
    assert "| DELAY" in capsys.readouterr().out
    assert main(["simulate", TWO_CHARTS, "--horizon", "0"]) == 0
    assert capsys.readouterr().out == "0.0 | (s0_1,s0_2) | x=0 | INIT\n"


def test_equiv(capsys):
    assert main(["equiv", TWO_CHARTS, "--schedules", "100", "--horizon", "50", "--seed", "5"]) == 0
    cap = capsys.readouterr()
    assert "verdict: equivalent" in cap.out and "seed: 5" in cap.err
    assert main(["equiv", TWO_CHARTS, "--skip-rule", "6", "--schedules", "10", "--seed", "5"]) == 1
    out = capsys.readouterr().out
    assert "verdict: divergent" in out and "witness schedule:" in out
    assert main(["equiv", TWO_CHARTS, "--schedules", "0"]) == 2


def test_equiv_prints_a_generated_seed(capsys):
    assert main(["equiv", TWO_CHARTS, "--schedules", "2", "--horizon", "5", "--format", "json"]) == 0
    cap = capsys.readouterr()
    seed = int(cap.err.split("seed: ")[1].split()[0])
    assert json.loads(cap.out)["seed"] == seed


def test_environment_defaults_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("SCFORGE_SEED", "123")
    monkeypatch.setenv("SCFORGE_SCHEDULES", "3")
    monkeypatch.setenv("SCFORGE_HORIZON", "4")
    assert main(["equiv", TWO_CHARTS, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert (doc["seed"], doc["schedules_tested"], doc["horizon"]) == (123, 3, 4)
    assert main(["equiv", TWO_CHARTS, "--format", "json", "--seed", "9"]) == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 9
    monkeypatch.setenv("SCFORGE_HORIZON", "lots")
    assert main(["equiv", TWO_CHARTS]) == 2


def test_verify(capsys, tmp_path):
    assert main(["verify", CARDIAC, "--props", PROPS, "--max-cycles", "25"]) == 0
    assert "P2: holds" in capsys.readouterr().out
    assert main(["verify", MUTATED, "--props", PROPS, "--max-cycles", "25", "--format", "json"]) == 1
    doc = json.loads(capsys.readouterr().out)
    p1, p2 = doc["results"]
    assert p1["holds"] and not p2["holds"] and p2["counterexample"]["trace"]
    bad = tmp_path / "bad.q"
    bad.write_text("A[] Treatment.Nowhere imply Breath == 0\n")
    assert main(["verify", CARDIAC, "--props", str(bad)]) == 2
    assert "UNKNOWN_STATE" in capsys.readouterr().err


def test_export(capsys, tmp_path):
    assert main(["export", TWO_CHARTS, "--out", str(tmp_path / "f")]) == 0
    root = ET.fromstring((tmp_path / "f" / "model.xml").read_text().split("\n", 2)[2])
    assert len(root.findall("template")) == 5
    assert (tmp_path / "f" / "queries.q").read_text() == ""
    assert main(["export", CARDIAC, "--out", str(tmp_path / "c")]) == 0
    q = (tmp_path / "c" / "queries.q").read_text()
    assert "A[] Treatment.ActivateDefibrillaotr imply Breath == 0 && Rhythm == 0\n" in q
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["export", TWO_CHARTS, "--out", str(blocker / "sub")]) == 3
