import json

import pytest

from daugavet_lab.cli import Scenario, emit_report, get_scenario, registry, run_scenario
from daugavet_lab.cli.main import main
from daugavet_lab.cli.report import evaluate_check, report_table
from daugavet_lab.errors import ConfigError

PAIR = {
    "spaces": {"X": {"kind": "sup", "n": 2}},
    "maps": {"phi": {"kind": "identity", "domain": "X"},
             "psi": {"kind": "rank_one", "scalar": "e1", "y": [1.0, 0.0], "codomain": "X"},
             "bad": {"kind": "rank_one", "scalar": "m1", "y": [1.0, 0.0], "codomain": "X"}},
    "scalars": {"e1": {"kind": "functional", "domain": "X", "f": [1.0, 0.0]},
                "m1": {"kind": "functional", "domain": "X", "f": [-1.0, 0.0]}},
}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_registry_size_and_anchors():
    reg = registry()
    assert len(reg) >= 15
    for name, s in reg.items():
        assert s.name == name and s.anchor and s.construction["ops"]
    assert get_scenario("remark-3.9-counterexample").name == "remark-3.9"
    with pytest.raises(ConfigError):
        get_scenario("no-such-scenario")


@pytest.mark.parametrize("name", sorted(registry()))
def test_scenario_serialization_round_trip(name):
    s = registry()[name]
    back = Scenario.from_json(s.to_json())
    assert back.to_dict() == s.to_dict()


def test_report_json_reparses_identically():
    r = run_scenario(get_scenario("remark-3.9"))
    text = emit_report(r)
    assert emit_report(run_scenario(get_scenario("remark-3.9"))) == text
    again = json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"
    assert again == text
    assert "wall_time" not in text
    assert "Remark 3.9" in report_table(r)


def test_non_finite_floats_serialize():
    r = run_scenario(get_scenario("remark-3.9"))
    r.ops[0]["result"]["extra"] = float("inf")
    assert json.loads(emit_report(r))["ops"][0]["result"]["extra"] == "inf"


def test_check_evaluation():
    res = {"a": {"b": [1.0, 2.0]}, "status": "Inconclusive"}
    assert evaluate_check(res, {"path": "a.b.1", "approx": 2.0, "tol": 1e-9})["status"] == "PASS"
    assert evaluate_check(res, {"path": "a.b", "length": 3})["status"] == "FAIL"
    assert evaluate_check(res, {"path": "status", "equals": "Holds"})["status"] == "INCONCLUSIVE"


def test_exit_codes(tmp_path, capsys):
    cfg = _write(tmp_path, PAIR)
    assert main(["defect", "--config", cfg, "--budget", "500"]) == 0
    assert main(["defect", "--config", cfg, "--psi", "bad", "--budget", "500"]) == 1
    assert main(["alt-defect", "--config", cfg, "--psi", "bad", "--budget", "500"]) == 0
    assert main(["norm", "--config", cfg, "--map", "nope"]) == 3
    assert main(["defect", "--config", str(tmp_path / "missing.json")]) == 3
    bad = _write(tmp_path, {"spaces": {"X": {"kind": "martian"}}}, "bad.json")
    assert main(["norm", "--config", bad]) == 3
    assert main(["scenario", "run", "no-such-scenario"]) == 3
    capsys.readouterr()


def test_inconclusive_exit_code(tmp_path, capsys):
    s = get_scenario("remark-3.14").to_dict()
    s["expected"] = {"pipeline": [{"path": "status", "equals": "Certified"}]}
    s["construction"]["ops"] = [op for op in s["construction"]["ops"] if op["id"] == "pipeline"]
    if not s["construction"]["ops"]:
        pytest.skip("scenario has no pipeline op")
    cfg = _write(tmp_path, s)
    assert main(["scenario", "run", "--config", cfg]) == 2
    capsys.readouterr()


def test_scenario_run_report_file_and_dump(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["scenario", "run", "example-3.6", "--report", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["anchor"] == "Example 3.6" and doc["verdict"] == "PASS"
    capsys.readouterr()
    assert main(["dump", "example-3.6"]) == 0
    dumped = capsys.readouterr().out
    cfg = _write(tmp_path, json.loads(dumped), "dumped.json")
    assert main(["scenario", "run", "--config", cfg, "--format", "table"]) == 0
    assert "Example 3.6" in capsys.readouterr().out


def test_scenario_list(capsys):
    assert main(["scenario", "list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == len(registry())
