import csv
import json
import math
import os
import subprocess
import sys

import pytest

from uncbench.cli import main
from uncbench.runs import RunRecord, ScenarioSpec, SearchSpec, SweepSpec
from uncbench.errors import SpecError

SPIN_SCENARIO = {"schema_version": 1, "model": "spin", "params": {"j": 0.5}, "pair": ["l_x", "l_y"],
                 "state": {"kind": "bloch", "theta": 0.0, "phi": 0.0}}
GROUND_SCENARIO = {"model": "oscillator", "params": {"n_trunc": 16}, "pair": ["e_kin", "x"],
                   "state": {"kind": "fock", "k": 0}}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_report(tmp_path, capsys):
    spec = write(tmp_path, "s.json", GROUND_SCENARIO)
    out = tmp_path / "r.json"
    assert main(["report", spec, "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    record = RunRecord.from_dict(doc)
    assert record.to_dict() == doc
    ref = record.report.get("refined")
    assert ref.lhs == pytest.approx(1 / 16) and ref.saturated
    assert record.report.get("robertson").rhs == 0.0
    assert main(["report", spec]) == 0
    assert json.loads(capsys.readouterr().out)["spec"] == doc["spec"]


def test_sweep_theta(tmp_path):
    doc = {"scenario": {**SPIN_SCENARIO, "evaluate": ["triple"]},
           "sweep": {"param": "state.theta", "start": 0, "stop": math.pi, "step": math.pi / 64}}
    out = tmp_path / "sweep.csv"
    assert main(["sweep", write(tmp_path, "w.json", doc), "-o", str(out)]) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 65
    margins = [float(r["margin"]) for r in rows]
    assert min(margins) == pytest.approx(-1 / 256, abs=1e-9)
    assert margins.index(min(margins)) in (16, 48)
    assert {r["inequality"] for r in rows} == {"triple"}


def test_sweep_nan_for_undefined(tmp_path):
    doc = {"scenario": {**SPIN_SCENARIO, "evaluate": ["kinetic_position"]},
           "sweep": {"param": "state.theta", "start": 0, "stop": 1, "step": 0.5}}
    out = tmp_path / "sweep.csv"
    assert main(["sweep", write(tmp_path, "w.json", doc), "-o", str(out)]) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 3 and all(r["margin"] == "nan" for r in rows)


def test_sweep_integer_param(tmp_path):
    doc = {"scenario": {**GROUND_SCENARIO, "evaluate": ["robertson"]},
           "sweep": {"param": "state.k", "start": 0, "stop": 3, "step": 1}}
    out = tmp_path / "sweep.csv"
    assert main(["sweep", write(tmp_path, "w.json", doc), "-o", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 5


@pytest.mark.parametrize("sweep", [
    {"param": "state.theta", "start": 0, "stop": 1, "step": 0},
    {"param": "state.theta", "start": 1, "stop": 0, "step": 0.1},
    {"param": "state.kind", "start": 0, "stop": 1, "step": 0.1},
    [{"param": "state.theta", "start": 0, "stop": 1, "step": 0.1}],
])
def test_sweep_rejects(tmp_path, sweep):
    doc = {"scenario": SPIN_SCENARIO, "sweep": sweep}
    assert main(["sweep", write(tmp_path, "w.json", doc), "-o", str(tmp_path / "x.csv")]) == 2


@pytest.mark.parametrize("patch, field", [
    ({"pair": ["l_x", "p"]}, "pair[1]"),
    ({"model": "rotor"}, "model"),
    ({"params": {"j": "half"}}, "params.j"),
    ({"state": {"kind": "fock"}}, "state.kind"),
    ({"evaluate": ["nope"]}, "evaluate[0]"),
    ({"schema_version": 9}, "schema_version"),
    ({"extra": 1}, "extra"),
    ({"tolerances": {"saturation": -1}}, "tolerances.saturation"),
])
def test_scenario_spec_errors(tmp_path, capsys, patch, field):
    with pytest.raises(SpecError) as info:
        ScenarioSpec.from_dict({**SPIN_SCENARIO, **patch})
    assert info.value.field == field
    assert main(["report", write(tmp_path, "s.json", {**SPIN_SCENARIO, **patch})]) == 2
    assert field in capsys.readouterr().err


def test_input_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["report", str(bad)]) == 2
    assert main(["report", str(tmp_path / "missing.json")]) == 2
    assert main(["frobnicate"]) == 2


def test_search_violation_exit_code(tmp_path):
    doc = {"kind": "violation", "family": "spin_bloch", "inequality": "triple", "resolution": 16}
    out = tmp_path / "o.json"
    assert main(["search", write(tmp_path, "q.json", doc), "--seed", "0", "-o", str(out)]) == 1
    res = json.loads(out.read_text())
    assert res["violation"] and res["status"] == "violation_certified"
    assert res["result"]["best_value"] == pytest.approx(-1 / 256, abs=1e-9)
    doc["inequality"] = "robertson"
    assert main(["search", write(tmp_path, "q.json", doc), "--seed", "0", "-o", str(out)]) == 0


def test_search_requires_seed(tmp_path):
    doc = {"kind": "violation", "family": "spin_bloch", "inequality": "triple"}
    assert main(["search", write(tmp_path, "q.json", doc)]) == 2
    assert main(["search", write(tmp_path, "q.json", doc), "--seed", "-3"]) == 2


def test_search_saturation(tmp_path):
    doc = {"kind": "saturation", "model": "spin", "params": {"j": 0.5}, "pair": ["l_x", "l_y"],
           "seed": 2}
    out = tmp_path / "o.json"
    assert main(["search", write(tmp_path, "q.json", doc), "-o", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["status"] == "saturated" and res["search"]["seed"] == 2


def test_search_spec_errors():
    with pytest.raises(SpecError):
        SearchSpec.from_dict({"kind": "guess"})
    with pytest.raises(SpecError) as info:
        SearchSpec.from_dict({"kind": "violation", "family": "rotor", "inequality": "triple"})
    assert info.value.field == "family.id"
    with pytest.raises(SpecError) as info:
        SearchSpec.from_dict({"kind": "violation", "family": "spin_bloch", "inequality": "x"})
    assert info.value.field == "inequality"


def test_roundtrips():
    spec = ScenarioSpec.from_dict(SPIN_SCENARIO)
    assert ScenarioSpec.from_dict(spec.to_dict()) == spec
    sweep = SweepSpec.from_dict({"scenario": SPIN_SCENARIO,
                                 "sweep": {"param": "state.phi", "start": 0, "stop": 1, "step": 0.25}})
    assert SweepSpec.from_dict(sweep.to_dict()) == sweep
    assert len(sweep.values()) == 5
    q = SearchSpec.from_dict({"kind": "violation", "family": "spin_bloch", "inequality": "refined",
                              "seed": 4})
    assert SearchSpec.from_dict(q.to_dict()) == q


def test_outputs_byte_identical(tmp_path):
    sweep = {"scenario": {**SPIN_SCENARIO, "evaluate": ["refined", "triple"]},
             "sweep": {"param": "state.theta", "start": 0, "stop": 3, "step": 0.1}}
    search = {"kind": "violation", "family": "spin_bloch", "inequality": "refined", "resolution": 16}
    ws, wq = write(tmp_path, "w.json", sweep), write(tmp_path, "q.json", search)
    texts = []
    for i in range(2):
        main(["sweep", ws, "-o", str(tmp_path / f"s{i}.csv")])
        main(["search", wq, "--seed", "5", "-o", str(tmp_path / f"q{i}.json")])
        texts.append(((tmp_path / f"s{i}.csv").read_bytes(), (tmp_path / f"q{i}.json").read_bytes()))
    assert texts[0] == texts[1]


@pytest.mark.parametrize("value", ["-1", "0", "abc", "inf"])
def test_bad_tol_scale(value):
    env = {**os.environ, "UNCBENCH_TOL_SCALE": value}
    proc = subprocess.run([sys.executable, "-m", "uncbench.cli", "selftest"], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "UNCBENCH_TOL_SCALE" in proc.stderr
