import json
import math

import pytest

from paving_lab.cli import main
from paving_lab.errors import PavingLabError, SchemaVersionError
from paving_lab.experiments import (
    REGISTRY,
    ExperimentConfig,
    lookup,
    resolve_matrix,
    run_experiment,
    verify_report,
)

E2_SMALL = {"singer_q": [2, 3], "pairs": [[276, 23]], "scan_q": [5], "paley_orders": [6], "samples": 2000}


def run(tmp_path, name, params, sub="a", **kw):
    return run_experiment(ExperimentConfig(name=name, params=params, out_dir=str(tmp_path / sub), **kw))


def test_registry_and_lookup():
    assert list(REGISTRY) == ["E1", "E2", "E3", "E4", "E5"]
    assert lookup("paving-bounds").key == "E1"
    with pytest.raises(PavingLabError) as exc:
        lookup("E9")
    assert "E1 paving-bounds" in str(exc.value) and "E5" in str(exc.value)


def test_resolve_matrix_refs():
    assert resolve_matrix("paley-reflection:5").shape == (6, 6)
    assert resolve_matrix("harmonic:7:0,1,3").shape == (7, 7)
    assert resolve_matrix("dilation:random-contraction:3:1").shape == (6, 6)
    with pytest.raises(PavingLabError):
        resolve_matrix("nonsense:1")


def test_e1_single_order(tmp_path):
    rep = run(tmp_path, "E1", {"orders": [6]})
    rows = {r["row_id"]: r for r in rep.rows}
    assert rows["n6-reflection"]["certificate"] == pytest.approx(math.sqrt(2 / 5))
    assert rows["n6-reflection"]["strategy"] == "exhaustive"
    assert rep.passed and rep.exit_code == 0
    assert verify_report(rep.path).ok


def test_e2_small(tmp_path):
    rep = run(tmp_path, "E2", E2_SMALL)
    rows = {r["row_id"]: r for r in rep.rows}
    assert rows["pair-276-23"]["is_counterexample"]
    assert not rows["singer-q2"]["is_counterexample"]
    assert rows["scan-q5"]["min_norm"] > 12 / 31
    assert rows["paley-n6"]["min_norm"] == pytest.approx(0.8944271909999157, abs=1e-12)
    assert rep.passed
    assert verify_report(rep.path).ok


def test_e5_roundtrips(tmp_path):
    rep = run(tmp_path, "E5", {"count": 5, "n_max": 4})
    assert len(rep.rows) == 5 and rep.passed
    for r in rep.rows:
        assert r["roundtrip_defect"] <= 1e-9
    assert verify_report(rep.path).ok


def test_rerun_is_byte_identical_across_threads(tmp_path):
    a = run(tmp_path, "E2", E2_SMALL, "one", threads=1)
    b = run(tmp_path, "E2", E2_SMALL, "two", threads=2)
    assert (a.path / "rows.csv").read_bytes() == (b.path / "rows.csv").read_bytes()
    sa = json.loads((a.path / "summary.json").read_text())
    sb = json.loads((b.path / "summary.json").read_text())
    assert sa == sb


def test_verify_detects_mutated_value(tmp_path):
    rep = run(tmp_path, "E1", {"orders": [6]})
    csv_path = rep.path / "rows.csv"
    lines = csv_path.read_text().splitlines()
    cells = lines[1].split(",")
    cells[8] = repr(float(cells[8]) + 0.01)
    lines[1] = ",".join(cells)
    csv_path.write_text("\n".join(lines) + "\n")
    res = verify_report(rep.path)
    assert not res.ok
    assert any("n6-reflection" in p for p in res.problems)


def test_verify_rejects_other_schema(tmp_path):
    rep = run(tmp_path, "E1", {"orders": [6]})
    p = rep.path / "summary.json"
    obj = json.loads(p.read_text())
    obj["schema"] = 2
    p.write_text(json.dumps(obj))
    with pytest.raises(SchemaVersionError, match="schema"):
        verify_report(rep.path)


def test_verify_rejects_renamed_column(tmp_path):
    rep = run(tmp_path, "E1", {"orders": [6]})
    p = rep.path / "rows.csv"
    p.write_text(p.read_text().replace("epsilon", "eps", 1))
    with pytest.raises(SchemaVersionError, match="epsilon"):
        verify_report(rep.path)


def test_budget_marks_report_incomplete(tmp_path, monkeypatch):
    monkeypatch.setenv("PAVING_LAB_BUDGET", "symmetry_max_n=4")
    rep = run(tmp_path, "E2", {**E2_SMALL, "scan_q": []})
    assert not rep.complete and rep.exit_code == 3
    summary = json.loads((rep.path / "summary.json").read_text())
    assert summary["complete"] is False and summary["incomplete"]


# --- command line ------------------------------------------------------------


def test_cli_experiment_list(capsys):
    assert main(["experiment", "list"]) == 0
    assert "paving-bounds" in capsys.readouterr().out


def test_cli_experiment_run_and_verify(tmp_path, capsys):
    out = tmp_path / "e1"
    assert main(["experiment", "run", "E1", "--param", "orders=[6]", "--out-dir", str(out)]) == 0
    assert main(["experiment", "verify", str(out)]) == 0
    assert capsys.readouterr().out.strip().endswith("pass")


def test_cli_unknown_experiment(tmp_path, capsys):
    assert main(["experiment", "run", "nope", "--out-dir", str(tmp_path)]) == 2
    assert "registry" in capsys.readouterr().err


def test_cli_pave_json_and_csv(tmp_path, capsys):
    src = tmp_path / "m.json"
    assert main(["frames", "conference", "--q", "5", "--gram", "--out-dir", str(tmp_path)]) == 0
    src.write_text((tmp_path / "frame.json").read_text())
    capsys.readouterr()
    assert main(["pave", "--input", str(src), "--r", "2"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["epsilon"] == pytest.approx(0.9472135954999579, abs=1e-12)
    assert main(["--format", "csv", "pave", "--input", str(src), "--strategy", "local", "--seed", "3"]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header == "n,r,strategy,epsilon,seconds" and row.startswith("6,2,local,")


def test_cli_pave_budget_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PAVING_LAB_BUDGET", "pave_max_n=4")
    src = tmp_path / "m.json"
    main(["frames", "conference", "--q", "5", "--gram", "--out-dir", str(tmp_path)])
    src.write_text((tmp_path / "frame.json").read_text())
    assert main(["pave", "--input", str(src)]) == 3
    assert "budget" in capsys.readouterr().err


def test_cli_symmetry_scan(tmp_path, capsys):
    assert main(["frames", "harmonic", "--n", "7", "--k", "3", "--out-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    assert main(["symmetry-scan", "--gram", str(tmp_path / "frame.json")]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["n"] == 7 and obj["k"] == 3 and obj["scanned"] == 2 ** 6
    # (7,3) has no integer certificate, and a symmetry meeting 2k/n exists
    assert obj["is_counterexample"] is False and (obj["lhs"], obj["rhs"]) == (98, 216)
    assert obj["min_norm"] <= obj["threshold"]


def test_cli_frames_and_laurent(tmp_path, capsys):
    assert main(["frames", "difference-set", "--n", "13", "--k", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["elements"] == [0, 1, 3, 9]
    assert main(["frames", "difference-set", "--n", "8", "--k", "2"]) == 1
    capsys.readouterr()
    assert main(["laurent", "report", "--stage", "3", "--Ns", "4", "8"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["measure"] == "1/2" and obj["bidensity"]["certified"]
    assert all(r["norm"] <= 1 + 1e-9 and r["diag_max"] == 0 for r in obj["truncations"])
    out = tmp_path / "t.json"
    assert main(["laurent", "gen", "--stage", "2", "--N", "3", "--out", str(out)]) == 0
    assert out.exists()
