import json

import pytest

from mlgnet.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_LIMITS, EXIT_OK, main
from mlgnet.io import instance_to_dict

from conftest import FIXTURES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", FIXTURES / "I1.json")
    assert code == EXIT_OK
    assert out.startswith("ok: I1-ring5: 5 nodes, 5 links, 3 LSR candidates, 2 demands")


def test_validate_reports_location(capsys, tmp_path, I1):
    doc = instance_to_dict(I1)
    doc["demands"][0]["bandwidth"] = -1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "validate", path)
    assert code == EXIT_INPUT
    assert "demands[0].bandwidth" in err


def test_missing_file_and_bad_flags(capsys, tmp_path):
    code, _, err = run(capsys, "solve", tmp_path / "nope.json")
    assert code == EXIT_INPUT
    assert "cannot read" in err
    assert run(capsys, "solve", FIXTURES / "I1.json", "--mode", "magic")[0] == EXIT_INPUT


def test_synth_statistics(capsys):
    code, out, _ = run(capsys, "synth", FIXTURES / "I1.json")
    assert code == EXIT_OK
    assert "layers: 4" in out
    assert "layer 1 (mpls): 3 vertices, 3 edges" in out
    assert "logical edges with 2 candidate path(s): 3" in out


@pytest.mark.parametrize("mode,cost", [("greedy", 70), ("ls", 70), ("exact", 69)])
def test_solve_modes(capsys, mode, cost):
    code, out, _ = run(capsys, "solve", FIXTURES / "I1.json", "--mode", mode, "--format", "structured")
    assert code == EXIT_OK
    assert json.loads(out)["cost"]["total"] == cost


def test_solve_with_gap_and_output_file(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, out, _ = run(capsys, "solve", FIXTURES / "I1.json", "--gap", "--out", target)
    assert code == EXIT_OK and out == ""
    text = target.read_text()
    assert "optimality gap: 1 (1.4493%) vs exact 69" in text


def test_dot_output(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "I2.json", "--format", "dot")
    assert code == EXIT_OK
    assert out.startswith("graph ")


def test_infeasible_exit_code(capsys):
    code, out, err = run(capsys, "solve", FIXTURES / "I3.json")
    assert code == EXIT_INFEASIBLE
    assert out == ""
    assert err.startswith("infeasible (proven): demand big")


def test_limits_exit_code(capsys, tmp_path, I1):
    doc = instance_to_dict(I1)
    doc["policy"]["k_paths"] = 4
    path = tmp_path / "wide.json"
    path.write_text(json.dumps(doc))
    assert run(capsys, "solve", path, "--mode", "exact")[0] == EXIT_LIMITS
    assert run(capsys, "compare", path)[0] == EXIT_LIMITS
    assert run(capsys, "solve", path, "--mode", "greedy")[0] == EXIT_OK


def test_compare_table(capsys):
    code, out, _ = run(capsys, "compare", FIXTURES / "I1.json")
    assert code == EXIT_OK
    rows = {line.split()[0]: line.split()[1:] for line in out.splitlines()[1:]}
    assert rows["exact"][:2] == ["69", "0"]
    assert rows["greedy"][:2] == ["70", "1"]


def test_solver_section_of_file_is_the_default(capsys, tmp_path, I1):
    doc = instance_to_dict(I1)
    doc["solver"]["mode"] = "exact"
    path = tmp_path / "exact.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "solve", path, "--format", "structured")
    assert json.loads(out)["solver"]["mode"] == "exact"
    code, out, _ = run(capsys, "solve", path, "--format", "structured", "--mode", "greedy")
    assert json.loads(out)["solver"]["mode"] == "greedy"


def test_log_level_env(capsys, monkeypatch):
    monkeypatch.setenv("MLG_LOG_LEVEL", "loud")
    assert run(capsys, "validate", FIXTURES / "I2.json")[0] == EXIT_OK
