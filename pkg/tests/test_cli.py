"""Tests for the command-line interface: exit codes and output shapes."""

import csv
import io
import json

import pytest

import oracles
from ringhopf.cli import EXIT_ERROR, EXIT_FOUND, EXIT_NOT_FOUND, main
from ringhopf.model import AdjacencyMatrix, AdmissibleOdeFamily, RingParams, save


@pytest.fixture
def reference_ring_file(tmp_path):
    path = tmp_path / "reference.json"
    save(oracles.REFERENCE_RING, path)
    return str(path)


@pytest.fixture
def stable_ring_file(tmp_path):
    path = tmp_path / "stable.json"
    save(RingParams(3, (-1.0, -2.0, -3.0), (0.5, 0.5, 0.5)), path)
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_hopf_ring_found(capsys, reference_ring_file):
    code, out, _ = run(capsys, ["analyze", reference_ring_file])
    assert code == EXIT_FOUND
    doc = json.loads(out)
    assert doc["hopf"]["is_hopf_point"]
    assert doc["imaginary_pair"]["omega"] == pytest.approx(1.0, abs=1e-9)
    assert doc["phases"]["case_label"] == "B"


def test_analyze_stable_ring_not_found(capsys, stable_ring_file):
    code, out, _ = run(capsys, ["analyze", stable_ring_file])
    assert code == EXIT_NOT_FOUND
    doc = json.loads(out)
    assert doc["imaginary_pair"]["omega"] is None
    assert "phases" not in doc


def test_analyze_exact_b3(capsys, tmp_path):
    path = tmp_path / "near.json"
    save(RingParams(3, (1.0, -2.0, -3.0), (1.0, 1.0, -9.7)), path)
    code, out, _ = run(capsys, ["analyze", str(path), "--exact-b3"])
    assert code == EXIT_FOUND
    doc = json.loads(out)
    assert doc["ring"]["b"][2] == pytest.approx(-10.0)


def test_analyze_missing_file_errors(capsys):
    code, _, err = run(capsys, ["analyze", "/nonexistent/ring.json"])
    assert code == EXIT_ERROR
    assert "error" in err


def test_analyze_malformed_json_errors(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, ["analyze", str(path)])
    assert code == EXIT_ERROR
    assert "error" in err


def test_tables_text(capsys):
    code, out, _ = run(capsys, ["tables"])
    assert code == EXIT_FOUND
    assert "Case A, omega > 0" in out
    assert "Case C, omega < 0" in out


def test_tables_csv_shape(capsys):
    code, out, _ = run(capsys, ["tables", "--format", "csv"])
    assert code == EXIT_FOUND
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:5] == ["case", "omega_sign", "b1", "b2", "b3"]
    assert len(rows) == 25  # header + 3 cases * 2 signs * 4 patterns


def test_tables_discrepancy_column(capsys):
    code, out, _ = run(
        capsys, ["tables", "--format", "csv", "--discrepancies", "--omega", "pos"]
    )
    assert code == EXIT_FOUND
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][-1] == "discrepancy"
    flagged = [r for r in rows[1:] if r[-1] == "yes"]
    assert len(flagged) == 2  # the (+,+,-) rows of Cases B and C


def test_phases_with_spectral_omega(capsys, reference_ring_file):
    code, out, _ = run(capsys, ["phases", reference_ring_file])
    assert code == EXIT_FOUND
    doc = json.loads(out)
    assert doc["theta"][0] == pytest.approx(5 * 3.141592653589793 / 4, abs=1e-9)


def test_phases_not_found_without_pair(capsys, stable_ring_file):
    code, _, _ = run(capsys, ["phases", stable_ring_file])
    assert code == EXIT_NOT_FOUND


def test_phases_force_override(capsys, reference_ring_file):
    code, _, err = run(capsys, ["phases", reference_ring_file, "--omega", "2.0"])
    assert code == EXIT_ERROR
    code, out, _ = run(
        capsys, ["phases", reference_ring_file, "--omega", "2.0", "--force"]
    )
    assert code == EXIT_FOUND
    assert len(json.loads(out)["theta"]) == 3


def test_perturb_double_ring(capsys, tmp_path):
    path = tmp_path / "double.json"
    save(RingParams(3, (0.0, 0.0, 3.0), (1.0, 2.0, -2.0)), path)
    code, out, _ = run(capsys, ["perturb", str(path), "--epsilon", "1e-3"])
    assert code == EXIT_FOUND
    doc = json.loads(out)
    assert 0.0 < doc["delta"] <= 1e-3
    assert doc["original"]["a"] == doc["perturbed"]["a"]
    assert doc["forbidden"]["values"]


def test_perturb_with_kmax(capsys, reference_ring_file):
    code, out, _ = run(capsys, ["perturb", reference_ring_file, "--kmax", "4"])
    assert code == EXIT_FOUND
    doc = json.loads(out)
    assert doc["delta"] == 0.0


def test_spectrum_ring(capsys, reference_ring_file):
    code, out, _ = run(capsys, ["spectrum", reference_ring_file])
    assert code == EXIT_FOUND
    doc = json.loads(out)
    assert len(doc["eigenvalues"]) == 3
    assert doc["omega"] == pytest.approx(1.0, abs=1e-9)


def test_spectrum_adjacency_with_resonances(capsys, tmp_path):
    path = tmp_path / "adj6.json"
    save(AdjacencyMatrix(6, oracles.ADJ_6), path)
    code, out, _ = run(
        capsys, ["spectrum", str(path), "--adjacency", "--kmax", "5"]
    )
    assert code == EXIT_FOUND
    doc = json.loads(out)
    assert len(doc["eigenvalues"]) == 6
    assert any(f["k"] == 2 for f in doc["resonances"])


def test_simulate_no_cycle_not_found(capsys, tmp_path):
    path = tmp_path / "family.json"
    save(AdmissibleOdeFamily(oracles.REFERENCE_RING), path)
    code, out, _ = run(
        capsys,
        ["simulate", str(path), "--lambda", "-0.1", "--settle", "60"],
    )
    assert code == EXIT_NOT_FOUND
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[1][0] == "-0.1"
    assert rows[1][-1] != ""


def test_simulate_try_other_side(capsys, tmp_path):
    path = tmp_path / "family.json"
    save(AdmissibleOdeFamily(oracles.REFERENCE_RING), path)
    code, out, _ = run(
        capsys,
        [
            "simulate",
            str(path),
            "--lambda",
            "-0.1",
            "--settle",
            "120",
            "--try-other-side",
        ],
    )
    assert code == EXIT_FOUND
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[1][0] == "0.1"
    assert float(rows[1][1]) == pytest.approx(6.283, rel=0.2)


def test_output_file_option(capsys, reference_ring_file, tmp_path):
    out_path = tmp_path / "report.json"
    code, out, _ = run(capsys, ["analyze", reference_ring_file, "--out", str(out_path)])
    assert code == EXIT_FOUND
    assert out == ""
    doc = json.loads(out_path.read_text())
    assert doc["hopf"]["is_hopf_point"]


def test_log_env_variable(capsys, reference_ring_file, monkeypatch):
    monkeypatch.setenv("RINGHOPF_LOG", "DEBUG")
    code, _, _ = run(capsys, ["spectrum", reference_ring_file])
    assert code == EXIT_FOUND
