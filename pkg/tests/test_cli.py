"""Command-line front end: JSON contracts, exit codes, determinism."""

import json

import numpy as np
import pytest

from caliber.calib import Plane
from caliber.cli import run
from caliber.exterior import form_to_json
from caliber.model import build_hyperkahler_cone, make_W_theta
from caliber.suites import coverage_table


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_forms_list_json(capsys):
    code, out, _ = invoke(capsys, "forms", "list", "--space", "cone", "--n", "1")
    assert code == 0
    data = json.loads(out)
    names = {f["name"] for f in data["forms"]}
    assert {"omega1", "sigma1", "upsilon1", "theta_I4", "Phi2", "Lambda"} <= names
    entry = next(f for f in data["forms"] if f["name"] == "sigma1")
    assert entry["scalar_kind"] == "complex" and entry["degree"] == 2


def test_forms_dump_schema(capsys):
    code, out, _ = invoke(capsys, "forms", "dump", "--name", "omega1", "--n", "1")
    assert code == 0
    data = json.loads(out)
    assert data["dim"] == 8 and data["degree"] == 2
    assert all(t["indices"] == sorted(t["indices"]) for t in data["terms"])
    assert data["space"] == "cone"


def test_comass_named_form(capsys):
    code, out, _ = invoke(capsys, "comass", "--form", "theta_I4", "--n", "1",
                          "--restarts", "60", "--seed", "7")
    assert code == 0
    data = json.loads(out)
    assert abs(data["value"] - 1.0) <= 1e-6
    assert data["restarts_used"] == 60
    assert 0.0 <= data["converged_fraction"] <= 1.0


def test_comass_form_file(tmp_path, capsys):
    f = build_hyperkahler_cone(1).form("omega1").to_float()
    path = tmp_path / "form.json"
    path.write_text(json.dumps(form_to_json(f)))
    code, out, _ = invoke(capsys, "comass", "--form", str(path), "--restarts", "40", "--seed", "0")
    assert code == 0
    assert abs(json.loads(out)["value"] - 1.0) <= 1e-6


def test_comass_unknown_form_exits_2(capsys):
    code, _, err = invoke(capsys, "comass", "--form", "nope", "--n", "1")
    assert code == 2
    assert "nope" in err


def test_comass_explore_envelope(capsys):
    code, out, _ = invoke(capsys, "comass", "--form", "theta_I4", "--n", "1",
                          "--restarts", "40", "--seed", "1", "--explore-envelope")
    assert code == 0
    counts = json.loads(out)["envelope_report"]["quaternionic_span_dim_counts"]
    assert sum(counts.values()) > 0
    assert set(counts) == {"8"}  # maximizers sit inside quaternionic 2-planes


def test_classify_quaternion_line(tmp_path, capsys):
    plane = Plane.from_vectors(np.eye(8)[:4])
    path = tmp_path / "plane.json"
    path.write_text(json.dumps(plane.to_json()))
    code, out, _ = invoke(capsys, "classify", "--space", "cone", "--n", "1", "--plane", str(path))
    assert code == 0
    data = json.loads(out)
    assert data["flags"]["cayley_Phi2"]["flag"] is True


def test_normalform_subcommand(tmp_path, capsys):
    plane = make_W_theta(1, 0.3)
    path = tmp_path / "plane.json"
    path.write_text(json.dumps(plane.to_json()))
    code, out, _ = invoke(capsys, "normalform", "--n", "1", "--plane", str(path))
    assert code == 0
    assert json.loads(out)["theta"] == pytest.approx(0.3, abs=1e-10)


def test_normalform_rejects_uncalibrated(tmp_path, capsys):
    path = tmp_path / "plane.json"
    path.write_text(json.dumps(Plane.from_vectors(np.eye(6)[:3]).to_json()))
    code, _, err = invoke(capsys, "normalform", "--n", "1", "--plane", str(path))
    assert code == 2 and "calibrated" in err


def test_verify_pass_and_exit_codes(capsys):
    code, out, _ = invoke(capsys, "verify", "--suite", "cones", "--n", "1", "--no-timing")
    assert code == 0
    data = json.loads(out)
    assert data["overall"] == "pass"
    assert all(c["status"] == "pass" for c in data["checks"])
    assert set(data["coverage"]) == {"identities", "cones", "calibrations", "propositions", "normalform"}


def test_verify_unsupported_n_exits_2(capsys):
    code, _, err = invoke(capsys, "verify", "--suite", "identities", "--n", "3")
    assert code == 2 and "supports" in err


def test_unknown_flag_exits_2(capsys):
    code = run(["comass", "--form", "omega1", "--bogus"])
    assert code == 2


def test_verify_byte_identical_reruns(capsys):
    args = ["verify", "--suite", "normalform", "--n", "1", "--samples", "5",
            "--seed", "3", "--no-timing"]
    code1, out1, _ = invoke(capsys, *args)
    code2, out2, _ = invoke(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_verify_check_ids_sorted(capsys):
    _, out, _ = invoke(capsys, "verify", "--suite", "cones", "--n", "1", "--no-timing")
    ids = [c["id"] for c in json.loads(out)["checks"]]
    assert ids == sorted(ids)


def test_phase_scan_subcommand(capsys):
    code, out, _ = invoke(capsys, "verify", "--suite", "phase-scan", "--n", "1", "--restarts", "40")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 9
    assert rows[0]["max_value"] == pytest.approx(1.0, abs=1e-6)


def test_coverage_table_stable():
    table = coverage_table()
    assert table == coverage_table()
    assert all(ids == sorted(ids) for ids in table.values())


def test_worker_count_env_does_not_change_results(capsys, monkeypatch):
    args = ["verify", "--suite", "cones", "--n", "1", "--no-timing"]
    _, serial, _ = invoke(capsys, *args)
    monkeypatch.setenv("CALIBER_THREADS", "4")
    _, threaded, _ = invoke(capsys, *args)
    assert serial == threaded
