import io
import json
from types import SimpleNamespace

import pytest

from eqpres.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _example_file(capsys, tmp_path, name, n):
    code, out = _run(capsys, "example", name, str(n))
    assert code == 0
    path = tmp_path / f"{name}-{n}.json"
    path.write_text(out, encoding="utf-8")
    return path


def test_example_prints_presentation_json(capsys):
    code, out = _run(capsys, "example", "z2sum", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["format_version"] == "equivariant-presentation-v1"
    assert payload["name"] == "z2sum-2"


def test_verify_from_stdin(capsys, monkeypatch):
    _, text = _run(capsys, "example", "star", "3")
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out = _run(capsys, "verify", "-", "--expect-order", "24")
    response = json.loads(out)
    assert code == 0
    assert response["status"] == "success"
    assert response["command"] == "verify"
    assert response["data"]["realized_order"] == 24
    assert response["metadata"]["order_matches"] is True


def test_verify_with_wrong_expected_order(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "star", 4)
    code, out = _run(capsys, "verify", str(path), "--expect-order", "121")
    response = json.loads(out)
    assert code == 1
    assert response["status"] == "failure"
    assert response["data"]["realized_order"] == 120


def test_deweak_then_trace_check(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "hyperoct", 3)
    finite = tmp_path / "finite.json"
    certs = tmp_path / "certs"
    code, out = _run(capsys, "deweak", str(path), "-o", str(finite), "--certs", str(certs))
    summary = json.loads(out)["data"]
    assert code == 0
    assert summary["num_traces"] == summary["valid_traces"] == 9
    assert summary["realized_order"] == summary["source_order"] == 8
    assert summary["order_matches"] is True
    assert json.loads(finite.read_text(encoding="utf-8"))["mode"] == "finite"

    code, out = _run(capsys, "trace-check", str(finite), str(certs))
    assert code == 0
    assert json.loads(out)["data"]["passed"] is True

    code, out = _run(capsys, "verify", str(finite), "--expect-order", "8")
    assert code == 0


def test_h2_reports_schur_multiplier(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "z2sum", 3)
    code, out = _run(capsys, "h2", str(path), "--oracle")
    data = json.loads(out)["data"]
    assert code == 0
    assert data["h2_invariant_factors"] == [2, 2, 2]
    assert data["gamma_generation"]["rank"] == 1
    assert data["oracle"]["agrees"] is True


def test_h2_with_trivial_gamma(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "z2sum", 3)
    code, out = _run(capsys, "h2", str(path), "--trivial-gamma")
    response = json.loads(out)
    assert code == 0
    assert response["data"]["gamma_generation"]["rank"] == 3
    assert response["metadata"]["trivial_gamma"] is True


def test_output_is_deterministic(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "star", 3)
    _, first = _run(capsys, "h2", str(path))
    _, second = _run(capsys, "h2", str(path))
    assert first == second


def test_abelianize_and_orbits(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "hyperpair", 3)
    code, out = _run(capsys, "abelianize", str(path))
    assert code == 0
    assert json.loads(out)["data"]["free_rank"] == 0

    code, out = _run(capsys, "orbits", str(path))
    data = json.loads(out)["data"]
    assert code == 0
    assert data["gamma_order"] == 48
    assert [orbit["domain_size"] for orbit in data["orbits"]] == [3, 3]
    assert data["orbits"][1]["symbols"] == ["p.0", "p.1", "p.2"]


def test_missing_file_is_an_error_envelope(capsys, tmp_path):
    code, out = _run(capsys, "verify", str(tmp_path / "absent.json"))
    response = json.loads(out)
    assert code == 2
    assert response["status"] == "error"
    assert response["error"]["code"] == "PRESENTATION_FILE_INVALID"
    assert response["error"]["retryable"] is False


def test_coset_cap_exit_code(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "star", 4)
    code, out = _run(capsys, "verify", str(path), "--max-cosets", "10")
    response = json.loads(out)
    assert code == 3
    assert response["error"]["code"] == "CAP_EXCEEDED"
    assert response["error"]["retryable"] is True


def test_deweak_rejects_finite_presentation(capsys, tmp_path):
    path = _example_file(capsys, tmp_path, "z2sum", 2)
    code, out = _run(capsys, "deweak", str(path), "-o", str(tmp_path / "out.json"))
    assert code == 2
    assert json.loads(out)["error"]["code"] == "MODE_MISMATCH"


def test_unknown_example_name_is_rejected_by_parser():
    with pytest.raises(SystemExit):
        main(["example", "nosuch", "2"])


def test_deweak_fails_when_output_order_differs(capsys, tmp_path, monkeypatch, caplog):
    path = _example_file(capsys, tmp_path, "hyperoct", 2)
    monkeypatch.setattr("eqpres.cli.realize", lambda ep, max_cosets: SimpleNamespace(order=8))
    code, out = _run(capsys, "deweak", str(path), "-o", str(tmp_path / "finite.json"))
    response = json.loads(out)
    assert code == 1
    assert response["status"] == "failure"
    assert response["data"]["realized_order"] == 8
    assert response["data"]["source_order"] == 4
    assert response["data"]["order_matches"] is False
    assert "realizes order 8" in caplog.text
