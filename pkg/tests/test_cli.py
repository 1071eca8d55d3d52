import json
import math

import pytest
from typer.testing import CliRunner

from exclusion_codes.cli import app
from exclusion_codes.utils.jsonio import bundled_protocol_path

runner = CliRunner()
SQRT2 = math.sqrt(2)


def _json_payload(output: str):
    """First JSON object in the output; log lines may surround it."""
    payload, _ = json.JSONDecoder().raw_decode(output[output.index("{\n"):])
    return payload


def test_classical_rec():
    result = runner.invoke(app, ["classical", "--n", "2", "--m", "3"])
    assert result.exit_code == 0
    assert "8/9" in result.output
    assert "512 partitions" in result.output


def test_classical_rac():
    result = runner.invoke(app, ["classical", "--m", "3", "--task", "rac"])
    assert result.exit_code == 0
    assert "5/9" in result.output


def test_classical_budget_exit_code():
    result = runner.invoke(app, ["classical", "--m", "6"])
    assert result.exit_code == 2
    assert "budget" in result.output


def test_eval_bundled_rec23():
    result = runner.invoke(app, ["eval", "rec23"])
    assert result.exit_code == 0
    assert f"{(7 + SQRT2) / 9:.12f}" in result.output


def test_eval_missing_file(tmp_path):
    result = runner.invoke(app, ["eval", str(tmp_path / "missing.json")])
    assert result.exit_code == 1


def test_eval_task_override():
    result = runner.invoke(app, ["eval", "trine", "--task", "rac"])
    assert result.exit_code == 0
    assert "RAC" in result.output


def test_commmat_d3():
    result = runner.invoke(app, ["commmat", "--preset", "d3", "--bounds"])
    assert result.exit_code == 0
    assert "rank_+ ∈ [9, 9] (exact)" in result.output
    assert "psd certificate k=4 verified" in result.output


def test_commmat_weights_file(tmp_path):
    weights = tmp_path / "q.txt"
    weights.write_text("0.3333333333333333,0.3333333333333333,0.3333333333333334\n")
    result = runner.invoke(app, ["commmat", "--preset", "a3", "--q", str(weights)])
    assert result.exit_code == 0
    assert "psd rank ≥ 2.0000000000" in result.output


def test_commmat_needs_a_source():
    result = runner.invoke(app, ["commmat"])
    assert result.exit_code == 1


def test_quantum_json():
    result = runner.invoke(app, ["quantum", "--restarts", "4", "--seed", "1", "--json"])
    assert result.exit_code == 0
    payload = _json_payload(result.output)
    assert payload["result"]["restarts_used"] == 4
    assert payload["exclusion"] == pytest.approx(2 / 3 + payload["f"] / 36)


def test_quantum_rejects_other_alphabets():
    result = runner.invoke(app, ["quantum", "--m", "4"])
    assert result.exit_code == 1


def test_reproduce_json():
    result = runner.invoke(app, ["reproduce", "--json"])
    assert result.exit_code == 0
    payload = _json_payload(result.output)
    assert all(entry["pass"] for entry in payload["entries"])


def test_eval_incomplete_povm(tmp_path):
    data = json.loads(bundled_protocol_path("trine").read_text())
    data["measurements"][0][0] = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    path = tmp_path / "incomplete.json"
    path.write_text(json.dumps(data))
    result = runner.invoke(app, ["eval", str(path)])
    assert result.exit_code == 1
    assert "effects sum deviates from identity by" in result.output


def test_quantum_single_restart_below_optimum():
    result = runner.invoke(app, ["quantum", "--restarts", "1", "--seed", "0", "--json"])
    assert result.exit_code == 0
    assert _json_payload(result.output)["f"] <= 4 * (1 + SQRT2) + 1e-9


def test_commmat_a3_bounds():
    result = runner.invoke(app, ["commmat", "--preset", "a3", "--bounds"])
    assert result.exit_code == 0
    assert "rank: 3" in result.output
    assert "rank_+ ∈ [3, 3] (exact)" in result.output
    assert "psd rank ≥ 2.0000000000" in result.output
