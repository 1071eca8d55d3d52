import asyncio
import json
import math
from fractions import Fraction
from pathlib import Path

import pytest

from exclusion_codes.agents.base import AgentConfig
from exclusion_codes.agents.classical import ClassicalSearchAgent
from exclusion_codes.agents.commmat import CommMatrixAgent
from exclusion_codes.agents.evaluator import ProtocolEvaluatorAgent
from exclusion_codes.agents.quantum import QuantumOptimizerAgent
from exclusion_codes.agents.reporter import (
    ReproductionAgent,
    exact_entry,
    float_entry,
    rank_entry,
    report_json,
)
from exclusion_codes.models.reports import ReportFormat
from exclusion_codes.utils.jsonio import bundled_protocol_path

SQRT2 = math.sqrt(2)


def run(agent, input_data):
    return asyncio.run(agent.process(input_data))


def test_classical_agent():
    result = run(ClassicalSearchAgent(), {"n": 2, "m": 3, "task": "rec"})
    assert result["status"] == "success"
    assert result["optimum"].value == Fraction(8, 9)
    assert result["summary"]["value"] == "8/9"
    assert result["summary"]["partitions_searched"] == 512


def test_classical_agent_budget():
    agent = ClassicalSearchAgent(AgentConfig(max_partitions=10))
    result = run(agent, {"n": 2, "m": 3})
    assert result["status"] == "error"
    assert result["error_type"] == "budget"
    assert result["exit_code"] == 2


def test_classical_agent_invalid_task():
    result = run(ClassicalSearchAgent(), {"n": 2, "m": 1})
    assert result["error_type"] == "invalid_task"
    assert result["exit_code"] == 1


def test_classical_agent_unknown_kind():
    result = run(ClassicalSearchAgent(), {"task": "guess"})
    assert result["error_type"] == "validation"


def test_quantum_agent():
    result = run(QuantumOptimizerAgent(), {"restarts": 8, "seed": 42})
    assert result["status"] == "success"
    summary = result["summary"]
    assert summary["exclusion"] == pytest.approx(summary["exclusion_evaluated"], abs=1e-9)
    assert summary["access"] == pytest.approx(summary["exclusion"] - 1 / 3)
    assert result["protocol"].task.m == 3


def test_quantum_agent_only_three_letters():
    result = run(QuantumOptimizerAgent(), {"m": 4})
    assert result["error_type"] == "domain"


def test_evaluator_agent_bundled_file():
    path = bundled_protocol_path("rec23")
    summary = run(ProtocolEvaluatorAgent(), {"protocol_path": str(path)})["summary"]
    assert summary["exclusion"] == pytest.approx((7 + SQRT2) / 9, abs=1e-9)
    assert summary["task"] == "(2,3,2) REC"


def test_evaluator_agent_in_memory(trine):
    summary = run(ProtocolEvaluatorAgent(), {"protocol": trine})["summary"]
    assert summary["exclusion"] == pytest.approx(1.0)


def test_evaluator_agent_errors(tmp_path):
    missing = run(ProtocolEvaluatorAgent(), {"protocol_path": str(tmp_path / "nope.json")})
    assert missing["error_type"] == "file_not_found"
    empty = run(ProtocolEvaluatorAgent(), {})
    assert empty["error_type"] == "validation"
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({"n": 1, "m": 3}))
    invalid = run(ProtocolEvaluatorAgent(), {"protocol_path": str(broken)})
    assert invalid["error_type"] == "validation"
    assert "missing" in invalid["error_message"]


def test_commmat_agent_d3():
    result = run(CommMatrixAgent(), {"preset": "d3", "bounds": True})
    summary = result["summary"]
    assert summary["shape"] == [9, 9]
    assert summary["rank"] == 9
    assert summary["nonneg_rank"] == [9, 9]
    assert summary["nonneg_rank_exact"]
    assert summary["psd_rank_lower"] == pytest.approx(4.0, abs=1e-9)
    assert summary["psd_certificate"]["verified"]
    assert summary["psd_certificate"]["k"] == 4


def test_commmat_agent_csv(tmp_path):
    path = tmp_path / "mixed.csv"
    path.write_text("0.5,0.5\n0.5,0.5\n")
    summary = run(CommMatrixAgent(), {"csv": str(path)})["summary"]
    assert summary["name"] == "mixed"
    assert summary["rank"] == 1
    assert summary["fidelity_hypothesis"]
    assert "psd_certificate" not in summary


def test_commmat_agent_needs_one_source(tmp_path):
    both = run(CommMatrixAgent(), {"preset": "a3", "csv": "x.csv"})
    assert both["error_type"] == "validation"
    unknown = run(CommMatrixAgent(), {"preset": "z7"})
    assert unknown["error_type"] == "validation"


def test_entry_builders():
    assert exact_entry("x", Fraction(8, 9), Fraction(8, 9)).passed
    assert not exact_entry("x", Fraction(8, 9), Fraction(7, 9)).passed
    entry = float_entry("y", "√2", SQRT2, 1.4142, 1e-3)
    assert entry.passed
    assert entry.deviation == pytest.approx(SQRT2 - 1.4142)
    assert not rank_entry("rank", 3, 2, 3).passed
    assert entry.model_dump(by_alias=True)["pass"] is True


@pytest.fixture
def quick_reproduction(monkeypatch):
    """Reproduction agent restricted to the closed-form checks."""
    agent = ReproductionAgent(AgentConfig(seed=5))
    monkeypatch.setattr(agent, "_checks", lambda: [agent._check_rec2m, agent._check_gaps])
    return agent


@pytest.mark.parametrize("report_format", list(ReportFormat))
def test_reproduction_report_saved(tmp_path, quick_reproduction, report_format):
    result = run(
        quick_reproduction, {"format": report_format, "output_dir": str(tmp_path)}
    )
    assert result["summary"]["all_passed"]
    saved = Path(result["output_path"])
    assert saved.parent == tmp_path
    assert saved.suffix == f".{report_format.suffix}"
    content = saved.read_text()
    assert "quantum advantage REC (2,3)" in content
    if report_format == ReportFormat.JSON:
        data = json.loads(content)
        assert data["metadata"]["seed"] == 5
        assert all(entry["pass"] for entry in data["entries"])


def test_report_json_without_runtime(quick_reproduction):
    first = report_json(run(quick_reproduction, {})["report"], include_runtime=False)
    second = report_json(run(quick_reproduction, {})["report"], include_runtime=False)
    assert first == second
    assert "generated_at" not in first
    assert "ms" not in first["entries"][0]


def test_property_checks_pass():
    entries = ReproductionAgent(AgentConfig(seed=3))._check_properties()
    assert all(entry.passed for entry in entries)


def test_plane_angle_checks_pass():
    entries = ReproductionAgent()._check_general_theta()
    assert all(entry.passed for entry in entries), [e.label for e in entries if not e.passed]


def test_comm_matrix_checks_pass():
    entries = ReproductionAgent()._check_comm_matrices()
    assert all(entry.passed for entry in entries), [e.label for e in entries if not e.passed]


def test_full_reproduction_passes():
    result = run(ReproductionAgent(), {})
    report = result["report"]
    assert report.all_passed, [entry.label for entry in report.failures()]
    assert report.find("classical REC (2,3,2)").computed == "8/9"
    assert report.find("planar optimum f*").passed
