"""Reproduction agent: recomputes every claimed value and reports the deviations."""

import math
import time
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np
from jinja2 import BaseLoader, Environment

from .. import __version__
from ..core.classical import classical_closed_form_rec, classical_max
from ..core.commmat import (
    Preset,
    comm_matrix,
    d3_psd_realization,
    kron_cm,
    nonneg_rank_bounds,
    preset,
    psd_lower_fidelity,
    verify_psd_factorization,
)
from ..core.qopt import (
    FSTAR_OPTIMUM,
    assemble_protocol,
    optimize_f_general,
    optimize_fstar,
    povms_from_params,
    success_from_f,
)
from ..core.qstate import (
    bloch_from_state,
    random_bloch_vector,
    random_density,
    random_povm,
    state_from_bloch,
)
from ..core.tasks import (
    eval_access,
    eval_exclusion,
    general_rec2m_protocol,
    product_protocol,
    rac23_protocol,
    random_protocol,
    rec23_protocol,
    trine_exclusion_protocol,
)
from ..errors import ExclusionCodesError
from ..models.matrices import NmfConfig, SimplexConfig
from ..models.optimization import OptConfig
from ..models.quantum import DensityOperator, Povm
from ..models.reports import Report, ReportEntry, ReportFormat, ReportMetadata
from ..models.tasks import TaskKind, TaskSpec
from ..utils.jsonio import write_json
from .base import BaseAgent
from .decorators import handle_agent_errors

SQRT2 = math.sqrt(2)
PROPERTY_SAMPLES = 100


def exact_entry(label: str, claimed: Fraction, computed: Fraction) -> ReportEntry:
    deviation = float(abs(computed - claimed))
    return ReportEntry(
        label=label,
        claimed=f"{claimed.numerator}/{claimed.denominator}",
        claimed_value=float(claimed),
        computed=f"{computed.numerator}/{computed.denominator}",
        computed_value=float(computed),
        deviation=deviation,
        exact=True,
        passed=computed == claimed,
    )


def float_entry(
    label: str, claimed: str, claimed_value: float, computed: float, tolerance: float
) -> ReportEntry:
    deviation = abs(computed - claimed_value)
    return ReportEntry(
        label=label,
        claimed=claimed,
        claimed_value=claimed_value,
        computed=f"{computed:.10f}",
        computed_value=computed,
        deviation=deviation,
        tolerance=tolerance,
        passed=deviation <= tolerance,
    )


def rank_entry(label: str, claimed: int, lower: int, upper: int) -> ReportEntry:
    deviation = float(abs(lower - claimed) + abs(upper - claimed))
    return ReportEntry(
        label=label,
        claimed=str(claimed),
        claimed_value=float(claimed),
        computed=f"[{lower}, {upper}]",
        computed_value=float(upper),
        deviation=deviation,
        exact=True,
        passed=deviation == 0,
    )


class ReproductionAgent(BaseAgent):
    """Runs the reproduction suite and saves the report."""

    _long = False

    @handle_agent_errors
    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        long = input_data.get("long", False)
        report_format = input_data.get("format")
        output_dir = Path(input_data.get("output_dir", "./reports"))

        report = Report(
            metadata=ReportMetadata(
                seed=self.config.seed,
                version=__version__,
                workers=self.config.workers,
                long=long,
            )
        )
        self._long = long
        for check in self._checks():
            started = time.perf_counter()
            entries = check()
            elapsed_ms = (time.perf_counter() - started) * 1000
            if elapsed_ms > 5000:
                self.log(f"{check.__name__} took {elapsed_ms / 1000:.2f}s")
            report.entries.extend(
                entry.model_copy(update={"ms": round(elapsed_ms, 3)}) for entry in entries
            )

        output_path = None
        if report_format is not None:
            output_path = self._save_report(report, output_dir, ReportFormat(report_format))
            self.log(f"Report saved: {output_path}")

        failures = report.failures()
        for entry in failures:
            self.log(f"FAIL {entry.label}: {entry.computed} vs {entry.claimed}", "WARNING")

        return {
            "status": "success",
            "report": report,
            "output_path": str(output_path) if output_path else None,
            "summary": {
                "checks": len(report.entries),
                "failed": len(failures),
                "all_passed": report.all_passed,
            },
        }

    def _checks(self) -> List[Callable[[], List[ReportEntry]]]:
        return [
            self._check_classical,
            self._check_rec2m,
            self._check_planar_optimum,
            self._check_gaps,
            self._check_general_theta,
            self._check_comm_matrices,
            self._check_properties,
        ]

    def _classical(self, n: int, m: int, kind: TaskKind) -> Fraction:
        task = TaskSpec(n=n, m=m, d=2, kind=kind)
        return classical_max(
            task,
            max_partitions=self.config.max_partitions,
            workers=self.config.workers,
            chunk_size=self.config.chunk_size,
        ).value

    def _check_classical(self) -> List[ReportEntry]:
        entries = [
            exact_entry(
                f"classical REC (2,{m},2)",
                classical_closed_form_rec(m),
                self._classical(2, m, TaskKind.EXCLUSION),
            )
            for m in ((2, 3, 4, 5) if self._long else (2, 3, 4))
        ]
        entries.append(
            exact_entry(
                "classical RAC (2,3,2)", Fraction(5, 9), self._classical(2, 3, TaskKind.ACCESS)
            )
        )
        entries.append(
            exact_entry(
                "classical RAC (2,2,2)", Fraction(3, 4), self._classical(2, 2, TaskKind.ACCESS)
            )
        )
        return entries

    def _check_rec2m(self) -> List[ReportEntry]:
        entries = []
        for m in range(2, 7):
            value = eval_exclusion(general_rec2m_protocol(m))
            entries.append(
                float_entry(
                    f"quantum REC (2,{m}) two-outcome protocol",
                    f"1-(2-√2)/{m * m}",
                    1 - (2 - SQRT2) / m**2,
                    value,
                    1e-12,
                )
            )
            entries.append(
                float_entry(
                    f"quantum minus classical REC (2,{m})",
                    f"(√2-1)/{m * m}",
                    (SQRT2 - 1) / m**2,
                    value - float(classical_closed_form_rec(m)),
                    1e-12,
                )
            )
        return entries

    def _check_planar_optimum(self) -> List[ReportEntry]:
        config = OptConfig(restarts=64, seed=self.config.seed, workers=self.config.workers)
        result = optimize_fstar(config)
        povm1, povm2 = povms_from_params(result.best_params)
        assembled = assemble_protocol(povm1, povm2, TaskKind.EXCLUSION)
        return [
            float_entry("planar optimum f*", "4(1+√2)", FSTAR_OPTIMUM, result.best_value, 1e-6),
            float_entry(
                "quantum REC (2,3) from f*",
                "(7+√2)/9",
                (7 + SQRT2) / 9,
                success_from_f(result.best_value, TaskKind.EXCLUSION),
                1e-6,
            ),
            float_entry(
                "quantum RAC (2,3) from f*",
                "(4+√2)/9",
                (4 + SQRT2) / 9,
                success_from_f(result.best_value, TaskKind.ACCESS),
                1e-6,
            ),
            float_entry(
                "quantum REC (2,3) assembled protocol",
                "(7+√2)/9",
                (7 + SQRT2) / 9,
                eval_exclusion(assembled),
                1e-6,
            ),
        ]

    def _check_gaps(self) -> List[ReportEntry]:
        rec_gap = eval_exclusion(rec23_protocol()) - 8 / 9
        rac_gap = eval_access(rac23_protocol()) - 5 / 9
        return [
            float_entry("quantum advantage REC (2,3)", "(√2-1)/9", (SQRT2 - 1) / 9, rec_gap, 1e-9),
            float_entry("quantum advantage RAC (2,3)", "(√2-1)/9", (SQRT2 - 1) / 9, rac_gap, 1e-9),
            float_entry("REC advantage minus RAC advantage", "0", 0.0, rec_gap - rac_gap, 1e-12),
            float_entry(
                "quantum REC (2,2) = (1+1/√2)/2",
                "(2+√2)/4",
                (2 + SQRT2) / 4,
                eval_exclusion(general_rec2m_protocol(2)),
                1e-12,
            ),
        ]

    def _check_general_theta(self) -> List[ReportEntry]:
        config = OptConfig(restarts=64, seed=7, workers=self.config.workers)
        result = optimize_f_general(config)
        theta = result.best_params.Theta
        return [
            float_entry(
                "tilted-plane excess over f*",
                "0",
                0.0,
                max(0.0, result.best_value - FSTAR_OPTIMUM),
                1e-6,
            ),
            float_entry(
                "best plane angle distance to {0, π}",
                "0",
                0.0,
                min(abs(theta), abs(math.pi - theta)),
                1e-3,
            ),
        ]

    def _check_comm_matrices(self) -> List[ReportEntry]:
        a3, d3, i9 = preset(Preset.A3), preset(Preset.D3), preset(Preset.I9)
        trine = trine_exclusion_protocol()
        trine_matrix = comm_matrix(trine)
        pair_matrix = comm_matrix(product_protocol(trine, trine))

        entries = [
            float_entry(
                "trine matrix vs A3",
                "0",
                0.0,
                float(np.max(np.abs(trine_matrix.entries - a3.entries))),
                1e-12,
            ),
            float_entry(
                "trine pair matrix vs D3",
                "0",
                0.0,
                float(np.max(np.abs(pair_matrix.entries - d3.entries))),
                1e-12,
            ),
            float_entry(
                "A3 ⊗ A3 vs D3",
                "0",
                0.0,
                float(np.max(np.abs(kron_cm(a3, a3).entries - d3.entries))),
                0.0,
            ),
            float_entry("trine REC", "1", 1.0, eval_exclusion(trine), 1e-12),
        ]

        nmf = NmfConfig(seed=self.config.seed)
        for name, matrix, claimed in (("A3", a3, 3), ("D3", d3, 9), ("I9", i9, 9)):
            bounds = nonneg_rank_bounds(matrix, nmf)
            entries.append(rank_entry(f"rank_+ {name}", claimed, bounds.lower, bounds.upper))

        uniform = psd_lower_fidelity(d3, np.full(9, 1 / 9))
        optimized = psd_lower_fidelity(d3, config=SimplexConfig(seed=self.config.seed))
        certificate = d3_psd_realization()
        _, residual = verify_psd_factorization(certificate, d3)
        entries += [
            float_entry("psd bound D3 (uniform q)", "4", 4.0, uniform.value, 1e-9),
            float_entry("psd bound D3 (optimized q)", "4", 4.0, optimized.value, 1e-9),
            float_entry("D3 two-qubit factorization residual", "0", 0.0, residual, 1e-12),
            exact_entry("D3 factorization dimension", Fraction(4), Fraction(certificate.k)),
        ]
        return entries

    def _check_properties(self) -> List[ReportEntry]:
        rng = np.random.default_rng(self.config.seed)

        worst_complement = 0.0
        for _ in range(PROPERTY_SAMPLES):
            task = TaskSpec(
                n=int(rng.integers(1, 3)), m=int(rng.integers(2, 4)), d=int(rng.integers(2, 4))
            )
            p = random_protocol(task, rng)
            worst_complement = max(worst_complement, abs(eval_exclusion(p) + eval_access(p) - 1))

        rejected = sum(self._rejects(mutation, rng) for mutation in range(PROPERTY_SAMPLES))

        worst_roundtrip = 0.0
        for _ in range(PROPERTY_SAMPLES):
            v = random_bloch_vector(rng)
            back = bloch_from_state(state_from_bloch(v))
            worst_roundtrip = max(
                worst_roundtrip, float(np.max(np.abs(back.as_array() - v.as_array())))
            )

        return [
            float_entry("exclusion + access = 1 (random protocols)", "0", 0.0, worst_complement, 1e-12),
            exact_entry("invalid inputs rejected", Fraction(PROPERTY_SAMPLES), Fraction(rejected)),
            float_entry("Bloch round trip", "0", 0.0, worst_roundtrip, 1e-12),
        ]

    @staticmethod
    def _rejects(mutation: int, rng: np.random.Generator) -> bool:
        """Build a deliberately broken state or POVM; True when validation refuses it."""
        kind = mutation % 4
        try:
            if kind == 0:
                DensityOperator(matrix=random_density(rng).matrix * 1.1)
            elif kind == 1:
                DensityOperator(matrix=random_density(rng).matrix + np.array([[0, 0.1], [0, 0]]))
            elif kind == 2:
                _, vectors = np.linalg.eigh(random_density(rng).matrix)
                negative = vectors @ np.diag([-0.5, 1.5]) @ vectors.conj().T
                DensityOperator(matrix=negative)
            else:
                effects = [np.array(e) for e in random_povm(rng, 2, 3).effects]
                effects[0] = effects[0] + 0.1 * np.eye(2)
                Povm(effects=effects)
        except ExclusionCodesError:
            return True
        return False

    def _save_report(self, report: Report, output_dir: Path, format: ReportFormat) -> Path:
        """Save the report in the specified format."""
        output_dir.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_path = output_dir / f"reproduction_{timestamp}.{format.suffix}"

        if format == ReportFormat.JSON:
            write_json(report.model_dump(mode="json", by_alias=True), output_path)
        else:
            template = MARKDOWN_TEMPLATE if format == ReportFormat.MARKDOWN else HTML_TEMPLATE
            env = Environment(loader=BaseLoader(), autoescape=format == ReportFormat.HTML)
            content = env.from_string(template).render(report=report)
            output_path.write_text(content, encoding="utf-8")
        return output_path


def report_json(report: Report, include_runtime: bool = True) -> Dict[str, Any]:
    """JSON payload of a report; without runtime fields two runs compare equal."""
    data = report.model_dump(mode="json", by_alias=True)
    if not include_runtime:
        data.pop("generated_at")
        for entry in data["entries"]:
            entry.pop("ms")
    return data


MARKDOWN_TEMPLATE = """# Exclusion Codes Reproduction Report

**Generated:** {{ report.generated_at.strftime('%Y-%m-%d %H:%M:%S') }}
**Version:** {{ report.metadata.version }} | **Seed:** {{ report.metadata.seed }} | **Workers:** {{ report.metadata.workers }}
**Result:** {{ "all checks passed" if report.all_passed else report.failures() | length ~ " check(s) failed" }}

| Check | Claimed | Computed | Deviation | Pass | ms |
|-------|---------|----------|-----------|------|----|
{% for e in report.entries -%}
| {{ e.label }} | {{ e.claimed }} ({{ "%.10f" | format(e.claimed_value) }}) | {{ e.computed }} | {{ "%.3e" | format(e.deviation) }} | {{ "PASS" if e.passed else "FAIL" }} | {{ "%.1f" | format(e.ms) }} |
{% endfor %}
"""

HTML_TEMPLATE = """<!DOCTYPE html>
<html>
<head>
    <title>Exclusion Codes Reproduction Report</title>
    <style>
        body { font-family: Arial, sans-serif; margin: 40px; line-height: 1.6; }
        table { width: 100%; border-collapse: collapse; }
        td, th { padding: 8px; border-bottom: 1px solid #ddd; text-align: left; }
        .pass { color: green; font-weight: bold; }
        .fail { color: red; font-weight: bold; }
    </style>
</head>
<body>
    <h1>Exclusion Codes Reproduction Report</h1>
    <p>Generated: {{ report.generated_at.strftime('%Y-%m-%d %H:%M:%S') }}
       | Version {{ report.metadata.version }} | Seed {{ report.metadata.seed }}</p>
    <table>
        <tr><th>Check</th><th>Claimed</th><th>Computed</th><th>Deviation</th><th>Result</th><th>ms</th></tr>
        {% for e in report.entries %}
        <tr>
            <td>{{ e.label }}</td>
            <td>{{ e.claimed }} ({{ "%.10f" | format(e.claimed_value) }})</td>
            <td>{{ e.computed }}</td>
            <td>{{ "%.3e" | format(e.deviation) }}</td>
            <td class="{{ 'pass' if e.passed else 'fail' }}">{{ "PASS" if e.passed else "FAIL" }}</td>
            <td>{{ "%.1f" | format(e.ms) }}</td>
        </tr>
        {% endfor %}
    </table>
</body>
</html>
"""
