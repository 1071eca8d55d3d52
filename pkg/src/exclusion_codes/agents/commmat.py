"""Agent analysing communication matrices."""

from typing import Any, Dict, Optional

from ..core.commmat import (
    Preset,
    d3_psd_realization,
    nonneg_rank_bounds,
    numeric_rank,
    preset,
    psd_lower_fidelity,
    verify_psd_factorization,
)
from ..models.matrices import CommMatrix, NmfConfig, SimplexConfig
from ..utils.jsonio import read_comm_matrix_csv
from .base import BaseAgent
from .decorators import handle_agent_errors


class CommMatrixAgent(BaseAgent):
    """Ranks, nonnegative-rank bounds and psd-rank evidence for one matrix."""

    @handle_agent_errors
    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        matrix = self._load_matrix(input_data)
        self.log(f"Analysing {matrix.name or 'matrix'} ({matrix.rows}×{matrix.cols})")

        summary: Dict[str, Any] = {
            "name": matrix.name,
            "shape": [matrix.rows, matrix.cols],
            "rank": numeric_rank(matrix),
        }
        bounds = None
        if input_data.get("bounds", False):
            bounds = nonneg_rank_bounds(matrix, NmfConfig(seed=self.config.seed))
            summary["nonneg_rank"] = [bounds.lower, bounds.upper]
            summary["nonneg_rank_exact"] = bounds.exact

        fidelity = psd_lower_fidelity(
            matrix, input_data.get("q"), SimplexConfig(seed=self.config.seed)
        )
        summary["psd_rank_lower"] = fidelity.value
        summary["fidelity_hypothesis"] = fidelity.hypothesis_satisfied

        certificate = None
        if matrix.name == Preset.D3.value:
            certificate = d3_psd_realization()
            verified, residual = verify_psd_factorization(certificate, matrix)
            summary["psd_certificate"] = {
                "k": certificate.k,
                "verified": verified,
                "max_residual": residual,
            }

        return {
            "status": "success",
            "matrix": matrix,
            "bounds": bounds,
            "fidelity": fidelity,
            "certificate": certificate,
            "summary": summary,
        }

    def _load_matrix(self, input_data: Dict[str, Any]) -> CommMatrix:
        name: Optional[str] = input_data.get("preset")
        path = input_data.get("csv")
        if (name is None) == (path is None):
            raise ValueError("exactly one of preset or csv is required in input_data")
        if name is not None:
            return preset(Preset(name.lower()))
        return read_comm_matrix_csv(path)
