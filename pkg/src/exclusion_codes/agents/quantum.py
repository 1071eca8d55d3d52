"""Agent running the planar-POVM optimization for (2, 3) qubit codes."""

from typing import Any, Dict

from ..core.qopt import (
    assemble_protocol,
    optimize_f_general,
    optimize_fstar,
    povms_from_params,
    success_from_f,
)
from ..core.tasks import evaluate
from ..errors import DomainError
from ..models.optimization import OptConfig
from ..models.tasks import TaskKind
from .base import BaseAgent
from .decorators import handle_agent_errors


class QuantumOptimizerAgent(BaseAgent):
    """Maximizes f and maps it to exclusion and access success."""

    @handle_agent_errors
    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        m = input_data.get("m", 3)
        if m != 3:
            raise DomainError(f"planar three-outcome optimization needs m = 3, got m = {m}")

        config = OptConfig(
            restarts=input_data.get("restarts", 64),
            seed=input_data.get("seed", self.config.seed),
            tol=input_data.get("tol", 1e-9),
            workers=self.config.workers,
        )
        general = input_data.get("general_theta", False)
        self.log(
            f"Running {config.restarts} Nelder-Mead restarts (seed {config.seed}"
            f"{', free plane angle' if general else ''})"
        )
        result = optimize_f_general(config) if general else optimize_fstar(config)

        povm1, povm2 = povms_from_params(result.best_params)
        protocol = assemble_protocol(povm1, povm2, TaskKind.EXCLUSION)
        exclusion = success_from_f(result.best_value, TaskKind.EXCLUSION)
        access = success_from_f(result.best_value, TaskKind.ACCESS)

        return {
            "status": "success",
            "result": result,
            "protocol": protocol,
            "summary": {
                "f": result.best_value,
                "exclusion": exclusion,
                "access": access,
                "exclusion_evaluated": evaluate(protocol, TaskKind.EXCLUSION),
                "converged": result.converged,
            },
        }
