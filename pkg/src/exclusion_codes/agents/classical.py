"""Agent running the exact classical enumeration."""

from typing import Any, Dict

from ..core.classical import classical_max
from ..models.tasks import TaskKind, TaskSpec
from .base import BaseAgent
from .decorators import handle_agent_errors


class ClassicalSearchAgent(BaseAgent):
    """Finds the best deterministic strategy for an (n, m) task over d messages."""

    @handle_agent_errors
    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        task = TaskSpec(
            n=input_data.get("n", 2),
            m=input_data.get("m", 3),
            d=input_data.get("d", 2),
            kind=TaskKind(input_data.get("task", TaskKind.EXCLUSION)),
        )
        self.log(f"Enumerating {task.d}^{task.num_words} partitions for {task.label()}")

        optimum = classical_max(
            task,
            max_partitions=self.config.max_partitions,
            workers=self.config.workers,
            chunk_size=self.config.chunk_size,
        )

        return {
            "status": "success",
            "optimum": optimum,
            "summary": {
                "task": task.label(),
                "value": f"{optimum.value.numerator}/{optimum.value.denominator}",
                "decimal": float(optimum.value),
                "partitions_searched": optimum.partitions_searched,
            },
        }
