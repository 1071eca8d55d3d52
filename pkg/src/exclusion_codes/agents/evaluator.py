"""Agent evaluating protocol files."""

from pathlib import Path
from typing import Any, Dict

from ..core.tasks import eval_access, eval_exclusion
from ..models.tasks import TaskKind
from ..utils.jsonio import load_protocol
from .base import BaseAgent
from .decorators import handle_agent_errors


class ProtocolEvaluatorAgent(BaseAgent):
    """Loads, validates and scores a protocol."""

    @handle_agent_errors
    async def process(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        protocol = input_data.get("protocol")
        if protocol is None:
            path = input_data.get("protocol_path")
            if not path:
                raise ValueError("protocol or protocol_path is required in input_data")
            if not Path(path).exists():
                raise FileNotFoundError(f"protocol file not found: {path}")
            task = input_data.get("task")
            protocol = load_protocol(path, TaskKind(task) if task else None)
            self.log(f"Loaded {protocol.task.label()} protocol from {path}")

        return {
            "status": "success",
            "protocol": protocol,
            "summary": {
                "task": protocol.task.label(),
                "exclusion": eval_exclusion(protocol),
                "access": eval_access(protocol),
            },
        }
