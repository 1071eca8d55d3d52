"""Base agent class for the exclusion-code tools."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from ..utils.console import log
from ..utils.parallel import default_workers


class AgentConfig(BaseModel):
    """Configuration for agents."""

    seed: int = 42
    workers: int = Field(default_factory=default_workers, ge=1)
    max_partitions: int = Field(2**25, description="Classical enumeration budget")
    chunk_size: int = Field(2**16, description="Partitions scored per job")


class BaseAgent(ABC):
    """Base class for all agents in the system."""

    def __init__(self, config: Optional[AgentConfig] = None):
        self.config = config or AgentConfig()
        self.name = self.__class__.__name__

    @abstractmethod
    async def process(self, input_data: Any) -> Dict[str, Any]:
        """Process input data and return results."""
        pass

    def log(self, message: str, level: str = "INFO") -> None:
        log(self.name, message, level)
