"""Data models for deterministic classical strategies."""

from fractions import Fraction
from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from .tasks import TaskSpec


class DeterministicStrategy(BaseModel):
    """Alice's partition of the words plus Bob's answer table."""

    model_config = ConfigDict(frozen=True)

    partition: List[int] = Field(
        ..., description="Message sent for each word, words in lexicographic order"
    )
    bob_table: List[List[int]] = Field(
        ..., description="bob_table[c][i]: answer for message c and position i"
    )

    def parts(self, num_messages: int) -> List[List[int]]:
        """Word indices grouped by the message they are sent as."""
        groups: List[List[int]] = [[] for _ in range(num_messages)]
        for index, message in enumerate(self.partition):
            groups[message].append(index)
        return groups


class ClassicalOptimum(BaseModel):
    """Exact classical optimum of a task with one optimal strategy."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    task: TaskSpec
    value: Fraction = Field(..., description="Exact success probability")
    witness: DeterministicStrategy
    partitions_searched: int = Field(..., description="Number of partitions enumerated")
    witness_index: int = Field(..., description="Base-d counter value of the witness")

    @field_serializer("value")
    def _serialize_value(self, value: Fraction) -> str:
        return f"{value.numerator}/{value.denominator}"
