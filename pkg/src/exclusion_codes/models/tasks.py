"""Data models for (n, m) exclusion and access tasks."""

import itertools
from enum import Enum
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DimensionError, InvalidTaskError, ProtocolValidationError
from .quantum import DensityOperator, Povm

Word = Tuple[int, ...]


class TaskKind(str, Enum):
    """Which letter relation Bob is rewarded for."""

    EXCLUSION = "rec"
    ACCESS = "rac"


def all_words(n: int, m: int) -> List[Word]:
    """All m^n words in lexicographic order."""
    return list(itertools.product(range(m), repeat=n))


def word_key(word: Word, m: int) -> str:
    """String key used in protocol files: ``"02"``, or ``"0,11"`` when m > 10."""
    separator = "" if m <= 10 else ","
    return separator.join(str(letter) for letter in word)


def parse_word_key(key: str, n: int, m: int) -> Word:
    parts = key.split(",") if m > 10 else list(key)
    try:
        word = tuple(int(part) for part in parts)
    except ValueError:
        raise ProtocolValidationError(f"malformed word key {key!r}")
    if len(word) != n or any(not 0 <= letter < m for letter in word):
        raise ProtocolValidationError(f"word key {key!r} is not a word of length {n} over {m} letters")
    return word


class TaskSpec(BaseModel):
    """An (n, m) task over a d-dimensional channel."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., description="Word length")
    m: int = Field(..., description="Alphabet size")
    d: int = Field(2, description="Channel dimension")
    kind: TaskKind = Field(TaskKind.EXCLUSION, description="Exclusion or access")

    @model_validator(mode="after")
    def _check_ranges(self) -> "TaskSpec":
        if self.n < 1 or self.m < 2 or self.d < 2:
            raise InvalidTaskError(
                f"need n >= 1, m >= 2, d >= 2; got n={self.n}, m={self.m}, d={self.d}"
            )
        return self

    @property
    def num_words(self) -> int:
        return self.m**self.n

    @property
    def num_questions(self) -> int:
        """Number of (word, position) pairs averaged over."""
        return self.n * self.m**self.n

    def words(self) -> List[Word]:
        return all_words(self.n, self.m)

    def label(self) -> str:
        return f"({self.n},{self.m},{self.d}) {self.kind.value.upper()}"


class Protocol(BaseModel):
    """Encoding states for every word plus one m-outcome POVM per position."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    task: TaskSpec
    encoding: Dict[Word, DensityOperator] = Field(
        ..., description="State prepared for each word"
    )
    decodings: List[Povm] = Field(..., description="Measurement per word position")

    @model_validator(mode="after")
    def _check_protocol(self) -> "Protocol":
        task = self.task
        expected = set(task.words())
        missing = expected - set(self.encoding)
        extra = set(self.encoding) - expected
        if missing or extra:
            raise ProtocolValidationError(
                f"encoding must cover exactly the {task.num_words} words "
                f"({len(missing)} missing, {len(extra)} unexpected)"
            )
        for word, state in self.encoding.items():
            if state.dim != task.d:
                raise DimensionError(
                    f"state for word {word} has dimension {state.dim}, expected {task.d}"
                )
        if len(self.decodings) != task.n:
            raise ProtocolValidationError(
                f"expected {task.n} decodings, got {len(self.decodings)}"
            )
        for i, povm in enumerate(self.decodings):
            if povm.dim != task.d:
                raise DimensionError(
                    f"decoding {i} has dimension {povm.dim}, expected {task.d}"
                )
            if povm.num_outcomes != task.m:
                raise ProtocolValidationError(
                    f"decoding {i} has {povm.num_outcomes} outcomes, expected {task.m}"
                )
        return self

    def state(self, word: Word) -> DensityOperator:
        return self.encoding[tuple(word)]
