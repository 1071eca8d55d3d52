"""Data models for reproduction reports."""

from datetime import datetime
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class ReportFormat(str, Enum):
    """Supported report output formats."""

    JSON = "json"
    MARKDOWN = "markdown"
    HTML = "html"

    @property
    def suffix(self) -> str:
        return {"json": "json", "markdown": "md", "html": "html"}[self.value]


class ReportEntry(BaseModel):
    """One claimed number next to the value recomputed for it."""

    label: str = Field(..., description="What was checked")
    claimed: str = Field(..., description="Claimed value, symbolic where possible")
    claimed_value: float = Field(..., description="Claimed value as a float")
    computed: str = Field(..., description="Computed value as displayed")
    computed_value: float = Field(..., description="Computed value as a float")
    deviation: float = Field(..., description="Absolute deviation from the claim")
    tolerance: float = Field(0.0, description="Largest accepted deviation")
    exact: bool = Field(False, description="Rational claim, deviation must be 0")
    passed: bool = Field(..., alias="pass")
    ms: float = Field(0.0, description="Runtime of the check in milliseconds")

    model_config = ConfigDict(populate_by_name=True)


class ReportMetadata(BaseModel):
    seed: int
    version: str
    workers: int
    long: bool = Field(False, description="Long-running checks included")


class Report(BaseModel):
    """Outcome of the reproduction suite."""

    generated_at: datetime = Field(
        default_factory=datetime.now, description="Report generation timestamp"
    )
    metadata: ReportMetadata
    entries: List[ReportEntry] = Field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    def failures(self) -> List[ReportEntry]:
        return [entry for entry in self.entries if not entry.passed]

    def find(self, label: str) -> Optional[ReportEntry]:
        return next((entry for entry in self.entries if entry.label == label), None)
