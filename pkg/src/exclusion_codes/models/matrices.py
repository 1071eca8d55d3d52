"""Data models for communication matrices and their rank certificates."""

from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import DimensionError, ProtocolValidationError
from .quantum import PSD_TOL, as_complex_matrix, hermitian_deviation, min_eigenvalue

ROW_SUM_TOL = 1e-10
ENTRY_TOL = 1e-12


def _real_matrix(value: Any) -> np.ndarray:
    matrix = np.array(value, dtype=np.float64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {matrix.shape}")
    matrix.flags.writeable = False
    return matrix


class CommMatrix(BaseModel):
    """Row-stochastic matrix of outcome probabilities, one row per input."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray = Field(..., description="entries[input, outcome]")
    name: Optional[str] = Field(None, description="Preset or source label")

    @field_validator("entries", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _real_matrix(value)

    @model_validator(mode="after")
    def _check_stochastic(self) -> "CommMatrix":
        lowest = float(self.entries.min())
        if lowest < -ENTRY_TOL:
            raise ProtocolValidationError(f"negative entry {lowest:.3e}")
        deviations = np.abs(self.entries.sum(axis=1) - 1.0)
        worst = int(np.argmax(deviations))
        if deviations[worst] > ROW_SUM_TOL:
            raise ProtocolValidationError(
                f"row {worst} sums to {self.entries[worst].sum():.12f}, expected 1"
            )
        return self

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    def is_doubly_stochastic(self, tol: float = 1e-8) -> bool:
        if self.rows != self.cols:
            return False
        return bool(np.all(np.abs(self.entries.sum(axis=0) - 1.0) <= tol))


class NmfCertificate(BaseModel):
    """Nonnegative factors with C ≈ W H entrywise."""

    k: int
    W: List[List[float]]
    H: List[List[float]]
    max_residual: float


class RankBounds(BaseModel):
    """Rigorous lower and upper bounds on a matrix rank."""

    lower: int
    upper: int
    method_lower: str
    method_upper: str
    certificate: Optional[NmfCertificate] = None

    @model_validator(mode="after")
    def _ordered(self) -> "RankBounds":
        if self.lower > self.upper:
            raise ProtocolValidationError(
                f"lower bound {self.lower} exceeds upper bound {self.upper}"
            )
        return self

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


class PsdFactorization(BaseModel):
    """k×k PSD matrices with C_ij = Tr[A_i B_j]."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int = Field(..., ge=1)
    A: List[np.ndarray] = Field(..., description="One matrix per row")
    B: List[np.ndarray] = Field(..., description="One matrix per column")

    @field_validator("A", "B", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> List[np.ndarray]:
        return [as_complex_matrix(item) for item in value]

    @model_validator(mode="after")
    def _check_psd(self) -> "PsdFactorization":
        for side, matrices in (("A", self.A), ("B", self.B)):
            for index, matrix in enumerate(matrices):
                label = f"{side}[{index}]"
                if matrix.shape != (self.k, self.k):
                    raise DimensionError(f"{label} has shape {matrix.shape}, expected k={self.k}")
                if hermitian_deviation(matrix) > 1e-10:
                    raise ProtocolValidationError(f"{label} is not Hermitian")
                if min_eigenvalue(matrix) < -PSD_TOL:
                    raise ProtocolValidationError(f"{label} is not positive semidefinite")
        return self


class FidelityBound(BaseModel):
    """psd-rank lower bound 1 / (qᵀ G q) with the weights that produced it."""

    value: float
    q: List[float]
    optimized: bool = Field(False, description="q came from the simplex search")
    hypothesis_satisfied: bool = Field(
        ..., description="Matrix is square, doubly stochastic and entrywise positive"
    )


class NmfConfig(BaseModel):
    """Multiplicative-update NMF search settings."""

    restarts: int = Field(32, ge=1)
    max_iters: int = Field(5000, ge=1)
    tol: float = Field(1e-8, gt=0, description="Entrywise residual accepted as exact")
    seed: int = 42


class SimplexConfig(BaseModel):
    """Projected-gradient settings for the fidelity bound."""

    restarts: int = Field(16, ge=1, description="Starts, the uniform vector included")
    max_iters: int = Field(2000, ge=1)
    tol: float = Field(1e-13, gt=0, description="Stop when an update moves q less than this")
    seed: int = 42
