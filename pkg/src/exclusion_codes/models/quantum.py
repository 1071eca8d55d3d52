"""Data models for qubit and qudit operators."""

from typing import Any, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import DimensionError, InvalidBlochError, ProtocolValidationError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-10
UNIT_TOL = 1e-10


def as_complex_matrix(value: Any) -> np.ndarray:
    """Coerce ``value`` to a read-only square complex matrix."""
    matrix = np.array(value, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {matrix.shape}")
    matrix.flags.writeable = False
    return matrix


def hermitian_deviation(matrix: np.ndarray) -> float:
    """Largest entrywise deviation from the conjugate transpose."""
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def min_eigenvalue(matrix: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``matrix``."""
    hermitian_part = (matrix + matrix.conj().T) / 2
    return float(np.linalg.eigvalsh(hermitian_part).min())


def check_effect(matrix: np.ndarray, label: str) -> None:
    """Raise unless ``matrix`` is Hermitian and PSD within tolerance."""
    deviation = hermitian_deviation(matrix)
    if deviation > HERMITIAN_TOL:
        raise ProtocolValidationError(
            f"{label} is not Hermitian (deviation {deviation:.3e})"
        )
    lowest = min_eigenvalue(matrix)
    if lowest < -PSD_TOL:
        raise ProtocolValidationError(
            f"{label} is not positive semidefinite (eigenvalue {lowest:.3e})"
        )


class BlochVector(BaseModel):
    """Real 3-vector in the unit ball."""

    model_config = ConfigDict(frozen=True)

    x: float = Field(0.0, description="σ_x expectation")
    y: float = Field(0.0, description="σ_y expectation")
    z: float = Field(0.0, description="σ_z expectation")

    @model_validator(mode="after")
    def _inside_ball(self) -> "BlochVector":
        if self.norm > 1 + UNIT_TOL:
            raise InvalidBlochError(f"Bloch vector norm {self.norm:.12f} exceeds 1")
        return self

    @classmethod
    def from_array(cls, values: Any) -> "BlochVector":
        x, y, z = (float(v) for v in np.asarray(values, dtype=float).reshape(3))
        return cls(x=x, y=y, z=z)

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm - 1) <= tol

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> "BlochVector":
        return BlochVector(x=-self.x, y=-self.y, z=-self.z)


class DensityOperator(BaseModel):
    """Hermitian, positive semidefinite, unit-trace matrix."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray = Field(..., description="d×d complex matrix")

    @field_validator("matrix", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return as_complex_matrix(value)

    @model_validator(mode="after")
    def _check_state(self) -> "DensityOperator":
        check_effect(self.matrix, "density operator")
        trace = np.trace(self.matrix)
        if abs(trace - 1) > TRACE_TOL:
            raise ProtocolValidationError(
                f"density operator trace is {trace.real:.12f}, expected 1"
            )
        return self

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


class Povm(BaseModel):
    """Ordered list of effects summing to the identity; zero effects allowed."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    effects: List[np.ndarray] = Field(..., description="Outcome effects, in order")

    @field_validator("effects", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> List[np.ndarray]:
        effects = [as_complex_matrix(effect) for effect in value]
        if not effects:
            raise ProtocolValidationError("a POVM needs at least one effect")
        return effects

    @model_validator(mode="after")
    def _check_povm(self) -> "Povm":
        dims = {effect.shape[0] for effect in self.effects}
        if len(dims) != 1:
            raise DimensionError(f"POVM effects have mixed dimensions {sorted(dims)}")
        for k, effect in enumerate(self.effects):
            check_effect(effect, f"effect {k}")
        total = np.sum(self.effects, axis=0)
        deviation = float(np.max(np.abs(total - np.eye(self.dim))))
        if deviation > HERMITIAN_TOL:
            raise ProtocolValidationError(
                f"effects sum deviates from identity by {deviation:.3e}"
            )
        return self

    @property
    def dim(self) -> int:
        return int(self.effects[0].shape[0])

    @property
    def num_outcomes(self) -> int:
        return len(self.effects)
