"""Data models for the planar-POVM optimization."""

import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DomainError

ANGLE_SLACK = 1e-9


def _in_range(value: float, low: float, high: float) -> bool:
    return low - ANGLE_SLACK <= value <= high + ANGLE_SLACK


class PlanarPovmParams(BaseModel):
    """Three-outcome extremal qubit POVM in a plane.

    Outcome directions sit at phi0, phi0 + alpha2 and phi0 + alpha2 + alpha0;
    alpha_k is the angle facing outcome k.
    """

    model_config = ConfigDict(frozen=True)

    alpha0: float = Field(..., description="Angle between outcomes 1 and 2 (rad)")
    alpha2: float = Field(..., description="Angle between outcomes 0 and 1 (rad)")
    phi0: float = Field(0.0, description="In-plane angle of outcome 0 (rad)")

    @model_validator(mode="after")
    def _check_angles(self) -> "PlanarPovmParams":
        if not (_in_range(self.alpha0, 0, math.pi) and _in_range(self.alpha2, 0, math.pi)):
            raise DomainError(
                f"alpha0={self.alpha0}, alpha2={self.alpha2} must lie in [0, π]"
            )
        if not _in_range(self.alpha0 + self.alpha2, math.pi, 2 * math.pi):
            raise DomainError(
                f"alpha0 + alpha2 = {self.alpha0 + self.alpha2} must lie in [π, 2π]"
            )
        return self

    @property
    def alpha1(self) -> float:
        return 2 * math.pi - self.alpha0 - self.alpha2


class PairParams(BaseModel):
    """Two planar measurements, their relative rotation Phi and plane angle Theta."""

    model_config = ConfigDict(frozen=True)

    meas1: PlanarPovmParams
    meas2: PlanarPovmParams
    Phi: float = Field(..., description="Angle of measurement 1 outcome 0 (rad)")
    Theta: float = Field(0.0, description="Angle between the two planes (rad)")

    @model_validator(mode="after")
    def _check_angles(self) -> "PairParams":
        if not (_in_range(self.Phi, 0, math.pi) and _in_range(self.Theta, 0, math.pi)):
            raise DomainError(f"Phi={self.Phi}, Theta={self.Theta} must lie in [0, π]")
        return self


class OptConfig(BaseModel):
    """Multi-start Nelder-Mead settings."""

    restarts: int = Field(64, ge=1, description="Number of local searches")
    seed: int = Field(42, description="Seed of the start-point generator")
    tol: float = Field(1e-9, gt=0, description="Convergence tolerance on the objective")
    max_iters: int = Field(4000, ge=1, description="Iteration cap per local search")
    workers: Optional[int] = Field(None, description="Worker processes (None: env)")
    starts: List[List[float]] = Field(
        default_factory=list,
        description="Explicit starts (alpha10, alpha12, alpha20, alpha22, Phi[, Theta])"
        " used before random ones",
    )


class OptResult(BaseModel):
    """Best point found by a multi-start search."""

    best_value: float
    best_params: PairParams
    restarts_used: int
    converged: bool
    seed: int
    generator: str = Field("PCG64", description="numpy bit generator of the starts")
    general_theta: bool = Field(False, description="Theta was a free variable")
    fixed_theta: Optional[float] = Field(None, description="Theta held fixed, if any")
    local_values: List[float] = Field(
        default_factory=list, description="Final value of each local search"
    )
