"""Small-dimension linear algebra: Bloch conversions, tensor products, Born rule."""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import (
    DimensionError,
    InvalidBlochError,
    InvalidWeightError,
    NumericConsistencyError,
)
from ..models.quantum import PSD_TOL, BlochVector, DensityOperator, Povm

Operator = Union[np.ndarray, DensityOperator]

BOUNDARY_TOL = 1e-10
IMAG_TOL = 1e-9


def identity(dim: int = 2) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def sigma_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def sigma_y() -> np.ndarray:
    return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


def sigma_z() -> np.ndarray:
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _pauli_dot(vector: np.ndarray) -> np.ndarray:
    """v·σ for a real 3-vector."""
    return vector[0] * sigma_x() + vector[1] * sigma_y() + vector[2] * sigma_z()


def _matrix(op: Operator) -> np.ndarray:
    return op.matrix if isinstance(op, DensityOperator) else np.asarray(op)


def state_from_bloch(v: BlochVector) -> DensityOperator:
    """ρ = (𝟙 + v·σ)/2."""
    return DensityOperator(matrix=(identity() + _pauli_dot(v.as_array())) / 2)


def bloch_from_state(rho: DensityOperator) -> BlochVector:
    """Inverse of :func:`state_from_bloch` for qubits."""
    if rho.dim != 2:
        raise DimensionError(f"Bloch vectors need a qubit state, got dimension {rho.dim}")
    components = [
        np.real(np.trace(rho.matrix @ pauli))
        for pauli in (sigma_x(), sigma_y(), sigma_z())
    ]
    return BlochVector.from_array(components)


def effect_from_bloch(weight: float, v: Optional[BlochVector]) -> np.ndarray:
    """Rank-one qubit effect ``weight·(𝟙 + v·σ)/2``.

    A zero weight returns the zero effect and ignores ``v``.
    """
    if not 0 <= weight <= 1:
        raise InvalidWeightError(f"effect weight {weight} outside [0, 1]")
    if weight == 0:
        return np.zeros((2, 2), dtype=np.complex128)
    if v is None or not v.is_unit():
        norm = None if v is None else v.norm
        raise InvalidBlochError(f"effect direction must be a unit vector, norm {norm}")
    return weight * (identity() + _pauli_dot(v.as_array())) / 2


def bloch_from_effect(effect: np.ndarray) -> Tuple[float, np.ndarray]:
    """Return ``(Tr E, (Tr[Eσ_x], Tr[Eσ_y], Tr[Eσ_z]))`` for a qubit effect."""
    effect = np.asarray(effect)
    if effect.shape != (2, 2):
        raise DimensionError(f"expected a qubit effect, got shape {effect.shape}")
    weight = float(np.real(np.trace(effect)))
    vector = np.array(
        [np.real(np.trace(effect @ p)) for p in (sigma_x(), sigma_y(), sigma_z())]
    )
    return weight, vector


def tensor(a: Operator, b: Operator) -> np.ndarray:
    """Kronecker product a ⊗ b."""
    return np.kron(_matrix(a), _matrix(b))


def tensor_states(rho: DensityOperator, sigma: DensityOperator) -> DensityOperator:
    return DensityOperator(matrix=tensor(rho, sigma))


def born_prob(rho: DensityOperator, effect: Operator) -> float:
    """Tr[effect·ρ], real and clamped onto [0, 1] within the validation tolerance."""
    effect = _matrix(effect)
    if effect.shape != rho.matrix.shape:
        raise DimensionError(
            f"effect shape {effect.shape} does not match state shape {rho.matrix.shape}"
        )
    value = np.einsum("ij,ji->", effect, rho.matrix)
    if abs(value.imag) > IMAG_TOL:
        raise NumericConsistencyError(f"Born trace has imaginary part {value.imag:.3e}")
    prob = float(value.real)
    # validated states and effects may each carry eigenvalues down to -PSD_TOL
    slack = BOUNDARY_TOL + 2 * rho.dim * PSD_TOL
    if -slack <= prob < 0:
        return 0.0
    if 1 < prob <= 1 + slack:
        return 1.0
    if not 0 <= prob <= 1:
        raise NumericConsistencyError(f"Born probability {prob:.12f} outside [0, 1]")
    return prob


def pure_state(ket: Sequence[complex]) -> DensityOperator:
    """|ψ⟩⟨ψ| for a (not necessarily normalized) ket."""
    psi = np.asarray(ket, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise NumericConsistencyError("cannot normalize the zero vector")
    psi = psi / norm
    return DensityOperator(matrix=np.outer(psi, psi.conj()))


def basis_state(dim: int, k: int) -> DensityOperator:
    ket = np.zeros(dim, dtype=np.complex128)
    ket[k] = 1
    return pure_state(ket)


def maximally_mixed(dim: int = 2) -> DensityOperator:
    return DensityOperator(matrix=identity(dim) / dim)


def projective_povm(dim: int) -> Povm:
    """Computational-basis measurement."""
    return Povm(effects=[basis_state(dim, k).matrix for k in range(dim)])


def random_unit_vector(rng: np.random.Generator) -> BlochVector:
    vector = rng.normal(size=3)
    return BlochVector.from_array(vector / np.linalg.norm(vector))


def random_bloch_vector(rng: np.random.Generator) -> BlochVector:
    """Uniform point inside the unit ball."""
    direction = random_unit_vector(rng).as_array()
    return BlochVector.from_array(direction * rng.random() ** (1 / 3))


def random_density(rng: np.random.Generator, dim: int = 2) -> DensityOperator:
    """Ginibre-distributed mixed state."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityOperator(matrix=rho / np.trace(rho).real)


def random_povm(
    rng: np.random.Generator, dim: int, outcomes: int, zero_prob: float = 0.0
) -> Povm:
    """Random POVM by normalizing random PSD seeds with S^{-1/2}.

    Each outcome is independently a zero effect with probability
    ``zero_prob``; at least one outcome is always kept.
    """
    keep = rng.random(outcomes) >= zero_prob
    if not keep.any():
        keep[rng.integers(outcomes)] = True
    seeds = []
    for k in range(outcomes):
        if keep[k]:
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            seeds.append(g @ g.conj().T)
        else:
            seeds.append(np.zeros((dim, dim), dtype=np.complex128))
    total = np.sum(seeds, axis=0)
    eigvals, eigvecs = np.linalg.eigh(total)
    inv_sqrt = eigvecs @ np.diag(eigvals ** -0.5) @ eigvecs.conj().T
    effects = []
    for seed in seeds:
        effect = inv_sqrt @ seed @ inv_sqrt
        effects.append((effect + effect.conj().T) / 2)
    # Absorb rounding into the last kept effect so completeness is tight
    last = int(np.flatnonzero(keep)[-1])
    effects[last] = effects[last] + (np.eye(dim) - np.sum(effects, axis=0))
    return Povm(effects=effects)


