import numpy as np
import pytest

from exclusion_codes.core.qstate import (
    basis_state,
    bloch_from_effect,
    bloch_from_state,
    born_prob,
    effect_from_bloch,
    identity,
    maximally_mixed,
    projective_povm,
    pure_state,
    random_bloch_vector,
    random_density,
    random_povm,
    random_unit_vector,
    sigma_x,
    sigma_z,
    state_from_bloch,
    tensor,
    tensor_states,
)
from exclusion_codes.core.tasks import anti_trine_povm, trine_state
from exclusion_codes.errors import (
    DimensionError,
    InvalidBlochError,
    InvalidWeightError,
    NumericConsistencyError,
    ProtocolValidationError,
)
from exclusion_codes.models.quantum import BlochVector, DensityOperator, Povm


def test_bloch_vector_outside_ball_rejected():
    with pytest.raises(InvalidBlochError):
        BlochVector(x=1.0, y=0.5, z=0.0)


def test_bloch_negation():
    v = -BlochVector(x=0.3, y=-0.2, z=0.1)
    assert (v.x, v.y, v.z) == (-0.3, 0.2, -0.1)


def test_state_from_bloch_pole_is_basis_state():
    rho = state_from_bloch(BlochVector(z=1.0))
    np.testing.assert_allclose(rho.matrix, basis_state(2, 0).matrix, atol=1e-15)


def test_bloch_conversion_inverts(rng):
    for _ in range(20):
        v = random_bloch_vector(rng)
        back = bloch_from_state(state_from_bloch(v))
        np.testing.assert_allclose(back.as_array(), v.as_array(), atol=1e-12)


def test_bloch_from_state_needs_qubit():
    with pytest.raises(DimensionError):
        bloch_from_state(maximally_mixed(3))


def test_density_operator_rejects_bad_trace():
    with pytest.raises(ProtocolValidationError, match="trace"):
        DensityOperator(matrix=np.eye(2))


def test_density_operator_rejects_negative_eigenvalue():
    with pytest.raises(ProtocolValidationError, match="positive semidefinite"):
        DensityOperator(matrix=np.diag([1.5, -0.5]))


def test_density_operator_rejects_non_square():
    with pytest.raises(DimensionError):
        DensityOperator(matrix=np.ones((2, 3)) / 2)


def test_effect_from_bloch_weight_and_direction():
    effect = effect_from_bloch(0.5, BlochVector(x=1.0))
    weight, vector = bloch_from_effect(effect)
    assert weight == pytest.approx(0.5)
    np.testing.assert_allclose(vector, [0.5, 0, 0], atol=1e-15)


def test_effect_from_bloch_zero_weight_ignores_direction():
    assert not effect_from_bloch(0.0, None).any()


@pytest.mark.parametrize("weight", [-0.1, 1.2])
def test_effect_from_bloch_rejects_weight(weight):
    with pytest.raises(InvalidWeightError):
        effect_from_bloch(weight, BlochVector(z=1.0))


def test_effect_from_bloch_needs_unit_direction():
    with pytest.raises(InvalidBlochError):
        effect_from_bloch(0.5, BlochVector(z=0.5))


def test_tensor_dimensions_and_trace(rng):
    rho = tensor_states(random_density(rng), random_density(rng, 3))
    assert rho.dim == 6
    assert np.trace(rho.matrix).real == pytest.approx(1.0)
    assert tensor(sigma_x(), identity(3)).shape == (6, 6)


def test_born_prob_sums_to_one(rng):
    rho = random_density(rng, 3)
    povm = random_povm(rng, 3, 4, zero_prob=0.3)
    assert sum(born_prob(rho, e) for e in povm.effects) == pytest.approx(1.0, abs=1e-12)


def test_born_prob_shape_mismatch():
    with pytest.raises(DimensionError):
        born_prob(maximally_mixed(2), identity(3))


def test_born_prob_outside_unit_interval():
    with pytest.raises(NumericConsistencyError):
        born_prob(basis_state(2, 0), 2 * identity())


def test_born_prob_clamps_rounding():
    effect = (1 + 1e-12) * (identity() + sigma_z()) / 2
    assert born_prob(basis_state(2, 0), effect) == 1.0


def test_pure_state_normalizes():
    rho = pure_state([3, 4j])
    assert rho.purity() == pytest.approx(1.0)
    assert rho.matrix[0, 0].real == pytest.approx(9 / 25)


def test_pure_state_zero_vector():
    with pytest.raises(NumericConsistencyError):
        pure_state([0, 0])


def test_povm_rejects_incomplete_effects():
    with pytest.raises(ProtocolValidationError, match="identity"):
        Povm(effects=[basis_state(2, 0).matrix])


def test_povm_allows_zero_effects():
    povm = Povm(effects=[identity(), np.zeros((2, 2))])
    assert povm.num_outcomes == 2


def test_povm_rejects_mixed_dimensions():
    with pytest.raises(DimensionError):
        Povm(effects=[identity(2), np.zeros((3, 3))])


def test_projective_povm_is_complete():
    povm = projective_povm(4)
    np.testing.assert_allclose(np.sum(povm.effects, axis=0), identity(4))


def test_random_povm_zero_outcomes(rng):
    povm = random_povm(rng, 2, 6, zero_prob=1.0)
    nonzero = [e for e in povm.effects if np.abs(e).max() > 0]
    assert len(nonzero) == 1


def test_plus_x_state_entries():
    np.testing.assert_allclose(state_from_bloch(BlochVector(x=1.0)).matrix, np.full((2, 2), 0.5))


def test_trine_against_anti_trine_is_half():
    assert born_prob(trine_state(0), anti_trine_povm().effects[1]) == pytest.approx(0.5)


def test_born_rule_on_bloch_sphere(rng):
    for _ in range(20):
        n = random_bloch_vector(rng)
        m = random_unit_vector(rng)
        r = rng.random()
        expected = r * (1 + n.as_array() @ m.as_array()) / 2
        assert born_prob(state_from_bloch(n), effect_from_bloch(r, m)) == pytest.approx(
            expected, abs=1e-12
        )


def test_antipodal_projectors_complete(rng):
    v = random_unit_vector(rng)
    total = effect_from_bloch(1, v) + effect_from_bloch(1, -v)
    np.testing.assert_allclose(total, identity(), atol=1e-12)
