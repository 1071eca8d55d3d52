import math
from fractions import Fraction

import numpy as np
import pytest

from exclusion_codes.core.commmat import (
    Preset,
    comm_matrix,
    d3_psd_realization,
    fidelity,
    fidelity_gram,
    kron_cm,
    nmf_search,
    nonneg_rank_bounds,
    numeric_rank,
    preset,
    preset_exact,
    project_simplex,
    psd_lower_fidelity,
    success_from_comm_matrix,
    verify_psd_factorization,
)
from exclusion_codes.core.tasks import product_protocol, random_protocol
from exclusion_codes.errors import (
    DimensionError,
    DomainError,
    InvalidDistributionError,
    ProtocolValidationError,
)
from exclusion_codes.models.matrices import CommMatrix, NmfConfig, PsdFactorization
from exclusion_codes.models.tasks import TaskKind, TaskSpec

SMALL_NMF = NmfConfig(restarts=2, max_iters=200)


def test_comm_matrix_validation():
    with pytest.raises(ProtocolValidationError, match="negative"):
        CommMatrix(entries=[[1.5, -0.5], [0.5, 0.5]])
    with pytest.raises(ProtocolValidationError, match="row 1"):
        CommMatrix(entries=[[0.5, 0.5], [0.5, 0.6]])
    with pytest.raises(DimensionError):
        CommMatrix(entries=[0.5, 0.5])


def test_trine_matrix_is_a3(trine):
    c = comm_matrix(trine, position=0)
    np.testing.assert_allclose(c.entries, preset(Preset.A3).entries, atol=1e-12)
    assert success_from_comm_matrix(c, TaskKind.EXCLUSION) == pytest.approx(1.0)
    assert success_from_comm_matrix(c, TaskKind.ACCESS) == pytest.approx(0.0, abs=1e-12)


def test_joint_matrix_of_trine_pair_is_d3(trine):
    c = comm_matrix(product_protocol(trine, trine))
    assert c.entries.shape == (9, 9)
    np.testing.assert_allclose(c.entries, preset("d3").entries, atol=1e-12)


def test_joint_matrix_needs_commuting_decodings(rec23):
    with pytest.raises(ProtocolValidationError, match="commute"):
        comm_matrix(rec23)
    assert comm_matrix(rec23, position=1).entries.shape == (9, 3)
    with pytest.raises(ProtocolValidationError):
        comm_matrix(rec23, position=2)


def test_presets_are_exact():
    d3 = preset_exact(Preset.D3)
    assert len(d3) == 9
    assert all(sum(row) == 1 for row in d3)
    assert d3[0][0] == 0
    assert d3[0][4] == Fraction(1, 4)
    assert preset_exact(Preset.S2) == [[1, 0], [0, 1]]


def test_kron_of_a3_is_d3():
    c = kron_cm(preset("a3"), preset("a3"))
    assert c.name == "a3⊗a3"
    np.testing.assert_array_equal(c.entries, preset("d3").entries)


def test_joint_matrix_of_product_is_kron(rng):
    task = TaskSpec(n=1, m=3, d=2, kind=TaskKind.EXCLUSION)
    for _ in range(5):
        p, q = random_protocol(task, rng), random_protocol(task, rng)
        joint = comm_matrix(product_protocol(p, q))
        expected = kron_cm(comm_matrix(p), comm_matrix(q))
        np.testing.assert_allclose(joint.entries, expected.entries, atol=1e-12)


@pytest.mark.parametrize("name,rank", [("a3", 3), ("d3", 9), ("s2", 2), ("i9", 9)])
def test_numeric_rank(name, rank):
    assert numeric_rank(preset(name)) == rank


def test_numeric_rank_needs_positive_tol():
    with pytest.raises(DomainError):
        numeric_rank(preset("a3"), tol=0)


@pytest.mark.parametrize("name,rank", [("a3", 3), ("d3", 9), ("i9", 9)])
def test_nonneg_rank_of_presets(name, rank):
    bounds = nonneg_rank_bounds(preset(name))
    assert bounds.exact
    assert bounds.lower == bounds.upper == rank
    assert bounds.method_lower == "numeric rank"
    assert bounds.method_upper == "trivial factorization"
    assert bounds.certificate is None


def test_nmf_certificate_for_rank_one():
    c = CommMatrix(entries=[[0.2, 0.3, 0.5]] * 4)
    bounds = nonneg_rank_bounds(c, SMALL_NMF)
    assert (bounds.lower, bounds.upper) == (1, 1)
    assert bounds.method_upper == "nmf certificate (k=1)"
    certificate = bounds.certificate
    product = np.array(certificate.W) @ np.array(certificate.H)
    np.testing.assert_allclose(product, c.entries, atol=1e-8)
    assert np.min(certificate.W) >= 0 and np.min(certificate.H) >= 0


def test_nmf_miss_returns_none():
    assert nmf_search(preset("a3"), 2, SMALL_NMF) is None


def test_fidelity():
    assert fidelity([1, 0], [0.5, 0.5]) == pytest.approx(math.sqrt(0.5))
    assert fidelity([0.3, 0.7], [0.3, 0.7]) == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        fidelity([1.0], [0.5, 0.5])


def test_fidelity_gram_of_a3():
    gram = fidelity_gram(preset("a3"))
    np.testing.assert_allclose(np.diag(gram), 1.0)
    assert gram[0, 1] == pytest.approx(0.25)


def test_project_simplex(rng):
    np.testing.assert_allclose(project_simplex(np.array([0.5, 0.5, 0.5])), [1 / 3] * 3)
    np.testing.assert_allclose(project_simplex(np.array([2.0, 0.0, 0.0])), [1, 0, 0])
    for _ in range(20):
        q = project_simplex(rng.normal(size=6))
        assert q.min() >= 0
        assert q.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("name,expected", [("a3", 2.0), ("d3", 4.0), ("i9", 9.0)])
def test_fidelity_bound_uniform(name, expected):
    c = preset(name)
    bound = psd_lower_fidelity(c, np.full(c.cols, 1 / c.cols))
    assert bound.value == pytest.approx(expected)
    assert not bound.optimized
    assert not bound.hypothesis_satisfied


def test_fidelity_bound_optimized_d3():
    bound = psd_lower_fidelity(preset("d3"))
    assert bound.optimized
    assert bound.value == pytest.approx(4.0, abs=1e-9)
    assert sum(bound.q) == pytest.approx(1.0)


def test_fidelity_bound_hypothesis_holds_for_positive_matrix():
    bound = psd_lower_fidelity(CommMatrix(entries=np.full((3, 3), 1 / 3)))
    assert bound.hypothesis_satisfied
    assert bound.value == pytest.approx(1.0)


def test_fidelity_bound_rejects_bad_weights():
    with pytest.raises(InvalidDistributionError):
        psd_lower_fidelity(preset("a3"), [0.5, 0.5])
    with pytest.raises(InvalidDistributionError):
        psd_lower_fidelity(preset("a3"), [0.5, 0.5, 0.5])
    with pytest.raises(InvalidDistributionError):
        psd_lower_fidelity(preset("a3"), [1.5, -0.5, 0.0])


def test_d3_two_qubit_factorization():
    factorization = d3_psd_realization()
    assert factorization.k == 4
    passed, residual = verify_psd_factorization(factorization, preset("d3"))
    assert passed
    assert residual < 1e-12


def test_factorization_shape_mismatch():
    with pytest.raises(ProtocolValidationError):
        verify_psd_factorization(d3_psd_realization(), preset("a3"))


def test_factorization_validates_psd():
    with pytest.raises(ProtocolValidationError, match="positive semidefinite"):
        PsdFactorization(k=2, A=[np.diag([1.0, -1.0])], B=[np.eye(2)])
    with pytest.raises(DimensionError):
        PsdFactorization(k=2, A=[np.eye(3)], B=[np.eye(2)])


def test_success_needs_square_matrix(rec23):
    with pytest.raises(DimensionError):
        success_from_comm_matrix(comm_matrix(rec23, position=0), TaskKind.EXCLUSION)
