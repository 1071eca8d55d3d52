import math

import numpy as np
import pytest

from exclusion_codes.core.qstate import basis_state, maximally_mixed
from exclusion_codes.core.tasks import (
    anti_trine_povm,
    discrimination_protocol,
    eval_access,
    eval_exclusion,
    evaluate,
    exclusion_from_access,
    general_rec2m_protocol,
    hit_probabilities,
    maximally_mixed_protocol,
    permute_outcomes,
    product_protocol,
    rac23_protocol,
    random_protocol,
    relabel_alphabet,
    trine_state,
    xy_plane_rac23_protocol,
)
from exclusion_codes.errors import (
    CompositionError,
    DimensionError,
    InvalidTaskError,
    ProtocolValidationError,
)
from exclusion_codes.models.quantum import Povm
from exclusion_codes.models.tasks import (
    Protocol,
    TaskKind,
    TaskSpec,
    parse_word_key,
    word_key,
)

SQRT2 = math.sqrt(2)


def test_task_spec_counts():
    task = TaskSpec(n=2, m=3)
    assert task.num_words == 9
    assert task.num_questions == 18
    assert task.words()[:4] == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert task.label() == "(2,3,2) REC"


@pytest.mark.parametrize("n,m,d", [(0, 3, 2), (2, 1, 2), (2, 3, 1)])
def test_task_spec_rejects_ranges(n, m, d):
    with pytest.raises(InvalidTaskError):
        TaskSpec(n=n, m=m, d=d)


def test_word_keys():
    assert word_key((0, 2), 3) == "02"
    assert word_key((0, 11), 12) == "0,11"
    assert parse_word_key("0,11", 2, 12) == (0, 11)
    with pytest.raises(ProtocolValidationError):
        parse_word_key("03", 2, 3)
    with pytest.raises(ProtocolValidationError):
        parse_word_key("x1", 2, 3)


def test_rec23_value(rec23):
    assert eval_exclusion(rec23) == pytest.approx((7 + SQRT2) / 9, abs=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4, 7])
def test_general_rec2m_value(m):
    p = general_rec2m_protocol(m)
    assert eval_exclusion(p) == pytest.approx(1 - (2 - SQRT2) / m**2, abs=1e-12)


def test_rec2m_beats_classical_by_gap():
    for m in (3, 5):
        quantum = eval_exclusion(general_rec2m_protocol(m))
        classical = 1 - 1 / m**2
        assert quantum - classical == pytest.approx((SQRT2 - 1) / m**2, abs=1e-12)


def test_rac23_value():
    assert eval_access(rac23_protocol()) == pytest.approx((4 + SQRT2) / 9, abs=1e-12)


def test_xy_plane_orientation():
    p = xy_plane_rac23_protocol()
    assert eval_access(p) == pytest.approx((4 + SQRT2) / 9, abs=1e-12)
    assert eval_exclusion(p) == pytest.approx((5 - SQRT2) / 9, abs=1e-12)


def test_trine_exclusion_is_perfect(trine):
    assert eval_exclusion(trine) == pytest.approx(1.0, abs=1e-12)
    assert eval_access(trine) == pytest.approx(0.0, abs=1e-12)


def test_anti_trine_never_fires_on_its_state():
    povm = anti_trine_povm()
    for beta in range(3):
        rho = trine_state(beta).matrix
        assert abs(np.trace(povm.effects[beta] @ rho)) < 1e-12


def test_access_and_exclusion_sum_to_one(rng):
    p = random_protocol(TaskSpec(n=2, m=3, d=2), rng)
    assert eval_access(p) + eval_exclusion(p) == pytest.approx(1.0, abs=1e-12)
    assert evaluate(p, TaskKind.ACCESS) == eval_access(p)
    assert hit_probabilities(p).shape == (18,)


def test_maximally_mixed_baseline():
    p = maximally_mixed_protocol(TaskSpec(n=2, m=3))
    assert eval_access(p) == pytest.approx(1 / 3)
    assert eval_exclusion(p) == pytest.approx(2 / 3)


def test_discrimination_and_shift():
    p = discrimination_protocol(3)
    assert eval_access(p) == pytest.approx(1.0)
    shifted = exclusion_from_access(p)
    assert shifted.task.kind == TaskKind.EXCLUSION
    assert eval_exclusion(shifted) == pytest.approx(1.0)


def test_product_of_trines(trine):
    p = product_protocol(trine, trine)
    assert p.task.d == 4
    assert eval_exclusion(p) == pytest.approx(1.0, abs=1e-12)


def test_product_needs_single_letters(rec23, trine):
    with pytest.raises(CompositionError):
        product_protocol(rec23, trine)
    with pytest.raises(CompositionError):
        product_protocol(trine, discrimination_protocol(2))


def test_relabel_alphabet_keeps_value(rec23):
    relabeled = relabel_alphabet(rec23, [2, 0, 1])
    assert eval_exclusion(relabeled) == pytest.approx(eval_exclusion(rec23), abs=1e-12)


def test_permute_outcomes_changes_trine(trine):
    swapped = permute_outcomes(trine, [1, 2, 0])
    assert eval_exclusion(swapped) < 1


def test_permutation_validated(trine):
    with pytest.raises(ProtocolValidationError):
        permute_outcomes(trine, [0, 0, 1])


def test_binary_exclusion_is_access_of_swapped_outcomes(rng):
    p = general_rec2m_protocol(2)
    swapped = permute_outcomes(p, [1, 0])
    assert eval_exclusion(p) == pytest.approx((2 + SQRT2) / 4, abs=1e-12)
    assert eval_access(swapped) == pytest.approx(eval_exclusion(p), abs=1e-12)
    for _ in range(5):
        q = random_protocol(TaskSpec(n=2, m=2, d=2), rng)
        assert eval_access(permute_outcomes(q, [1, 0])) == pytest.approx(
            eval_exclusion(q), abs=1e-12
        )


def test_protocol_needs_every_word(trine):
    encoding = dict(trine.encoding)
    del encoding[(2,)]
    with pytest.raises(ProtocolValidationError, match="1 missing"):
        Protocol(task=trine.task, encoding=encoding, decodings=trine.decodings)


def test_protocol_checks_outcome_count(trine):
    with pytest.raises(ProtocolValidationError, match="outcomes"):
        Protocol(
            task=trine.task,
            encoding=trine.encoding,
            decodings=[discrimination_protocol(2).decodings[0]],
        )


def test_protocol_checks_state_dimension(trine):
    encoding = dict(trine.encoding)
    encoding[(0,)] = basis_state(3, 0)
    with pytest.raises(DimensionError):
        Protocol(task=trine.task, encoding=encoding, decodings=trine.decodings)


def test_protocol_checks_decoding_count(trine):
    encoding = {w: maximally_mixed(2) for w in TaskSpec(n=2, m=3).words()}
    with pytest.raises(ProtocolValidationError, match="decodings"):
        Protocol(task=TaskSpec(n=2, m=3), encoding=encoding, decodings=trine.decodings)


def test_general_rec2m_rejects_small_alphabet():
    with pytest.raises(InvalidTaskError):
        general_rec2m_protocol(1)


def test_effects_at_the_psd_tolerance_evaluate():
    povm = Povm(effects=[np.diag([-5e-10, 0.5]), np.diag([1 + 5e-10, 0.5])])
    encoding = {(0,): basis_state(2, 0), (1,): basis_state(2, 1)}
    p = Protocol(task=TaskSpec(n=1, m=2), encoding=encoding, decodings=[povm])
    assert eval_exclusion(p) == pytest.approx(0.75, abs=1e-9)
    assert eval_access(p) == pytest.approx(0.25, abs=1e-9)
