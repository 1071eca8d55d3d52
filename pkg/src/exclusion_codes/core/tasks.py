"""Protocol evaluators and the reference exclusion/access protocols."""

from typing import Optional, Sequence

import numpy as np

from ..errors import CompositionError, InvalidTaskError, ProtocolValidationError
from ..models.quantum import BlochVector, DensityOperator, Povm
from ..models.tasks import Protocol, TaskKind, TaskSpec
from .qstate import (
    basis_state,
    bloch_from_state,
    born_prob,
    effect_from_bloch,
    identity,
    maximally_mixed,
    projective_povm,
    pure_state,
    random_density,
    random_povm,
    state_from_bloch,
    tensor,
    tensor_states,
)

_S = 1 / np.sqrt(2)


def _bloch(x: float, y: float, z: float) -> BlochVector:
    return BlochVector(x=x, y=y, z=z)


def hit_probabilities(p: Protocol) -> np.ndarray:
    """Prob[b_i = a_i] for every (word, position), words in lexicographic order."""
    hits = [
        born_prob(p.state(word), p.decodings[i].effects[word[i]])
        for word in p.task.words()
        for i in range(p.task.n)
    ]
    return np.asarray(hits, dtype=float)


def eval_access(p: Protocol) -> float:
    """Average probability that Bob's answer equals the asked letter."""
    hits = hit_probabilities(p)
    return float(np.sum(hits) / hits.size)


def eval_exclusion(p: Protocol) -> float:
    """Average probability that Bob's answer differs from the asked letter."""
    hits = hit_probabilities(p)
    return float(np.sum(1.0 - hits) / hits.size)


def evaluate(p: Protocol, kind: TaskKind) -> float:
    return eval_exclusion(p) if kind == TaskKind.EXCLUSION else eval_access(p)


def _padded_povm(effects: Sequence[np.ndarray], m: int) -> Povm:
    """Append zero effects up to m outcomes."""
    dim = effects[0].shape[0]
    zeros = [np.zeros((dim, dim), dtype=np.complex128)] * (m - len(effects))
    return Povm(effects=list(effects) + zeros)


def general_rec2m_protocol(m: int) -> Protocol:
    """(2, m) qubit exclusion protocol with two-outcome decodings in the XZ-plane.

    Letters 0 and 1 are encoded on the axes, every other letter ("c") shares
    one state per position, and both measurements give the zero effect to all
    c outcomes. Exclusion success is 1 - (2 - √2)/m².
    """
    if m < 2:
        raise InvalidTaskError(f"alphabet size must be at least 2, got {m}")
    task = TaskSpec(n=2, m=m, d=2, kind=TaskKind.EXCLUSION)

    both_known = {
        (0, 0): _bloch(1, 0, 0),
        (0, 1): _bloch(0, 0, 1),
        (1, 0): _bloch(0, 0, -1),
        (1, 1): _bloch(-1, 0, 0),
    }
    second_is_c = {0: _bloch(_S, 0, _S), 1: _bloch(-_S, 0, -_S)}
    first_is_c = {0: _bloch(_S, 0, -_S), 1: _bloch(-_S, 0, _S)}

    encoding = {}
    for word in task.words():
        a1, a2 = word
        if a1 < 2 and a2 < 2:
            encoding[word] = state_from_bloch(both_known[word])
        elif a1 < 2:
            encoding[word] = state_from_bloch(second_is_c[a1])
        elif a2 < 2:
            encoding[word] = state_from_bloch(first_is_c[a2])
        else:
            encoding[word] = maximally_mixed(2)

    first = _padded_povm(
        [
            effect_from_bloch(1, _bloch(-_S, 0, -_S)),
            effect_from_bloch(1, _bloch(_S, 0, _S)),
        ],
        m,
    )
    second = _padded_povm(
        [
            effect_from_bloch(1, _bloch(-_S, 0, _S)),
            effect_from_bloch(1, _bloch(_S, 0, -_S)),
        ],
        m,
    )
    return Protocol(task=task, encoding=encoding, decodings=[first, second])


def rec23_protocol() -> Protocol:
    """The (2, 3) exclusion protocol attaining (7 + √2)/9."""
    return general_rec2m_protocol(3)


def antipodal_state(rho: DensityOperator) -> DensityOperator:
    """Qubit state with the negated Bloch vector (𝟙/2 is its own antipode)."""
    return state_from_bloch(-bloch_from_state(rho))


def rac23_protocol() -> Protocol:
    """(2, 3) access protocol attaining (4 + √2)/9.

    Same decodings as :func:`rec23_protocol`, every state replaced by its
    antipode.
    """
    rec = rec23_protocol()
    encoding = {word: antipodal_state(state) for word, state in rec.encoding.items()}
    return Protocol(
        task=rec.task.model_copy(update={"kind": TaskKind.ACCESS}),
        encoding=encoding,
        decodings=rec.decodings,
    )


def xy_plane_rac23_protocol() -> Protocol:
    """Equatorial (2, 3) encoding decoded along ±x and ±y.

    This orientation attains the access optimum (4 + √2)/9; its exclusion
    success is only (5 - √2)/9. The exclusion optimum needs the antipodal
    states, see :func:`rec23_protocol`.
    """
    task = TaskSpec(n=2, m=3, d=2, kind=TaskKind.ACCESS)
    phases = {
        (0, 0): np.pi / 4,
        (0, 1): -np.pi / 4,
        (1, 0): 3 * np.pi / 4,
        (1, 1): -3 * np.pi / 4,
        (2, 0): np.pi / 2,
        (2, 1): -np.pi / 2,
        (0, 2): 0.0,
        (1, 2): np.pi,
    }
    encoding = {
        word: pure_state([1, np.exp(1j * phase)]) for word, phase in phases.items()
    }
    encoding[(2, 2)] = maximally_mixed(2)
    first = _padded_povm(
        [effect_from_bloch(1, _bloch(1, 0, 0)), effect_from_bloch(1, _bloch(-1, 0, 0))],
        3,
    )
    second = _padded_povm(
        [effect_from_bloch(1, _bloch(0, 1, 0)), effect_from_bloch(1, _bloch(0, -1, 0))],
        3,
    )
    return Protocol(task=task, encoding=encoding, decodings=[first, second])


def trine_bloch(alpha: int) -> BlochVector:
    angle = 2 * np.pi * alpha / 3
    return _bloch(float(np.cos(angle)), float(np.sin(angle)), 0.0)


def trine_state(alpha: int) -> DensityOperator:
    """(|0⟩ + e^{2πiα/3}|1⟩)/√2."""
    return pure_state([1, np.exp(2j * np.pi * alpha / 3)])


def anti_trine_povm() -> Povm:
    """Effects (2/3)|ψ_β^⊥⟩⟨ψ_β^⊥|; outcome β never fires on trine state β."""
    return Povm(effects=[effect_from_bloch(2 / 3, -trine_bloch(beta)) for beta in range(3)])


def trine_exclusion_protocol() -> Protocol:
    """Single trit sent as a trine state and excluded with certainty."""
    task = TaskSpec(n=1, m=3, d=2, kind=TaskKind.EXCLUSION)
    encoding = {(alpha,): trine_state(alpha) for alpha in range(3)}
    return Protocol(task=task, encoding=encoding, decodings=[anti_trine_povm()])


def discrimination_protocol(d: int) -> Protocol:
    """Perfect d-letter guessing with basis states and a basis measurement."""
    task = TaskSpec(n=1, m=d, d=d, kind=TaskKind.ACCESS)
    encoding = {(k,): basis_state(d, k) for k in range(d)}
    return Protocol(task=task, encoding=encoding, decodings=[projective_povm(d)])


def constant_answer_povm(d: int, m: int, answer: int = 0) -> Povm:
    effects = [np.zeros((d, d), dtype=np.complex128) for _ in range(m)]
    effects[answer] = identity(d)
    return Povm(effects=effects)


def maximally_mixed_protocol(
    task: TaskSpec, decodings: Optional[Sequence[Povm]] = None
) -> Protocol:
    """Every word sent as 𝟙/d; decodings default to always answering 0."""
    if decodings is None:
        decodings = [constant_answer_povm(task.d, task.m) for _ in range(task.n)]
    encoding = {word: maximally_mixed(task.d) for word in task.words()}
    return Protocol(task=task, encoding=encoding, decodings=list(decodings))


def product_protocol(p: Protocol, q: Protocol) -> Protocol:
    """Two single-letter protocols run side by side on a product system."""
    if p.task.n != 1 or q.task.n != 1:
        raise CompositionError("product_protocol needs two single-letter protocols")
    if p.task.m != q.task.m:
        raise CompositionError(
            f"alphabet sizes differ: {p.task.m} and {q.task.m}"
        )
    d_p, d_q = p.task.d, q.task.d
    task = TaskSpec(n=2, m=p.task.m, d=d_p * d_q, kind=p.task.kind)
    encoding = {
        word: tensor_states(p.state((word[0],)), q.state((word[1],)))
        for word in task.words()
    }
    first = Povm(effects=[tensor(effect, identity(d_q)) for effect in p.decodings[0].effects])
    second = Povm(effects=[tensor(identity(d_p), effect) for effect in q.decodings[0].effects])
    return Protocol(task=task, encoding=encoding, decodings=[first, second])


def _check_permutation(perm: Sequence[int], m: int) -> None:
    if sorted(perm) != list(range(m)):
        raise ProtocolValidationError(f"{list(perm)} is not a permutation of 0..{m - 1}")


def permute_outcomes(p: Protocol, perm: Sequence[int]) -> Protocol:
    """Relabel Bob's answers: outcome k is reported as letter ``perm[k]``."""
    _check_permutation(perm, p.task.m)
    decodings = []
    for povm in p.decodings:
        effects = [None] * p.task.m
        for k, effect in enumerate(povm.effects):
            effects[perm[k]] = effect
        decodings.append(Povm(effects=effects))
    return Protocol(task=p.task, encoding=p.encoding, decodings=decodings)


def relabel_alphabet(p: Protocol, perm: Sequence[int]) -> Protocol:
    """Rename letter k to ``perm[k]`` in words and answers simultaneously."""
    _check_permutation(perm, p.task.m)
    relabeled: dict = {}
    for word, state in p.encoding.items():
        relabeled[tuple(perm[letter] for letter in word)] = state
    outcomes = permute_outcomes(p, perm)
    return Protocol(task=p.task, encoding=relabeled, decodings=outcomes.decodings)


def exclusion_from_access(p: Protocol) -> Protocol:
    """Shift every answer by one letter; perfect access becomes perfect exclusion."""
    m = p.task.m
    shifted = permute_outcomes(p, [(k + 1) % m for k in range(m)])
    return Protocol(
        task=p.task.model_copy(update={"kind": TaskKind.EXCLUSION}),
        encoding=shifted.encoding,
        decodings=shifted.decodings,
    )


def random_protocol(
    task: TaskSpec, rng: np.random.Generator, zero_prob: float = 0.2
) -> Protocol:
    """Random mixed states and random POVMs (some outcomes zeroed)."""
    encoding = {word: random_density(rng, task.d) for word in task.words()}
    decodings = [random_povm(rng, task.d, task.m, zero_prob) for _ in range(task.n)]
    return Protocol(task=task, encoding=encoding, decodings=decodings)


