"""Exact classical optima by enumerating Alice's partitions.

Bob's decoding is never enumerated: for a fixed partition the success count
splits into independent terms per (message, position), so the best answer
for each term is read off the letter counts of that part.
"""

import time
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import EnumerationTooLargeError, InvalidTaskError, ProtocolValidationError
from ..models.strategies import ClassicalOptimum, DeterministicStrategy
from ..models.tasks import TaskKind, TaskSpec
from ..utils.console import log
from ..utils.parallel import ordered_map

DEFAULT_MAX_PARTITIONS = 2**25
DEFAULT_CHUNK_SIZE = 2**16


def _letter_matrix(n: int, m: int) -> np.ndarray:
    """One-hot table L[w, i*m + b] = 1 iff word w has letter b at position i."""
    words = np.array(np.unravel_index(np.arange(m**n), (m,) * n)).T
    table = np.zeros((m**n, n * m))
    for i in range(n):
        table[np.arange(m**n), i * m + words[:, i]] = 1.0
    return table


def _letter_counts(partition: Sequence[int], task: TaskSpec) -> np.ndarray:
    """counts[c, i, b] = #{a in part c : a_i = b}."""
    letters = _letter_matrix(task.n, task.m)
    parts = np.asarray(partition)
    counts = np.stack([letters[parts == c].sum(axis=0) for c in range(task.d)])
    return counts.reshape(task.d, task.n, task.m).round().astype(int)


def _check_partition(partition: Sequence[int], task: TaskSpec) -> None:
    if len(partition) != task.num_words:
        raise ProtocolValidationError(
            f"partition has {len(partition)} entries, task has {task.num_words} words"
        )
    if any(not 0 <= c < task.d for c in partition):
        raise ProtocolValidationError(f"partition messages must lie in 0..{task.d - 1}")


def eval_deterministic(s: DeterministicStrategy, task: TaskSpec) -> Fraction:
    """Exact success probability of a deterministic strategy."""
    _check_partition(s.partition, task)
    if len(s.bob_table) != task.d or any(len(row) != task.n for row in s.bob_table):
        raise ProtocolValidationError(f"bob_table must be {task.d}×{task.n}")
    if any(not 0 <= b < task.m for row in s.bob_table for b in row):
        raise ProtocolValidationError(f"bob_table answers must lie in 0..{task.m - 1}")

    successes = 0
    for word, message in zip(task.words(), s.partition):
        for i, letter in enumerate(word):
            hit = s.bob_table[message][i] == letter
            successes += hit if task.kind == TaskKind.ACCESS else not hit
    return Fraction(successes, task.num_questions)


def optimal_bob_table(
    partition: Sequence[int], task: TaskSpec
) -> Tuple[List[List[int]], Fraction]:
    """Best answers for a fixed partition and the resulting exact value.

    Ties go to the smallest letter.
    """
    _check_partition(partition, task)
    counts = _letter_counts(partition, task)
    if task.kind == TaskKind.EXCLUSION:
        table = counts.argmin(axis=2)
        successes = int((counts.sum(axis=2) - counts.min(axis=2)).sum())
    else:
        table = counts.argmax(axis=2)
        successes = int(counts.max(axis=2).sum())
    return table.tolist(), Fraction(successes, task.num_questions)


def partition_from_index(index: int, task: TaskSpec) -> List[int]:
    """Digits of ``index`` in base d; word w (lexicographic) takes digit w."""
    return [(index // task.d**w) % task.d for w in range(task.num_words)]


def _best_in_range(job: Tuple[int, int, int, int, int, str]) -> Tuple[int, int]:
    """Best (success count, partition index) over [start, stop)."""
    start, stop, n, m, d, kind = job
    letters = _letter_matrix(n, m)
    num_words = m**n
    indices = np.arange(start, stop, dtype=np.int64)
    powers = d ** np.arange(num_words, dtype=np.int64)
    digits = (indices[:, None] // powers[None, :]) % d

    scores = np.zeros(indices.size)
    for c in range(d):
        counts = ((digits == c).astype(np.float64) @ letters).reshape(-1, n, m)
        if kind == TaskKind.EXCLUSION.value:
            scores += (counts.sum(axis=2) - counts.min(axis=2)).sum(axis=1)
        else:
            scores += counts.max(axis=2).sum(axis=1)
    best = int(np.argmax(scores))
    return int(round(scores[best])), start + best


def classical_max(
    task: TaskSpec,
    max_partitions: int = DEFAULT_MAX_PARTITIONS,
    workers: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> ClassicalOptimum:
    """Exact optimum over all deterministic strategies.

    Shared randomness only mixes deterministic strategies, so the maximum
    over them is the classical optimum. The result does not depend on
    ``workers``: chunks are reduced in counter order and ties keep the
    smallest partition index.
    """
    total = task.d**task.num_words
    if total > max_partitions:
        raise EnumerationTooLargeError(
            f"{task.label()} needs {total} partitions (d^(m^n) = "
            f"{task.d}^{task.num_words}), budget is {max_partitions}"
        )

    started = time.time()
    jobs = [
        (start, min(start + chunk_size, total), task.n, task.m, task.d, task.kind.value)
        for start in range(0, total, chunk_size)
    ]
    best_score, best_index = -1, -1
    for score, index in ordered_map(_best_in_range, jobs, workers):
        if score > best_score:
            best_score, best_index = score, index

    partition = partition_from_index(best_index, task)
    table, value = optimal_bob_table(partition, task)
    if value != Fraction(best_score, task.num_questions):
        raise ProtocolValidationError("enumeration score disagrees with exact recount")

    elapsed = time.time() - started
    if elapsed > 5.0:
        log("classical", f"{task.label()}: {total} partitions in {elapsed:.2f}s")

    return ClassicalOptimum(
        task=task,
        value=value,
        witness=DeterministicStrategy(partition=partition, bob_table=table),
        partitions_searched=total,
        witness_index=best_index,
    )


def classical_closed_form_rec(m: int) -> Fraction:
    """Classical (2, m) exclusion optimum with one bit: 1 - 1/m²."""
    if m < 2:
        raise InvalidTaskError(f"alphabet size must be at least 2, got {m}")
    return 1 - Fraction(1, m * m)


def random_strategy(task: TaskSpec, rng: np.random.Generator) -> DeterministicStrategy:
    partition = rng.integers(task.d, size=task.num_words).tolist()
    table = rng.integers(task.m, size=(task.d, task.n)).tolist()
    return DeterministicStrategy(partition=partition, bob_table=table)
