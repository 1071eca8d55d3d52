"""Communication matrices, their ranks and psd-rank certificates."""

import itertools
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    DimensionError,
    DomainError,
    InvalidDistributionError,
    ProtocolValidationError,
)
from ..models.matrices import (
    CommMatrix,
    FidelityBound,
    NmfCertificate,
    NmfConfig,
    PsdFactorization,
    RankBounds,
    SimplexConfig,
)
from ..models.tasks import Protocol, TaskKind
from ..utils.console import log
from ..utils.parallel import ordered_map
from .qstate import born_prob, tensor
from .tasks import anti_trine_povm, trine_state

COMMUTE_TOL = 1e-10
DISTRIBUTION_TOL = 1e-10
_EPS = 1e-300

ExactMatrix = List[List[Fraction]]


class Preset(str, Enum):
    """Named matrices from the exclusion/dimension discussion."""

    A3 = "a3"
    D3 = "d3"
    S2 = "s2"
    I9 = "i9"


def _joint_effect(povms: Sequence[Sequence[np.ndarray]], outcome: Sequence[int]) -> np.ndarray:
    product = np.eye(povms[0][0].shape[0], dtype=np.complex128)
    for effects, b in zip(povms, outcome):
        product = product @ effects[b]
    return product


def _check_commuting(p: Protocol) -> None:
    for i, j in itertools.combinations(range(p.task.n), 2):
        for e in p.decodings[i].effects:
            for f in p.decodings[j].effects:
                if np.max(np.abs(e @ f - f @ e)) > COMMUTE_TOL:
                    raise ProtocolValidationError(
                        f"decodings {i} and {j} do not commute; no joint matrix"
                    )


def comm_matrix(p: Protocol, position: Optional[int] = None) -> CommMatrix:
    """Outcome probabilities for every word.

    With ``position`` the columns are that decoding's outcomes. Otherwise the
    columns are outcome tuples of all positions (lexicographic), which needs
    mutually commuting decodings.
    """
    words = p.task.words()
    if position is not None:
        if not 0 <= position < p.task.n:
            raise ProtocolValidationError(f"position {position} outside 0..{p.task.n - 1}")
        effects = p.decodings[position].effects
        rows = [[born_prob(p.state(w), effect) for effect in effects] for w in words]
        return CommMatrix(entries=rows)

    _check_commuting(p)
    povms = [povm.effects for povm in p.decodings]
    outcomes = list(itertools.product(range(p.task.m), repeat=p.task.n))
    joint = [_joint_effect(povms, outcome) for outcome in outcomes]
    rows = [[born_prob(p.state(w), effect) for effect in joint] for w in words]
    return CommMatrix(entries=rows)


def _kron_exact(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    return [
        [x * y for x in row_a for y in row_b]
        for row_a in a
        for row_b in b
    ]


def _identity_exact(size: int) -> ExactMatrix:
    return [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]


def preset_exact(name: Preset) -> ExactMatrix:
    """Preset matrix with rational entries."""
    name = Preset(name)
    if name == Preset.A3:
        half = Fraction(1, 2)
        return [[Fraction(0) if i == j else half for j in range(3)] for i in range(3)]
    if name == Preset.D3:
        a3 = preset_exact(Preset.A3)
        return _kron_exact(a3, a3)
    if name == Preset.S2:
        return _identity_exact(2)
    return _identity_exact(9)


def preset(name: Preset) -> CommMatrix:
    name = Preset(name)
    exact = preset_exact(name)
    return CommMatrix(entries=[[float(x) for x in row] for row in exact], name=name.value)


def kron_cm(a: CommMatrix, b: CommMatrix) -> CommMatrix:
    """Communication matrix of two independent uses side by side."""
    name = f"{a.name}⊗{b.name}" if a.name and b.name else None
    return CommMatrix(entries=np.kron(a.entries, b.entries), name=name)


def numeric_rank(c: CommMatrix, tol: float = 1e-9) -> int:
    """Singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise DomainError(f"rank tolerance must be positive, got {tol}")
    singular = np.linalg.svd(c.entries, compute_uv=False)
    return int(np.sum(singular > tol * singular[0]))


def _nmf_attempt(
    job: Tuple[np.ndarray, int, int, int, int, float]
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Multiplicative updates from one random start; returns (max residual, W, H)."""
    target, k, seed, restart, max_iters, tol = job
    rng = np.random.default_rng([seed, k, restart])
    rows, cols = target.shape
    W = rng.uniform(0.1, 1.0, size=(rows, k))
    H = rng.uniform(0.1, 1.0, size=(k, cols))
    residual = float(np.max(np.abs(W @ H - target)))
    for iteration in range(max_iters):
        H *= (W.T @ target) / (W.T @ W @ H + _EPS)
        W *= (target @ H.T) / (W @ H @ H.T + _EPS)
        if iteration % 25 == 0 or iteration == max_iters - 1:
            residual = float(np.max(np.abs(W @ H - target)))
            if residual <= tol:
                break
    return residual, W, H


def nmf_search(c: CommMatrix, k: int, config: Optional[NmfConfig] = None) -> Optional[NmfCertificate]:
    """Look for C = W H with nonnegative inner dimension k.

    Returns the best certificate within ``config.tol`` or None; a miss says
    nothing about the rank.
    """
    config = config or NmfConfig()
    target = np.array(c.entries)
    jobs = [
        (target, k, config.seed, restart, config.max_iters, config.tol)
        for restart in range(config.restarts)
    ]
    attempts = ordered_map(_nmf_attempt, jobs)
    best = min(range(len(attempts)), key=lambda index: attempts[index][0])
    residual, W, H = attempts[best]
    if residual > config.tol:
        return None
    return NmfCertificate(k=k, W=W.tolist(), H=H.tolist(), max_residual=residual)


def nonneg_rank_bounds(c: CommMatrix, config: Optional[NmfConfig] = None) -> RankBounds:
    """rank ≤ rank_+ ≤ min(rows, cols), the upper end tightened by NMF certificates."""
    lower = numeric_rank(c)
    upper = min(c.rows, c.cols)
    method_upper = "trivial factorization"
    certificate = None
    for k in range(lower, upper):
        found = nmf_search(c, k, config)
        if found is not None:
            upper, method_upper, certificate = k, f"nmf certificate (k={k})", found
            break
    return RankBounds(
        lower=lower,
        upper=upper,
        method_lower="numeric rank",
        method_upper=method_upper,
        certificate=certificate,
    )


def fidelity(a: Sequence[float], b: Sequence[float]) -> float:
    """Classical fidelity Σ √(a_k b_k)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"vectors have shapes {a.shape} and {b.shape}")
    return float(np.sum(np.sqrt(np.clip(a, 0, None) * np.clip(b, 0, None))))


def fidelity_gram(c: CommMatrix) -> np.ndarray:
    """G_ij = F(col_i, col_j)²."""
    roots = np.sqrt(np.clip(c.entries, 0, None))
    return (roots.T @ roots) ** 2


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    ordered = np.sort(v)[::-1]
    cumulative = np.cumsum(ordered)
    index = np.arange(1, v.size + 1)
    rho = int(np.nonzero(ordered * index > cumulative - 1)[0][-1])
    theta = (cumulative[rho] - 1) / (rho + 1)
    return np.maximum(v - theta, 0.0)


def _check_distribution(q: Sequence[float], size: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (size,):
        raise InvalidDistributionError(f"q needs {size} entries, got shape {q.shape}")
    if q.min() < -DISTRIBUTION_TOL or abs(q.sum() - 1) > DISTRIBUTION_TOL:
        raise InvalidDistributionError(
            f"q is not a probability vector (min {q.min():.3e}, sum {q.sum():.12f})"
        )
    return q


def _minimize_quadratic(gram: np.ndarray, config: SimplexConfig) -> np.ndarray:
    """Projected gradient on qᵀ G q, uniform start first, then Dirichlet draws."""
    size = gram.shape[0]
    step = 1 / (2 * max(float(np.linalg.eigvalsh(gram).max()), _EPS))
    rng = np.random.default_rng(config.seed)
    starts = [np.full(size, 1 / size)]
    starts += [rng.dirichlet(np.ones(size)) for _ in range(config.restarts - 1)]

    best_q, best_value = starts[0], float(starts[0] @ gram @ starts[0])
    for q in starts:
        for _ in range(config.max_iters):
            moved = project_simplex(q - step * 2 * (gram @ q))
            done = np.max(np.abs(moved - q)) < config.tol
            q = moved
            if done:
                break
        value = float(q @ gram @ q)
        if value < best_value:
            best_q, best_value = q, value
    return best_q


def psd_lower_fidelity(
    c: CommMatrix,
    q: Optional[Sequence[float]] = None,
    config: Optional[SimplexConfig] = None,
) -> FidelityBound:
    """Lower bound 1 / Σ q_i q_j F(col_i, col_j)² on the psd rank.

    Without ``q`` the weights are optimized over the simplex. The bound is
    stated for positive doubly stochastic matrices; other inputs get a
    warning and ``hypothesis_satisfied=False``.
    """
    satisfied = c.is_doubly_stochastic() and bool(np.all(c.entries > 0))
    if not satisfied:
        log(
            "commmat",
            f"fidelity bound hypothesis not met for {c.name or 'matrix'} "
            "(needs square, doubly stochastic, positive)",
            "WARNING",
        )
    gram = fidelity_gram(c)
    if q is not None:
        weights = _check_distribution(q, c.cols)
        optimized = False
    else:
        weights = _minimize_quadratic(gram, config or SimplexConfig())
        optimized = True
    return FidelityBound(
        value=1 / float(weights @ gram @ weights),
        q=weights.tolist(),
        optimized=optimized,
        hypothesis_satisfied=satisfied,
    )


def d3_psd_realization() -> PsdFactorization:
    """Two-qubit factorization of D3: trine pairs against anti-trine pairs."""
    trines = [trine_state(alpha).matrix for alpha in range(3)]
    anti = anti_trine_povm().effects
    return PsdFactorization(
        k=4,
        A=[tensor(trines[a1], trines[a2]) for a1 in range(3) for a2 in range(3)],
        B=[tensor(anti[b1], anti[b2]) for b1 in range(3) for b2 in range(3)],
    )


def verify_psd_factorization(
    f: PsdFactorization, c: CommMatrix, tol: float = 1e-12
) -> Tuple[bool, float]:
    """Check C_ij = Tr[A_i B_j]; returns (passed, max residual)."""
    if len(f.A) != c.rows or len(f.B) != c.cols:
        raise ProtocolValidationError(
            f"factorization is {len(f.A)}×{len(f.B)}, matrix is {c.rows}×{c.cols}"
        )
    traces = np.einsum("iab,jba->ij", np.stack(f.A), np.stack(f.B)).real
    residual = float(np.max(np.abs(traces - c.entries)))
    return residual <= tol, residual


def success_from_comm_matrix(c: CommMatrix, kind: TaskKind) -> float:
    """Average success of a square matrix whose diagonal is the correct letter."""
    if c.rows != c.cols:
        raise DimensionError(f"success needs a square matrix, got {c.rows}×{c.cols}")
    hit = float(np.trace(c.entries)) / c.rows
    return 1 - hit if kind == TaskKind.EXCLUSION else hit
