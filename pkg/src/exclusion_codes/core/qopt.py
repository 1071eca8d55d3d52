"""Optimization of (2, 3) qubit exclusion/access over planar three-outcome POVMs.

For two planar measurements with weights r and unit directions m, the
optimal encoding of each word points along ∓(r1 m1 + r2 m2), so the whole
protocol is scored by

    f = Σ_{a1, a2} |r1_{a1} m1_{a1} + r2_{a2} m2_{a2}|

with exclusion success 2/3 + f/36 and access success 1/3 + f/36.

Search variables live in a box: each measurement's angle pair is written as
s = alpha0 + alpha2 in [π, 2π] and u in [0, 1] with
alpha0 = lo + u (hi - lo), lo = max(0, s - π), hi = min(π, s).
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ..errors import (
    DegenerateParameterizationError,
    DomainError,
    NumericConsistencyError,
    ProtocolValidationError,
    UnsupportedGeometryError,
)
from ..models.optimization import OptConfig, OptResult, PairParams, PlanarPovmParams
from ..models.quantum import BlochVector, DensityOperator, Povm
from ..models.tasks import Protocol, TaskKind, TaskSpec, Word
from ..utils.console import log
from ..utils.parallel import ordered_map
from .qstate import bloch_from_effect, effect_from_bloch, maximally_mixed, state_from_bloch

TWO_PI = 2 * math.pi
DEGENERATE_TOL = 1e-9
COMPLETENESS_TOL = 1e-8
RANK_ONE_TOL = 1e-8
COPLANAR_TOL = 1e-9
PLANE_TIE_TOL = 1e-6
F_MAX = 12.0

FSTAR_OPTIMUM = 4 * (1 + math.sqrt(2))

Weights = Tuple[float, float, float]


def _limit_weights(alpha0: float, alpha2: float) -> Weights:
    """Weights at a corner of the angle domain: the two-outcome limit.

    The outcome whose facing angle vanishes sits alone; of the two coincident
    outcomes opposite it the lower index keeps unit weight and the other
    vanishes, as in ``two_outcome_povm``.
    """
    alphas = (alpha0, TWO_PI - alpha0 - alpha2, alpha2)
    lonely = min(range(3), key=alphas.__getitem__)
    kept = 1 if lonely == 0 else 0
    return tuple(1.0 if k in (lonely, kept) else 0.0 for k in range(3))  # type: ignore[return-value]


def _resolve(alpha0: float, alpha2: float, snap: bool = True) -> Tuple[Weights, float, float]:
    """Weights plus the angles to place directions at (snapped at corners)."""
    sines = (math.sin(alpha0), math.sin(TWO_PI - alpha0 - alpha2), math.sin(alpha2))
    total = sum(sines)
    if abs(total) <= DEGENERATE_TOL:
        if not snap:
            raise DegenerateParameterizationError(
                f"weights undefined at alpha0={alpha0}, alpha2={alpha2}; "
                "every angle is 0 or π (use two_outcome_povm)"
            )
        corner0 = math.pi * round(alpha0 / math.pi)
        corner2 = math.pi * round(alpha2 / math.pi)
        return _limit_weights(corner0, corner2), corner0, corner2
    weights = tuple(min(1.0, max(0.0, 2 * sine / total)) for sine in sines)
    return weights, alpha0, alpha2  # type: ignore[return-value]


def weights_from_alphas(p: PlanarPovmParams) -> Weights:
    """Effect weights r_k = 2 sin(alpha_k) / Σ sin(alpha_j).

    Raises DegenerateParameterizationError when every angle is 0 or π.
    """
    weights, _, _ = _resolve(p.alpha0, p.alpha2, snap=False)
    return weights


def _offsets(alpha0: float, alpha2: float) -> Tuple[float, float, float]:
    return 0.0, alpha2, alpha2 + alpha0


def in_plane_direction(phi: float, theta: float = 0.0) -> np.ndarray:
    """Unit vector at angle ``phi`` in the plane spanned by (cosΘ, 0, sinΘ) and ŷ."""
    return np.array(
        [math.cos(phi) * math.cos(theta), math.sin(phi), math.cos(phi) * math.sin(theta)]
    )


def _povm_from_directions(weights: Sequence[float], directions: Sequence[np.ndarray]) -> Povm:
    effects = [
        effect_from_bloch(weight, BlochVector.from_array(direction))
        for weight, direction in zip(weights, directions)
    ]
    deviation = float(np.max(np.abs(sum(effects) - np.eye(2))))
    if deviation > COMPLETENESS_TOL:
        raise NumericConsistencyError(
            f"planar effects sum deviates from identity by {deviation:.3e}"
        )
    return Povm(effects=effects)


def povm_from_planar(
    p: PlanarPovmParams, theta: float = 0.0, snap_degenerate: bool = False
) -> Povm:
    """Three rank-one effects r_k(𝟙 + m_k·σ)/2 in the plane tilted by ``theta``.

    With ``snap_degenerate`` the corners of the angle domain map to their
    two-outcome limit instead of raising.
    """
    weights, alpha0, alpha2 = _resolve(p.alpha0, p.alpha2, snap=snap_degenerate)
    directions = [
        in_plane_direction(p.phi0 + offset, theta) for offset in _offsets(alpha0, alpha2)
    ]
    return _povm_from_directions(weights, directions)


def two_outcome_povm(phi0: float, theta: float = 0.0) -> Povm:
    """Projective pair at phi0 and phi0 + π, with a zero middle outcome."""
    directions = [
        in_plane_direction(phi0, theta),
        in_plane_direction(phi0 + math.pi / 2, theta),
        in_plane_direction(phi0 + math.pi, theta),
    ]
    return _povm_from_directions((1.0, 0.0, 1.0), directions)


def povms_from_params(params: PairParams) -> Tuple[Povm, Povm]:
    """Measurement 1 in the XY-plane rotated by Phi, measurement 2 in the tilted plane."""
    first = params.meas1.model_copy(update={"phi0": params.meas1.phi0 + params.Phi})
    return (
        povm_from_planar(first, snap_degenerate=True),
        povm_from_planar(params.meas2, theta=params.Theta, snap_degenerate=True),
    )


def _fstar(alpha10: float, alpha12: float, alpha20: float, alpha22: float, phi: float) -> float:
    return _f_general(alpha10, alpha12, alpha20, alpha22, phi, 0.0, 0.0)


def _f_general(
    alpha10: float,
    alpha12: float,
    alpha20: float,
    alpha22: float,
    phi1: float,
    phi2: float,
    theta: float,
) -> float:
    r1, alpha10, alpha12 = _resolve(alpha10, alpha12)
    r2, alpha20, alpha22 = _resolve(alpha20, alpha22)
    cos_theta = math.cos(theta)
    total = 0.0
    for weight1, offset1 in zip(r1, _offsets(alpha10, alpha12)):
        p = phi1 + offset1
        for weight2, offset2 in zip(r2, _offsets(alpha20, alpha22)):
            q = phi2 + offset2
            overlap = math.cos(p) * math.cos(q) * cos_theta + math.sin(p) * math.sin(q)
            squared = weight1 * weight1 + weight2 * weight2 + 2 * weight1 * weight2 * overlap
            total += math.sqrt(max(squared, 0.0))
    return total


def objective_fstar(meas1: PlanarPovmParams, meas2: PlanarPovmParams, Phi: float) -> float:
    """f for two measurements in the same plane, measurement 1 rotated by Phi."""
    return _fstar(
        meas1.alpha0, meas1.alpha2, meas2.alpha0, meas2.alpha2, Phi + meas1.phi0 - meas2.phi0
    )


def objective_f_general(params: PairParams) -> float:
    """f for measurement 2 in a plane tilted by Theta about the y-axis."""
    first, second = params.meas1, params.meas2
    return _f_general(
        first.alpha0,
        first.alpha2,
        second.alpha0,
        second.alpha2,
        params.Phi + first.phi0,
        second.phi0,
        params.Theta,
    )


def objective_f_bloch(povm1: Povm, povm2: Povm) -> float:
    """f computed from the effects themselves: Σ |Tr[E1 σ] + Tr[E2 σ]|."""
    vectors1 = [bloch_from_effect(effect)[1] for effect in povm1.effects]
    vectors2 = [bloch_from_effect(effect)[1] for effect in povm2.effects]
    return float(sum(np.linalg.norm(v1 + v2) for v1 in vectors1 for v2 in vectors2))


def success_from_f(f: float, kind: TaskKind) -> float:
    """(2, 3) success probability for objective value f."""
    if not -1e-12 <= f <= F_MAX + 1e-12:
        raise DomainError(f"objective value {f} outside [0, {F_MAX:g}]")
    if kind == TaskKind.EXCLUSION:
        return 2 / 3 + f / 36
    return 1 / 3 + f / 36


def _planar_vectors(povm: Povm, label: str) -> List[np.ndarray]:
    """Tr[E σ] per effect, after checking the effects are rank one and coplanar."""
    if povm.dim != 2:
        raise UnsupportedGeometryError(f"{label} acts on dimension {povm.dim}, need a qubit")
    if povm.num_outcomes > 3:
        raise UnsupportedGeometryError(
            f"{label} has {povm.num_outcomes} outcomes, at most 3 are supported"
        )
    vectors = []
    for k, effect in enumerate(povm.effects):
        weight, vector = bloch_from_effect(effect)
        if abs(weight - np.linalg.norm(vector)) > RANK_ONE_TOL:
            raise UnsupportedGeometryError(f"{label} effect {k} is not rank one")
        vectors.append(vector)
    if len(vectors) == 3 and abs(np.linalg.det(np.stack(vectors))) > COPLANAR_TOL:
        raise UnsupportedGeometryError(f"{label} directions are not coplanar")
    return vectors


def states_from_measurements(
    povm1: Povm, povm2: Povm, kind: TaskKind
) -> Dict[Word, DensityOperator]:
    """Optimal pure encoding for fixed decodings.

    Each word gets the pure state along -v (exclusion) or +v (access) with
    v = Tr[E1 σ] + Tr[E2 σ]; a vanishing v gives 𝟙/2.
    """
    vectors1 = _planar_vectors(povm1, "measurement 1")
    vectors2 = _planar_vectors(povm2, "measurement 2")
    sign = -1.0 if kind == TaskKind.EXCLUSION else 1.0
    states = {}
    for a1, v1 in enumerate(vectors1):
        for a2, v2 in enumerate(vectors2):
            v = v1 + v2
            norm = float(np.linalg.norm(v))
            if norm <= 1e-12:
                states[(a1, a2)] = maximally_mixed(2)
            else:
                states[(a1, a2)] = state_from_bloch(BlochVector.from_array(sign * v / norm))
    return states


def assemble_protocol(povm1: Povm, povm2: Povm, kind: TaskKind) -> Protocol:
    """Full (2, m) protocol: the decodings plus their optimal encoding."""
    if povm1.num_outcomes != povm2.num_outcomes:
        raise ProtocolValidationError(
            f"measurements have {povm1.num_outcomes} and {povm2.num_outcomes} outcomes"
        )
    task = TaskSpec(n=2, m=povm1.num_outcomes, d=2, kind=kind)
    encoding = states_from_measurements(povm1, povm2, kind)
    return Protocol(task=task, encoding=encoding, decodings=[povm1, povm2])


def _alphas_from_box(s: float, u: float) -> Tuple[float, float]:
    s = min(max(s, math.pi), TWO_PI)
    u = min(max(u, 0.0), 1.0)
    low, high = max(0.0, s - math.pi), min(math.pi, s)
    alpha0 = min(max(low + u * (high - low), 0.0), math.pi)
    alpha2 = min(max(s - alpha0, 0.0), math.pi)
    return alpha0, alpha2


def _box_from_alphas(alpha0: float, alpha2: float) -> Tuple[float, float]:
    s = alpha0 + alpha2
    low, high = max(0.0, s - math.pi), min(math.pi, s)
    u = (alpha0 - low) / (high - low) if high > low else 0.5
    return s, u


def _box_bounds(free_theta: bool) -> List[Tuple[float, float]]:
    bounds = [(math.pi, TWO_PI), (0.0, 1.0), (math.pi, TWO_PI), (0.0, 1.0), (0.0, math.pi)]
    if free_theta:
        bounds.append((0.0, math.pi))
    return bounds


def _box_value(x: Sequence[float], general: bool, fixed_theta: Optional[float]) -> float:
    alpha10, alpha12 = _alphas_from_box(x[0], x[1])
    alpha20, alpha22 = _alphas_from_box(x[2], x[3])
    phi = min(max(x[4], 0.0), math.pi)
    if not general:
        return _fstar(alpha10, alpha12, alpha20, alpha22, phi)
    theta = fixed_theta if fixed_theta is not None else min(max(x[5], 0.0), math.pi)
    return _f_general(alpha10, alpha12, alpha20, alpha22, phi, 0.0, theta)


def _params_from_box(x: Sequence[float], theta: float = 0.0) -> PairParams:
    alpha10, alpha12 = _alphas_from_box(x[0], x[1])
    alpha20, alpha22 = _alphas_from_box(x[2], x[3])
    return PairParams(
        meas1=PlanarPovmParams(alpha0=alpha10, alpha2=alpha12),
        meas2=PlanarPovmParams(alpha0=alpha20, alpha2=alpha22),
        Phi=min(max(x[4], 0.0), math.pi),
        Theta=theta,
    )


def _local_search(
    job: Tuple[Tuple[float, ...], float, int, bool, Optional[float]]
) -> Tuple[float, List[float], bool]:
    """Bounded Nelder-Mead from one start, then one polishing restart."""
    x0, tol, max_iters, general, fixed_theta = job
    bounds = _box_bounds(general and fixed_theta is None)
    options = {"xatol": tol, "fatol": tol, "maxiter": max_iters}

    def negative(x: np.ndarray) -> float:
        return -_box_value(x, general, fixed_theta)

    first = minimize(negative, np.asarray(x0), method="Nelder-Mead", bounds=bounds, options=options)
    polished = minimize(negative, first.x, method="Nelder-Mead", bounds=bounds, options=options)
    best = polished if polished.fun <= first.fun else first
    return float(-best.fun), [float(v) for v in best.x], bool(polished.success)


def _start_points(config: OptConfig, free_theta: bool) -> List[Tuple[float, ...]]:
    """Explicit starts first, then seeded uniform draws over the box."""
    bounds = np.array(_box_bounds(free_theta))
    rng = np.random.default_rng(config.seed)
    draws = rng.uniform(bounds[:, 0], bounds[:, 1], size=(config.restarts, len(bounds)))

    starts: List[Tuple[float, ...]] = []
    for raw in config.starts:
        if len(raw) not in (5, 6):
            raise DomainError(f"start point needs 5 or 6 angles, got {len(raw)}")
        point = [*_box_from_alphas(raw[0], raw[1]), *_box_from_alphas(raw[2], raw[3]), raw[4]]
        if free_theta:
            point.append(raw[5] if len(raw) == 6 else 0.0)
        starts.append(tuple(point))
    starts.extend(tuple(row) for row in draws[len(starts):])
    return starts


def _coplanar_representative(config: OptConfig, params: PairParams, best: float) -> PairParams:
    """A Theta in {0, π} point scoring within PLANE_TIE_TOL of ``best``, if one exists.

    The endpoints of the current point are tried first, then the coplanar
    slice is searched from the same seed with the current point as first start.
    """
    endpoints = [params.model_copy(update={"Theta": edge}) for edge in (0.0, math.pi)]
    edge_values = [objective_f_general(candidate) for candidate in endpoints]
    edge = int(np.argmax(edge_values))
    if edge_values[edge] >= best - PLANE_TIE_TOL:
        return endpoints[edge]

    start = [
        params.meas1.alpha0,
        params.meas1.alpha2,
        params.meas2.alpha0,
        params.meas2.alpha2,
        params.Phi,
    ]
    sliced = config.model_copy(update={"starts": [start, *config.starts][: config.restarts]})
    coplanar = _multistart(sliced, general=True, fixed_theta=0.0)
    if coplanar.best_value >= best - PLANE_TIE_TOL:
        log("qopt", f"Theta={params.Theta:.6f} ties the coplanar slice, reporting Theta=0")
        return coplanar.best_params
    log("qopt", f"no coplanar point reaches {best:.12f}", "WARNING")
    return params


def _multistart(config: OptConfig, general: bool, fixed_theta: Optional[float]) -> OptResult:
    free_theta = general and fixed_theta is None
    starts = _start_points(config, free_theta)
    jobs = [(x0, config.tol, config.max_iters, general, fixed_theta) for x0 in starts]
    outcomes = ordered_map(_local_search, jobs, config.workers)

    best_index = 0
    for index, (value, _, _) in enumerate(outcomes):
        if value > outcomes[best_index][0]:
            best_index = index
    values = [value for value, _, _ in outcomes]
    if len(outcomes) == 1:
        converged = outcomes[0][2]
    else:
        converged = values[-1] - max(values[:-1]) < config.tol

    best_x = outcomes[best_index][1]
    theta = 0.0
    if fixed_theta is not None:
        theta = fixed_theta
    elif free_theta:
        theta = min(max(best_x[5], 0.0), math.pi)
    params = _params_from_box(best_x, theta)

    if free_theta:
        params = _coplanar_representative(config, params, values[best_index])

    if general:
        best_value = objective_f_general(params)
    else:
        best_value = objective_fstar(params.meas1, params.meas2, params.Phi)
    if not converged:
        log("qopt", f"last restart still improved the best value ({best_value:.12f})", "WARNING")

    return OptResult(
        best_value=best_value,
        best_params=params,
        restarts_used=len(outcomes),
        converged=converged,
        seed=config.seed,
        generator=type(np.random.default_rng(config.seed).bit_generator).__name__,
        general_theta=free_theta,
        fixed_theta=fixed_theta,
        local_values=values,
    )


def optimize_fstar(config: Optional[OptConfig] = None) -> OptResult:
    """Maximize f over two coplanar measurements and their relative angle."""
    return _multistart(config or OptConfig(), general=False, fixed_theta=None)


def optimize_f_general(
    config: Optional[OptConfig] = None, theta: Optional[float] = None
) -> OptResult:
    """Maximize f with the second plane tilted by Theta.

    Theta is a free variable unless ``theta`` fixes one slice.
    """
    if theta is not None and not 0 <= theta <= math.pi:
        raise DomainError(f"Theta={theta} must lie in [0, π]")
    return _multistart(config or OptConfig(), general=True, fixed_theta=theta)


def _grid_weights(alpha0: np.ndarray, alpha2: np.ndarray) -> np.ndarray:
    alpha1 = TWO_PI - alpha0 - alpha2
    sines = np.stack([np.sin(alpha0), np.sin(alpha1), np.sin(alpha2)], axis=-1)
    total = sines.sum(axis=-1)
    degenerate = np.abs(total) <= DEGENERATE_TOL
    weights = np.clip(2 * sines / np.where(degenerate, 1.0, total)[..., None], 0.0, 1.0)
    lonely = np.stack([alpha0, alpha1, alpha2], axis=-1).argmin(axis=-1)
    kept = np.where(lonely == 0, 1, 0)
    outcome = np.arange(3)
    limit = np.where(
        (outcome == lonely[..., None]) | (outcome == kept[..., None]), 1.0, 0.0
    )
    return np.where(degenerate[..., None], limit, weights)


def grid_search_fstar(points_per_axis: int = 21) -> Tuple[float, PairParams]:
    """Best f on a regular grid over the search box (oracle for the optimizer)."""
    if points_per_axis < 2:
        raise DomainError(f"grid needs at least 2 points per axis, got {points_per_axis}")
    s_axis = np.linspace(math.pi, TWO_PI, points_per_axis)
    u_axis = np.linspace(0.0, 1.0, points_per_axis)
    phi_axis = np.linspace(0.0, math.pi, points_per_axis)

    s_grid, u_grid = (g.ravel() for g in np.meshgrid(s_axis, u_axis, indexing="ij"))
    low, high = np.maximum(0.0, s_grid - math.pi), np.minimum(math.pi, s_grid)
    alpha0 = np.clip(low + u_grid * (high - low), 0.0, math.pi)
    alpha2 = np.clip(s_grid - alpha0, 0.0, math.pi)
    weights = _grid_weights(alpha0, alpha2)
    offsets = np.stack([np.zeros_like(alpha0), alpha2, alpha2 + alpha0], axis=-1)

    r1 = weights[:, None, :, None]
    r2 = weights[None, :, None, :]
    relative = offsets[:, None, :, None] - offsets[None, :, None, :]
    best_value, best_point = -math.inf, (0, 0, 0)
    for phi_index, phi in enumerate(phi_axis):
        squared = r1**2 + r2**2 + 2 * r1 * r2 * np.cos(phi + relative)
        values = np.sqrt(np.maximum(squared, 0.0)).sum(axis=(2, 3))
        flat = int(np.argmax(values))
        if values.flat[flat] > best_value:
            best_value = float(values.flat[flat])
            best_point = (*np.unravel_index(flat, values.shape), phi_index)

    first, second, phi_index = best_point
    params = PairParams(
        meas1=PlanarPovmParams(alpha0=float(alpha0[first]), alpha2=float(alpha2[first])),
        meas2=PlanarPovmParams(alpha0=float(alpha0[second]), alpha2=float(alpha2[second])),
        Phi=float(phi_axis[phi_index]),
    )
    return best_value, params
