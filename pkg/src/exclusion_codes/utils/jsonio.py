"""Reading and writing protocols, matrices and results."""

import json
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..errors import ProtocolValidationError
from ..models.matrices import CommMatrix, PsdFactorization
from ..models.quantum import DensityOperator, Povm
from ..models.tasks import Protocol, TaskKind, TaskSpec, parse_word_key, word_key

PathLike = Union[str, Path]

CSV_ROW_TOL = 1e-8
BUNDLED_PROTOCOLS = ("rec23", "trine")


def matrix_to_json(matrix: np.ndarray) -> List[List[List[float]]]:
    """Row-major complex matrix as nested ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def matrix_from_json(data: Any) -> np.ndarray:
    try:
        array = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise ProtocolValidationError("matrix entries must be [re, im] pairs")
    if array.ndim != 3 or array.shape[2] != 2:
        raise ProtocolValidationError(
            f"matrix must be rows of [re, im] pairs, got shape {array.shape}"
        )
    return array[..., 0] + 1j * array[..., 1]


def protocol_to_dict(p: Protocol) -> Dict[str, Any]:
    task = p.task
    return {
        "n": task.n,
        "m": task.m,
        "d": task.d,
        "task": task.kind.value,
        "states": {
            word_key(word, task.m): matrix_to_json(p.state(word).matrix)
            for word in task.words()
        },
        "measurements": [
            [matrix_to_json(effect) for effect in povm.effects] for povm in p.decodings
        ],
    }


def protocol_from_dict(data: Dict[str, Any], kind: Optional[TaskKind] = None) -> Protocol:
    """Build and validate a protocol; ``kind`` overrides the file's task field."""
    missing = [key for key in ("n", "m", "d", "states", "measurements") if key not in data]
    if missing:
        raise ProtocolValidationError(f"protocol file is missing {', '.join(missing)}")
    task = TaskSpec(
        n=data["n"],
        m=data["m"],
        d=data["d"],
        kind=kind or TaskKind(data.get("task", TaskKind.EXCLUSION.value)),
    )
    encoding = {}
    for key, matrix in data["states"].items():
        word = parse_word_key(key, task.n, task.m)
        encoding[word] = DensityOperator(matrix=matrix_from_json(matrix))
    decodings = [
        Povm(effects=[matrix_from_json(effect) for effect in effects])
        for effects in data["measurements"]
    ]
    return Protocol(task=task, encoding=encoding, decodings=decodings)


def load_protocol(path: PathLike, kind: Optional[TaskKind] = None) -> Protocol:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ProtocolValidationError(f"{path} is not valid JSON: {e}")
    return protocol_from_dict(data, kind)


def save_protocol(p: Protocol, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(json.dumps(protocol_to_dict(p), indent=2), encoding="utf-8")
    return path


def bundled_protocol_path(name: str) -> Path:
    """Path of a protocol file shipped in ``exclusion_codes/data/protocols``."""
    if name not in BUNDLED_PROTOCOLS:
        raise ProtocolValidationError(
            f"unknown bundled protocol {name!r}, choose from {', '.join(BUNDLED_PROTOCOLS)}"
        )
    root = resources.files("exclusion_codes") / "data" / "protocols" / f"{name}.json"
    return Path(str(root))


def factorization_to_dict(f: PsdFactorization) -> Dict[str, Any]:
    return {
        "k": f.k,
        "A": [matrix_to_json(a) for a in f.A],
        "B": [matrix_to_json(b) for b in f.B],
    }


def factorization_from_dict(data: Dict[str, Any]) -> PsdFactorization:
    return PsdFactorization(
        k=data["k"],
        A=[matrix_from_json(a) for a in data["A"]],
        B=[matrix_from_json(b) for b in data["B"]],
    )


def read_comm_matrix_csv(path: PathLike, tol: float = CSV_ROW_TOL) -> CommMatrix:
    """Plain decimal rows, no header; rows within ``tol`` of 1 are renormalized."""
    try:
        entries = np.loadtxt(Path(path), delimiter=",", ndmin=2)
    except ValueError as e:
        raise ProtocolValidationError(f"malformed CSV {path}: {e}")
    if entries.size == 0:
        raise ProtocolValidationError(f"CSV {path} is empty")
    if entries.min() < 0:
        raise ProtocolValidationError(f"CSV {path} has negative entries")
    sums = entries.sum(axis=1)
    for index, total in enumerate(sums):
        if abs(total - 1) > tol:
            raise ProtocolValidationError(f"row {index} sums to {total:.12f}, expected 1")
    return CommMatrix(entries=entries / sums[:, None], name=Path(path).stem)


def write_comm_matrix_csv(c: CommMatrix, path: PathLike) -> Path:
    path = Path(path)
    np.savetxt(path, c.entries, delimiter=",", fmt="%.17g")
    return path


def write_json(data: Any, path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, default=str)
    return path
