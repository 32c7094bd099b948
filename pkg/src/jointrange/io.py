"""JSON readers/writers for operator tuples and decompositions.

Complex arrays are split into ``re``/``im`` real arrays. Floats are written
with ``repr`` precision, so a write/read cycle reproduces every double.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hull import Atom
from .joint_range import OperatorTuple
from .reduce import ConvexDecomposition

FILE_HERMITIAN_TOL = 1e-10


class FormatError(ValueError):
    """A file does not follow the expected layout."""


def operators_to_dict(Ts: OperatorTuple) -> dict:
    return {
        "n": Ts.n,
        "d": Ts.d,
        "operators": [{"re": T.real.tolist(), "im": T.imag.tolist()} for T in Ts.ops],
    }


def operators_from_dict(data) -> OperatorTuple:
    try:
        n, d, ops = int(data["n"]), int(data["d"]), data["operators"]
        mats = [np.array(o["re"], dtype=float) + 1j * np.array(o["im"], dtype=float) for o in ops]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed operator file: {exc}") from exc
    if len(mats) != d:
        raise FormatError(f"file declares d={d} but holds {len(mats)} operators")
    for k, M in enumerate(mats):
        if M.shape != (n, n):
            raise FormatError(f"operator {k} has shape {M.shape}, expected {(n, n)}")
    try:
        return OperatorTuple(mats, tol=FILE_HERMITIAN_TOL)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def decomposition_to_dict(dec: ConvexDecomposition) -> dict:
    return {
        "point": [float(x) for x in dec.target],
        "atoms": [
            {
                "weight": float(a.weight),
                "vector_re": np.real(a.witness).tolist(),
                "vector_im": np.imag(a.witness).tolist(),
            }
            for a in dec.atoms
        ],
        "residual": float(dec.residual),
        "bound_used": int(dec.bound_used),
    }


def decomposition_from_dict(data) -> ConvexDecomposition:
    """Parse a decomposition; cached atom points are left as NaN until evaluated."""
    try:
        point = np.array(data["point"], dtype=float)
        atoms = []
        for a in data["atoms"]:
            h = np.array(a["vector_re"], dtype=float) + 1j * np.array(a["vector_im"], dtype=float)
            atoms.append(Atom(float(a["weight"]), h, np.full(point.shape, np.nan)))
        residual = float(data["residual"])
        bound = int(data["bound_used"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed decomposition file: {exc}") from exc
    if point.ndim != 1:
        raise FormatError("point must be a flat list of numbers")
    if any(a.witness.ndim != 1 or a.witness.shape != atoms[0].witness.shape for a in atoms):
        raise FormatError("atom vectors must be flat lists of one common length")
    return ConvexDecomposition(point, atoms, residual, bound)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def read_operators(path) -> OperatorTuple:
    return operators_from_dict(_read_json(path))


def write_operators(Ts: OperatorTuple, path) -> None:
    Path(path).write_text(json.dumps(operators_to_dict(Ts), indent=1) + "\n")


def read_decomposition(path) -> ConvexDecomposition:
    return decomposition_from_dict(_read_json(path))


def write_decomposition(dec: ConvexDecomposition, path) -> None:
    Path(path).write_text(json.dumps(decomposition_to_dict(dec), indent=1) + "\n")
