"""JSON interchange: matrices, problem files, solver and check reports.

Matrices travel as { "dim": n, "entries": [[re, im], ...] } with entries
row-major of length n^2. Report writing goes through canonical_dumps,
which formats every float with 17 significant digits and preserves key
order, so identical inputs produce byte-identical output.
"""

from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np

from .checks import PropertyResult
from .classical import ClassicalConstraint, ClassicalDistribution
from .linalg import HermitianOperator
from .quantum import DensityMatrix, QuantumConstraint
from .report import SolverReport
from .spin import SpinProblem


class ProblemFormatError(ValueError):
    """A problem file or matrix object does not match the expected shape."""


def matrix_to_obj(matrix) -> dict:
    arr = np.asarray(matrix, dtype=complex)
    n = arr.shape[0]
    entries = [[float(z.real), float(z.imag)] for z in arr.reshape(-1)]
    return {"dim": n, "entries": entries}


def matrix_from_obj(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ProblemFormatError(f"{where}: expected an object with dim and entries")
    dim = obj.get("dim")
    entries = obj.get("entries")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ProblemFormatError(f"{where}.dim: expected a positive integer, got {dim!r}")
    if not isinstance(entries, list) or len(entries) != dim * dim:
        found = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise ProblemFormatError(
            f"{where}.entries: expected {dim * dim} [re, im] pairs, got {found}"
        )
    flat = np.empty(dim * dim, dtype=complex)
    for k, pair in enumerate(entries):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise ProblemFormatError(
                f"{where}.entries[{k}]: expected a [re, im] pair of reals, got {pair!r}"
            )
        flat[k] = complex(pair[0], pair[1])
    return flat.reshape(dim, dim)


def _real_vector(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ProblemFormatError(f"{where}: expected a nonempty array of reals")
    for k, x in enumerate(obj):
        if not isinstance(x, (int, float)) or isinstance(x, bool):
            raise ProblemFormatError(f"{where}[{k}]: expected a real number, got {x!r}")
    return np.asarray(obj, dtype=float)


def _real_scalar(obj, where: str) -> float:
    if not isinstance(obj, (int, float)) or isinstance(obj, bool):
        raise ProblemFormatError(f"{where}: expected a real number, got {obj!r}")
    return float(obj)


def _solver_options(obj) -> dict:
    options: dict = {}
    if obj is None:
        return options
    if not isinstance(obj, dict):
        raise ProblemFormatError("solver: expected an object")
    if "tol" in obj:
        tol = _real_scalar(obj["tol"], "solver.tol")
        if tol <= 0:
            raise ProblemFormatError(f"solver.tol: must be positive, got {tol!r}")
        options["tol"] = tol
    if "max_iter" in obj:
        it = obj["max_iter"]
        if not isinstance(it, int) or isinstance(it, bool) or it < 1:
            raise ProblemFormatError(f"solver.max_iter: expected a positive integer, got {it!r}")
        options["max_iter"] = it
    return options


def parse_problem(obj) -> tuple[str, dict]:
    """Split a parsed problem file into (mode, payload).

    classical payload: prior (ClassicalDistribution), constraints, options.
    quantum payload: prior (DensityMatrix), constraints, options.
    spin payload: problem (SpinProblem), options (tol only).
    """
    if not isinstance(obj, dict):
        raise ProblemFormatError("problem file must be a JSON object")
    mode = obj.get("mode")
    if mode not in ("classical", "quantum", "spin"):
        raise ProblemFormatError(
            f"mode: expected classical, quantum or spin, got {mode!r}"
        )
    options = _solver_options(obj.get("solver"))

    if mode == "spin":
        c = obj.get("c")
        if not isinstance(c, list) or len(c) != 4:
            raise ProblemFormatError("c: expected [c1, cx, cy, cz]")
        problem = SpinProblem(
            a=_real_scalar(obj.get("a"), "a"),
            b=_real_scalar(obj.get("b"), "b"),
            c1=_real_scalar(c[0], "c[0]"),
            cx=_real_scalar(c[1], "c[1]"),
            cy=_real_scalar(c[2], "c[2]"),
            cz=_real_scalar(c[3], "c[3]"),
            target=_real_scalar(obj.get("target"), "target"),
        )
        options.pop("max_iter", None)
        return mode, {"problem": problem, "options": options}

    raw_constraints = obj.get("constraints", [])
    if not isinstance(raw_constraints, list):
        raise ProblemFormatError("constraints: expected an array")

    if mode == "classical":
        prior = ClassicalDistribution(_real_vector(obj.get("prior"), "prior"))
        constraints = []
        for k, entry in enumerate(raw_constraints):
            if not isinstance(entry, dict):
                raise ProblemFormatError(f"constraints[{k}]: expected an object")
            values = _real_vector(entry.get("observable"), f"constraints[{k}].observable")
            target = _real_scalar(entry.get("target"), f"constraints[{k}].target")
            constraints.append(ClassicalConstraint(values, target))
        return mode, {"prior": prior, "constraints": constraints, "options": options}

    prior = DensityMatrix(matrix_from_obj(obj.get("prior"), "prior"))
    constraints = []
    for k, entry in enumerate(raw_constraints):
        if not isinstance(entry, dict):
            raise ProblemFormatError(f"constraints[{k}]: expected an object")
        observable = HermitianOperator(
            matrix_from_obj(entry.get("observable"), f"constraints[{k}].observable")
        )
        target = _real_scalar(entry.get("target"), f"constraints[{k}].target")
        constraints.append(QuantumConstraint(observable, target))
    return mode, {"prior": prior, "constraints": constraints, "options": options}


def report_to_obj(mode: str, report: SolverReport, entropy: dict) -> dict:
    if isinstance(report.posterior, ClassicalDistribution):
        posterior = [float(w) for w in report.posterior.weights]
    else:
        posterior = matrix_to_obj(report.posterior.matrix)
    return {
        "mode": mode,
        "converged": bool(report.converged),
        "iterations": int(report.iterations),
        "multipliers": [float(a) for a in report.multipliers],
        "log_partition": float(report.log_partition),
        "residuals": [float(r) for r in report.residuals],
        "posterior": posterior,
        "entropy": entropy,
    }


def property_results_to_obj(results: Sequence[PropertyResult]) -> list:
    return [
        {
            "name": r.name,
            "max_deviation": float(r.max_deviation),
            "threshold": float(r.threshold),
            "passed": bool(r.passed),
            "detail": r.detail,
        }
        for r in results
    ]


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def canonical_dumps(value, indent: int = 2) -> str:
    """Deterministic JSON text: 17-significant-digit floats, stable keys."""
    pieces: list[str] = []

    def emit(node, depth: int) -> None:
        pad = " " * (indent * depth)
        inner = " " * (indent * (depth + 1))
        if node is None:
            pieces.append("null")
        elif isinstance(node, bool):
            pieces.append("true" if node else "false")
        elif isinstance(node, (int, np.integer)):
            pieces.append(str(int(node)))
        elif isinstance(node, (float, np.floating)):
            pieces.append(_format_float(float(node)))
        elif isinstance(node, str):
            pieces.append(json.dumps(node))
        elif isinstance(node, dict):
            if not node:
                pieces.append("{}")
                return
            pieces.append("{\n")
            for i, (key, item) in enumerate(node.items()):
                pieces.append(f"{inner}{json.dumps(str(key))}: ")
                emit(item, depth + 1)
                pieces.append(",\n" if i < len(node) - 1 else "\n")
            pieces.append(pad + "}")
        elif isinstance(node, (list, tuple, np.ndarray)):
            items = list(node)
            if not items:
                pieces.append("[]")
                return
            pieces.append("[\n")
            for i, item in enumerate(items):
                pieces.append(inner)
                emit(item, depth + 1)
                pieces.append(",\n" if i < len(items) - 1 else "\n")
            pieces.append(pad + "]")
        else:
            raise TypeError(f"cannot serialize {type(node).__name__}")

    emit(value, 0)
    pieces.append("\n")
    return "".join(pieces)
