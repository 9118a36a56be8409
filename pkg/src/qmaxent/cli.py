"""Command-line front end.

update runs a one-shot solve from a JSON problem file and writes the
report; verify runs the property-check suite over seeded random
instances. Machine-readable JSON goes to --out or standard output;
the human-readable summary goes to standard error. Exit codes: 0
success/converged, 1 parse/domain/usage error, 2 infeasible target,
3 non-convergence (verify: 1 when any check fails).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .checks import DEFAULT_SEED, DEFAULT_TRIALS, run_all_checks
from .classical import relative_entropy, solve_classical
from .errors import DomainError, EigensolverError, InfeasibleTargetError, ShapeError
from .quantum import DensityMatrix, quantum_relative_entropy, solve_quantum
from .serialization import (
    ProblemFormatError,
    canonical_dumps,
    parse_problem,
    property_results_to_obj,
    report_to_obj,
)
from .spin import solve_spin

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_NO_CONVERGENCE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the exit contract
    # reserves 2 for infeasibility, so route usage errors to 1.
    def error(self, message):
        raise _UsageError(message)


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _write_output(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)


def run_update(path: str, out_path: str | None = None) -> int:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        _say(f"error: {path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
        return EXIT_ERROR
    try:
        mode, payload = parse_problem(raw)
    except (ProblemFormatError, DomainError, ShapeError) as exc:
        _say(f"error: {path}: {exc}")
        return EXIT_ERROR

    try:
        if mode == "classical":
            prior = payload["prior"]
            report = solve_classical(prior, payload["constraints"], **payload["options"])
            entropy = {
                "full": relative_entropy(report.posterior, prior, "full"),
                "normalized": relative_entropy(report.posterior, prior, "normalized"),
            }
        elif mode == "quantum":
            prior = payload["prior"]
            report = solve_quantum(prior, payload["constraints"], **payload["options"])
            entropy = {
                "full": quantum_relative_entropy(report.posterior, prior, "full"),
                "umegaki": quantum_relative_entropy(report.posterior, prior, "umegaki"),
            }
        else:
            problem = payload["problem"]
            report = solve_spin(problem, **payload["options"])
            prior = DensityMatrix(np.diag([problem.a, problem.b]).astype(complex))
            entropy = {
                "full": quantum_relative_entropy(report.posterior, prior, "full"),
                "umegaki": quantum_relative_entropy(report.posterior, prior, "umegaki"),
            }
    except InfeasibleTargetError as exc:
        _say(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except (DomainError, ShapeError, EigensolverError) as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR

    try:
        _write_output(canonical_dumps(report_to_obj(mode, report, entropy)), out_path)
    except OSError as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR
    if report.converged:
        _say(f"{mode}: converged in {report.iterations} iterations, max residual {report.max_residual:.3e}")
        return EXIT_OK
    _say(f"{mode}: did not converge in {report.iterations} iterations, max residual {report.max_residual:.3e}")
    return EXIT_NO_CONVERGENCE


def run_verify(seed: int, trials: int, out_path: str | None = None) -> int:
    if trials < 1:
        _say(f"error: trials must be at least 1, got {trials}")
        return EXIT_ERROR
    results = run_all_checks(seed=seed, trials=trials)
    try:
        _write_output(canonical_dumps(property_results_to_obj(results)), out_path)
    except OSError as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR
    for r in results:
        status = "pass" if r.passed else "FAIL"
        _say(f"{status}  {r.name}: max deviation {r.max_deviation:.3e} (threshold {r.threshold:.0e})")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


def main(argv=None) -> int:
    parser = _Parser(
        prog="qmaxent",
        description="Relative-entropy updating of distributions and density matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    update = sub.add_parser("update", help="solve a problem file and write the report")
    update.add_argument("problem", help="path to a JSON problem file")
    update.add_argument("--out", help="write the JSON report here instead of stdout")

    verify = sub.add_parser("verify", help="run the property-check suite")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed")
    verify.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="instances per check")
    verify.add_argument("--out", help="write the JSON report here instead of stdout")

    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _say(f"usage error: {exc}")
        return EXIT_ERROR

    if args.command == "update":
        return run_update(args.problem, args.out)
    return run_verify(args.seed, args.trials, args.out)


if __name__ == "__main__":
    sys.exit(main())
