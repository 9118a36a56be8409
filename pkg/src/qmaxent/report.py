"""Solver result container shared by the classical, quantum and spin solvers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass
class SolverReport:
    """Outcome of a constrained update.

    posterior is a ClassicalDistribution or a DensityMatrix depending on
    the solver. partition_value = exp(log_partition); the log form is the
    stable one and is what gets serialized. converged means the residual
    max norm met the requested tolerance.
    """

    multipliers: np.ndarray
    partition_value: float
    log_partition: float
    posterior: Any
    residuals: np.ndarray
    iterations: int
    converged: bool

    @property
    def max_residual(self) -> float:
        if len(self.residuals) == 0:
            return 0.0
        return float(np.max(np.abs(self.residuals)))
