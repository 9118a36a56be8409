"""Relative-entropy updating of density matrices.

The posterior for expectation constraints Tr(rho A_i) = t_i over a
full-rank prior phi is rho = exp(sum_i alpha_i A_i + ln phi) / Z with
Z = Tr exp(...). The multipliers solve the convex dual
G(alpha) = ln Z(alpha) - alpha.t whose gradient components are
Tr(rho(alpha) A_i) - t_i. The gradient is exact (spectral); the Hessian
is taken by central finite differences of the gradient, with a BFGS
inverse approximation substituted when the difference matrix is
ill-conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InfeasibleTargetError, ShapeError
from .linalg import HermitianOperator, matrix_log, trace_product
from .report import SolverReport

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
DIVERGENCE_NORM = 1e3
FULL_RANK_EIG = 1e-12
PSD_EIG_TOL = -1e-12
HESSIAN_STEP_SCALE = 1e-5
CONDITION_LIMIT = 1e12


class DensityMatrix:
    """A positive semidefinite Hermitian matrix with positive trace."""

    def __init__(self, matrix, trace_tol: float = 1e-10, normalized: bool | None = None):
        op = matrix if isinstance(matrix, HermitianOperator) else HermitianOperator(matrix)
        eigenvalues = np.linalg.eigvalsh(op.matrix)
        if eigenvalues[0] < PSD_EIG_TOL:
            raise DomainError(
                f"matrix is not positive semidefinite: smallest eigenvalue "
                f"{eigenvalues[0]:.3e}"
            )
        trace = float(np.trace(op.matrix).real)
        if trace <= 0:
            raise DomainError("trace must be positive")
        if normalized is None:
            normalized = abs(trace - 1.0) <= trace_tol
        elif normalized and abs(trace - 1.0) > trace_tol:
            raise DomainError(f"declared normalized but trace is {trace!r}")
        self.op = op
        self.eigenvalues = eigenvalues
        self.eigenvalues.setflags(write=False)
        self.trace = trace
        self.normalized = bool(normalized)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dim(self) -> int:
        return self.op.dim

    def is_full_rank(self) -> bool:
        return float(self.eigenvalues[0]) > FULL_RANK_EIG

    def normalize(self) -> "DensityMatrix":
        if self.normalized:
            return self
        return DensityMatrix(self.matrix / self.trace, normalized=True)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, normalized={self.normalized})"


@dataclass(frozen=True, eq=False)
class QuantumConstraint:
    """Expectation constraint: Tr(rho observable) = target."""

    observable: HermitianOperator
    target: float

    def __post_init__(self):
        obs = self.observable
        if not isinstance(obs, HermitianOperator):
            obs = HermitianOperator(obs)
        if not np.isfinite(self.target):
            raise DomainError("constraint target must be finite")
        object.__setattr__(self, "observable", obs)
        object.__setattr__(self, "target", float(self.target))


def expectation(rho: DensityMatrix, observable: HermitianOperator) -> float:
    """Tr(rho A), real for Hermitian operands."""
    return trace_product(rho.op, observable)


def _require_full_rank(phi: DensityMatrix, role: str) -> None:
    if not phi.is_full_rank():
        raise DomainError(
            f"{role} must be full rank: smallest eigenvalue "
            f"{float(phi.eigenvalues[0]):.3e} is not above {FULL_RANK_EIG:.0e}"
        )


def quantum_relative_entropy(
    rho: DensityMatrix, phi: DensityMatrix, variant: str = "full"
) -> float:
    """Entropy of rho relative to phi.

    variant "full": -Tr(rho ln rho - rho ln phi - rho); variant
    "umegaki": -Tr(rho ln rho - rho ln phi), the negative of the usual
    divergence. Zero eigenvalues of rho contribute nothing (0 ln 0 = 0);
    phi must be full rank.
    """
    if variant not in ("full", "umegaki"):
        raise ValueError(f"unknown variant {variant!r}")
    if rho.dim != phi.dim:
        raise ShapeError(f"dimension mismatch: {rho.dim} vs {phi.dim}")
    _require_full_rank(phi, "phi")
    vals = rho.eigenvalues
    positive = vals[vals > 0]
    tr_rho_ln_rho = float(np.sum(positive * np.log(positive)))
    ln_phi = matrix_log(phi.op, domain_guard=FULL_RANK_EIG)
    tr_rho_ln_phi = trace_product(rho.op, ln_phi)
    umegaki = -(tr_rho_ln_rho - tr_rho_ln_phi)
    if variant == "umegaki":
        return umegaki
    return umegaki + rho.trace


def _exponent_matrix(
    phi: DensityMatrix,
    observables: Sequence[HermitianOperator],
    alphas: np.ndarray,
) -> np.ndarray:
    _require_full_rank(phi, "prior")
    if len(observables) != len(alphas):
        raise ShapeError(
            f"{len(observables)} observables but {len(alphas)} multipliers"
        )
    c = matrix_log(phi.op, domain_guard=FULL_RANK_EIG).matrix.copy()
    for a, obs in zip(alphas, observables):
        if obs.dim != phi.dim:
            raise ShapeError(f"observable dim {obs.dim} does not match prior dim {phi.dim}")
        c = c + float(a) * obs.matrix
    return c


def _gibbs_state(c: np.ndarray) -> tuple[np.ndarray, float]:
    """Normalized exp(C) / Tr exp(C) and ln Tr exp(C) for Hermitian C."""
    vals, vecs = np.linalg.eigh(c)
    shift = vals[-1]
    w = np.exp(vals - shift)
    total = float(w.sum())
    ln_z = float(shift + np.log(total))
    rho = (vecs * (w / total)) @ vecs.conj().T
    return (rho + rho.conj().T) / 2.0, ln_z


def posterior_from_multipliers(
    phi: DensityMatrix,
    observables: Sequence[HermitianOperator],
    alphas,
) -> tuple[DensityMatrix, float]:
    """Canonical posterior exp(sum_i alpha_i A_i + ln phi)/Z and Z."""
    alphas = np.asarray(alphas, dtype=float)
    c = _exponent_matrix(phi, observables, alphas)
    rho, ln_z = _gibbs_state(c)
    return DensityMatrix(rho, normalized=True), float(np.exp(ln_z))


def log_partition(
    phi: DensityMatrix,
    observables: Sequence[HermitianOperator],
    alphas,
) -> float:
    """ln Tr exp(sum_i alpha_i A_i + ln phi), computed without overflow."""
    alphas = np.asarray(alphas, dtype=float)
    c = _exponent_matrix(phi, observables, alphas)
    vals = np.linalg.eigvalsh(c)
    shift = vals[-1]
    return float(shift + np.log(np.sum(np.exp(vals - shift))))


def _check_feasible(constraints: Sequence[QuantumConstraint], dim: int) -> None:
    for k, c in enumerate(constraints):
        if c.observable.dim != dim:
            raise ShapeError(
                f"constraint {k} has dim {c.observable.dim}, prior has dim {dim}"
            )
        spec = np.linalg.eigvalsh(c.observable.matrix)
        lo, hi = float(spec[0]), float(spec[-1])
        if not (lo < c.target < hi):
            raise InfeasibleTargetError(
                f"constraint {k}: target {c.target!r} is not strictly inside "
                f"the spectral range ({lo!r}, {hi!r})"
            )


def solve_quantum(
    prior: DensityMatrix,
    constraints: Sequence[QuantumConstraint],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    initial_multipliers=None,
) -> SolverReport:
    """Multipliers and posterior for a quantum constrained update.

    The prior must be full rank and normalized. Targets must lie strictly
    inside each observable's spectral range; divergence of the multiplier
    norm beyond 1e3 reports the target set as jointly infeasible.
    """
    _require_full_rank(prior, "prior")
    if not prior.normalized:
        raise DomainError("prior must be normalized (unit trace)")
    constraints = list(constraints)
    _check_feasible(constraints, prior.dim)
    m = len(constraints)

    if m == 0:
        return SolverReport(
            multipliers=np.zeros(0),
            partition_value=prior.trace,
            log_partition=float(np.log(prior.trace)),
            posterior=prior,
            residuals=np.zeros(0),
            iterations=0,
            converged=True,
        )

    observables = [c.observable for c in constraints]
    obs_arrays = [c.observable.matrix for c in constraints]
    targets = np.array([c.target for c in constraints])
    ln_phi = matrix_log(prior.op, domain_guard=FULL_RANK_EIG).matrix

    def state(alpha: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
        c = ln_phi.copy()
        for a, obs in zip(alpha, obs_arrays):
            c = c + float(a) * obs
        rho, ln_z = _gibbs_state(c)
        means = np.array([float(np.sum(obs * rho.T).real) for obs in obs_arrays])
        return rho, ln_z, means

    def fd_hessian(alpha: np.ndarray) -> np.ndarray:
        h = HESSIAN_STEP_SCALE * (float(np.linalg.norm(alpha)) + 1.0)
        hess = np.zeros((m, m))
        for j in range(m):
            shifted = np.zeros(m)
            shifted[j] = h
            _, _, plus = state(alpha + shifted)
            _, _, minus = state(alpha - shifted)
            hess[:, j] = (plus - minus) / (2.0 * h)
        return (hess + hess.T) / 2.0

    if initial_multipliers is None:
        alpha = np.zeros(m)
    else:
        alpha = np.asarray(initial_multipliers, dtype=float).copy()
        if alpha.shape != (m,):
            raise ShapeError(f"initial multipliers must have shape ({m},)")

    inv_approx = np.eye(m)
    prev_alpha = None
    prev_grad = None
    steps = 0
    converged = False
    _, _, means = state(alpha)
    grad = means - targets
    for _ in range(max_iter):
        if prev_grad is not None:
            s = alpha - prev_alpha
            y = grad - prev_grad
            sy = float(s @ y)
            if sy > 1e-12:
                sk = s[:, None]
                yk = y[:, None]
                left = np.eye(m) - (sk @ yk.T) / sy
                inv_approx = left @ inv_approx @ left.T + (sk @ sk.T) / sy
        if float(np.max(np.abs(grad))) <= tol:
            converged = True
            break
        hess = fd_hessian(alpha)
        use_fallback = not np.all(np.isfinite(hess)) or np.linalg.cond(hess) > CONDITION_LIMIT
        if use_fallback:
            step = -inv_approx @ grad
        else:
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                step = -inv_approx @ grad
        if float(grad @ step) >= 0:
            step = -grad
        # backtrack on the residual norm: unlike the dual value, the
        # gradient stays accurate near the optimum, so this comparison
        # is meaningful all the way down to machine scale
        grad_norm = float(np.linalg.norm(grad))
        scale = 1.0
        accepted = False
        while scale >= 1e-12:
            cand = alpha + scale * step
            _, _, cand_means = state(cand)
            cand_grad = cand_means - targets
            if float(np.linalg.norm(cand_grad)) < grad_norm:
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            break
        prev_alpha = alpha
        prev_grad = grad
        alpha = cand
        grad = cand_grad
        steps += 1
        if float(np.linalg.norm(alpha)) > DIVERGENCE_NORM:
            raise InfeasibleTargetError(
                "multiplier norm exceeded 1e3; targets are jointly infeasible"
            )

    posterior, z = posterior_from_multipliers(prior, observables, alpha)
    residuals = np.array(
        [expectation(posterior, obs) for obs in observables]
    ) - targets
    converged = bool(np.max(np.abs(residuals)) <= tol)
    return SolverReport(
        multipliers=alpha,
        partition_value=z,
        log_partition=log_partition(prior, observables, alpha),
        posterior=posterior,
        residuals=residuals,
        iterations=steps,
        converged=converged,
    )
