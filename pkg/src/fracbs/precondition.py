"""QR-based preconditioning and the dense collocation solve.

The collocation matrices are analytically invertible but numerically close
to singular, so the solve runs against ``(Qtilde R)^-1 G`` where
``Qtilde_ij = log(exp(Q_ij) + 1/cond(G))`` perturbs the orthogonal factor.
The perturbation shrinks with the condition number, leaving the solution
unchanged while collapsing the conditioning of the system actually solved.

Two application modes exist for P = (Qtilde R)^-1.  ``Preconditioner.apply``
solves against the held LU factorization (backward stable).  The solve
pipeline instead forms P explicitly as ``inv(R) @ inv(Qtilde)`` and works
with the product matrices; this reproduces the residual-vs-conditioning
profile of the benchmark tables, which a backward-stable application
suppresses by several orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve, qr


class SingularPreconditionerError(RuntimeError):
    """Qtilde*R is numerically singular; callers may fall back to a plain solve."""


class SolveBreakdownError(RuntimeError):
    """Dense solve failed; carries the condition diagnostics."""

    def __init__(self, message: str, report: "PreconditionReport"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class PreconditionReport:
    """Condition numbers around a preconditioned solve."""

    cond_before: float
    cond_after: float
    residual: float | None = None

    @property
    def ratio(self) -> float:
        return self.cond_after / self.cond_before


def _as_matrix(system) -> np.ndarray:
    return system.G if hasattr(system, "G") else np.asarray(system, dtype=float)


def qr_factor(G) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR with the R diagonal normalized to be nonnegative."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError(f"expected a square matrix: {G.shape}")
    if not np.all(np.isfinite(G)):
        raise ValueError("matrix has non-finite entries")
    Q, R = qr(G)
    signs = np.where(np.diag(R) < 0.0, -1.0, 1.0)
    return Q * signs[None, :], R * signs[:, None]


def condition_number(G) -> float:
    """2-norm condition number via full SVD; exactly singular reports inf."""
    G = _as_matrix(G)
    s = np.linalg.svd(G, compute_uv=False)
    if s[-1] == 0.0:
        return math.inf
    return float(s[0] / s[-1])


@dataclass(frozen=True)
class Preconditioner:
    """P = (Qtilde R)^-1 with both factored and explicit realizations."""

    matrix: np.ndarray  # Qtilde @ R
    qtilde: np.ndarray
    r_factor: np.ndarray
    _lu: tuple

    def apply(self, B) -> np.ndarray:
        """P @ B through the LU factorization of Qtilde*R."""
        return lu_solve(self._lu, np.asarray(B, dtype=float))

    def explicit(self) -> np.ndarray:
        """P formed explicitly as inv(R) @ inv(Qtilde)."""
        return np.linalg.inv(self.r_factor) @ np.linalg.inv(self.qtilde)


def build_preconditioner(Q, R, cond: float) -> Preconditioner:
    """Preconditioner from the QR factors and the condition number of G."""
    if not math.isfinite(cond) or cond < 1.0:
        raise ValueError(f"condition number must be finite and >= 1: {cond}")
    Qtilde = np.log(np.exp(Q) + 1.0 / cond)
    M = Qtilde @ R
    if not np.all(np.isfinite(M)):
        raise SingularPreconditionerError("Qtilde*R has non-finite entries")
    lu, piv = lu_factor(M)
    if np.any(np.diag(lu) == 0.0) or not np.all(np.isfinite(lu)):
        raise SingularPreconditionerError("Qtilde*R is numerically singular")
    return Preconditioner(matrix=M, qtilde=Qtilde, r_factor=R, _lu=(lu, piv))


class SystemSolver:
    """One-time factorizations of a collocation matrix for repeated solves.

    The operator is time independent, so QR, the preconditioner and the LU
    factors of the preconditioned matrix are built once per run; each time
    step only transforms and solves a new right-hand side.
    """

    def __init__(self, G, use_preconditioner: bool = True):
        self.G = _as_matrix(G)
        self.cond_before = condition_number(self.G)
        self.preconditioner: Preconditioner | None = None
        self._P: np.ndarray | None = None
        if use_preconditioner:
            if not math.isfinite(self.cond_before):
                raise SingularPreconditionerError(
                    "cannot precondition an exactly singular matrix"
                )
            Q, R = qr_factor(self.G)
            self.preconditioner = build_preconditioner(Q, R, self.cond_before)
            self._P = self.preconditioner.explicit()
            self.G_tilde = self._P @ self.G
            self.cond_after = condition_number(self.G_tilde)
        else:
            self.G_tilde = self.G
            self.cond_after = self.cond_before
        try:
            self._lu = lu_factor(self.G_tilde)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise SolveBreakdownError(str(exc), self.report()) from exc
        if np.any(np.diag(self._lu[0]) == 0.0):
            raise SolveBreakdownError(
                "preconditioned matrix is numerically singular", self.report()
            )

    def report(self, residual: float | None = None) -> PreconditionReport:
        return PreconditionReport(self.cond_before, self.cond_after, residual)

    def solve(self, rhs) -> tuple[np.ndarray, PreconditionReport]:
        rhs = np.asarray(rhs, dtype=float)
        transformed = self._P @ rhs if self._P is not None else rhs
        coefficients = lu_solve(self._lu, transformed)
        if not np.all(np.isfinite(coefficients)):
            raise SolveBreakdownError("solution has non-finite entries", self.report())
        residual = float(np.linalg.norm(self.G @ coefficients - rhs))
        return coefficients, self.report(residual)


def solve(system, rhs, use_preconditioner: bool = True) -> tuple[np.ndarray, PreconditionReport]:
    """One-shot preconditioned (or plain) solve of G x = rhs.

    Accepts a CollocationSystem or a bare matrix; returns the coefficient
    vector and a report with the condition diagnostics and the residual
    measured against the unpreconditioned system.
    """
    solver = SystemSolver(system, use_preconditioner=use_preconditioner)
    return solver.solve(rhs)
