"""Time-stepping driver with the full fractional memory.

The operator matrix is assembled and factored once; every step rebuilds the
right-hand side from all previous nodal vectors (the memory term), solves
the preconditioned system and records coefficients, nodal values and the
residual RMSE measured against the unpreconditioned matrices.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assembly import CollocationSystem, FractionalParams, build_rhs, build_system
from .kernels import RadialKernel
from .nodes import NodeSet
from .precondition import PreconditionReport, SystemSolver


class SolverBreakdownError(RuntimeError):
    """A step failed; carries the partial history and the diagnostics."""

    def __init__(self, message: str, step: int, history: "SolutionHistory"):
        super().__init__(f"step {step}: {message}")
        self.step = step
        self.history = history


@dataclass(frozen=True)
class StepRecord:
    step: int
    t: float
    coefficients: np.ndarray
    values: np.ndarray
    rmse: float
    wall_s: float


@dataclass
class SolutionHistory:
    """Per-step interpolation coefficients, nodal values and residuals."""

    nodes: NodeSet
    kernel: RadialKernel
    params: FractionalParams
    u0: np.ndarray
    report: PreconditionReport | None = None
    steps: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def time_at(self, m: int) -> float:
        return self.params.t0 + m * self.params.dt

    def values(self, m: int) -> np.ndarray:
        """Nodal values at step m; m = 0 is the sampled initial condition."""
        if m == 0:
            return self.u0
        return self.steps[m - 1].values

    def coefficients(self, m: int) -> np.ndarray:
        if m < 1:
            raise ValueError("interpolation coefficients exist for steps m >= 1")
        return self.steps[m - 1].coefficients

    def rmse_series(self) -> np.ndarray:
        return np.array([record.rmse for record in self.steps])

    def to_csv(self, path, analytic=None):
        """Per-step CSV: step, t, rmse, max analytic error (optional), wall_ms."""
        path = Path(path)
        max_err = None
        if analytic is not None:
            max_err, _ = analytic_error(self, analytic)
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            header = ["step", "t", "rmse"]
            if analytic is not None:
                header.append("max_analytic_err")
            header.append("wall_ms")
            writer.writerow(header)
            for record in self.steps:
                row = [record.step, f"{record.t:.17g}", f"{record.rmse:.17g}"]
                if analytic is not None:
                    row.append(f"{max_err[record.step]:.17g}")
                row.append(f"{record.wall_s * 1e3:.6g}")
                writer.writerow(row)


def residual_rmse(system, coefficients, rhs) -> float:
    """Root mean squared collocation residual against the raw G and rhs."""
    G = system.G if hasattr(system, "G") else np.asarray(system, dtype=float)
    residual = G @ np.asarray(coefficients, dtype=float) - np.asarray(rhs, dtype=float)
    return float(np.sqrt(np.mean(residual**2)))


def run(
    problem,
    nodes: NodeSet,
    kernel: RadialKernel,
    params: FractionalParams,
    steps: int,
    use_preconditioner: bool = True,
    order: int = 64,
    space_derivative: str = "caputo",
) -> SolutionHistory:
    """March `steps` time steps of the collocation scheme.

    The history is append-only and complete: the RHS at step m consumes all
    m previous nodal vectors, which the nonlocal time operator requires.
    """
    if steps < 1:
        raise ValueError(f"need at least one step: {steps}")
    t_end = problem.time_interval[1]
    if params.t0 + steps * params.dt > t_end + 1e-9:
        raise ValueError(
            f"{steps} steps of dt={params.dt} overrun the time interval "
            f"[{params.t0}, {t_end}]"
        )
    system = build_system(nodes, kernel, params, order=order, space_derivative=space_derivative)
    solver = SystemSolver(system.G, use_preconditioner=use_preconditioner)
    u0 = np.asarray(problem.u_0(nodes.points), dtype=float)
    history = SolutionHistory(
        nodes=nodes, kernel=kernel, params=params, u0=u0, report=solver.report()
    )
    nodal = [u0]
    for m in range(1, steps + 1):
        started = time.perf_counter()
        rhs = build_rhs(system, m, np.vstack(nodal), problem.u_I, problem.u_B)
        try:
            coefficients, report = solver.solve(rhs)
        except Exception as exc:
            raise SolverBreakdownError(str(exc), m, history) from exc
        values = system.A @ coefficients
        nodal.append(values)
        history.steps.append(
            StepRecord(
                step=m,
                t=params.t0 + m * params.dt,
                coefficients=coefficients,
                values=values,
                rmse=residual_rmse(system, coefficients, rhs),
                wall_s=time.perf_counter() - started,
            )
        )
    return history


def analytic_error(history: SolutionHistory, analytic) -> tuple[np.ndarray, np.ndarray]:
    """Max and RMS nodal errors against an analytic solution, steps 0..M."""
    points = history.nodes.points
    max_errors = np.empty(len(history) + 1)
    rms_errors = np.empty(len(history) + 1)
    for m in range(len(history) + 1):
        exact = np.asarray(analytic(points, history.time_at(m)), dtype=float)
        err = history.values(m) - exact
        max_errors[m] = np.max(np.abs(err))
        rms_errors[m] = np.sqrt(np.mean(err**2))
    return max_errors, rms_errors
