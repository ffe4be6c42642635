"""Batch front-end: single runs, benchmark tables and plot-ready exports.

The CLI performs no numerics itself; it parses a configuration, delegates
to the library modules and serializes their outputs.  All generators are
deterministic, so rerunning a configuration reproduces every CSV byte for
byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import FractionalParams
from .kernels import kernel_spec, parse_kernel
from .nodes import chebyshev_nodes, unit_square_nodes
from .problems import get_problem
from .solver import SolutionHistory, analytic_error, run

DEFAULT_SIGMA = 0.25
DEFAULT_RATE = 0.05
DEFAULT_DT = 1.0 / 25.0

TABLE_PAIRS = ((1.0, 1.0), (0.7, 1.0), (1.0, 0.75), (0.65, 0.8))
TABLE_POINTS = {"table1": (36, 64, 100), "table2": (256, 324, 400)}
TABLE_PROBLEM = {"table1": "example1", "table2": "example2"}

# Published benchmark values (cond_G, cond_Gtilde, final RMSE) per cell,
# embedded so table output carries the side-by-side comparison.
TABLE_REFERENCE = {
    "table1": {
        (1.0, 1.0, 36): (3.19985e07, 9.03438e00, 6.07019e-07),
        (1.0, 1.0, 64): (1.89809e08, 2.03053e01, 4.26112e-06),
        (1.0, 1.0, 100): (7.41018e08, 3.52912e01, 1.00781e-04),
        (0.7, 1.0, 36): (5.42967e06, 5.34347e00, 9.65987e-08),
        (0.7, 1.0, 64): (3.21286e07, 1.37232e01, 6.32924e-07),
        (0.7, 1.0, 100): (1.25345e08, 2.48729e01, 4.73620e-06),
        (1.0, 0.75, 36): (1.42516e08, 1.04670e01, 6.59344e-06),
        (1.0, 0.75, 64): (9.92520e08, 2.46329e01, 1.04166e-04),
        (1.0, 0.75, 100): (4.35794e09, 4.49581e01, 7.71606e-04),
        (0.65, 0.8, 36): (1.24173e07, 5.31271e00, 5.86635e-07),
        (0.65, 0.8, 64): (8.34941e07, 1.17088e01, 6.29195e-06),
        (0.65, 0.8, 100): (3.58730e08, 2.53325e01, 1.20229e-05),
    },
    "table2": {
        (1.0, 1.0, 256): (3.70947e07, 2.68764e00, 2.99897e-08),
        (1.0, 1.0, 324): (6.33937e07, 2.66676e00, 1.47561e-08),
        (1.0, 1.0, 400): (1.13978e08, 2.27838e00, 5.94686e-08),
        (0.7, 1.0, 256): (1.44181e07, 1.79504e00, 8.35786e-09),
        (0.7, 1.0, 324): (2.48632e07, 1.71344e00, 8.35289e-09),
        (0.7, 1.0, 400): (4.54835e07, 1.54992e00, 1.40151e-08),
        (1.0, 0.75, 256): (5.21246e07, 3.12264e00, 1.40965e-07),
        (1.0, 0.75, 324): (8.12623e07, 3.75596e00, 1.97783e-07),
        (1.0, 0.75, 400): (1.41019e08, 3.16718e00, 3.12793e-07),
        (0.65, 0.8, 256): (1.42528e07, 2.13174e00, 9.01938e-09),
        (0.65, 0.8, 324): (2.42863e07, 2.06023e00, 1.28433e-08),
        (0.65, 0.8, 400): (4.37752e07, 1.80894e00, 4.51864e-08),
    },
}


class ConfigError(ValueError):
    """Run configuration failed validation before any compute."""


@dataclass
class RunConfig:
    """One batch run: problem, orders, discretization and output location."""

    problem: str = "example1"
    alpha: float = 1.0
    beta: float = 1.0
    n_points: int = 100
    dt: float = DEFAULT_DT
    steps: int | None = None
    kernel: str = "polyharmonic:3"
    precondition: bool = True
    out: str = "out"

    def validate(self):
        if self.problem not in ("example1", "example2"):
            raise ConfigError(f"unknown problem: {self.problem!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1]: {self.alpha}")
        if not 0.0 < self.beta <= 1.0:
            raise ConfigError(f"beta must lie in (0, 1]: {self.beta}")
        if self.n_points < 2:
            raise ConfigError(f"need at least two nodes: {self.n_points}")
        if self.dt <= 0.0:
            raise ConfigError(f"time step must be positive: {self.dt}")
        if self.steps is not None and self.steps < 1:
            raise ConfigError(f"need at least one step: {self.steps}")
        try:
            parse_kernel(self.kernel)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def resolved_steps(self, problem) -> int:
        if self.steps is not None:
            return self.steps
        t0, t_end = problem.time_interval
        return max(1, round((t_end - t0) / self.dt))

    def to_text(self) -> str:
        lines = []
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if value is None:
                continue
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{field.name} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        known = {field.name: field.type for field in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value': {raw!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = value
        config = cls()
        for key, value in values.items():
            if key in ("problem", "kernel", "out"):
                setattr(config, key, value)
            elif key in ("n_points", "steps"):
                setattr(config, key, int(value))
            elif key == "precondition":
                if value.lower() not in ("true", "false"):
                    raise ConfigError(f"precondition must be true or false: {value!r}")
                config.precondition = value.lower() == "true"
            else:
                setattr(config, key, float(value))
        return config


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _build_nodes(config: RunConfig, problem):
    if problem.dimension == 1:
        interval = (problem.box[0][0], problem.box[1][0])
        return chebyshev_nodes(config.n_points, interval)
    return unit_square_nodes(config.n_points)


def _execute(config: RunConfig):
    """Build node set, parameters and run the solver for one configuration."""
    problem = get_problem(config.problem, DEFAULT_SIGMA, DEFAULT_RATE)
    nodes = _build_nodes(config, problem)
    kernel = parse_kernel(config.kernel)
    params = FractionalParams(
        alpha=config.alpha,
        beta=config.beta,
        sigma=DEFAULT_SIGMA,
        rate=DEFAULT_RATE,
        dt=config.dt,
        t0=problem.time_interval[0],
    )
    steps = config.resolved_steps(problem)
    history = run(
        problem, nodes, kernel, params, steps, use_preconditioner=config.precondition
    )
    return problem, history


def _has_analytic(config: RunConfig, problem) -> bool:
    return problem.analytic is not None and config.alpha == 1.0 and config.beta == 1.0


def _write_steps_csv(path: Path, history: SolutionHistory, max_err=None):
    with path.open("w", newline="") as handle:
        handle.write("step,t,rmse" + (",max_analytic_err" if max_err is not None else "") + "\n")
        for record in history.steps:
            row = f"{record.step},{_fmt(record.t)},{_fmt(record.rmse)}"
            if max_err is not None:
                row += f",{_fmt(max_err[record.step])}"
            handle.write(row + "\n")


def _write_solution_csv(path: Path, history: SolutionHistory):
    nodes = history.nodes
    final = history.values(len(history)) if len(history) else history.u0
    with path.open("w", newline="") as handle:
        handle.write("index,x,y,u\n")
        for idx, point in enumerate(nodes.points):
            y = point[1] if nodes.dimension > 1 else 0.0
            handle.write(f"{idx},{_fmt(point[0])},{_fmt(y)},{_fmt(final[idx])}\n")


def run_single(config: RunConfig) -> dict:
    """Execute one configuration and write its artifacts.

    Writes nodes.csv, steps.csv, solution.csv, report.json and the plot
    series into the configured output directory; returns the report dict.
    """
    config.validate()
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    problem, history = _execute(config)
    wall_s = time.perf_counter() - started

    analytic = problem.analytic if _has_analytic(config, problem) else None
    max_err = analytic_error(history, analytic)[0] if analytic is not None else None

    history.nodes.to_csv(out_dir / "nodes.csv")
    _write_steps_csv(out_dir / "steps.csv", history, max_err)
    _write_solution_csv(out_dir / "solution.csv", history)
    emit_plot_data(history, out_dir, analytic=analytic)

    rmse = history.rmse_series()
    report = {
        "problem": config.problem,
        "alpha": config.alpha,
        "beta": config.beta,
        "n_points": config.n_points,
        "dt": config.dt,
        "steps": len(history),
        "kernel": kernel_spec(parse_kernel(config.kernel)),
        "preconditioned": config.precondition,
        "cond_before": history.report.cond_before,
        "cond_after": history.report.cond_after,
        "ratio": history.report.ratio,
        "residual_per_step": [record.rmse * np.sqrt(history.nodes.n_points) for record in history.steps],
        "rmse_per_step": rmse.tolist(),
        "rmse_final": float(rmse[-1]) if rmse.size else None,
        "max_analytic_err_final": float(max_err[-1]) if max_err is not None else None,
        "wall_s": wall_s,
    }
    with (out_dir / "report.json").open("w") as handle:
        json.dump(report, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return report


def run_table(which: str, out_dir, use_preconditioner: bool = True) -> list[dict]:
    """Run one benchmark table's (alpha, beta, N_p) grid and emit its CSV.

    Every cell runs independently; failures are recorded in the status
    column and do not stop the sweep.  The CSV compares computed condition
    numbers and final RMSE against the published reference values.
    """
    if which not in TABLE_POINTS:
        raise ConfigError(f"unknown table: {which!r} (expected 'table1' or 'table2')")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for alpha, beta in TABLE_PAIRS:
        for n_points in TABLE_POINTS[which]:
            reference = TABLE_REFERENCE[which][(alpha, beta, n_points)]
            row = {
                "alpha": alpha,
                "beta": beta,
                "n_points": n_points,
                "cond_G": float("nan"),
                "cond_Gtilde": float("nan"),
                "rmse": float("nan"),
                "rmse_first": float("nan"),
                "ref_cond_G": reference[0],
                "ref_cond_Gtilde": reference[1],
                "ref_rmse": reference[2],
                "status": "ok",
            }
            try:
                config = RunConfig(
                    problem=TABLE_PROBLEM[which],
                    alpha=alpha,
                    beta=beta,
                    n_points=n_points,
                    dt=DEFAULT_DT,
                    precondition=use_preconditioner,
                )
                _, history = _execute(config)
                rmse = history.rmse_series()
                row.update(
                    cond_G=history.report.cond_before,
                    cond_Gtilde=history.report.cond_after,
                    rmse=float(rmse[-1]),
                    rmse_first=float(rmse[0]),
                )
            except Exception as exc:
                row["status"] = f"error: {exc}"
            rows.append(row)
    columns = [
        "alpha", "beta", "n_points", "cond_G", "cond_Gtilde", "rmse",
        "ref_cond_G", "ref_cond_Gtilde", "ref_rmse", "status",
    ]
    with (out_dir / f"{which}.csv").open("w", newline="") as handle:
        handle.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for column in columns:
                value = row[column]
                cells.append(_fmt(value) if isinstance(value, float) else str(value))
            handle.write(",".join(cells) + "\n")
    return rows


def _slice_points(history: SolutionHistory, resolution: int = 201) -> np.ndarray:
    nodes = history.nodes
    if nodes.dimension == 1:
        lo, hi = nodes.box[0][0], nodes.box[1][0]
        return np.linspace(lo, hi, resolution)[:, None]
    # diagonal slice y = x through the unit square
    ticks = np.linspace(nodes.box[0][0], nodes.box[1][0], resolution)
    return np.column_stack([ticks, ticks])


def _interpolant_at(history: SolutionHistory, points: np.ndarray, m: int) -> np.ndarray:
    dist = np.linalg.norm(
        points[:, None, :] - history.nodes.points[None, :, :], axis=-1
    )
    return history.kernel.phi(dist) @ history.coefficients(m)


def emit_plot_data(history: SolutionHistory, out_dir, analytic=None, times=None):
    """Write the residual time series and solution slices for plotting.

    ``rmse_series.csv`` holds one row per completed step.  Slice files hold
    the interpolant along the 1D domain (or the diagonal y = x in 2D) at the
    requested times, snapped to steps; with an analytic solution available
    each slice gains an exact column and the initial time gets an
    exact-only slice.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "rmse_series.csv").open("w", newline="") as handle:
        handle.write("t,rmse\n")
        for record in history.steps:
            handle.write(f"{_fmt(record.t)},{_fmt(record.rmse)}\n")

    points = _slice_points(history)
    abscissa = points[:, 0]
    if times is None:
        times = [history.time_at(len(history))] if len(history) else []
    for t in times:
        m = round((t - history.params.t0) / history.params.dt)
        if not 1 <= m <= len(history):
            continue
        values = _interpolant_at(history, points, m)
        with (out_dir / f"slice_step{m:03d}.csv").open("w", newline="") as handle:
            handle.write("x,u" + (",u_exact" if analytic is not None else "") + "\n")
            if analytic is not None:
                exact = np.asarray(analytic(points, history.time_at(m)), dtype=float)
                for xs, u, ue in zip(abscissa, values, exact):
                    handle.write(f"{_fmt(xs)},{_fmt(u)},{_fmt(ue)}\n")
            else:
                for xs, u in zip(abscissa, values):
                    handle.write(f"{_fmt(xs)},{_fmt(u)}\n")
    if analytic is not None:
        exact = np.asarray(analytic(points, history.params.t0), dtype=float)
        with (out_dir / "slice_step000.csv").open("w", newline="") as handle:
            handle.write("x,u_exact\n")
            for xs, ue in zip(abscissa, exact):
                handle.write(f"{_fmt(xs)},{_fmt(ue)}\n")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracbs",
        description="Meshless collocation solver for fractional Black-Scholes problems",
    )
    parser.add_argument("--config", type=Path, help="key = value configuration file")
    parser.add_argument("--problem", choices=("example1", "example2"))
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--np", dest="n_points", type=int, help="total node count")
    parser.add_argument("--dt", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--kernel", help="polyharmonic:DEG or multiquadric:SHAPE:EXP")
    parser.add_argument(
        "--no-precondition", action="store_true", help="solve without preconditioning"
    )
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--table", choices=("1", "2"), help="run a full benchmark table")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.config is not None:
            config = RunConfig.from_text(Path(args.config).read_text())
        else:
            config = RunConfig()
        for name in ("problem", "alpha", "beta", "n_points", "dt", "steps", "kernel", "out"):
            value = getattr(args, name)
            if value is not None:
                setattr(config, name, value)
        if args.no_precondition:
            config.precondition = False
        if args.table is not None:
            rows = run_table(f"table{args.table}", config.out, config.precondition)
            failures = [row for row in rows if row["status"] != "ok"]
            print(json.dumps({"table": f"table{args.table}", "cells": len(rows),
                              "failed": len(failures)}))
            return 1 if failures else 0
        report = run_single(config)
        print(json.dumps({"out": config.out, "rmse_final": report["rmse_final"]}))
        return 0
    except ConfigError as exc:
        print(json.dumps({"error": str(exc), "type": "config"}))
        return 2
    except Exception as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}))
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
