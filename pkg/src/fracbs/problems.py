"""Problem definitions: log-price transform and two manufactured benchmarks.

Both benchmark problems are manufactured around a known radial solution, so
their sources are long closed-form expressions; transcription is guarded by
tests that rebuild the source from symbolic derivatives of the solution.
The analytic solutions are valid only at integer operator orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ProblemSpec:
    """Domain box, time interval and the data callables of one problem.

    Callables take point arrays of shape (..., d) plus a scalar time and
    return arrays of shape (...); ``analytic`` is None when no closed-form
    solution is known for the configured orders.
    """

    dimension: int
    box: tuple[tuple[float, ...], tuple[float, ...]]
    time_interval: tuple[float, float]
    u_I: Callable
    u_B: Callable
    u_0: Callable
    analytic: Callable | None = None


def bs_log_transform(price, tau, t_maturity: float):
    """Map asset price and time-to-maturity to log-price coordinates.

    Returns ``(x, t) = (ln S, t_maturity - tau)``.
    """
    price = np.asarray(price, dtype=float)
    if np.any(price <= 0.0):
        raise ValueError("asset price must be positive")
    return np.log(price), t_maturity - np.asarray(tau, dtype=float)


def bs_inverse_transform(x, t, t_maturity: float):
    """Inverse of the log-price map: ``(S, tau) = (e^x, t_maturity - t)``."""
    return np.exp(np.asarray(x, dtype=float)), t_maturity - np.asarray(t, dtype=float)


def example1(sigma: float = 0.25, rate: float = 0.05) -> ProblemSpec:
    """1D benchmark on [0,1] x [0,1] with solution (t+1)^2 (1-x) sin^2 x."""

    def u_0(x):
        x1 = np.asarray(x, dtype=float)[..., 0]
        return (1.0 - x1) * np.sin(x1) ** 2

    def u_B(x, t):
        x1 = np.asarray(x, dtype=float)[..., 0]
        return np.zeros_like(x1)

    def u_I(x, t):
        x1 = np.asarray(x, dtype=float)[..., 0]
        tp = (t + 1.0) ** 2
        return (
            sigma**2 * (np.sin(2.0 * x1) - (1.0 - x1) * np.cos(2.0 * x1)) * tp
            + (2.0 * (t + 1.0) + rate * tp) * (1.0 - x1) * np.sin(x1) ** 2
            + (rate - 0.5 * sigma**2)
            * (np.sin(x1) ** 2 - (1.0 - x1) * np.sin(2.0 * x1))
            * tp
        )

    def analytic(x, t):
        x1 = np.asarray(x, dtype=float)[..., 0]
        return (t + 1.0) ** 2 * (1.0 - x1) * np.sin(x1) ** 2

    return ProblemSpec(
        dimension=1,
        box=((0.0,), (1.0,)),
        time_interval=(0.0, 1.0),
        u_I=u_I,
        u_B=u_B,
        u_0=u_0,
        analytic=analytic,
    )


def example2(sigma: float = 0.25, rate: float = 0.05) -> ProblemSpec:
    """2D benchmark on the unit square with a radially symmetric solution."""

    def _shape(rho):
        return 0.25 * (1.0 - rho) * (2.0 - rho) * np.sin(2.0 * rho) ** 2

    def u_0(x):
        x = np.asarray(x, dtype=float)
        rho = x[..., 0] ** 2 + x[..., 1] ** 2
        return _shape(rho)

    def analytic(x, t):
        x = np.asarray(x, dtype=float)
        rho = x[..., 0] ** 2 + x[..., 1] ** 2
        return (t + 1.0) ** 2 * _shape(rho)

    def u_B(x, t):
        x = np.asarray(x, dtype=float)
        x1, x2 = x[..., 0], x[..., 1]
        tp = (t + 1.0) ** 2
        left = 0.25 * tp * (1.0 - x2**2) * (2.0 - x2**2) * np.sin(2.0 * x2**2) ** 2
        right = 0.25 * tp * x2**2 * (x2**2 - 1.0) * np.sin(2.0 * (1.0 + x2**2)) ** 2
        bottom = 0.25 * tp * (1.0 - x1**2) * (2.0 - x1**2) * np.sin(2.0 * x1**2) ** 2
        top = 0.25 * tp * x1**2 * (x1**2 - 1.0) * np.sin(2.0 * (1.0 + x1**2)) ** 2
        atol = 1e-12
        conditions = [
            np.abs(x1) <= atol,
            np.abs(x1 - 1.0) <= atol,
            np.abs(x2) <= atol,
            np.abs(x2 - 1.0) <= atol,
        ]
        out = np.select(conditions, [left, right, bottom, top], default=np.nan)
        if np.any(np.isnan(out)):
            raise ValueError("boundary datum requested away from the square faces")
        return out

    def u_I(x, t):
        x = np.asarray(x, dtype=float)
        rho = x[..., 0] ** 2 + x[..., 1] ** 2
        root = np.sqrt(rho)
        tp = (t + 1.0) ** 2
        sin2, sin4, cos4 = (
            np.sin(2.0 * rho) ** 2,
            np.sin(4.0 * rho),
            np.cos(4.0 * rho),
        )
        drift = rate - 0.5 * sigma**2
        return (
            sigma**2
            / 8.0
            * (3.0 - (3.0 + 58.0 * rho - 96.0 * rho**2 + 32.0 * rho**3) * cos4)
            * tp
            - sigma**2 / 4.0 * (3.0 * rho + (4.0 - 30.0 * rho + 18.0 * rho**2) * sin4) * tp
            + 0.25
            * (2.0 * (t + 1.0) + rate * tp)
            * (1.0 - rho)
            * (2.0 - rho)
            * sin2
            + 0.5 * drift * root * (3.0 - 2.0 * rho) * sin2 * tp
            - drift * root * (2.0 - 3.0 * rho + rho**2) * sin4 * tp
        )

    return ProblemSpec(
        dimension=2,
        box=((0.0, 0.0), (1.0, 1.0)),
        time_interval=(0.0, 1.0),
        u_I=u_I,
        u_B=u_B,
        u_0=u_0,
        analytic=analytic,
    )


def get_problem(name: str, sigma: float = 0.25, rate: float = 0.05) -> ProblemSpec:
    """Problem selector for the batch front-end."""
    if name == "example1":
        return example1(sigma, rate)
    if name == "example2":
        return example2(sigma, rate)
    raise ValueError(f"unknown problem {name!r}; custom problems go through the API")
