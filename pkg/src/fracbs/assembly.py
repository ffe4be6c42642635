"""Assembly of the collocation operator matrix, evaluation matrix and RHS.

Interior rows apply ``delta_a - L`` to every basis function, where L couples
the spatial fractional derivatives of orders beta and beta + 1 taken along
the ray from the origin through the collocation point; boundary rows are
plain kernel evaluations.  The right-hand side carries the full fractional
memory term over all previous time levels.

Two realizations of the spatial derivative are supported.  The default
``"caputo"`` integrates the profile derivatives against the weakly singular
kernel; ``"rl"`` adds the Riemann-Liouville correction terms built from the
profile data at 0.  The corrections scale like ``r^(-beta-1)`` at interior
nodes near the origin and inflate the conditioning of the assembled matrix
by several orders of magnitude, which is why the correction-free realization
is the default for whole-system assembly; both are exposed and tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .fractional import (
    FractionalOrder,
    _jacobi_rule,
    as_order,
    caputo_fractional_derivative,
    caputo_weights,
    rl_fractional_derivative,
)
from .kernels import ORIGIN_EXCLUSION, RadialKernel, ray_profile
from .nodes import NodeSet

SPACE_DERIVATIVES = ("caputo", "rl")


class AssemblyError(RuntimeError):
    """Operator entry evaluation failed; the message carries the indices."""


@dataclass(frozen=True)
class FractionalParams:
    """Full parameterization of the time-space operator.

    ``alpha`` is the time order, ``beta`` the spatial order (both in (0, 1];
    floats are coerced).  ``delta_alpha = dt^-alpha / Gamma(2-alpha)`` is the
    weight multiplying the implicit term of every time step.
    """

    alpha: FractionalOrder
    beta: FractionalOrder
    sigma: float
    rate: float
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_order(self.alpha))
        object.__setattr__(self, "beta", as_order(self.beta))
        if self.alpha.value > 1.0:
            raise ValueError(f"time order must lie in (0, 1]: {self.alpha.value}")
        if self.beta.value > 1.0:
            raise ValueError(f"space order must lie in (0, 1]: {self.beta.value}")
        if self.sigma <= 0.0:
            raise ValueError(f"volatility must be positive: {self.sigma}")
        if self.dt <= 0.0:
            raise ValueError(f"time step must be positive: {self.dt}")
        if not math.isfinite(self.delta_alpha) or self.delta_alpha <= 0.0:
            raise ValueError("delta_alpha is not finite and positive")

    @property
    def delta_alpha(self) -> float:
        return self.dt ** (-self.alpha.value) / math.gamma(2.0 - self.alpha.value)


@dataclass(frozen=True)
class CollocationSystem:
    """Dense operator matrix G, evaluation matrix A and their provenance."""

    G: np.ndarray
    A: np.ndarray
    nodes: NodeSet
    params: FractionalParams
    kernel: RadialKernel
    space_derivative: str = "caputo"

    def __post_init__(self):
        self.G.setflags(write=False)
        self.A.setflags(write=False)

    def dump(self, directory, fmt: str = "npy"):
        """Dump G and A for external conditioning studies (npy or csv)."""
        from pathlib import Path

        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        if fmt == "npy":
            np.save(directory / "operator_matrix.npy", self.G)
            np.save(directory / "evaluation_matrix.npy", self.A)
        elif fmt == "csv":
            np.savetxt(directory / "operator_matrix.csv", self.G, delimiter=",", fmt="%.17g")
            np.savetxt(directory / "evaluation_matrix.csv", self.A, delimiter=",", fmt="%.17g")
        else:
            raise ValueError(f"unknown dump format: {fmt!r}")


def _ray_derivatives(kernel, centers, dhat, points):
    """First and second t-derivatives of all center profiles at ray points.

    ``points`` has shape (q, d); returns two (q, n_centers) arrays.
    """
    v = points[:, None, :] - centers[None, :, :]
    s = np.linalg.norm(v, axis=-1)
    a = v @ dhat
    ratio = kernel.phi_ratio(s)
    safe = np.where(s > 0.0, s, 1.0)
    w2 = np.where(s > 0.0, (a / safe) ** 2, 0.0)
    d1 = a * ratio
    d2 = kernel.phi_second(s) * w2 + ratio * (1.0 - w2)
    return d1, d2


def spatial_operator_row(
    kernel: RadialKernel,
    centers,
    point,
    beta,
    sigma: float,
    rate: float,
    order: int = 64,
    derivative: str = "caputo",
) -> np.ndarray:
    """L applied to every basis function at one interior collocation point.

    Vectorized over centers: one Gauss-Jacobi rule serves both fractional
    orders because n - beta' - 1 = -beta for beta' in {beta, beta + 1}.
    """
    if derivative not in SPACE_DERIVATIVES:
        raise ValueError(f"unknown spatial derivative realization: {derivative!r}")
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    point = np.atleast_1d(np.asarray(point, dtype=float))
    b = as_order(beta)
    r = float(np.linalg.norm(point))
    if r < ORIGIN_EXCLUSION:
        raise ValueError(f"collocation point too close to the origin: |x| = {r:.3e}")
    dhat = point / r
    phi_r = kernel.phi(np.linalg.norm(point - centers, axis=1))

    if b.is_integer:
        d1, d2 = _ray_derivatives(kernel, centers, dhat, point[None, :])
        d1, d2 = d1[0], d2[0]
    else:
        gamma_ord = 1.0 - b.value
        s_nodes, weights = _jacobi_rule(gamma_ord - 1.0, order)
        t = 0.5 * r * (s_nodes + 1.0)
        g1, g2 = _ray_derivatives(kernel, centers, dhat, t[:, None] * dhat[None, :])
        scale = float(rgamma(gamma_ord)) * (0.5 * r) ** gamma_ord
        d1 = scale * (weights @ g1)
        d2 = scale * (weights @ g2)
        if derivative == "rl":
            # correction terms from the profile data at t = 0
            s0 = np.linalg.norm(centers, axis=1)
            g0 = kernel.phi(s0)
            g0p = -(centers @ dhat) * kernel.phi_ratio(s0)
            rg1 = float(rgamma(1.0 - b.value))
            d1 = d1 + g0 * r ** (-b.value) * rg1
            d2 = (
                d2
                + g0 * r ** (-b.value - 1.0) * float(rgamma(-b.value))
                + g0p * r ** (-b.value) * rg1
            )

    half_sigma2 = 0.5 * sigma**2
    return half_sigma2 * d2 + (rate - half_sigma2) * d1 - rate * phi_r


def spatial_operator_entry(
    kernel: RadialKernel,
    center,
    point,
    beta,
    sigma: float,
    rate: float,
    order: int = 64,
    derivative: str = "caputo",
) -> float:
    """Scalar reference path for one (point, center) operator entry."""
    if derivative not in SPACE_DERIVATIVES:
        raise ValueError(f"unknown spatial derivative realization: {derivative!r}")
    b = as_order(beta)
    point = np.atleast_1d(np.asarray(point, dtype=float))
    g = ray_profile(kernel, np.atleast_1d(np.asarray(center, dtype=float)), point)
    r = float(np.linalg.norm(point))
    frac = rl_fractional_derivative if derivative == "rl" else caputo_fractional_derivative
    d2 = frac(g, FractionalOrder(b.value + 1.0), r, order)
    d1 = frac(g, b, r, order)
    half_sigma2 = 0.5 * sigma**2
    return float(half_sigma2 * d2 + (rate - half_sigma2) * d1 - rate * g(r))


def build_system(
    nodes: NodeSet,
    kernel: RadialKernel,
    params: FractionalParams,
    order: int = 64,
    space_derivative: str = "caputo",
) -> CollocationSystem:
    """Assemble G and A for a node set.

    Interior row i: ``delta_alpha * A[i] - L(A row i)``.  Boundary rows of G
    equal the corresponding rows of A exactly (identity action on the
    boundary).
    """
    pts = nodes.points
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    A = kernel.phi(dist)
    G = A.copy()
    for i in range(nodes.n_interior):
        try:
            row = spatial_operator_row(
                kernel,
                pts,
                pts[i],
                params.beta,
                params.sigma,
                params.rate,
                order,
                space_derivative,
            )
        except Exception as exc:
            raise AssemblyError(f"operator row failed at interior node {i}: {exc}") from exc
        G[i, :] = params.delta_alpha * A[i, :] - row
    for name, matrix in (("G", G), ("A", A)):
        if not np.all(np.isfinite(matrix)):
            i, j = np.argwhere(~np.isfinite(matrix))[0]
            raise AssemblyError(f"non-finite {name} entry at ({i}, {j})")
    return CollocationSystem(
        G=G, A=A, nodes=nodes, params=params, kernel=kernel,
        space_derivative=space_derivative,
    )


def build_rhs(system, m: int, history, u_I, u_B) -> np.ndarray:
    """Right-hand side at step m from the full solution history u^0..u^(m-1).

    Interior entries add the memory term
    ``delta_alpha * [c_{m-1} u^0 + sum_k (c_{k-1}-c_k) u^{m-k}]`` to the
    source; the sum is empty at m = 1.  Boundary entries sample u_B at t_m.
    """
    if m < 1:
        raise ValueError(f"steps start at m = 1: {m}")
    nodes, params = system.nodes, system.params
    n = nodes.n_points
    H = np.asarray(history, dtype=float)
    if H.shape != (m, n):
        raise ValueError(f"history must hold {m} vectors of length {n}: {H.shape}")
    c = caputo_weights(params.alpha, m)
    memory = c[m - 1] * H[0]
    if m > 1:
        memory = memory + (c[:-1] - c[1:]) @ H[:0:-1]
    t_m = params.t0 + m * params.dt
    rhs = np.empty(n)
    ni = nodes.n_interior
    rhs[:ni] = np.asarray(u_I(nodes.interior, t_m), dtype=float) + params.delta_alpha * memory[:ni]
    rhs[ni:] = np.asarray(u_B(nodes.boundary, t_m), dtype=float)
    return rhs
