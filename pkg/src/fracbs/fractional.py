"""Fractional integrals and derivatives of Riemann-Liouville and Caputo type.

Everything here acts on univariate profiles with lower limit 0.  The two
families are kept separate on purpose: the Caputo derivative integrates the
n-th classical derivative of the profile against the weakly singular kernel,
while the Riemann-Liouville derivative is recovered from it by adding the
power-law correction terms built from the profile's derivatives at 0.  The
time discretization uses the piecewise-linear product-integration weights
``c_k = (k+1)^(n-a) - k^(n-a)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import rgamma, roots_jacobi


class GammaPoleError(ValueError):
    """A power-law coefficient landed on a pole of the gamma function.

    The limiting coefficient is 0; the caller decides whether that limit is
    meaningful in its context.
    """

    def __init__(self, mu: float, alpha: float):
        self.mu = mu
        self.alpha = alpha
        super().__init__(
            f"gamma pole: mu - alpha + 1 = {mu - alpha + 1:g} is a "
            f"non-positive integer (mu={mu:g}, alpha={alpha:g})"
        )


class QuadratureError(ArithmeticError):
    """The fixed-order rule disagrees with its half-order companion."""

    def __init__(self, estimate: float, tolerance: float):
        self.estimate = estimate
        self.tolerance = tolerance
        super().__init__(
            f"quadrature not converged: error estimate {estimate:.3e} "
            f"exceeds tolerance {tolerance:.3e}"
        )


@dataclass(frozen=True)
class FractionalOrder:
    """Order of a fractional operator, restricted to (0, 2]."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        object.__setattr__(self, "value", value)
        if not 0.0 < value <= 2.0:
            raise ValueError(f"fractional order must lie in (0, 2]: {value}")

    @property
    def n(self) -> int:
        """Smallest integer >= value, so n - 1 < value <= n."""
        return math.ceil(self.value)

    @property
    def is_integer(self) -> bool:
        return self.value == float(self.n)


def as_order(alpha) -> FractionalOrder:
    """Coerce a float or FractionalOrder to FractionalOrder."""
    if isinstance(alpha, FractionalOrder):
        return alpha
    return FractionalOrder(float(alpha))


@dataclass(frozen=True)
class FunctionProfile:
    """Univariate profile assembled from explicit derivative callables.

    Profiles are called as ``profile(t, d=k)`` for the k-th derivative;
    every callable must accept numpy arrays.
    """

    f: callable
    d1: callable | None = None
    d2: callable | None = None

    def __call__(self, t, d: int = 0):
        if d == 0:
            return self.f(t)
        if d == 1 and self.d1 is not None:
            return self.d1(t)
        if d == 2 and self.d2 is not None:
            return self.d2(t)
        raise ValueError(f"derivative of order {d} not supplied")


def caputo_weight(alpha, k: int) -> float:
    """Weight c_{a,k} = (k+1)^(n-a) - k^(n-a), with 0^0 taken as 0.

    The 0^0 convention makes c_{a,0} = 1 for integer orders too, so the
    scheme degenerates to a backward difference at a = n.
    """
    a = as_order(alpha)
    if k < 0:
        raise ValueError(f"weight index must be nonnegative: {k}")
    e = a.n - a.value
    if e == 0.0:
        return 1.0 if k == 0 else 0.0
    return float((k + 1) ** e - k**e)


def caputo_weights(alpha, m: int) -> np.ndarray:
    """First m weights c_{a,0} .. c_{a,m-1} as an array."""
    a = as_order(alpha)
    if m < 1:
        raise ValueError(f"need at least one weight: m={m}")
    e = a.n - a.value
    if e == 0.0:
        out = np.zeros(m)
        out[0] = 1.0
        return out
    powers = np.arange(m + 1, dtype=float) ** e
    return np.diff(powers)


def discrete_caputo(samples, alpha, dt: float) -> float:
    """Caputo derivative of order a in (0, 1] from uniform samples f(t_0..t_m).

    Product-integration form: the result is
    ``dt^-a / Gamma(2-a) * [f_m - c_{m-1} f_0 - sum_k (c_{k-1}-c_k) f_{m-k}]``
    and is exact on affine functions.
    """
    a = as_order(alpha)
    if a.value > 1.0:
        raise ValueError(f"discretization covers orders in (0, 1]: {a.value}")
    if dt <= 0.0:
        raise ValueError(f"time step must be positive: {dt}")
    f = np.asarray(samples, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise ValueError("need samples at t_0 .. t_m with m >= 1")
    if not np.all(np.isfinite(f)):
        raise ValueError("samples must be finite")
    m = f.size - 1
    c = caputo_weights(a, m)
    acc = f[m] - c[m - 1] * f[0]
    if m > 1:
        # memory sum over k = 1 .. m-1 against f(t_{m-k})
        acc -= np.dot(c[:-1] - c[1:], f[m - 1 : 0 : -1])
    return float(dt ** (-a.value) / math.gamma(2.0 - a.value) * acc)


def rl_power_derivative(mu: float, alpha: float) -> tuple[float, float]:
    """Riemann-Liouville derivative of t^mu as a (coefficient, exponent) pair.

    Returns ``(Gamma(mu+1)/Gamma(mu-alpha+1), mu-alpha)``.  Raises
    GammaPoleError when mu - alpha + 1 is a non-positive integer; the
    limiting coefficient there is 0 and the caller decides how to use that.
    """
    if mu <= -1.0:
        raise ValueError(f"exponent must exceed -1: {mu}")
    z = mu - alpha + 1.0
    if z < 0.5 and abs(z - round(z)) < 1e-12:
        raise GammaPoleError(mu, alpha)
    coefficient = math.gamma(mu + 1.0) * float(rgamma(z))
    return coefficient, mu - alpha


@lru_cache(maxsize=128)
def _jacobi_rule(exponent: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi nodes/weights for int_{-1}^{1} (1-s)^exponent h(s) ds."""
    nodes, weights = roots_jacobi(order, exponent, 0.0)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _integral_fixed(profile, alpha: float, r: float, order: int) -> float:
    # map [0, r] onto [-1, 1]; the Jacobi weight absorbs (r-t)^(alpha-1)
    s, w = _jacobi_rule(alpha - 1.0, order)
    t = 0.5 * r * (s + 1.0)
    ft = np.asarray(profile(t), dtype=float)
    return float(rgamma(alpha) * (0.5 * r) ** alpha * np.dot(w, ft))


def rl_fractional_integral(
    profile, alpha: float, r: float, order: int = 64, rtol: float | None = None
) -> float:
    """Riemann-Liouville integral (1/Gamma(a)) int_0^r (r-t)^(a-1) f(t) dt.

    The endpoint singularity sits in the Gauss-Jacobi weight, so the rule is
    spectrally accurate on smooth profiles.  With ``rtol`` set, the result is
    cross-checked against a half-order rule and QuadratureError carries the
    achieved error estimate on disagreement.
    """
    if alpha <= 0.0:
        raise ValueError(f"integral order must be positive: {alpha}")
    if r < 0.0:
        raise ValueError(f"evaluation point must be nonnegative: {r}")
    if r == 0.0:
        return 0.0
    value = _integral_fixed(profile, alpha, r, order)
    if rtol is not None:
        coarse = _integral_fixed(profile, alpha, r, max(2, order // 2))
        estimate = abs(value - coarse)
        tolerance = rtol * max(1.0, abs(value))
        if estimate > tolerance:
            raise QuadratureError(estimate, tolerance)
    return value


def caputo_fractional_derivative(profile, beta, r: float, order: int = 64) -> float:
    """Caputo derivative at r > 0: the RL integral of order n-beta of f^(n)."""
    b = as_order(beta)
    if r <= 0.0:
        raise ValueError(f"evaluation point must be positive: {r}")
    n = b.n
    if b.is_integer:
        return float(profile(np.float64(r), d=n))
    return rl_fractional_integral(lambda t: profile(t, d=n), n - b.value, r, order)


def rl_fractional_derivative(profile, beta, r: float, order: int = 64) -> float:
    """Riemann-Liouville derivative at r > 0 for a profile with derivatives.

    Computed as the Caputo quadrature of the n-th profile derivative plus the
    correction terms ``f^(k)(0) r^(k-b) / Gamma(k-b+1)`` for k < n.  Integer
    orders return the supplied classical derivative exactly.  Correction
    terms sitting on a gamma pole vanish in the limit and are dropped; a
    nonzero multiplier on such a term is reported with a warning.
    """
    b = as_order(beta)
    if r <= 0.0:
        raise ValueError(f"power singularity at r = 0 (got r={r})")
    n = b.n
    if b.is_integer:
        return float(profile(np.float64(r), d=n))
    value = rl_fractional_integral(lambda t: profile(t, d=n), n - b.value, r, order)
    for k in range(n):
        fk0 = float(profile(np.float64(0.0), d=k))
        rg = float(rgamma(k - b.value + 1.0))
        if rg == 0.0:
            if fk0 != 0.0:
                warnings.warn(
                    f"dropping gamma-pole correction term k={k} with nonzero "
                    f"multiplier {fk0:g} (order {b.value:g})",
                    stacklevel=2,
                )
            continue
        value += fk0 * r ** (k - b.value) * rg
    return float(value)
