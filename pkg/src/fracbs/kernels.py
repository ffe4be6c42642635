"""Radial kernels with analytic derivatives and their restrictions to rays.

The spatial fractional operator acts on the univariate restriction of a
basis function to the ray from the origin through the collocation point,
so every kernel exposes the scalar helpers needed to differentiate
``g(t) = phi(|t*dhat - c|)`` twice: ``phi``, ``phi'(s)/s`` and ``phi''``.
The ratio form keeps the chain rule finite where the argument vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORIGIN_EXCLUSION = 1e-8


@dataclass(frozen=True)
class PolyharmonicKernel:
    """phi(s) = s^degree with odd degree >= 3 (parameter-free)."""

    degree: int = 3

    def __post_init__(self):
        if self.degree < 3 or self.degree % 2 == 0:
            raise ValueError(f"polyharmonic degree must be odd and >= 3: {self.degree}")

    def phi(self, s):
        return s**self.degree

    def phi_ratio(self, s):
        # phi'(s)/s, finite at s = 0 for degree >= 3
        return self.degree * s ** (self.degree - 2)

    def phi_second(self, s):
        return self.degree * (self.degree - 1) * s ** (self.degree - 2)


@dataclass(frozen=True)
class MultiquadricKernel:
    """phi(s) = [1 + (shape*s)^2]^(exponent/2), exponent in [-1,1] \\ {0}."""

    shape: float = 1.0
    exponent: float = 0.5

    def __post_init__(self):
        if self.shape <= 0.0:
            raise ValueError(f"shape parameter must be positive: {self.shape}")
        if not -1.0 <= self.exponent <= 1.0 or self.exponent == 0.0:
            raise ValueError(f"exponent must lie in [-1,1] minus 0: {self.exponent}")

    def phi(self, s):
        q = 1.0 + (self.shape * s) ** 2
        return q ** (self.exponent / 2.0)

    def phi_ratio(self, s):
        q = 1.0 + (self.shape * s) ** 2
        return self.exponent * self.shape**2 * q ** (self.exponent / 2.0 - 1.0)

    def phi_second(self, s):
        e = self.exponent
        z = (self.shape * s) ** 2
        return e * self.shape**2 * (1.0 + z) ** (e / 2.0 - 2.0) * (1.0 + (e - 1.0) * z)


RadialKernel = PolyharmonicKernel | MultiquadricKernel


def polyharmonic(degree: int = 3) -> PolyharmonicKernel:
    return PolyharmonicKernel(degree)


def multiquadric(shape: float = 1.0, exponent: float = 0.5) -> MultiquadricKernel:
    return MultiquadricKernel(shape, exponent)


def parse_kernel(spec: str) -> RadialKernel:
    """Parse 'polyharmonic:DEGREE' or 'multiquadric:SHAPE:EXPONENT'."""
    parts = str(spec).strip().split(":")
    name = parts[0].lower()
    if name == "polyharmonic":
        degree = int(parts[1]) if len(parts) > 1 else 3
        return PolyharmonicKernel(degree)
    if name == "multiquadric":
        if len(parts) != 3:
            raise ValueError(f"multiquadric spec needs shape and exponent: {spec!r}")
        return MultiquadricKernel(float(parts[1]), float(parts[2]))
    raise ValueError(f"unknown kernel spec: {spec!r}")


def kernel_spec(kernel: RadialKernel) -> str:
    if isinstance(kernel, PolyharmonicKernel):
        return f"polyharmonic:{kernel.degree}"
    return f"multiquadric:{kernel.shape:g}:{kernel.exponent:g}"


def kernel_eval(kernel: RadialKernel, x, center) -> float:
    """phi(|x - center|), symmetric in its two point arguments."""
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    if x.shape != center.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {center.shape}")
    return float(kernel.phi(np.linalg.norm(x - center)))


@dataclass(frozen=True)
class RayProfile:
    """Kernel restricted to the ray t >= 0 along a unit direction.

    ``profile(t, d=k)`` returns the k-th derivative of the scalar map
    ``t -> phi(|t*direction - center|)`` for k in {0, 1, 2}.
    """

    kernel: RadialKernel
    center: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        direction = np.atleast_1d(np.asarray(self.direction, dtype=float))
        if center.shape != direction.shape:
            raise ValueError("center and direction dimensions differ")
        if abs(np.linalg.norm(direction) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        center.setflags(write=False)
        direction.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "direction", direction)

    def __call__(self, t, d: int = 0):
        t = np.asarray(t, dtype=float)
        v = t[..., None] * self.direction - self.center
        s = np.linalg.norm(v, axis=-1)
        if d == 0:
            return self.kernel.phi(s)
        a = v @ self.direction
        if d == 1:
            return a * self.kernel.phi_ratio(s)
        if d == 2:
            safe = np.where(s > 0.0, s, 1.0)
            w2 = np.where(s > 0.0, (a / safe) ** 2, 0.0)
            return self.kernel.phi_second(s) * w2 + self.kernel.phi_ratio(s) * (1.0 - w2)
        raise ValueError(f"ray profiles support derivatives 0..2: {d}")


def ray_profile(kernel: RadialKernel, center, through) -> RayProfile:
    """Profile along the ray from the origin through a given point."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    through = np.atleast_1d(np.asarray(through, dtype=float))
    if center.shape != through.shape:
        raise ValueError("center and point dimensions differ")
    norm = np.linalg.norm(through)
    if norm <= ORIGIN_EXCLUSION:
        raise ValueError(f"ray direction undefined near the origin: |x| = {norm:.3e}")
    return RayProfile(kernel, center, through / norm)


def classical_operator(kernel: RadialKernel, center, x, params) -> float:
    """Integer-order operator value 0.5*s^2*g'' + (r - 0.5*s^2)*g' - r*g at |x|.

    This is the beta = 1 limit of the spatial operator and serves as its
    oracle; ``params`` needs ``sigma`` and ``rate`` attributes.
    """
    g = ray_profile(kernel, center, x)
    r = float(np.linalg.norm(np.asarray(x, dtype=float)))
    sigma2 = 0.5 * params.sigma**2
    return float(
        sigma2 * g(r, d=2) + (params.rate - sigma2) * g(r, d=1) - params.rate * g(r)
    )
