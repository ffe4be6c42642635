"""Collocation node generation: Chebyshev-Lobatto in 1D, Halton + Cartesian in 2D.

All generators are deterministic (no RNG anywhere) and every produced set
carries a distinct-node certificate: pairwise separation at least
MIN_SEPARATION and interior points at least ORIGIN_EXCLUSION away from the
origin so ray directions are well defined.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MIN_SEPARATION = 1e-8
ORIGIN_EXCLUSION = 1e-8


@dataclass(frozen=True)
class NodeSet:
    """Interior and boundary collocation points in a box domain."""

    dimension: int
    interior: np.ndarray
    boundary: np.ndarray
    box: tuple[tuple[float, ...], tuple[float, ...]]

    def __post_init__(self):
        interior = np.asarray(self.interior, dtype=float).reshape(-1, self.dimension)
        boundary = np.asarray(self.boundary, dtype=float).reshape(-1, self.dimension)
        interior.setflags(write=False)
        boundary.setflags(write=False)
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "boundary", boundary)
        self._validate()

    def _validate(self):
        lo = np.asarray(self.box[0], dtype=float)
        hi = np.asarray(self.box[1], dtype=float)
        if self.interior.size and not (
            np.all(self.interior > lo) and np.all(self.interior < hi)
        ):
            raise ValueError("interior points must lie strictly inside the box")
        if self.boundary.size:
            inside = (self.boundary >= lo).all(axis=1) & (self.boundary <= hi).all(axis=1)
            on_face = ((self.boundary == lo) | (self.boundary == hi)).any(axis=1)
            if not np.all(inside & on_face):
                raise ValueError("boundary points must lie on the box faces")
        if self.interior.size:
            radii = np.linalg.norm(self.interior, axis=1)
            if np.min(radii) < ORIGIN_EXCLUSION:
                raise ValueError("interior point inside the origin-exclusion radius")
        pts = self.points
        if pts.shape[0] >= 2:
            diff = pts[:, None, :] - pts[None, :, :]
            dist = np.linalg.norm(diff, axis=-1)
            np.fill_diagonal(dist, np.inf)
            if dist.min() < MIN_SEPARATION:
                raise ValueError("node set violates the minimum-separation certificate")

    @property
    def n_interior(self) -> int:
        return self.interior.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.boundary.shape[0]

    @property
    def n_points(self) -> int:
        return self.n_interior + self.n_boundary

    @property
    def points(self) -> np.ndarray:
        """All nodes, interior first; this order fixes matrix row indexing."""
        return np.vstack([self.interior, self.boundary])

    def to_csv(self, path):
        """Write columns index, x, y, kind (y is 0 for 1D sets)."""
        path = Path(path)
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["index", "x", "y", "kind"])
            for idx, point in enumerate(self.points):
                x = point[0]
                y = point[1] if self.dimension > 1 else 0.0
                kind = "interior" if idx < self.n_interior else "boundary"
                writer.writerow([idx, f"{x:.17g}", f"{y:.17g}", kind])


def chebyshev_nodes(n: int, interval: tuple[float, float] = (0.0, 1.0)) -> NodeSet:
    """Chebyshev-Lobatto points on [a, b]; the endpoints form the boundary."""
    if n < 2:
        raise ValueError(f"need at least the two endpoints: n={n}")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"empty interval: [{a}, {b}]")
    j = np.arange(n, dtype=float)
    x = a + (b - a) * (1.0 - np.cos(np.pi * j / (n - 1))) / 2.0
    x[0], x[-1] = a, b
    return NodeSet(
        dimension=1,
        interior=x[1:-1, None],
        boundary=np.array([[a], [b]]),
        box=((a,), (b,)),
    )


def _radical_inverse(index: int, base: int) -> float:
    f = 1.0
    x = 0.0
    while index > 0:
        f /= base
        index, digit = divmod(index, base)
        x += digit * f
    return x


def halton_sequence(count: int, bases: tuple[int, int] = (2, 3)) -> np.ndarray:
    """First `count` 2D Halton points, index starting at 1 (never hits 0 or 1)."""
    if count < 1:
        raise ValueError(f"need at least one point: count={count}")
    out = np.empty((count, 2))
    for i in range(count):
        out[i, 0] = _radical_inverse(i + 1, bases[0])
        out[i, 1] = _radical_inverse(i + 1, bases[1])
    return out


def unit_square_nodes(n_points: int) -> NodeSet:
    """Halton interior points plus a Cartesian perimeter on [0,1]^2.

    With s = round(sqrt(n_points)) the boundary holds the 4(s-1) perimeter
    points of the s x s grid (corners once); the interior takes Halton points
    from index 1, skipping any candidate within MIN_SEPARATION of an accepted
    node or within ORIGIN_EXCLUSION of the origin.
    """
    s = round(math.sqrt(n_points))
    n_boundary = 4 * (s - 1)
    n_interior = n_points - n_boundary
    if s < 2 or n_interior < 1:
        raise ValueError(
            f"n_points={n_points} does not admit the 4(s-1) perimeter split"
        )
    ticks = np.arange(s, dtype=float) / (s - 1)
    bottom = np.column_stack([ticks, np.zeros(s)])
    top = np.column_stack([ticks, np.ones(s)])
    left = np.column_stack([np.zeros(s - 2), ticks[1:-1]])
    right = np.column_stack([np.ones(s - 2), ticks[1:-1]])
    boundary = np.vstack([bottom, top, left, right])

    accepted: list[np.ndarray] = []
    occupied = boundary
    index = 0
    while len(accepted) < n_interior:
        index += 1
        candidate = np.array(
            [_radical_inverse(index, 2), _radical_inverse(index, 3)]
        )
        if np.linalg.norm(candidate) < ORIGIN_EXCLUSION:
            continue
        if np.min(np.linalg.norm(occupied - candidate, axis=1)) < MIN_SEPARATION:
            continue
        accepted.append(candidate)
        occupied = np.vstack([occupied, candidate])
    return NodeSet(
        dimension=2,
        interior=np.array(accepted),
        boundary=boundary,
        box=((0.0, 0.0), (1.0, 1.0)),
    )
