"""Uniform 1-D grids, complex sampled fields and composite trapezoid quadrature.

Every integral in the package (state normalization, arm energies, the
coincidence amplitude) is reduced to these primitives.  Grids are closed
intervals that contain both endpoints; the step is defined by ``n_points - 1``
panels so that symmetric windows place their endpoints exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError, NumericDomainError

__all__ = [
    "Grid1D",
    "ComplexField1D",
    "make_grid",
    "integrate",
    "integrate2d",
    "Table2D",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform closed-interval sampling lattice, lengths in mm."""

    center: float
    half_width: float
    n_points: int

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    @property
    def lo(self) -> float:
        return self.center - self.half_width

    @property
    def hi(self) -> float:
        return self.center + self.half_width

    def samples(self) -> np.ndarray:
        x = self.lo + self.step * np.arange(self.n_points)
        # pin the endpoints exactly; linspace-style roundoff would break
        # symmetry assertions downstream
        x[-1] = self.hi
        return x

    def sample(self, i: int) -> float:
        if i < 0 or i >= self.n_points:
            raise InvalidArgumentError(f"sample index {i} outside [0, {self.n_points})")
        if i == self.n_points - 1:
            return self.hi
        return self.lo + i * self.step

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.step)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def refined(self) -> "Grid1D":
        """Same interval with every panel halved (nodes nest)."""
        return Grid1D(self.center, self.half_width, 2 * self.n_points - 1)


def make_grid(center: float, half_width: float, n_points: int) -> Grid1D:
    if not np.isfinite(center):
        raise InvalidArgumentError(f"grid center must be finite, got {center}")
    if not (half_width > 0.0) or not np.isfinite(half_width):
        raise InvalidArgumentError(f"half_width must be > 0, got {half_width}")
    if int(n_points) != n_points or n_points < 2:
        raise InvalidArgumentError(f"n_points must be an integer >= 2, got {n_points}")
    return Grid1D(float(center), float(half_width), int(n_points))


@dataclass(frozen=True)
class ComplexField1D:
    """Complex-valued function sampled on a Grid1D."""

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise InvalidArgumentError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.n_points} points)"
            )
        if not np.all(np.isfinite(values.real)) or not np.all(np.isfinite(values.imag)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NumericDomainError(
                f"non-finite field value at x={self.grid.sample(bad)}",
                where=(self.grid.sample(bad),),
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, f: Callable[[np.ndarray], np.ndarray], grid: Grid1D) -> "ComplexField1D":
        return cls(grid, np.asarray(f(grid.samples()), dtype=complex))


def integrate(f: ComplexField1D) -> complex:
    """Composite trapezoid estimate of the integral over the grid interval.

    Linear in the samples and exact for affine integrands.
    """
    return complex(np.dot(f.grid.trapezoid_weights(), f.values))


def integrate2d(
    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray],
    gx: Grid1D,
    gxp: Grid1D,
    chunk: int = 256,
) -> complex:
    """Tensor-product trapezoid estimate of a 2-D integral.

    ``kernel`` must broadcast over arrays: it is called with column/row
    vectors of x and x' and returns the full block.  Evaluation is chunked
    over x to bound memory.  A non-finite kernel value aborts the integral.
    """
    x = gx.samples()
    xp = gxp.samples()[np.newaxis, :]
    wx = gx.trapezoid_weights()
    wxp = gxp.trapezoid_weights()
    total = 0.0 + 0.0j
    for i0 in range(0, gx.n_points, chunk):
        xs = x[i0 : i0 + chunk, np.newaxis]
        block = np.asarray(kernel(xs, xp), dtype=complex)
        if not np.all(np.isfinite(block.real)) or not np.all(np.isfinite(block.imag)):
            bi, bj = np.argwhere(~np.isfinite(block))[0]
            raise NumericDomainError(
                f"non-finite kernel value at (x={x[i0 + bi]}, xp={xp[0, bj]})",
                where=(float(x[i0 + bi]), float(xp[0, bj])),
            )
        total += complex(wx[i0 : i0 + chunk] @ block @ wxp)
    return total


class Table2D:
    """Bilinear interpolation of a complex table on a grid cross-product,
    with zero extension outside the domain."""

    def __init__(self, gx: Grid1D, gxp: Grid1D, values: np.ndarray):
        values = np.asarray(values, dtype=complex)
        if values.shape != (gx.n_points, gxp.n_points):
            raise InvalidArgumentError(
                f"table shape {values.shape} does not match grids "
                f"({gx.n_points}, {gxp.n_points})"
            )
        self.gx = gx
        self.gxp = gxp
        self.values = values

    def __call__(self, x, xp) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        x, xp = np.broadcast_arrays(x, xp)
        fx = (x - self.gx.lo) / self.gx.step
        fy = (xp - self.gxp.lo) / self.gxp.step
        inside = (fx >= 0) & (fx <= self.gx.n_points - 1) & (fy >= 0) & (fy <= self.gxp.n_points - 1)
        fx = np.clip(fx, 0.0, self.gx.n_points - 1)
        fy = np.clip(fy, 0.0, self.gxp.n_points - 1)
        i = np.minimum(fx.astype(int), self.gx.n_points - 2)
        j = np.minimum(fy.astype(int), self.gxp.n_points - 2)
        tx = fx - i
        ty = fy - j
        v = (
            self.values[i, j] * (1 - tx) * (1 - ty)
            + self.values[i + 1, j] * tx * (1 - ty)
            + self.values[i, j + 1] * (1 - tx) * ty
            + self.values[i + 1, j + 1] * tx * ty
        )
        return np.where(inside, v, 0.0 + 0.0j)
