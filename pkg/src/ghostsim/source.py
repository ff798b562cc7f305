"""Two-photon wavefunction models.

The Gaussian source

    phi(x, x') = C * exp(-(x^2 + x'^2) / a^2) * exp(-(x - x')^2 / b^2)

is the default model: ``a`` sets the source size, ``b`` the entanglement
width.  Arbitrary externally computed wavefunctions can be supplied as
bilinear-interpolated tables.  Normalization is always performed by
quadrature, so the Gaussian and tabulated paths share one code path; the
closed-form Gaussian norm lives in :mod:`ghostsim.analytic` and is used only
for validation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError, TruncationError
from .grid import Grid1D, Table2D, make_grid

__all__ = [
    "TwoPhotonState",
    "gaussian_wavefunction",
    "normalize",
    "tabulated_wavefunction",
    "load_wavefunction_csv",
    "default_certification_grid",
]

# |phi|^2 at the window edge must be below this fraction of the peak for a
# grid to count as covering the support
EDGE_FRACTION = 1e-8

NORM_TOL = 1e-6


@dataclass(frozen=True)
class TwoPhotonState:
    """Evaluator of the entangled-pair wavefunction phi(x, x').

    ``evaluate`` broadcasts over numpy arrays.  ``norm_certified`` records
    that the squared modulus integrates to 1 (within ``NORM_TOL``) on the
    certification grids stored in the descriptor.
    """

    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    norm_certified: bool
    descriptor: dict

    def scaled(self, factor: complex) -> "TwoPhotonState":
        ev = self.evaluate
        return replace(
            self,
            evaluate=lambda x, xp: factor * ev(x, xp),
            norm_certified=False,
        )


def gaussian_wavefunction(a: float, b: float) -> TwoPhotonState:
    """Unnormalized Gaussian source (amplitude constant C = 1)."""
    if not (a > 0.0):
        raise InvalidArgumentError(f"source size a must be > 0, got {a}")
    if not (b > 0.0):
        raise InvalidArgumentError(f"entanglement width b must be > 0, got {b}")

    def evaluate(x, xp):
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        return np.exp(-(x**2 + xp**2) / a**2 - (x - xp) ** 2 / b**2).astype(complex)

    return TwoPhotonState(
        evaluate=evaluate,
        norm_certified=False,
        descriptor={"kind": "gaussian", "a_mm": float(a), "b_mm": float(b), "c_norm": 1.0},
    )


def default_certification_grid(a: float, b: float) -> Grid1D:
    """Window [-4a, 4a] with a step fine enough to resolve the (x - x')
    entanglement ridge of width ~b."""
    half_width = 4.0 * a
    n = int(np.ceil(2.0 * half_width / (b / 6.0))) + 1
    return make_grid(0.0, half_width, max(n, 257))


def _norm_integral(state: TwoPhotonState, gx: Grid1D, gxp: Grid1D, chunk: int = 512) -> float:
    x = gx.samples()
    xp = gxp.samples()[np.newaxis, :]
    wx = gx.trapezoid_weights()
    wxp = gxp.trapezoid_weights()
    total = 0.0
    for i0 in range(0, gx.n_points, chunk):
        block = np.abs(state.evaluate(x[i0 : i0 + chunk, np.newaxis], xp)) ** 2
        total += float(wx[i0 : i0 + chunk] @ block @ wxp)
    return total


def _check_support_coverage(state: TwoPhotonState, gx: Grid1D, gxp: Grid1D) -> None:
    x = gx.samples()
    xp = gxp.samples()
    # sample the four boundary lines and the diagonal through the bulk
    edges = [
        np.abs(state.evaluate(np.full_like(xp, gx.lo), xp)),
        np.abs(state.evaluate(np.full_like(xp, gx.hi), xp)),
        np.abs(state.evaluate(x, np.full_like(x, gxp.lo))),
        np.abs(state.evaluate(x, np.full_like(x, gxp.hi))),
    ]
    edge_peak = max(float(e.max()) for e in edges)
    bulk = np.abs(state.evaluate(x, np.linspace(gxp.lo, gxp.hi, x.size)))
    peak = float(bulk.max())
    if peak == 0.0:
        return  # zero norm is reported separately
    if edge_peak**2 > EDGE_FRACTION * peak**2:
        raise TruncationError(
            f"wavefunction not negligible at the grid boundary: |phi|^2 edge/peak "
            f"= {edge_peak**2 / peak**2:.3e} > {EDGE_FRACTION:.0e}"
        )


def normalize(state: TwoPhotonState, gx: Grid1D, gxp: Grid1D) -> TwoPhotonState:
    """Rescale so that the quadrature of |phi|^2 over (gx, gxp) equals 1.

    The returned state carries ``norm_certified=True`` and records the
    certification grids and, for Gaussian sources, the amplitude ``c_norm``.
    """
    _check_support_coverage(state, gx, gxp)
    norm = _norm_integral(state, gx, gxp)
    if norm <= 0.0:
        raise InvalidArgumentError("wavefunction has zero norm on the given grids")
    scale = 1.0 / np.sqrt(norm)
    ev = state.evaluate
    descriptor = dict(state.descriptor)
    descriptor["c_norm"] = float(descriptor.get("c_norm", 1.0) * scale)
    descriptor["certification"] = {
        "gx": (gx.center, gx.half_width, gx.n_points),
        "gxp": (gxp.center, gxp.half_width, gxp.n_points),
    }
    return TwoPhotonState(
        evaluate=lambda x, xp: scale * ev(x, xp),
        norm_certified=True,
        descriptor=descriptor,
    )


def tabulated_wavefunction(gx: Grid1D, gxp: Grid1D, values: np.ndarray) -> TwoPhotonState:
    """Wavefunction given by samples on a grid cross-product.

    Bilinear interpolation inside the domain, zero outside.  Not
    norm-certified until :func:`normalize` is applied.
    """
    table = Table2D(gx, gxp, values)
    return TwoPhotonState(
        evaluate=table,
        norm_certified=False,
        descriptor={
            "kind": "tabulated",
            "shape": (gx.n_points, gxp.n_points),
            "c_norm": 1.0,
        },
    )


def load_wavefunction_csv(path) -> TwoPhotonState:
    """Load a tabulated wavefunction from CSV columns x_mm, xp_mm, re, im.

    Rows must enumerate the grid cross-product row-major in x then x'.
    """
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise InvalidArgumentError(
            f"wavefunction CSV needs columns x_mm,xp_mm,re,im; got {data.shape[1]} columns"
        )
    x = np.unique(data[:, 0])
    xp = np.unique(data[:, 1])
    if x.size * xp.size != data.shape[0]:
        raise InvalidArgumentError("wavefunction CSV rows do not form a grid cross-product")
    gx = make_grid((x[0] + x[-1]) / 2, (x[-1] - x[0]) / 2, x.size)
    gxp = make_grid((xp[0] + xp[-1]) / 2, (xp[-1] - xp[0]) / 2, xp.size)
    values = (data[:, 2] + 1j * data[:, 3]).reshape(x.size, xp.size)
    return tabulated_wavefunction(gx, gxp, values)
