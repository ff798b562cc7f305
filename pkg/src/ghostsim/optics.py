"""Impulse responses of the two optical arms, pupils and object transmissions.

Test arm: object at focal distance f from an unapertured lens, detector in
the focal plane behind it, so the kernel is a scaled Fourier phase times the
object transmission:

    h_t(x_t, x) = -(i / (lam f)) t(x) exp(-2 pi i x_t x / (lam f))

Reference arm: a lens of pupil p at distance 2f from both source and
detector:

    h_r(x_r, x') = (1 / (4 lam^2 f^2)) P((x_r + x') / (2 lam f))
                   * exp(i pi (x_r^2 + x'^2) / (2 lam f))

with P the Fourier transform of p under the exp(-2 pi i u x) kernel.

Discontinuous (slit-type) transmissions are additionally exposed through
cell-averaged samplers: a trapezoid rule applied to raw indicator samples
converges only at first order and is unstable against grid refinement, while
averaging the transmission over each grid cell integrates the slits exactly.
Pointwise ``evaluate`` keeps the sharp-edged definition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError, NumericDomainError
from .grid import Grid1D, Table2D, make_grid

__all__ = [
    "Transmission",
    "Pupil",
    "ImpulseResponse",
    "double_slit",
    "gaussian_transmission",
    "tabulated_transmission",
    "load_transmission_csv",
    "rect_pupil",
    "gaussian_pupil",
    "tabulated_pupil",
    "load_pupil_csv",
    "pupil_ft",
    "fourier_arm",
    "two_f_arm",
    "tabulated_arm",
    "scaled_arm",
    "eval_h",
]


def _overlap(lo, hi, a, b):
    """Length of the intersection of [lo, hi] with [a, b], vectorized."""
    return np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)


@dataclass(frozen=True)
class Transmission:
    """Real object transmission t(x) in [0, 1]."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    descriptor: dict
    # cell-mean of t over [x - h/2, x + h/2]; None means sample pointwise
    cell_mean: Optional[Callable[[np.ndarray, float], np.ndarray]] = None

    def sample(self, x: np.ndarray, cell: float = 0.0) -> np.ndarray:
        """Samples of t for quadrature; cell-averaged for sharp-edged kinds."""
        if self.cell_mean is not None and cell > 0.0:
            return self.cell_mean(x, cell)
        return np.asarray(self.evaluate(x), dtype=float)

    def sample_sq(self, x: np.ndarray, cell: float = 0.0) -> np.ndarray:
        """Samples of t^2; for indicator transmissions the cell mean of t^2
        equals the cell mean of t."""
        if self.cell_mean is not None and cell > 0.0:
            return self.cell_mean(x, cell)
        return np.asarray(self.evaluate(x), dtype=float) ** 2


def double_slit(w: float, d: float) -> Transmission:
    """Two slits of width w centered at +/- d/2 (d is center-to-center)."""
    if not (w > 0.0):
        raise InvalidArgumentError(f"slit width w must be > 0, got {w}")
    if not (w < d):
        raise InvalidArgumentError(f"slits merge: need w < d, got w={w}, d={d}")
    half = 0.5 * w
    c = 0.5 * d

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return ((np.abs(x - c) <= half) | (np.abs(x + c) <= half)).astype(float)

    def cell_mean(x, h):
        x = np.asarray(x, dtype=float)
        lo = x - 0.5 * h
        hi = x + 0.5 * h
        cov = _overlap(lo, hi, c - half, c + half) + _overlap(lo, hi, -c - half, -c + half)
        return cov / h

    return Transmission(
        evaluate=evaluate,
        descriptor={"kind": "double_slit", "w_mm": float(w), "d_mm": float(d)},
        cell_mean=cell_mean,
    )


def gaussian_transmission(w: float) -> Transmission:
    """Smooth Gaussian object t(x) = exp(-x^2 / w^2)."""
    if not (w > 0.0):
        raise InvalidArgumentError(f"gaussian object width must be > 0, got {w}")
    return Transmission(
        evaluate=lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / w**2),
        descriptor={"kind": "gaussian", "w_mm": float(w)},
    )


def tabulated_transmission(grid: Grid1D, values: np.ndarray) -> Transmission:
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n_points,):
        raise InvalidArgumentError(
            f"transmission table length {values.shape} does not match grid"
        )
    if values.min() < 0.0 or values.max() > 1.0:
        raise InvalidArgumentError("transmission values must lie in [0, 1]")
    xs = grid.samples()

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, xs, values, left=0.0, right=0.0)

    return Transmission(
        evaluate=evaluate,
        descriptor={"kind": "tabulated", "n_points": grid.n_points},
    )


def load_transmission_csv(path) -> Transmission:
    """CSV columns x_mm, value on a uniform grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise InvalidArgumentError(
            f"transmission CSV needs columns x_mm,value; got {data.shape[1]} columns"
        )
    x = data[:, 0]
    grid = make_grid((x[0] + x[-1]) / 2, (x[-1] - x[0]) / 2, x.size)
    return tabulated_transmission(grid, data[:, 1])


@dataclass(frozen=True)
class Pupil:
    """Aperture pupil p(x) and its Fourier transform P(u) with kernel
    exp(-2 pi i u x)."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    ft: Callable[[np.ndarray], np.ndarray]
    descriptor: dict


def rect_pupil(D: float) -> Pupil:
    """Hard aperture of width D; P(u) = D sinc(pi D u)."""
    if not (D > 0.0):
        raise InvalidArgumentError(f"aperture size D must be > 0, got {D}")

    def evaluate(x):
        return (np.abs(np.asarray(x, dtype=float)) <= 0.5 * D).astype(complex)

    def ft(u):
        return (D * np.sinc(D * np.asarray(u, dtype=float))).astype(complex)

    return Pupil(evaluate=evaluate, ft=ft, descriptor={"kind": "rect", "D_mm": float(D)})


def gaussian_pupil(sigma: float) -> Pupil:
    """Soft aperture p(x) = exp(-x^2 / sigma^2);
    P(u) = sigma sqrt(pi) exp(-pi^2 sigma^2 u^2)."""
    if not (sigma > 0.0):
        raise InvalidArgumentError(f"gaussian pupil width must be > 0, got {sigma}")

    def evaluate(x):
        return np.exp(-np.asarray(x, dtype=float) ** 2 / sigma**2).astype(complex)

    def ft(u):
        u = np.asarray(u, dtype=float)
        return (sigma * np.sqrt(np.pi) * np.exp(-np.pi**2 * sigma**2 * u**2)).astype(complex)

    return Pupil(
        evaluate=evaluate, ft=ft, descriptor={"kind": "gaussian", "sigma_mm": float(sigma)}
    )


def tabulated_pupil(grid: Grid1D, values: np.ndarray) -> Pupil:
    """Pupil from complex samples; P(u) by quadrature over the table support."""
    values = np.asarray(values, dtype=complex)
    if values.shape != (grid.n_points,):
        raise InvalidArgumentError(f"pupil table length {values.shape} does not match grid")
    xs = grid.samples()
    w = grid.trapezoid_weights()

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        re = np.interp(x, xs, values.real, left=0.0, right=0.0)
        im = np.interp(x, xs, values.imag, left=0.0, right=0.0)
        return re + 1j * im

    wv = w * values

    def ft(u):
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u).ravel()
        out = np.empty(flat.size, dtype=complex)
        for i0 in range(0, flat.size, 4096):
            uu = flat[i0 : i0 + 4096, np.newaxis]
            out[i0 : i0 + 4096] = np.exp(-2j * np.pi * uu * xs[np.newaxis, :]) @ wv
        if u.ndim == 0:
            return complex(out[0])
        return out.reshape(u.shape)

    return Pupil(
        evaluate=evaluate,
        ft=ft,
        descriptor={"kind": "tabulated", "n_points": grid.n_points},
    )


def load_pupil_csv(path) -> Pupil:
    """CSV columns x_mm,value (real) or x_mm,re,im on a uniform grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] not in (2, 3):
        raise InvalidArgumentError(
            f"pupil CSV needs columns x_mm,value or x_mm,re,im; got {data.shape[1]} columns"
        )
    x = data[:, 0]
    grid = make_grid((x[0] + x[-1]) / 2, (x[-1] - x[0]) / 2, x.size)
    values = data[:, 1] if data.shape[1] == 2 else data[:, 1] + 1j * data[:, 2]
    return tabulated_pupil(grid, values)


def pupil_ft(p: Pupil, u) -> complex:
    """Fourier transform of the pupil; analytic when the kind has one."""
    out = p.ft(u)
    return complex(out) if np.ndim(out) == 0 else np.asarray(out)


@dataclass(frozen=True)
class ImpulseResponse:
    """Complex kernel h(x_out, x_in) of one optical arm.

    ``sample_in`` / ``sample_abs2_in`` return kernel samples (resp. squared
    moduli) over an input-plane grid for quadrature, applying cell-averaging
    for sharp-edged components; they default to pointwise evaluation.
    """

    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    descriptor: dict
    _sample_in: Optional[Callable[[float, Grid1D], np.ndarray]] = field(default=None, repr=False)
    _sample_abs2_in: Optional[Callable[[float, Grid1D], np.ndarray]] = field(
        default=None, repr=False
    )

    def sample_in(self, x_out: float, grid: Grid1D) -> np.ndarray:
        if self._sample_in is not None:
            return self._sample_in(x_out, grid)
        return np.asarray(self.evaluate(x_out, grid.samples()), dtype=complex)

    def sample_abs2_in(self, x_out: float, grid: Grid1D) -> np.ndarray:
        if self._sample_abs2_in is not None:
            return self._sample_abs2_in(x_out, grid)
        return np.abs(self.evaluate(x_out, grid.samples())) ** 2


def fourier_arm(lam: float, f: float, t: Transmission) -> ImpulseResponse:
    """Test-arm kernel: object t, unapertured lens, detector in the focal
    plane."""
    if not (lam > 0.0):
        raise InvalidArgumentError(f"wavelength must be > 0, got {lam}")
    if not (f > 0.0):
        raise InvalidArgumentError(f"focal length must be > 0, got {f}")
    lf = lam * f

    def evaluate(x_t, x):
        x_t = np.asarray(x_t, dtype=float)
        x = np.asarray(x, dtype=float)
        return (-1j / lf) * t.evaluate(x) * np.exp(-2j * np.pi * x_t * x / lf)

    def sample_in(x_t, grid):
        x = grid.samples()
        tv = t.sample(x, cell=grid.step)
        return (-1j / lf) * tv * np.exp(-2j * np.pi * x_t * x / lf)

    def sample_abs2_in(x_t, grid):
        return t.sample_sq(grid.samples(), cell=grid.step) / lf**2

    return ImpulseResponse(
        evaluate=evaluate,
        descriptor={
            "kind": "fourier_arm",
            "lambda_mm": float(lam),
            "f_mm": float(f),
            "object": t.descriptor,
        },
        _sample_in=sample_in,
        _sample_abs2_in=sample_abs2_in,
    )


def two_f_arm(
    lam: float, f: float, p: Pupil, quad_phase: str = "source"
) -> ImpulseResponse:
    """Reference-arm kernel: lens of pupil p at 2f from source and detector.

    ``quad_phase`` selects the coordinate carrying the input-plane quadratic
    phase.  The default "source" uses the arm's own input coordinate x'.
    "literal" drops that factor from the kernel and flags it in the
    descriptor so the correlator applies exp(i pi x^2 / (2 lam f)) with the
    test-arm source coordinate instead; the kernel modulus (hence the arm
    energy) is identical either way.
    """
    if not (lam > 0.0):
        raise InvalidArgumentError(f"wavelength must be > 0, got {lam}")
    if not (f > 0.0):
        raise InvalidArgumentError(f"focal length must be > 0, got {f}")
    if quad_phase not in ("source", "literal"):
        raise InvalidArgumentError(f"quad_phase must be 'source' or 'literal', got {quad_phase!r}")
    lf = lam * f
    amp = 1.0 / (4.0 * lf**2)
    chirp = np.pi / (2.0 * lf)

    def evaluate(x_r, xp):
        x_r = np.asarray(x_r, dtype=float)
        xp = np.asarray(xp, dtype=float)
        phase = chirp * (x_r**2 + xp**2) if quad_phase == "source" else chirp * x_r**2
        return amp * p.ft((x_r + xp) / (2.0 * lf)) * np.exp(1j * phase)

    return ImpulseResponse(
        evaluate=evaluate,
        descriptor={
            "kind": "two_f_arm",
            "lambda_mm": float(lam),
            "f_mm": float(f),
            "pupil": p.descriptor,
            "quad_phase": quad_phase,
            # chirp coefficient the correlator must apply on the test-arm
            # coordinate when the literal reading is selected
            "extra_test_chirp": chirp if quad_phase == "literal" else 0.0,
        },
    )


def tabulated_arm(grid_out: Grid1D, grid_in: Grid1D, values: np.ndarray) -> ImpulseResponse:
    """Kernel from samples on (output grid) x (input grid); bilinear inside,
    zero outside."""
    table = Table2D(grid_out, grid_in, values)
    return ImpulseResponse(
        evaluate=table,
        descriptor={"kind": "tabulated", "shape": (grid_out.n_points, grid_in.n_points)},
    )


def scaled_arm(h: ImpulseResponse, c: complex) -> ImpulseResponse:
    """The kernel multiplied by a complex constant (gain/attenuation)."""
    c = complex(c)
    base_sample = h.sample_in
    base_abs2 = h.sample_abs2_in
    return ImpulseResponse(
        evaluate=lambda x_out, x_in: c * h.evaluate(x_out, x_in),
        descriptor={"kind": "scaled", "factor": c, "base": h.descriptor},
        _sample_in=lambda x_out, grid: c * base_sample(x_out, grid),
        _sample_abs2_in=lambda x_out, grid: abs(c) ** 2 * base_abs2(x_out, grid),
    )


def eval_h(h: ImpulseResponse, x_out: float, x_in: float) -> complex:
    """Evaluate an arm kernel at one point, checking finiteness."""
    if not np.isfinite(x_out) or not np.isfinite(x_in):
        raise InvalidArgumentError(f"kernel arguments must be finite, got ({x_out}, {x_in})")
    v = complex(h.evaluate(x_out, x_in))
    if not np.isfinite(v.real) or not np.isfinite(v.imag):
        raise NumericDomainError(
            f"kernel produced non-finite value at ({x_out}, {x_in})",
            where=(float(x_out), float(x_in)),
        )
    return v
