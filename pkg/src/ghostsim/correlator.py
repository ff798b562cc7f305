"""Coincidence amplitude, rate, second moment, quantum fluctuation and SNR.

For a unit-norm two-photon state the coincidence rate is

    G2(x_r, x_t) = | int int dx dx' phi(x, x') h_t(x_t, x) h_r(x_r, x') |^2

and the second moment of the coincidence operator factorizes into

    <S^2> = G2 * int dx |h_t(x_t, x)|^2 * int dx' |h_r(x_r, x')|^2,

so the fluctuation is Delta G2 = sqrt(<S^2> - G2^2) and SNR = G2 / Delta G2.
Averaging over N independently generated pairs divides the fluctuation by
sqrt(N) and multiplies the SNR by sqrt(N).

All integrals are tensor-product trapezoid sums on the setup's grids; the
amplitude supports both the direct double sum and the precomputed
inner-integral (separable) evaluation, which agree to roundoff.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import (
    InvalidArgumentError,
    NormalizationViolationError,
    NumericDomainError,
    SupportCoverageWarning,
)
from .grid import Grid1D
from .optics import ImpulseResponse
from .source import TwoPhotonState

__all__ = [
    "CorrelatorSetup",
    "PointStatistics",
    "amplitude",
    "coincidence_rate",
    "arm_energy",
    "second_moment",
    "noise",
    "noise_from_moments",
    "snr",
    "snr_from_moments",
    "averaged_noise",
    "averaged_snr",
    "point_statistics",
]

# radicand more negative than this fraction of its scale signals a broken
# normalization rather than roundoff
RADICAND_CLAMP = 1e-12

_PHI_CHUNK = 512


@dataclass(frozen=True)
class CorrelatorSetup:
    """Immutable bundle of state, arm kernels and quadrature grids.

    gx discretizes the test-arm source coordinate x, gxp the reference-arm
    source coordinate x'.
    """

    state: TwoPhotonState
    h_t: ImpulseResponse
    h_r: ImpulseResponse
    gx: Grid1D
    gxp: Grid1D

    def __post_init__(self):
        object.__setattr__(self, "_inner_cache", {})
        object.__setattr__(self, "_inner_lock", threading.Lock())
        if not self.state.norm_certified:
            raise InvalidArgumentError(
                "correlator requires a norm-certified two-photon state"
            )
        cert = self.state.descriptor.get("certification")
        if cert is not None:
            for g, (c, hw, _n) in ((self.gx, cert["gx"]), (self.gxp, cert["gxp"])):
                if g.lo > c - hw or g.hi < c + hw:
                    raise InvalidArgumentError(
                        "quadrature grids must cover the state's certification domain"
                    )

    def _test_chirp(self) -> float:
        """Quadratic-phase coefficient applied on x when an arm uses the
        literal quadratic-phase reading."""
        return float(self.h_t.descriptor.get("extra_test_chirp", 0.0)) + float(
            self.h_r.descriptor.get("extra_test_chirp", 0.0)
        )

    def _left_vector(self, x_t: float) -> np.ndarray:
        """Trapezoid-weighted test-arm samples over gx, including any
        literal-phase chirp."""
        x = self.gx.samples()
        v = self.gx.trapezoid_weights() * self.h_t.sample_in(x_t, self.gx)
        c = self._test_chirp()
        if c != 0.0:
            v = v * np.exp(1j * c * x**2)
        return v

    def inner_integral(self, x_t: float) -> np.ndarray:
        """u(x') = int dx phi(x, x') h_t(x_t, x), sampled on gxp.

        Only the grid rows where the test-arm samples are nonzero
        contribute, which makes compact objects cheap.  Memoized per x_t
        (the expensive factor of every scan point shares it).
        """
        key = float(x_t)
        with self._inner_lock:
            cached = self._inner_cache.get(key)
        if cached is not None:
            return cached
        left = self._left_vector(x_t)
        x = self.gx.samples()
        xp = self.gxp.samples()[np.newaxis, :]
        nz = np.flatnonzero(left)
        u = np.zeros(self.gxp.n_points, dtype=complex)
        for i0 in range(0, nz.size, _PHI_CHUNK):
            idx = nz[i0 : i0 + _PHI_CHUNK]
            block = self.state.evaluate(x[idx, np.newaxis], xp)
            u += left[idx] @ block
        with self._inner_lock:
            self._inner_cache[key] = u
        return u


@dataclass(frozen=True)
class PointStatistics:
    """All scalar quantities at one (x_t, x_r) scan point."""

    x_t: float
    x_r: float
    amplitude: complex
    g2: float
    i_t: float
    i_r: float
    second_moment: float
    noise: float
    snr: float


def amplitude(setup: CorrelatorSetup, x_t: float, x_r: float, method: str = "separable") -> complex:
    """Coincidence amplitude A(x_r, x_t) by tensor-product quadrature.

    "separable" precomputes the inner x' integral; "direct" accumulates the
    full 2-D sum.  Both use identical kernel samples and agree to roundoff.
    """
    right = setup.gxp.trapezoid_weights() * setup.h_r.sample_in(x_r, setup.gxp)
    if method == "separable":
        # inner_integral already carries the weighted test-arm samples
        a = np.dot(setup.inner_integral(x_t), right)
    elif method == "direct":
        left = setup._left_vector(x_t)
        x = setup.gx.samples()
        xp = setup.gxp.samples()[np.newaxis, :]
        a = 0.0 + 0.0j
        for i0 in range(0, setup.gx.n_points, _PHI_CHUNK):
            block = setup.state.evaluate(x[i0 : i0 + _PHI_CHUNK, np.newaxis], xp)
            term = left[i0 : i0 + _PHI_CHUNK, np.newaxis] * block * right[np.newaxis, :]
            a += complex(term.sum())
    else:
        raise InvalidArgumentError(f"unknown amplitude method {method!r}")
    a = complex(a)
    if not np.isfinite(a.real) or not np.isfinite(a.imag):
        raise NumericDomainError(f"non-finite amplitude at (x_t={x_t}, x_r={x_r})")
    return a


def coincidence_rate(setup: CorrelatorSetup, x_t: float, x_r: float) -> float:
    return abs(amplitude(setup, x_t, x_r)) ** 2


def arm_energy(h: ImpulseResponse, x_out: float, g: Grid1D) -> float:
    """Quadrature of |h(x_out, .)|^2 over g.

    Warns when the boundary samples are not negligible against the maximum,
    since a truncated window silently biases the energy.
    """
    a2 = h.sample_abs2_in(x_out, g)
    peak = float(a2.max(initial=0.0))
    if peak > 0.0 and max(float(a2[0]), float(a2[-1])) > 1e-6 * peak:
        warnings.warn(
            f"arm-energy integrand not negligible at the grid boundary "
            f"(edge/max = {max(a2[0], a2[-1]) / peak:.2e}); enlarge the window",
            SupportCoverageWarning,
            stacklevel=2,
        )
    return float(np.dot(g.trapezoid_weights(), a2))


def second_moment(
    setup: CorrelatorSetup,
    x_t: float,
    x_r: float,
    g2: float | None = None,
    i_t: float | None = None,
    i_r: float | None = None,
) -> float:
    """<S^2> = G2 * I_t * I_r for a unit-norm state."""
    if g2 is None:
        g2 = coincidence_rate(setup, x_t, x_r)
    if i_t is None:
        i_t = arm_energy(setup.h_t, x_t, setup.gx)
    if i_r is None:
        i_r = arm_energy(setup.h_r, x_r, setup.gxp)
    return g2 * i_t * i_r


def noise_from_moments(g2: float, moment2: float) -> float:
    """Delta G2 = sqrt(<S^2> - G2^2) with a roundoff clamp.

    A radicand below -RADICAND_CLAMP times its scale is a normalization or
    truncation failure, not noise."""
    radicand = moment2 - g2 * g2
    if radicand < 0.0:
        scale = moment2 + g2 * g2
        if radicand >= -RADICAND_CLAMP * scale:
            return 0.0
        raise NormalizationViolationError(
            f"variance radicand {radicand:.6e} below the clamp window "
            f"(-{RADICAND_CLAMP:.0e} * {scale:.6e}); the state is not unit-norm "
            f"or the quadrature window truncates it"
        )
    return sqrt(radicand)


def noise(setup: CorrelatorSetup, x_t: float, x_r: float) -> float:
    g2 = coincidence_rate(setup, x_t, x_r)
    return noise_from_moments(g2, second_moment(setup, x_t, x_r, g2=g2))


def snr_from_moments(g2: float, dg2: float) -> float:
    """SNR = G2 / Delta G2; 0 where there is no signal, +inf where the
    fluctuation vanishes with signal present."""
    if g2 == 0.0:
        return 0.0
    if dg2 == 0.0:
        return float("inf")
    return g2 / dg2


def snr(setup: CorrelatorSetup, x_t: float, x_r: float) -> float:
    g2 = coincidence_rate(setup, x_t, x_r)
    dg2 = noise_from_moments(g2, second_moment(setup, x_t, x_r, g2=g2))
    return snr_from_moments(g2, dg2)


def _check_pairs(n_pairs: int) -> None:
    if int(n_pairs) != n_pairs or n_pairs < 1:
        raise InvalidArgumentError(f"n_pairs must be an integer >= 1, got {n_pairs}")


def averaged_noise(dg2: float, n_pairs: int) -> float:
    """Fluctuation of the rate averaged over n independently generated
    pairs: sqrt(N) times smaller."""
    _check_pairs(n_pairs)
    return dg2 / sqrt(n_pairs)


def averaged_snr(value: float, n_pairs: int) -> float:
    """SNR after averaging n independent pairs: sqrt(N) times larger."""
    _check_pairs(n_pairs)
    return value * sqrt(n_pairs)


def point_statistics(
    setup: CorrelatorSetup,
    x_t: float,
    x_r: float,
    i_t: float | None = None,
    i_r: float | None = None,
) -> PointStatistics:
    """Evaluate every per-point quantity, reusing precomputed arm energies
    when the caller has them cached."""
    a = amplitude(setup, x_t, x_r)
    g2 = abs(a) ** 2
    if i_t is None:
        i_t = arm_energy(setup.h_t, x_t, setup.gx)
    if i_r is None:
        i_r = arm_energy(setup.h_r, x_r, setup.gxp)
    m2 = g2 * i_t * i_r
    dg2 = noise_from_moments(g2, m2)
    return PointStatistics(
        x_t=float(x_t),
        x_r=float(x_r),
        amplitude=a,
        g2=g2,
        i_t=i_t,
        i_r=i_r,
        second_moment=m2,
        noise=dg2,
        snr=snr_from_moments(g2, dg2),
    )
