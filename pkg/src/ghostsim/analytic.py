"""Closed-form results for all-Gaussian configurations.

These are the independent oracles behind the built-in validation suite and
the test suite: Gaussian-source normalization, arm energies of the standard
double-slit / hard-aperture arms, and the full coincidence amplitude when
source, object and pupil are all Gaussian (a 2-D complex Gaussian integral).
The quadrature code never calls into this module.
"""

from __future__ import annotations

from math import pi, sqrt

import numpy as np

__all__ = [
    "gaussian_norm_constant",
    "double_slit_arm_energy",
    "gaussian_object_arm_energy",
    "rect_two_f_arm_energy",
    "gaussian_two_f_arm_energy",
    "all_gaussian_amplitude",
]


def gaussian_norm_constant(a: float, b: float) -> float:
    """Amplitude C making the Gaussian source unit-norm.

    The squared norm separates in rotated coordinates (x + x', x - x'):
    int int |phi|^2 = C^2 sqrt(pi a^2 / 2) sqrt(pi / (2/a^2 + 4/b^2)).
    """
    integral = sqrt(pi * a**2 / 2.0) * sqrt(pi / (2.0 / a**2 + 4.0 / b**2))
    return 1.0 / sqrt(integral)


def double_slit_arm_energy(w: float, lam: float, f: float) -> float:
    """int dx |h_t|^2 for a double slit of width w: 2w / (lam f)^2."""
    return 2.0 * w / (lam * f) ** 2


def gaussian_object_arm_energy(w: float, lam: float, f: float) -> float:
    """int dx |h_t|^2 for t(x) = exp(-x^2/w^2): w sqrt(pi/2) / (lam f)^2."""
    return w * sqrt(pi / 2.0) / (lam * f) ** 2


def rect_two_f_arm_energy(D: float, lam: float, f: float) -> float:
    """int dx' |h_r|^2 for a hard aperture of width D.

    Substituting u = (x_r + x') / (2 lam f) and applying Parseval,
    int |P(u)|^2 du = int |p(x)|^2 dx = D, giving D / (8 lam^3 f^3) --
    linear in the aperture size, independent of x_r.
    """
    return D / (8.0 * (lam * f) ** 3)


def gaussian_two_f_arm_energy(sigma: float, lam: float, f: float) -> float:
    """Same with p(x) = exp(-x^2/sigma^2): int |p|^2 = sigma sqrt(pi/2)."""
    return sigma * sqrt(pi / 2.0) / (8.0 * (lam * f) ** 3)


def all_gaussian_amplitude(
    a: float,
    b: float,
    c_norm: float,
    w_obj: float,
    sigma_pupil: float,
    lam: float,
    f: float,
    x_t: float,
    x_r,
):
    """Coincidence amplitude for Gaussian source, object and pupil.

    The double integral over (x, x') is a 2-D complex Gaussian:

        int int exp(-z^T M z + j . z) dz = pi / sqrt(det M) * exp(j^T M^-1 j / 4)

    with M assembled from the source envelope 1/a^2, entanglement 1/b^2,
    object 1/w_obj^2, pupil-transform width pi^2 sigma^2 / (4 lam^2 f^2) and
    the quadratic phase pi / (2 lam f) of the reference arm.  Vectorized
    over x_r.
    """
    x_r = np.asarray(x_r, dtype=float)
    lf = lam * f
    alpha = 1.0 / a**2
    beta = 1.0 / b**2
    gamma = 1.0 / w_obj**2
    s = pi**2 * sigma_pupil**2 / (4.0 * lf**2)
    chi = pi / (2.0 * lf)

    m11 = alpha + beta + gamma
    m22 = alpha + beta + s - 1j * chi
    m12 = -beta
    det = m11 * m22 - m12**2

    j1 = -2j * pi * x_t / lf + np.zeros_like(x_r)
    j2 = -2.0 * s * x_r
    # quadratic form j^T M^-1 j / 4 with the symmetric 2x2 inverse; the
    # constant exponent is folded in before exponentiating because the two
    # pieces nearly cancel at large x_r
    quad = (m22 * j1**2 - 2.0 * m12 * j1 * j2 + m11 * j2**2) / (4.0 * det)
    exponent = quad + (-s + 1j * chi) * x_r**2

    prefactor = c_norm * (-1j / lf) * (sigma_pupil * sqrt(pi) / (4.0 * lf**2))
    out = prefactor * (pi / np.sqrt(det)) * np.exp(exponent)
    return complex(out) if out.ndim == 0 else out
