"""Coincidence amplitude, second moment, fluctuation and SNR laws."""

from __future__ import annotations

from math import sqrt

import numpy as np
import pytest

from ghostsim import (
    CorrelatorSetup,
    InvalidArgumentError,
    NormalizationViolationError,
    SupportCoverageWarning,
    TwoPhotonState,
    amplitude,
    arm_energy,
    averaged_noise,
    averaged_snr,
    coincidence_rate,
    double_slit,
    fourier_arm,
    gaussian_pupil,
    gaussian_transmission,
    gaussian_wavefunction,
    make_grid,
    normalize,
    point_statistics,
    rect_pupil,
    snr,
    two_f_arm,
)
from ghostsim.analytic import all_gaussian_amplitude, gaussian_norm_constant
from ghostsim.correlator import noise_from_moments, snr_from_moments
from ghostsim.optics import Transmission, scaled_arm
from ghostsim.source import default_certification_grid

LAM = 650e-6
F = 100.0


def small_gaussian_setup(w_obj=0.5, sigma=2.0, a=2.0, b=0.2, n_x=4097, n_xp=8193):
    cert = default_certification_grid(a, b)
    state = normalize(gaussian_wavefunction(a, b), cert, cert)
    h_t = fourier_arm(LAM, F, gaussian_transmission(w_obj))
    h_r = two_f_arm(LAM, F, gaussian_pupil(sigma))
    return CorrelatorSetup(
        state=state,
        h_t=h_t,
        h_r=h_r,
        gx=make_grid(0.0, 8.0, n_x),
        gxp=make_grid(0.0, 8.0, n_xp),
    )


def test_opaque_object_gives_zero_signal():
    setup = small_gaussian_setup(n_x=257, n_xp=257)
    dark = Transmission(evaluate=lambda x: np.zeros_like(np.asarray(x, dtype=float)), descriptor={"kind": "dark"})
    setup = CorrelatorSetup(
        state=setup.state,
        h_t=fourier_arm(LAM, F, dark),
        h_r=setup.h_r,
        gx=setup.gx,
        gxp=setup.gxp,
    )
    assert amplitude(setup, 0.0, 0.3) == 0.0
    assert coincidence_rate(setup, 0.0, 0.3) == 0.0
    assert snr(setup, 0.0, 0.3) == 0.0


def test_separable_state_amplitude_factorizes():
    g = make_grid(0.0, 4.0, 1025)

    def evaluate(x, xp):
        return np.exp(-np.asarray(x, dtype=float) ** 2) * np.exp(
            -np.asarray(xp, dtype=float) ** 2 / 2.0
        ) + 0j

    state = TwoPhotonState(evaluate=evaluate, norm_certified=True, descriptor={})
    h_t = fourier_arm(LAM, F, gaussian_transmission(1.0))
    h_r = two_f_arm(LAM, F, gaussian_pupil(1.0))
    setup = CorrelatorSetup(state=state, h_t=h_t, h_r=h_r, gx=g, gxp=g)
    x_t, x_r = 0.05, -0.2
    w = g.trapezoid_weights()
    x = g.samples()
    left = complex(np.dot(w, np.exp(-(x**2)) * h_t.sample_in(x_t, g)))
    right = complex(np.dot(w, np.exp(-(x**2) / 2.0) * h_r.sample_in(x_r, g)))
    assert amplitude(setup, x_t, x_r) == pytest.approx(left * right, rel=1e-12)


def test_amplitude_matches_all_gaussian_closed_form():
    a, b, w_obj, sigma = 2.0, 0.2, 0.5, 2.0
    setup = small_gaussian_setup(w_obj=w_obj, sigma=sigma, a=a, b=b)
    c = gaussian_norm_constant(a, b)
    for x_r in np.linspace(-1.0, 1.0, 21):
        num = amplitude(setup, 0.0, float(x_r))
        ref = all_gaussian_amplitude(a, b, c, w_obj, sigma, LAM, F, 0.0, float(x_r))
        assert num == pytest.approx(ref, rel=1e-6)


def test_scan_parity_for_symmetric_setup():
    cert = default_certification_grid(2.0, 0.05)
    state = normalize(gaussian_wavefunction(2.0, 0.05), cert, cert)
    setup = CorrelatorSetup(
        state=state,
        h_t=fourier_arm(LAM, F, double_slit(0.05, 1.0)),
        h_r=two_f_arm(LAM, F, rect_pupil(10.0)),
        gx=make_grid(0.0, 8.0, 8193),
        gxp=make_grid(0.0, 8.0, 8193),
    )
    for x_r in (0.2, 0.5, 1.1):
        plus = coincidence_rate(setup, 0.0, x_r)
        minus = coincidence_rate(setup, 0.0, -x_r)
        assert plus == pytest.approx(minus, rel=1e-8)


def test_separable_and_direct_methods_agree():
    setup = small_gaussian_setup(n_x=513, n_xp=1025)
    for x_r in (-0.4, 0.0, 0.7):
        sep = amplitude(setup, 0.1, x_r, method="separable")
        direct = amplitude(setup, 0.1, x_r, method="direct")
        assert sep == pytest.approx(direct, rel=1e-10)
    with pytest.raises(InvalidArgumentError):
        amplitude(setup, 0.0, 0.0, method="montecarlo")


def test_second_moment_factorization():
    setup = small_gaussian_setup(n_x=1025, n_xp=2049)
    stats = point_statistics(setup, 0.0, 0.2)
    assert stats.second_moment == pytest.approx(stats.g2 * stats.i_t * stats.i_r, rel=1e-14)
    assert stats.noise == pytest.approx(
        sqrt(stats.second_moment - stats.g2**2), rel=1e-12
    )
    assert stats.snr == pytest.approx(stats.g2 / stats.noise, rel=1e-12)


def test_snr_invariant_under_arm_rescaling():
    setup = small_gaussian_setup(n_x=1025, n_xp=2049)
    base = snr(setup, 0.0, 0.3)
    rng = np.random.default_rng(13)
    for _ in range(20):
        c_t = rng.uniform(0.1, 10.0) * np.exp(2j * np.pi * rng.uniform())
        c_r = rng.uniform(0.1, 10.0) * np.exp(2j * np.pi * rng.uniform())
        scaled = CorrelatorSetup(
            state=setup.state,
            h_t=scaled_arm(setup.h_t, c_t),
            h_r=scaled_arm(setup.h_r, c_r),
            gx=setup.gx,
            gxp=setup.gxp,
        )
        assert snr(scaled, 0.0, 0.3) == pytest.approx(base, rel=1e-10)


def test_matched_state_saturates_the_bound():
    # phi proportional to conj(h_t h_r) makes <S^2> equal (G2)^2
    g = make_grid(0.0, 6.0, 2049)
    h_t = fourier_arm(LAM, F, gaussian_transmission(0.8))
    h_r = two_f_arm(LAM, F, gaussian_pupil(1.5))
    x_t, x_r = 0.0, 0.1

    raw = TwoPhotonState(
        evaluate=lambda x, xp: np.conj(h_t.evaluate(x_t, x) * h_r.evaluate(x_r, xp)),
        norm_certified=False,
        descriptor={"kind": "matched"},
    )
    state = normalize(raw, g, g)
    setup = CorrelatorSetup(state=state, h_t=h_t, h_r=h_r, gx=g, gxp=g)
    stats = point_statistics(setup, x_t, x_r)
    assert stats.noise <= 1e-5 * stats.g2
    radicand = stats.second_moment - stats.g2**2
    assert abs(radicand) <= 1e-10 * (stats.second_moment + stats.g2**2)


def test_random_setups_respect_variance_bound():
    rng = np.random.default_rng(99)
    for _ in range(5):
        setup = small_gaussian_setup(
            w_obj=rng.uniform(0.2, 1.0),
            sigma=rng.uniform(0.5, 3.0),
            a=rng.uniform(1.0, 2.0),
            b=rng.uniform(0.1, 0.5),
            n_x=1025,
            n_xp=2049,
        )
        stats = point_statistics(setup, float(rng.uniform(-0.2, 0.2)), float(rng.uniform(-1.0, 1.0)))
        radicand = stats.second_moment - stats.g2**2
        scale = stats.second_moment + stats.g2**2
        assert radicand >= -1e-12 * scale


def test_noise_from_moments_clamp_and_violation():
    assert noise_from_moments(1.0, 1.0 - 1e-14) == 0.0
    with pytest.raises(NormalizationViolationError):
        noise_from_moments(2.0, 1.0)


def test_snr_edge_cases():
    assert snr_from_moments(0.0, 0.0) == 0.0
    assert snr_from_moments(1.0, 0.0) == float("inf")
    # <S^2> = 2 (G2)^2 gives unit SNR
    g2 = 3.7
    dg2 = noise_from_moments(g2, 2.0 * g2**2)
    assert snr_from_moments(g2, dg2) == pytest.approx(1.0, rel=1e-12)


def test_averaging_laws_are_exact():
    dg2, s = 0.8125, 2.25
    for n in (1, 4, 10000):
        assert averaged_noise(dg2, n) == dg2 / sqrt(n)
        assert averaged_snr(s, n) == s * sqrt(n)
    with pytest.raises(InvalidArgumentError):
        averaged_noise(dg2, 0)
    with pytest.raises(InvalidArgumentError):
        averaged_snr(s, 2.5)


def test_setup_requires_certified_state():
    raw = gaussian_wavefunction(1.0, 0.2)
    g = make_grid(0.0, 4.0, 257)
    with pytest.raises(InvalidArgumentError):
        CorrelatorSetup(
            state=raw,
            h_t=fourier_arm(LAM, F, gaussian_transmission(0.5)),
            h_r=two_f_arm(LAM, F, gaussian_pupil(1.0)),
            gx=g,
            gxp=g,
        )


def test_setup_grids_must_cover_certification_domain():
    cert = default_certification_grid(2.0, 0.2)  # window 8 mm
    state = normalize(gaussian_wavefunction(2.0, 0.2), cert, cert)
    small = make_grid(0.0, 4.0, 257)
    with pytest.raises(InvalidArgumentError):
        CorrelatorSetup(
            state=state,
            h_t=fourier_arm(LAM, F, gaussian_transmission(0.5)),
            h_r=two_f_arm(LAM, F, gaussian_pupil(1.0)),
            gx=small,
            gxp=small,
        )


def test_arm_energy_warns_on_truncated_window():
    h = fourier_arm(LAM, F, gaussian_transmission(2.0))
    with pytest.warns(SupportCoverageWarning):
        arm_energy(h, 0.0, make_grid(0.0, 2.0, 257))
