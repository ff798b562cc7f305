"""Entangled-photon ghost imaging simulator: coincidence rate, quantum noise
and signal-to-noise ratio for configurable optical arms."""

from .correlator import (
    CorrelatorSetup,
    PointStatistics,
    amplitude,
    arm_energy,
    averaged_noise,
    averaged_snr,
    coincidence_rate,
    noise,
    point_statistics,
    second_moment,
    snr,
)
from .errors import (
    ConfigError,
    GhostSimError,
    InvalidArgumentError,
    NormalizationViolationError,
    NumericDomainError,
    SupportCoverageWarning,
    TruncationError,
    UndefinedContrastError,
)
from .experiments import (
    CorrelationResult,
    ScanConfig,
    SweepSummary,
    aperture_sweep,
    build_setup,
    contrast_metric,
    scan_reference,
)
from .grid import ComplexField1D, Grid1D, integrate, integrate2d, make_grid
from .optics import (
    ImpulseResponse,
    Pupil,
    Transmission,
    double_slit,
    eval_h,
    fourier_arm,
    gaussian_pupil,
    gaussian_transmission,
    pupil_ft,
    rect_pupil,
    scaled_arm,
    tabulated_arm,
    tabulated_pupil,
    tabulated_transmission,
    two_f_arm,
)
from .source import (
    TwoPhotonState,
    default_certification_grid,
    gaussian_wavefunction,
    normalize,
    tabulated_wavefunction,
)

__version__ = "0.1.0"
