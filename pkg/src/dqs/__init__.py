"""Emission spectrum of a qubit under deep strong, high-frequency dispersive driving."""

from .analytic import (
    DegenerateRatesWarning,
    DerivedParams,
    DriveParams,
    KBMValidityWarning,
    RelaxRates,
    bloch_expectations,
    coherent_lines,
    default_n_max,
    derive,
    incoherent_spectrum,
    quasienergy,
)
from .bessel import bessel_j, bessel_j_orders
from .dynamics import (
    BlochState,
    CorrelationState,
    CorrelationTrace,
    IntegratorConfig,
    SteadyCycle,
    bloch_rhs,
    bloch_trajectory,
    correlation_initial_conditions,
    integrate_bloch_to_steady_state,
    integrate_correlation,
)
from .errors import ConfigError, ConvergenceError, ExtractionError, FitError, HorizonTooShortError
from .lines import CoherentLine, LorentzianPeak, SpectrumGrid, lorentzian
from .spectrum import (
    ModelViolationWarning,
    NumericRun,
    assemble_full_spectrum,
    coherent_lines_numeric,
    dipole_harmonics,
    extract_quasienergy,
    fit_incoherent_peaks,
    fit_lorentzian,
    incoherent_spectrum_numeric,
    numeric_quasienergy,
    run_numeric,
    significant_harmonics,
    split_correlation,
)

__version__ = "0.1.0"
