"""Closed-form results for a qubit under strong high-frequency dispersive driving.

The qubit Hamiltonian is ``H = eps*s_z - 2*g*s_x*cos(w*t)``, relaxing through
radiative decay ``gamma`` and pure dephasing ``eta``.  In the regime
``w, g >> eps`` first-order averaging gives a dressed splitting
``eps_q = eps*J0(a)`` with ``a = 2g/w``, drive-dependent longitudinal and
transverse rates, and an emission spectrum made of delta lines at odd
harmonics plus Lorentzians at ``eps_q`` and ``2n*w + eps_q``.

All frequencies and rates are in units of the drive frequency unless a
different ``omega`` is given explicitly.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j, bessel_j_orders
from .lines import CoherentLine, LorentzianPeak, SpectrumGrid, lorentzian

__all__ = [
    "KBMValidityWarning",
    "DegenerateRatesWarning",
    "DriveParams",
    "RelaxRates",
    "DerivedParams",
    "default_n_max",
    "derive",
    "quasienergy",
    "bloch_expectations",
    "coherent_lines",
    "incoherent_spectrum",
    "MIN_STRENGTH",
    "MAX_DISPERSIVE_RATIO",
]

MIN_STRENGTH = 1.5
MAX_DISPERSIVE_RATIO = 0.3
DEFAULT_EPSILON = 0.1


class KBMValidityWarning(UserWarning):
    """Parameters lie outside the range where the averaged results hold."""


class DegenerateRatesWarning(UserWarning):
    """No dissipation: the steady-state population is undefined."""


def _finite_nonneg(name, value):
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class DriveParams:
    """Drive frequency ``omega``, coupling ``g`` and qubit splitting ``epsilon``.

    The dimensionless strength ``a = 2*g/omega`` is computed on construction.
    Parameters outside the averaging regime (``a < 1.5`` or
    ``epsilon/omega > 0.3``) are accepted with a :class:`KBMValidityWarning`.
    """

    omega: float = 1.0
    g: float = 0.0
    epsilon: float = DEFAULT_EPSILON
    a: float = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.omega) or self.omega <= 0:
            raise ValueError(f"omega must be finite and > 0, got {self.omega!r}")
        _finite_nonneg("g", self.g)
        _finite_nonneg("epsilon", self.epsilon)
        object.__setattr__(self, "a", 2.0 * self.g / self.omega)
        for problem in self.validity_problems():
            warnings.warn(problem, KBMValidityWarning, stacklevel=3)

    @classmethod
    def from_strength(cls, a, epsilon=DEFAULT_EPSILON, omega=1.0):
        return cls(omega=omega, g=0.5 * a * omega, epsilon=epsilon)

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    def validity_problems(self):
        problems = []
        if self.a < MIN_STRENGTH:
            problems.append(f"drive strength a={self.a:g} is below {MIN_STRENGTH}; averaged results are unreliable")
        if self.epsilon / self.omega > MAX_DISPERSIVE_RATIO:
            problems.append(
                f"epsilon/omega={self.epsilon / self.omega:g} exceeds {MAX_DISPERSIVE_RATIO}; "
                "the dispersive expansion is unreliable"
            )
        return problems


@dataclass(frozen=True)
class RelaxRates:
    """Radiative decay ``gamma`` (excited to ground) and pure dephasing ``eta``.

    Upward transitions are neglected (zero temperature).
    """

    gamma: float
    eta: float = 0.0

    def __post_init__(self):
        _finite_nonneg("gamma", self.gamma)
        _finite_nonneg("eta", self.eta)

    @property
    def gamma_perp(self):
        return 0.5 * (self.gamma + self.eta)

    @property
    def gamma_par(self):
        return self.gamma


@dataclass(frozen=True)
class DerivedParams:
    gamma_par_dressed: float
    gamma_perp_dressed: float
    sigma0: float
    eps_q: float
    gamma_perp_bare: float
    gamma_par_bare: float
    degenerate: bool = False

    def to_dict(self, a):
        return {
            "a": a,
            "sigma0": self.sigma0,
            "eps_q": self.eps_q,
            "Gamma_par": self.gamma_par_dressed,
            "Gamma_perp": self.gamma_perp_dressed,
        }


def default_n_max(a):
    """Harmonic cutoff beyond which J_n(a) is negligible."""
    return int(math.ceil(a)) + 10


def quasienergy(drive):
    """Dressed qubit splitting ``epsilon * J0(a)``."""
    return drive.epsilon * bessel_j(0, drive.a)


def derive(drive, relax):
    """Dressed rates, steady population parameter and quasienergy.

    With ``j0 = J0(a)`` and ``j0_2 = J0(2a)``::

        Gamma_par  = 3/4 gamma + 1/4 eta + 1/4 (gamma - eta) j0_2
        Gamma_perp = 5/8 gamma + 3/8 eta + 1/8 (eta - gamma) j0_2
        sigma0     = -gamma * j0 / Gamma_par

    ``sigma0`` is twice the steady-state population difference of the dressed
    states.  When ``Gamma_par`` vanishes (no dissipation) it is set to 0 and
    the result is flagged ``degenerate``.
    """
    gamma, eta = relax.gamma, relax.eta
    j0 = bessel_j(0, drive.a)
    j0_2 = bessel_j(0, 2.0 * drive.a)
    gamma_par = 0.75 * gamma + 0.25 * eta + 0.25 * (gamma - eta) * j0_2
    gamma_perp = 0.625 * gamma + 0.375 * eta + 0.125 * (eta - gamma) * j0_2
    degenerate = gamma_par <= 0.0
    if degenerate:
        warnings.warn(
            "gamma = eta = 0 (or no longitudinal relaxation): sigma0 set to 0",
            DegenerateRatesWarning,
            stacklevel=2,
        )
        sigma0 = 0.0
    else:
        sigma0 = -gamma * j0 / gamma_par + 0.0
    return DerivedParams(
        gamma_par_dressed=gamma_par,
        gamma_perp_dressed=gamma_perp,
        sigma0=sigma0,
        eps_q=drive.epsilon * j0,
        gamma_perp_bare=relax.gamma_perp,
        gamma_par_bare=relax.gamma_par,
        degenerate=degenerate,
    )


def bloch_expectations(t, drive, relax):
    """<s_z>(t) and <s_+>(t) starting from the ground state at t = 0.

    Both share the envelope ``(sigma0 - (sigma0 + 1) exp(-Gamma_par t)) / 2``
    which multiplies ``cos(a sin wt)`` for ``s_z`` and ``i sin(a sin wt)``
    for the dipole ``s_+``.  Accepts scalar or array ``t``.
    """
    t = np.asarray(t, dtype=float)
    d = derive(drive, relax)
    envelope = 0.5 * (d.sigma0 - (d.sigma0 + 1.0) * np.exp(-d.gamma_par_dressed * t))
    phase = drive.a * np.sin(drive.omega * t)
    sz = envelope * np.cos(phase)
    sp = 1j * envelope * np.sin(phase)
    if sz.ndim == 0:
        return float(sz), complex(sp)
    return sz, sp


def coherent_lines(drive, relax, n_max=None, prefactor=1.0):
    """Delta lines ``sigma0^2 J_{2n-1}(a)^2`` at ``(2n-1) w`` for n = 1..n_max.

    ``prefactor`` rescales every weight.  The default is the ``sigma0^2 J^2``
    normalization; the time average of the factorized dipole correlation
    corresponds to ``prefactor=0.25``.
    """
    if n_max is None:
        n_max = default_n_max(drive.a)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    d = derive(drive, relax)
    jn = bessel_j_orders(2 * n_max, drive.a)
    return [
        CoherentLine(
            n=n,
            frequency=(2 * n - 1) * drive.omega,
            weight=prefactor * d.sigma0**2 * jn[2 * n - 1] ** 2,
        )
        for n in range(1, n_max + 1)
    ]


def incoherent_spectrum(omega_grid, drive, relax, n_max=None):
    """Lorentzian part of the emission spectrum on ``omega_grid``.

    Evaluates::

        S(W) = C * [ (1 + J0) L(W; eps_q)
                     + sum_n J_2n * (L(W; 2nw + eps_q) + L(W; -2nw + eps_q)) ]

    with ``C = (1 + sigma0 J0) / (4 pi)`` and ``L(W; c) = G/((W-c)^2 + G^2)``,
    ``G = Gamma_perp``.  Returns the sampled grid and the peaks for
    n = 0..n_max on the positive-frequency side; the mirror peaks at
    ``-2nw + eps_q`` have the same amplitudes and are included in the grid
    values only.
    """
    if n_max is None:
        n_max = default_n_max(drive.a)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    omega_grid = np.asarray(omega_grid, dtype=float)
    if not np.all(np.isfinite(omega_grid)):
        raise ValueError("omega_grid must be finite")
    d = derive(drive, relax)
    if not d.gamma_perp_dressed > 0:
        raise ValueError("incoherent spectrum needs gamma + eta > 0")
    jn = bessel_j_orders(2 * n_max, drive.a)
    scale = (1.0 + d.sigma0 * jn[0]) / (4.0 * math.pi)
    width = d.gamma_perp_dressed
    w = drive.omega

    peaks = [LorentzianPeak(center=d.eps_q, half_width=width, amplitude=scale * (1.0 + jn[0]), harmonic=0)]
    values = peaks[0].amplitude * lorentzian(omega_grid, d.eps_q, width)
    for n in range(1, n_max + 1):
        amp = scale * jn[2 * n]
        peaks.append(LorentzianPeak(center=2 * n * w + d.eps_q, half_width=width, amplitude=amp, harmonic=n))
        values = values + amp * (
            lorentzian(omega_grid, 2 * n * w + d.eps_q, width) + lorentzian(omega_grid, -2 * n * w + d.eps_q, width)
        )
    return SpectrumGrid(omega_grid, values), peaks
