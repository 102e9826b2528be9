"""Parametric spectral-line records shared by the analytic and numeric paths."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["CoherentLine", "LorentzianPeak", "SpectrumGrid", "lorentzian"]


@dataclass(frozen=True)
class CoherentLine:
    """Delta line at an odd harmonic; one record stands for the +/- pair."""

    n: int
    frequency: float
    weight: float

    def to_dict(self):
        return {"n": self.n, "frequency": self.frequency, "weight": self.weight}


@dataclass(frozen=True)
class LorentzianPeak:
    """Peak of the form ``amplitude * k / ((W - center)**2 + k**2)``.

    ``amplitude`` is signed: a negative value is an inverted line.  The
    ``baseline`` and ``residual`` fields are only filled in by fits.
    """

    center: float
    half_width: float
    amplitude: float
    harmonic: int
    baseline: float = 0.0
    residual: Optional[float] = None

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")

    def __call__(self, omega):
        return self.amplitude * lorentzian(omega, self.center, self.half_width) + self.baseline

    def to_dict(self):
        return {
            "n": self.harmonic,
            "center": self.center,
            "half_width": self.half_width,
            "amplitude": self.amplitude,
            "residual": self.residual,
        }


@dataclass
class SpectrumGrid:
    """S(W) sampled on a uniform grid.

    Delta lines are kept parametric in ``delta_lines`` and never added to
    ``values``.
    """

    omega_grid: np.ndarray
    values: np.ndarray
    delta_lines: list = field(default_factory=list)

    def __post_init__(self):
        self.omega_grid = np.asarray(self.omega_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.omega_grid.shape != self.values.shape:
            raise ValueError("omega_grid and values must have the same shape")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrum values must be finite")

    @property
    def step(self):
        if self.omega_grid.size < 2:
            return 0.0
        return float(self.omega_grid[1] - self.omega_grid[0])


def lorentzian(omega, center, half_width):
    """Unnormalized Lorentzian k / ((W - W0)^2 + k^2)."""
    omega = np.asarray(omega, dtype=float)
    return half_width / ((omega - center) ** 2 + half_width**2)
