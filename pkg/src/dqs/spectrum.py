"""From correlation traces to emission spectra.

The stationary dipole correlation splits into a coherent part, the product
of mean dipoles that never decays, and an incoherent residual that decays
on the transverse time scale.  The coherent part becomes delta lines whose
weights come from the Fourier series of the limit-cycle dipole.  The
residual is Fourier transformed by direct trapezoidal quadrature and its
peaks are fitted with Lorentzians, which also gives a numeric estimate of
the quasienergy.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .analytic import coherent_lines, default_n_max, derive, incoherent_spectrum
from .bessel import bessel_j_orders
from .dynamics import (
    IntegratorConfig,
    correlation_initial_conditions,
    integrate_bloch_to_steady_state,
    integrate_correlation,
)
from .errors import ExtractionError, FitError, HorizonTooShortError
from .lines import CoherentLine, LorentzianPeak, SpectrumGrid, lorentzian

__all__ = [
    "ModelViolationWarning",
    "NumericRun",
    "split_correlation",
    "incoherent_spectrum_numeric",
    "dipole_harmonics",
    "coherent_lines_numeric",
    "fit_lorentzian",
    "extract_quasienergy",
    "significant_harmonics",
    "fit_incoherent_peaks",
    "run_numeric",
    "numeric_quasienergy",
    "assemble_full_spectrum",
    "FIT_WINDOW_WIDTHS",
    "FIT_POINTS_PER_WIDTH",
]

RESIDUAL_TOL = 1e-6
EVEN_HARMONIC_TOL = 1e-8
FIT_WINDOW_WIDTHS = 8
FIT_POINTS_PER_WIDTH = 10
SIGNIFICANT_AMPLITUDE = 0.05


class ModelViolationWarning(UserWarning):
    """The steady dipole has content the averaged model forbids."""


def split_correlation(trace, cycle, tol=RESIDUAL_TOL):
    """Split g+-(t0, tau) into coherent and incoherent parts.

    The coherent part is ``scale * <s->(t0 + tau)`` read off the limit cycle,
    where ``scale`` is the trace's regression scale: ``<s+>(t0)`` for the
    consistent regression term, 1 for the constant term.  Either
    way it is the non-decaying particular solution of the trace.

    Raises
    ------
    HorizonTooShortError
        If the residual over the last drive period is not below ``tol``.
    """
    if not math.isclose(trace.dt, cycle.dt, rel_tol=1e-12):
        raise ValueError("trace and limit cycle use different steps")
    n = len(cycle)
    idx = (trace.phase_index + np.arange(len(trace))) % n
    coherent = trace.regression_scale * cycle.sm[idx]
    residual = trace.gpm - coherent
    tail = float(np.max(np.abs(residual[-n:])))
    if tail >= tol:
        raise HorizonTooShortError(
            f"correlation residual {tail:.3g} has not decayed below {tol:g} by tau={trace.tau_max:g}"
        )
    return coherent, residual


def incoherent_spectrum_numeric(residual, dt, omega_grid):
    """``(1/pi) Re int_0^T exp(i W tau) r(tau) dtau`` by the trapezoidal rule.

    Every grid frequency is evaluated directly, so ``omega_grid`` may be any
    set of points.
    """
    residual = np.asarray(residual, dtype=complex)
    omega_grid = np.asarray(omega_grid, dtype=float)
    weights = np.full(residual.size, dt)
    weights[0] = weights[-1] = 0.5 * dt
    f = residual * weights
    tau = dt * np.arange(residual.size)
    out = np.empty(omega_grid.size)
    chunk = max(1, 2_000_000 // max(1, residual.size))
    for start in range(0, omega_grid.size, chunk):
        phase = np.outer(omega_grid[start : start + chunk], tau)
        out[start : start + chunk] = np.cos(phase) @ f.real - np.sin(phase) @ f.imag
    return SpectrumGrid(omega_grid, out / math.pi)


def dipole_harmonics(cycle):
    """Fourier coefficients ``c_k`` of ``<s+>(t) = sum_k c_k exp(i k w t)`` over one period.

    Returns ``(k, c)`` with ``k`` running over ``-N/2 .. N/2 - 1``.
    """
    n = len(cycle)
    coeffs = np.fft.fft(cycle.sp) / n
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    order = np.argsort(k)
    return k[order], coeffs[order]


def coherent_lines_numeric(cycle, n_max=30, omega=1.0):
    """Delta-line weights from the limit-cycle dipole.

    The weight of harmonic ``k = 2n - 1`` is ``2 (|c_k|^2 + |c_-k|^2)``,
    which equals ``|a_k|^2 + |b_k|^2`` for the cosine/sine expansion
    ``<s+> = sum a_k cos(k wt) + b_k sin(k wt)``.  A dipole that vanishes
    identically gives an empty list.  Even-harmonic content above 1e-8
    triggers a :class:`ModelViolationWarning`.
    """
    if not np.any(cycle.sp):
        return []
    n_max = min(n_max, len(cycle) // 4)
    k, c = dipole_harmonics(cycle)
    by_k = dict(zip(k.tolist(), c))
    even = max(abs(by_k[j]) for j in range(-2 * n_max, 2 * n_max + 1, 2))
    if even > EVEN_HARMONIC_TOL:
        warnings.warn(
            f"even-harmonic dipole content {even:.3g} exceeds {EVEN_HARMONIC_TOL:g}",
            ModelViolationWarning,
            stacklevel=2,
        )
    lines = []
    for n in range(1, n_max + 1):
        h = 2 * n - 1
        weight = 2.0 * (abs(by_k[h]) ** 2 + abs(by_k[-h]) ** 2)
        lines.append(CoherentLine(n=n, frequency=h * omega, weight=float(weight)))
    return lines


def _coarse_fit(omega, values):
    """Grid search over (center, width) with amplitude and baseline solved exactly."""
    span = omega[-1] - omega[0]
    step = omega[1] - omega[0]
    centers = np.linspace(omega[0], omega[-1], 41)[:, None, None]
    widths = np.geomspace(step, span, 30)[None, :, None]
    shape = widths / ((omega[None, None, :] - centers) ** 2 + widths**2)
    n = omega.size
    s_l = shape.sum(-1)
    s_ll = (shape * shape).sum(-1)
    s_ly = (shape * values).sum(-1)
    s_y = values.sum()
    s_yy = (values * values).sum()
    det = n * s_ll - s_l**2
    amp = (n * s_ly - s_l * s_y) / det
    base = (s_y - amp * s_l) / n
    cost = s_yy - 2 * amp * s_ly - 2 * base * s_y + amp**2 * s_ll + 2 * amp * base * s_l + n * base**2
    i, j = np.unravel_index(np.argmin(cost), cost.shape)
    return np.array([amp[i, j], centers[i, 0, 0], widths[0, j, 0], base[i, j]])


def fit_lorentzian(grid, window_center, window_halfwidth, harmonic=0):
    """Least-squares fit of ``A k / ((W - W0)^2 + k^2) + b`` inside a window.

    A deterministic grid search over ``(W0, k)`` seeds a bounded
    trust-region refinement of all four parameters.  The returned peak
    carries the signed amplitude, the baseline and the RMS residual.

    Raises
    ------
    FitError
        If the window has too few points, the optimizer fails, the center
        runs to the window edge, or the grid is coarser than a fifth of the
        fitted half-width.
    """
    omega = grid.omega_grid
    mask = np.abs(omega - window_center) <= window_halfwidth * (1 + 1e-9)
    omega = omega[mask]
    values = grid.values[mask]
    if omega.size < 8:
        raise FitError(f"fit window around {window_center:g} holds only {omega.size} points")
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        raise FitError(f"spectrum is identically zero around {window_center:g}")
    y = values / scale
    x0 = _coarse_fit(omega, y)
    step = omega[1] - omega[0]
    lower = [-np.inf, omega[0], 1e-6 * step, -np.inf]
    upper = [np.inf, omega[-1], np.inf, np.inf]
    x0 = np.clip(x0, lower, upper)

    def resid(p):
        return p[0] * lorentzian(omega, p[1], p[2]) + p[3] - y

    try:
        sol = least_squares(resid, x0, bounds=(lower, upper), x_scale="jac", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise FitError(f"fit around {window_center:g} failed: {exc}") from exc
    amp, center, width, base = sol.x
    if sol.status <= 0 or not np.all(np.isfinite(sol.x)):
        raise FitError(f"fit around {window_center:g} did not converge: {sol.message}")
    edge = 0.5 * step
    if center - omega[0] < edge or omega[-1] - center < edge:
        raise FitError(f"fitted center {center:g} ran to the edge of the window")
    if step > width / 5:
        raise FitError(f"grid step {step:g} is coarser than a fifth of the fitted half-width {width:g}")
    rms = float(np.sqrt(np.mean(sol.fun**2))) * scale
    return LorentzianPeak(
        center=float(center),
        half_width=float(width),
        amplitude=float(amp * scale),
        harmonic=harmonic,
        baseline=float(base * scale),
        residual=rms,
    )


def extract_quasienergy(peaks, omega=1.0):
    """Amplitude-weighted mean of the shifts ``W0 - 2 n w`` over fitted peaks."""
    usable = [p for p in peaks if p.amplitude != 0 and math.isfinite(p.center)]
    if not usable:
        raise ExtractionError("no fitted peaks to extract a quasienergy from")
    weights = np.array([abs(p.amplitude) for p in usable])
    shifts = np.array([p.center - 2 * p.harmonic * omega for p in usable])
    return float(np.sum(weights * shifts) / np.sum(weights))


def significant_harmonics(drive, n_max=None, threshold=SIGNIFICANT_AMPLITUDE):
    """Harmonic 0 plus every n >= 1 with ``|J_2n(a)| > threshold``."""
    if n_max is None:
        n_max = default_n_max(drive.a)
    jn = bessel_j_orders(2 * n_max, drive.a)
    return [0] + [n for n in range(1, n_max + 1) if abs(jn[2 * n]) > threshold]


@dataclass
class NumericRun:
    """Limit cycle, correlation traces and incoherent residuals for one parameter point."""

    drive: object
    relax: object
    config: IntegratorConfig
    cycle: object
    traces: list = field(default_factory=list)
    residuals: list = field(default_factory=list)

    @property
    def dt(self):
        return self.cycle.dt

    def spectrum(self, omega_grid):
        """Incoherent spectrum, averaged over reference phases when there are several."""
        values = np.zeros(np.asarray(omega_grid).size)
        for residual in self.residuals:
            values += incoherent_spectrum_numeric(residual, self.dt, omega_grid).values
        return SpectrumGrid(omega_grid, values / len(self.residuals))

    def coherent_lines(self, n_max=30):
        return coherent_lines_numeric(self.cycle, n_max=n_max, omega=self.drive.omega)


def run_numeric(drive, relax, config=None):
    """Steady state, correlation traces and residuals.

    One trace is started at ``t0 = t_end`` (drive phase zero), or
    ``config.n_phases`` traces at evenly spaced phases when
    ``config.phase_average`` is set.  With the consistent regression term
    the zero-delay ``g+z`` uses the exact product ``s+ sz = -s+/2``.
    """
    config = config or IntegratorConfig()
    cycle = integrate_bloch_to_steady_state(drive, relax, config)
    n = len(cycle)
    phases = range(config.n_phases) if config.phase_average else [0]
    exact = config.regression_term == "regression_consistent"
    run = NumericRun(drive, relax, config, cycle)
    for m in phases:
        j = m * n // config.n_phases
        steady = cycle.state(j)
        ic = correlation_initial_conditions(steady, exact_product=exact)
        trace = integrate_correlation(ic, cycle.t_end + j * cycle.dt, drive, relax, config, dipole=steady.sp)
        _, residual = split_correlation(trace, cycle)
        run.traces.append(trace)
        run.residuals.append(residual)
    return run


def fit_incoherent_peaks(source, drive, relax, harmonics=None, skip_failures=False):
    """Fit incoherent peaks near their predicted centers ``2 n w + eps_q``.

    ``source`` maps a frequency array to a :class:`SpectrumGrid`, e.g.
    ``NumericRun.spectrum``.  Each window spans ``8 Gamma_perp`` on either
    side of the center with ``Gamma_perp / 10`` spacing.  ``harmonics``
    defaults to :func:`significant_harmonics`.  Failed fits raise
    :class:`FitError`, or are skipped with a warning when ``skip_failures``
    is set.
    """
    d = derive(drive, relax)
    width = d.gamma_perp_dressed
    step = width / FIT_POINTS_PER_WIDTH
    half = FIT_WINDOW_WIDTHS * FIT_POINTS_PER_WIDTH
    if harmonics is None:
        harmonics = significant_harmonics(drive)
    peaks = []
    for n in harmonics:
        center = 2 * n * drive.omega + d.eps_q
        grid = source(center + step * np.arange(-half, half + 1))
        try:
            peaks.append(fit_lorentzian(grid, center, FIT_WINDOW_WIDTHS * width, harmonic=n))
        except FitError as exc:
            if not skip_failures:
                raise
            warnings.warn(f"skipping harmonic {n}: {exc}", RuntimeWarning, stacklevel=2)
    return peaks


def numeric_quasienergy(drive, relax, config=None, run=None):
    """Quasienergy from the fitted peak shifts of the numeric spectrum.

    Returns ``(eps_q, peaks)``.
    """
    run = run or run_numeric(drive, relax, config)
    peaks = fit_incoherent_peaks(run.spectrum, drive, relax, skip_failures=True)
    return extract_quasienergy(peaks, drive.omega), peaks


def assemble_full_spectrum(drive, relax, omega_grid, n_max=None, mode="analytic", config=None, run=None):
    """Incoherent grid plus parametric coherent lines, from either pipeline.

    ``mode="analytic"`` evaluates the closed forms; ``mode="numeric"`` runs
    (or reuses ``run``) the integration, split and quadrature chain.
    """
    if n_max is None:
        n_max = default_n_max(drive.a)
    if mode == "analytic":
        grid, _ = incoherent_spectrum(omega_grid, drive, relax, n_max)
        grid.delta_lines = coherent_lines(drive, relax, n_max)
        return grid
    if mode == "numeric":
        run = run or run_numeric(drive, relax, config)
        grid = run.spectrum(omega_grid)
        grid.delta_lines = run.coherent_lines(n_max)
        return grid
    raise ValueError(f"mode must be 'analytic' or 'numeric', got {mode!r}")
