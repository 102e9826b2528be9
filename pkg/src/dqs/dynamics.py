"""Numerical integration of the driven, damped qubit.

Two linear problems share one generator.  The Bloch vector
``(<s+>, <sz>, <s->)`` obeys

    d<s+>/dt = (i eps - g_perp) <s+> + i a w cos(wt) <sz>
    d<sz>/dt = (i/2) a w cos(wt) (<s+> - <s->) - g_par (<sz> + 1/2)
    d<s->/dt = (-i eps - g_perp) <s-> - i a w cos(wt) <sz>

with bare rates ``g_perp = (gamma + eta)/2`` and ``g_par = gamma``.  The
two-time correlations ``(g++, g+z, g+-)`` of ``<s+(t0) X(t0 + tau)>`` obey
the same equations in ``tau``; only the constant ``1/2`` in the middle row is
multiplied by a regression scale (1, or ``<s+>(t0)``).

The state is carried in homogeneous coordinates ``(p, z, m, k)`` where ``k``
holds that scale, so every fixed RK4 step is an exact 4x4 matrix.  Because
the drive is periodic and the step divides the period, the step matrices are
computed once per period and reused, both to find the limit cycle (fixed
point of the period map) and to sample long correlation traces.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic import derive
from .errors import ConfigError, ConvergenceError

__all__ = [
    "REGRESSION_TERMS",
    "BlochState",
    "CorrelationState",
    "IntegratorConfig",
    "ResolvedGrid",
    "SteadyCycle",
    "CorrelationTrace",
    "max_step",
    "bloch_rhs",
    "bloch_trajectory",
    "integrate_bloch_to_steady_state",
    "correlation_initial_conditions",
    "integrate_correlation",
]

REGRESSION_TERMS = ("paper_constant", "regression_consistent")
REGRESSION_ALIASES = {"paper": "paper_constant", "consistent": "regression_consistent"}

CONJUGATE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
MIN_HORIZON_WIDTHS = 10.0
DEFAULT_HORIZON_WIDTHS = 20.0


@dataclass(frozen=True)
class BlochState:
    sp: complex
    sz: float
    sm: complex

    @classmethod
    def ground(cls):
        return cls(0j, -0.5, 0j)

    def as_vector(self, scale=1.0):
        return np.array([self.sp, self.sz, self.sm, scale], dtype=complex)

    def check(self):
        """Raise if the state violates conjugation symmetry or positivity."""
        _check_bloch(self.sp, self.sz, self.sm)


@dataclass(frozen=True)
class CorrelationState:
    gpm: complex
    gpz: complex
    gpp: complex


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    ``dt`` is an upper bound: the step actually used divides the drive period
    into an even number of steps (a multiple of ``n_phases`` when phase
    averaging).  ``None`` picks half of the largest allowed step.  A
    ``tau_max`` of ``None`` means 20 transverse decay times.  The steady
    state is accepted once one period shifts the limit cycle by less than
    ``steady_tol`` in sup norm.
    """

    dt: Optional[float] = None
    tau_max: Optional[float] = None
    regression_term: str = "regression_consistent"
    phase_average: bool = False
    n_phases: int = 8
    steady_tol: float = 1e-12
    method: str = "rk4"

    def __post_init__(self):
        term = REGRESSION_ALIASES.get(self.regression_term, self.regression_term)
        if term not in REGRESSION_TERMS:
            raise ConfigError(f"regression_term must be one of {REGRESSION_TERMS}, got {self.regression_term!r}")
        object.__setattr__(self, "regression_term", term)
        if self.method != "rk4":
            raise ConfigError(f"only the fixed-step 'rk4' method is available, got {self.method!r}")
        if self.n_phases < 1:
            raise ConfigError("n_phases must be >= 1")
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if self.tau_max is not None and not (math.isfinite(self.tau_max) and self.tau_max > 0):
            raise ConfigError(f"tau_max must be positive, got {self.tau_max!r}")
        if not self.steady_tol > 0:
            raise ConfigError("steady_tol must be positive")

    def resolve(self, drive, relax):
        """Check the step and horizon against the parameters and fix the grid."""
        limit = max_step(drive)
        if self.dt is not None and self.dt > limit * (1 + 1e-12):
            raise ConfigError(f"dt={self.dt:g} exceeds the largest stable step {limit:g} for a={drive.a:g}")
        target = 0.5 * limit if self.dt is None else self.dt
        multiple = self.n_phases if self.phase_average else 2
        multiple = multiple if multiple % 2 == 0 else 2 * multiple
        n_steps = math.ceil(drive.period / target - 1e-9)
        n_steps = multiple * math.ceil(n_steps / multiple)

        width = derive(drive, relax).gamma_perp_dressed
        if not width > 0:
            raise ConfigError("gamma + eta must be positive for a finite correlation horizon")
        if self.tau_max is not None and self.tau_max < MIN_HORIZON_WIDTHS / width * (1 - 1e-12):
            raise ConfigError(
                f"tau_max={self.tau_max:g} is shorter than {MIN_HORIZON_WIDTHS:g}/Gamma_perp={MIN_HORIZON_WIDTHS / width:g}"
            )
        horizon = DEFAULT_HORIZON_WIDTHS / width if self.tau_max is None else self.tau_max
        n_periods = math.ceil(horizon / drive.period - 1e-9)
        return ResolvedGrid(n_steps=n_steps, dt=drive.period / n_steps, n_periods=n_periods)


@dataclass(frozen=True)
class ResolvedGrid:
    n_steps: int
    dt: float
    n_periods: int

    @property
    def tau_max(self):
        return self.n_periods * self.n_steps * self.dt


@dataclass
class SteadyCycle:
    """One period of the limit cycle sampled on the step grid, starting at ``t_end``."""

    t_end: float
    dt: float
    n_periods: int
    sp: np.ndarray
    sz: np.ndarray
    sm: np.ndarray

    def __len__(self):
        return len(self.sp)

    @property
    def times(self):
        return self.t_end + self.dt * np.arange(len(self))

    def state(self, j=0):
        j = j % len(self)
        return BlochState(complex(self.sp[j]), float(self.sz[j].real), complex(self.sm[j]))


@dataclass
class CorrelationTrace:
    """Samples of g+-, g+z, g++ on ``tau = k*dt`` at reference time ``t0``.

    For mirrored traces the slots hold g-+, g-z, g-- instead.
    """

    t0: float
    dt: float
    gpm: np.ndarray
    gpz: np.ndarray
    gpp: np.ndarray
    regression_scale: complex
    phase_index: int
    regression_term: str
    mirrored: bool = False

    def __len__(self):
        return len(self.gpm)

    @property
    def tau(self):
        return self.dt * np.arange(len(self))

    @property
    def tau_max(self):
        return self.dt * (len(self) - 1)

    def state(self, k):
        return CorrelationState(complex(self.gpm[k]), complex(self.gpz[k]), complex(self.gpp[k]))


def max_step(drive):
    """Largest step that still resolves the drive term ``a w cos(wt)``."""
    limit = 0.02 * drive.period
    if drive.a > 0:
        limit = min(limit, 0.2 / (drive.a * drive.omega))
    return limit


def _generator(t, drive, relax):
    """Generator matrices for the homogeneous state (p, z, m, k), shape t.shape + (4, 4)."""
    t = np.asarray(t, dtype=float)
    c = drive.a * drive.omega * np.cos(drive.omega * t)
    g_perp, g_par, eps = relax.gamma_perp, relax.gamma_par, drive.epsilon
    A = np.zeros(t.shape + (4, 4), dtype=complex)
    A[..., 0, 0] = 1j * eps - g_perp
    A[..., 0, 1] = 1j * c
    A[..., 1, 0] = 0.5j * c
    A[..., 1, 1] = -g_par
    A[..., 1, 2] = -0.5j * c
    A[..., 1, 3] = -0.5 * g_par
    A[..., 2, 1] = -1j * c
    A[..., 2, 2] = -1j * eps - g_perp
    return A


class _Propagator:
    """RK4 step matrices for one drive period on a grid of ``n_steps`` steps."""

    def __init__(self, drive, relax, n_steps):
        self.n_steps = n_steps
        self.dt = h = drive.period / n_steps
        t = h * np.arange(n_steps)
        a1 = _generator(t, drive, relax)
        a2 = _generator(t + 0.5 * h, drive, relax)
        a4 = _generator(t + h, drive, relax)
        eye = np.broadcast_to(np.eye(4), a1.shape)
        k1 = a1
        k2 = a2 @ (eye + 0.5 * h * k1)
        k3 = a2 @ (eye + 0.5 * h * k2)
        k4 = a4 @ (eye + h * k3)
        self.steps = eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        self._cumulative = {}

    def cumulative(self, offset=0):
        """Products of step matrices from phase index ``offset``; shape (n_steps + 1, 4, 4)."""
        offset %= self.n_steps
        if offset not in self._cumulative:
            phi = np.empty((self.n_steps + 1, 4, 4), dtype=complex)
            phi[0] = np.eye(4)
            for j in range(self.n_steps):
                phi[j + 1] = self.steps[(offset + j) % self.n_steps] @ phi[j]
            self._cumulative[offset] = phi
        return self._cumulative[offset]

    def run(self, x0, n_periods, offset=0):
        """All samples from ``x0`` over ``n_periods`` periods; shape (n_periods * n_steps + 1, 4)."""
        phi = self.cumulative(offset)
        period_map = phi[-1]
        boundary = np.empty((n_periods + 1, 4), dtype=complex)
        boundary[0] = x0
        for k in range(n_periods):
            boundary[k + 1] = period_map @ boundary[k]
        inner = np.einsum("jab,kb->kja", phi[:-1], boundary[:-1]).reshape(-1, 4)
        return np.vstack([inner, boundary[-1:]])


def _check_bloch(sp, sz, sm):
    sp, sz, sm = np.asarray(sp), np.asarray(sz), np.asarray(sm)
    if np.max(np.abs(sm - np.conj(sp)), initial=0.0) > CONJUGATE_TOL:
        raise ConvergenceError("Bloch state lost conjugation symmetry <s-> = conj(<s+>)")
    if np.max(np.abs(sz) ** 2 + np.abs(sp) ** 2, initial=0.0) > 0.25 + POSITIVITY_TOL:
        raise ConvergenceError("Bloch vector left the unit ball")


def bloch_rhs(t, state, drive, relax):
    """Time derivative of the Bloch state at time ``t``."""
    d = _generator(t, drive, relax) @ state.as_vector()
    return BlochState(complex(d[0]), float(d[1].real), complex(d[2]))


def bloch_trajectory(drive, relax, n_periods, config=None, initial=None):
    """Integrate from ``initial`` (default: ground state) over whole periods.

    Returns ``(t, sp, sz, sm)`` sampled on the step grid.
    """
    config = config or IntegratorConfig()
    grid = config.resolve(drive, relax)
    prop = _Propagator(drive, relax, grid.n_steps)
    x0 = (initial or BlochState.ground()).as_vector()
    samples = prop.run(x0, n_periods)
    t = grid.dt * np.arange(len(samples))
    return t, samples[:, 0], samples[:, 1].real, samples[:, 2]


def _slowest_rate(drive, relax):
    d = derive(drive, relax)
    rates = [r for r in (d.gamma_par_dressed, d.gamma_perp_dressed, relax.gamma_perp) if r > 0]
    return min(rates)


def integrate_bloch_to_steady_state(drive, relax, config=None):
    """Integrate from the ground state until the periodic steady state.

    The period map is iterated until the sampled cycle moves by less than
    ``config.steady_tol`` (sup norm over one period).

    Returns
    -------
    SteadyCycle
        One period of the limit cycle starting at ``t_end``, an integer
        number of periods.

    Raises
    ------
    ConfigError
        If there is no dissipation (``gamma + eta == 0``).
    ConvergenceError
        If the cycle has not converged after ``1e3`` slowest decay times.
    """
    config = config or IntegratorConfig()
    if relax.gamma + relax.eta <= 0:
        raise ConfigError("a steady state needs gamma + eta > 0")
    grid = config.resolve(drive, relax)
    prop = _Propagator(drive, relax, grid.n_steps)
    phi = prop.cumulative()
    period_map, within = phi[-1], phi[:-1]
    max_periods = math.ceil(1e3 / _slowest_rate(drive, relax) / drive.period)

    x = BlochState.ground().as_vector()
    for k in range(1, max_periods + 1):
        x_new = period_map @ x
        _check_bloch(x_new[0], x_new[1], x_new[2])
        shift = np.max(np.abs(within @ (x_new - x)))
        x = x_new
        if shift < config.steady_tol:
            cycle = within @ x
            _check_bloch(cycle[:, 0], cycle[:, 1], cycle[:, 2])
            return SteadyCycle(
                t_end=k * drive.period,
                dt=grid.dt,
                n_periods=k,
                sp=cycle[:, 0].copy(),
                sz=cycle[:, 1].real.copy(),
                sm=cycle[:, 2].copy(),
            )
    raise ConvergenceError(f"no periodic steady state after {max_periods} periods (last shift {shift:.3g})")


def correlation_initial_conditions(steady, exact_product=False):
    """Correlations at zero delay from the one-time state at ``t0``.

    ``g+- = 1/2 + <sz>`` and ``g++ = 0`` hold exactly for spin 1/2.  By
    default ``g+z = -<s+>``, the form used with the constant regression term; with
    ``exact_product=True`` the operator identity ``s+ sz = -s+/2`` is used
    instead, giving ``g+z = -<s+>/2``.
    """
    gpz = -0.5 * steady.sp if exact_product else -steady.sp
    return CorrelationState(gpm=0.5 + steady.sz, gpz=complex(gpz), gpp=0j)


def integrate_correlation(ic, t0, drive, relax, config=None, *, dipole=None, mirrored=False):
    """Propagate the correlation system over ``tau`` in ``[0, tau_max]``.

    Parameters
    ----------
    ic : CorrelationState
        Values at zero delay.
    t0 : float
        Reference time; must sit on the step grid.  At integer multiples of
        the period the drive enters as ``cos(w tau)``.
    dipole : complex, optional
        ``<s+>(t0)``, the regression scale used by the default
        ``regression_consistent`` term.  When omitted it is recovered from
        ``ic.gpz = -<s+>(t0)``, which keeps the map linear in ``ic``.
        Ignored for ``paper_constant``, whose scale is 1.
    mirrored : bool
        Integrate the conjugate system for ``<s-(t0) X(t0 + tau)>``; ``ic``
        then holds g-+, g-z, g-- in its gpm, gpz, gpp slots.

    Raises
    ------
    ConfigError
        If the step or horizon violate :meth:`IntegratorConfig.resolve`, or
        ``t0`` is off the step grid.
    """
    config = config or IntegratorConfig()
    grid = config.resolve(drive, relax)
    steps_in = t0 / grid.dt
    phase_index = round(steps_in)
    if t0 < 0 or abs(steps_in - phase_index) > 1e-6 * max(1.0, abs(steps_in)):
        raise ConfigError(f"t0={t0!r} is not a non-negative multiple of the step {grid.dt!r}")
    if config.regression_term == "paper_constant":
        scale = 1.0 + 0j
    else:
        scale = complex(-ic.gpz if dipole is None else dipole)

    if mirrored:
        x0 = np.array([ic.gpm, ic.gpz, ic.gpp, scale], dtype=complex)
    else:
        x0 = np.array([ic.gpp, ic.gpz, ic.gpm, scale], dtype=complex)
    prop = _Propagator(drive, relax, grid.n_steps)
    samples = prop.run(x0, grid.n_periods, offset=phase_index)
    if mirrored:
        gpm, gpp = samples[:, 0], samples[:, 2]
    else:
        gpm, gpp = samples[:, 2], samples[:, 0]
    return CorrelationTrace(
        t0=float(t0),
        dt=grid.dt,
        gpm=gpm.copy(),
        gpz=samples[:, 1].copy(),
        gpp=gpp.copy(),
        regression_scale=scale,
        phase_index=phase_index % grid.n_steps,
        regression_term=config.regression_term,
        mirrored=mirrored,
    )
