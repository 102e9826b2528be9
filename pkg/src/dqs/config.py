"""Flat ``section.key = value`` run configuration."""

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import DriveParams, RelaxRates, default_n_max, derive
from .dynamics import REGRESSION_ALIASES, REGRESSION_TERMS, IntegratorConfig
from .errors import ConfigError

__all__ = ["SCHEMA", "RunConfig", "parse_config_text", "load_config"]

# key -> (type, default); None means unset
SCHEMA = {
    "drive.epsilon": (float, 0.1),
    "drive.omega": (float, 1.0),
    "drive.g": (float, None),
    "drive.a": (float, None),
    "relax.gamma": (float, 0.03),
    "relax.eta": (float, 0.0),
    "integrator.dt": (float, None),
    "integrator.tau_max": (float, None),
    "integrator.regression_term": (str, "regression_consistent"),
    "integrator.phase_average": (bool, False),
    "spectrum.omega_min": (float, -0.5),
    "spectrum.omega_max": (float, 6.5),
    "spectrum.grid_step": (float, None),
    "spectrum.n_max": (int, None),
    "output.directory": (str, "out"),
    "output.format": (str, "csv"),
}

OUTPUT_FORMATS = ("csv", "json")
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _convert(key, raw):
    kind = SCHEMA[key][0]
    text = raw.strip()
    if text == "":
        return None
    try:
        if kind is bool:
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)
            return value
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw.strip()!r} as {kind.__name__}") from None
    if key == "integrator.regression_term":
        return REGRESSION_ALIASES.get(text, text)
    return text


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config_text(text):
    """Parse ``section.key = value`` lines into a dict; ``#`` starts a comment."""
    values = {}
    problems = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'section.key = value'")
            continue
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        try:
            values[key] = _convert(key, raw)
        except ConfigError as exc:
            problems.append(f"line {lineno}: {exc}")
    if problems:
        raise ConfigError("\n".join(problems))
    return values


@dataclass
class RunConfig:
    """Validated run settings; unset keys fall back to :data:`SCHEMA` defaults."""

    values: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = sorted(set(self.values) - set(SCHEMA))
        if unknown:
            raise ConfigError("\n".join(f"unknown key {k!r}" for k in unknown))

    def __getitem__(self, key):
        if key in self.values:
            return self.values[key]
        return SCHEMA[key][1]

    def with_overrides(self, overrides):
        """Copy with ``overrides`` applied; string values are parsed.

        Setting one of ``drive.a`` / ``drive.g`` clears the other.
        """
        values = dict(self.values)
        for key, value in overrides.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
            values[key] = _convert(key, value) if isinstance(value, str) else value
            if key == "drive.a":
                values.pop("drive.g", None)
            elif key == "drive.g":
                values.pop("drive.a", None)
        return RunConfig(values)

    def problems(self):
        """One message per violated invariant; empty when the config is usable."""
        out = []
        has_g = self["drive.g"] is not None
        has_a = self["drive.a"] is not None
        if has_g == has_a:
            out.append("drive: exactly one of drive.g or drive.a must be set")
        if self["drive.omega"] is None or self["drive.omega"] <= 0:
            out.append("drive.omega must be > 0")
        for key in ("drive.g", "drive.a", "drive.epsilon", "relax.gamma", "relax.eta"):
            value = self[key]
            if value is not None and value < 0:
                out.append(f"{key} must be >= 0")
        gamma, eta = self["relax.gamma"], self["relax.eta"]
        if gamma is None or eta is None or gamma + eta <= 0:
            out.append("relax: gamma + eta must be > 0")
        term = self["integrator.regression_term"]
        if REGRESSION_ALIASES.get(term, term) not in REGRESSION_TERMS:
            out.append(f"integrator.regression_term must be one of {REGRESSION_TERMS}")
        for key in ("integrator.dt", "integrator.tau_max", "spectrum.grid_step"):
            value = self[key]
            if value is not None and value <= 0:
                out.append(f"{key} must be > 0")
        if self["spectrum.n_max"] is not None and self["spectrum.n_max"] < 1:
            out.append("spectrum.n_max must be >= 1")
        if not self["spectrum.omega_max"] > self["spectrum.omega_min"]:
            out.append("spectrum.omega_max must exceed spectrum.omega_min")
        if self["output.format"] not in OUTPUT_FORMATS:
            out.append(f"output.format must be one of {OUTPUT_FORMATS}")
        if not out:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    self.integrator().resolve(self.drive(), self.relax())
            except ConfigError as exc:
                out.append(f"integrator: {exc}")
        return out

    def validate(self):
        problems = self.problems()
        if problems:
            raise ConfigError("\n".join(problems))
        return self

    def drive(self):
        omega = self["drive.omega"]
        if self["drive.a"] is not None:
            return DriveParams.from_strength(self["drive.a"], epsilon=self["drive.epsilon"], omega=omega)
        return DriveParams(omega=omega, g=self["drive.g"], epsilon=self["drive.epsilon"])

    def relax(self):
        return RelaxRates(self["relax.gamma"], self["relax.eta"])

    def integrator(self):
        return IntegratorConfig(
            dt=self["integrator.dt"],
            tau_max=self["integrator.tau_max"],
            regression_term=self["integrator.regression_term"],
            phase_average=self["integrator.phase_average"],
        )

    def n_max(self, drive):
        return self["spectrum.n_max"] or default_n_max(drive.a)

    def omega_grid(self, drive, relax):
        """Uniform grid; the default step is a tenth of the transverse width."""
        step = self["spectrum.grid_step"]
        if step is None:
            step = derive(drive, relax).gamma_perp_dressed / 10
        lo, hi = self["spectrum.omega_min"], self["spectrum.omega_max"]
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return lo + step * np.arange(count)

    def dumps(self):
        """Every key that differs from unset, one ``key = value`` line each."""
        lines = []
        for key in SCHEMA:
            value = self[key]
            if value is not None:
                lines.append(f"{key} = {_format(value)}")
        return "\n".join(lines) + "\n"


def load_config(path):
    return RunConfig(parse_config_text(Path(path).read_text(encoding="utf-8")))
