"""Physical parameters, presets and their nondimensional form."""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidParameters

STANDARD_ATMOSPHERE = 101325.0
# Static pressure of the preset: liquid-side P0 = p_stat - p_v = 101.0 kPa.
PRESET_P_STAT = 103330.0


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional constants of the two-bubble system, SI units.

    Both bubbles share the equilibrium radius ``r0``. ``d`` is the
    centre-to-centre distance, ``p_ac`` and ``omega`` the drive amplitude and
    cyclic frequency.
    """

    p_stat: float = PRESET_P_STAT
    p_v: float = 2330.0
    sigma: float = 0.0725
    rho: float = 1000.0
    eta_l: float = 0.001
    c: float = 1500.0
    gamma: float = 4.0 / 3.0
    chi: float = 0.22
    kappa_s: float = 2.5e-9
    r0: float = 1.72e-6
    d: float = 20 * 1.72e-6
    p_ac: float = 1.2e6
    omega: float = 2.87e7

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InvalidParameters(f"{f.name} must be a finite number, got {v!r}")
            if f.name == "p_ac":
                if v < 0:
                    raise InvalidParameters("p_ac must be >= 0")
            elif v <= 0:
                raise InvalidParameters(f"{f.name} must be > 0, got {v}")
        if self.d <= 2 * self.r0:
            raise InvalidParameters(f"d/r0 = {self.d / self.r0:.6g} must exceed 2")
        if self.p_stat <= self.p_v:
            raise InvalidParameters("p_stat must exceed p_v")

    @property
    def p0(self) -> float:
        return self.p_stat - self.p_v

    @property
    def d_over_r0(self) -> float:
        return self.d / self.r0

    def replace(self, **changes) -> "PhysicalParams":
        """Copy with changes; accepts ``d_over_r0`` as an alternative to ``d``."""
        if "d_over_r0" in changes:
            if "d" in changes:
                raise InvalidParameters("give either d or d_over_r0, not both")
            ratio = changes.pop("d_over_r0")
            r0 = changes.get("r0", self.r0)
            changes["d"] = ratio * r0
        return dataclasses.replace(self, **changes)

    def at(self, d_over_r0: float, p_ac: float) -> "PhysicalParams":
        """The same system at a point of the (d/R0, P_ac) control plane."""
        return self.replace(d_over_r0=d_over_r0, p_ac=p_ac)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """Short stable identifier of the parameter values."""
        text = ",".join(f"{k}={v!r}" for k, v in self.as_dict().items())
        return hashlib.sha1(text.encode()).hexdigest()[:16]


# SonoVue agents of radius 1.72 um, adiabatic.
PRESETS = {
    "sonovue-1.72um": PhysicalParams(),
}


def preset(name: str) -> PhysicalParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None


def natural_frequency(p: PhysicalParams) -> float:
    """Linear natural frequency of a single encapsulated bubble, rad/s.

    w0^2 = [3 gamma P0 + 2 (3 gamma - 1) sigma / R0 + 4 chi / R0] / (rho R0^2)
    """
    stiffness = 3.0 * p.gamma * p.p0 + 2.0 * (3.0 * p.gamma - 1.0) * p.sigma / p.r0 \
        + 4.0 * p.chi / p.r0
    return math.sqrt(stiffness / (p.rho * p.r0 * p.r0))


def gas_frequency(p: PhysicalParams) -> float:
    """Frequency of the bare gas stiffness, sqrt(3 gamma P0 / (rho R0^2)), rad/s.

    Lyapunov exponents are reported per unit ``1/gas_frequency`` by default.
    """
    return math.sqrt(3.0 * p.gamma * p.p0 / (p.rho * p.r0 * p.r0))


@dataclass(frozen=True)
class DimensionlessParams:
    """Coefficients of the scaled vector field.

    Lengths in ``r0``, time in ``1/omega0``, pressures in ``rho r0^2 omega0^2``.
    """

    omega0: float
    big_omega: float   # drive frequency omega / omega0
    cs: float          # c / (r0 omega0)
    eta: float         # eta_l / (rho r0^2 omega0)
    kap: float         # kappa_s / (rho r0^3 omega0)
    pg0: float         # (P0 + 2 sigma / r0) / (rho r0^2 omega0^2), gas pressure at rest
    sig: float         # sigma / (rho r0^3 omega0^2)
    p0: float          # P0 / (rho r0^2 omega0^2)
    chi: float         # chi / (rho r0^3 omega0^2)
    pac: float         # p_ac / (rho r0^2 omega0^2)
    gamma: float
    dist: float        # d / r0
    source: PhysicalParams = field(compare=False, repr=False)

    @classmethod
    def from_physical(cls, p: PhysicalParams) -> "DimensionlessParams":
        w0 = natural_frequency(p)
        pscale = p.rho * p.r0 ** 2 * w0 ** 2
        return cls(
            omega0=w0,
            big_omega=p.omega / w0,
            cs=p.c / (p.r0 * w0),
            eta=p.eta_l / (p.rho * p.r0 ** 2 * w0),
            kap=p.kappa_s / (p.rho * p.r0 ** 3 * w0),
            pg0=(p.p0 + 2.0 * p.sigma / p.r0) / pscale,
            sig=p.sigma / (pscale * p.r0),
            p0=p.p0 / pscale,
            chi=p.chi / (pscale * p.r0),
            pac=p.p_ac / pscale,
            gamma=p.gamma,
            dist=p.d / p.r0,
            source=p,
        )

    @property
    def period(self) -> float:
        """Drive period in scaled time."""
        return 2.0 * math.pi / self.big_omega

    @property
    def pressure_scale(self) -> float:
        p = self.source
        return p.rho * p.r0 ** 2 * self.omega0 ** 2

    def as_array(self) -> np.ndarray:
        """Coefficient vector in the layout the kernels expect."""
        return np.array(
            [self.cs, self.eta, self.kap, self.pg0, self.sig, self.p0, self.chi,
             self.pac, self.gamma, self.dist, self.big_omega],
            dtype=np.float64,
        )


def nondimensionalize(p: PhysicalParams) -> DimensionlessParams:
    return DimensionlessParams.from_physical(p)


def _parse_value(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def read_keyvalue(path) -> dict:
    """Read a flat ``key = value`` file (``#`` comments) into a dict of strings."""
    parser = configparser.ConfigParser(
        delimiters=("=", ":"), comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return dict(parser["config"])


PARAM_KEYS = tuple(f.name for f in dataclasses.fields(PhysicalParams)) + ("d_over_r0",)


def params_from_mapping(values: dict, base: PhysicalParams | None = None) -> PhysicalParams:
    """Apply physical-parameter overrides; unknown keys raise ConfigError."""
    base = base or preset("sonovue-1.72um")
    unknown = set(values) - set(PARAM_KEYS)
    if unknown:
        raise ConfigError(f"unknown parameter keys: {sorted(unknown)}")
    changes = {k: _parse_value(k, v) if isinstance(v, str) else float(v) for k, v in values.items()}
    if "d" in changes and "d_over_r0" in changes:
        raise ConfigError("d and d_over_r0 are mutually exclusive")
    try:
        return base.replace(**changes)
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from exc


def load_params(path, base: PhysicalParams | None = None) -> PhysicalParams:
    return params_from_mapping(read_keyvalue(path), base)
