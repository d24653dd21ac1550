"""Lyapunov exponents by tangent propagation and periodic Gram-Schmidt (Benettin).

The tangent vectors obey the variational equations and are advanced by the
same Runge-Kutta stages as the base trajectory, with the exact Jacobian at
every stage. Step size control looks only at the base state, so the leading
exponents do not depend on how many tangents are carried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._core import kernels
from .errors import InvalidParameters
from .integrator import IntegrationOutcome, Status, StepControl, integrate_to_phase, raise_status
from .model import TWO_PI, State
from .params import DimensionlessParams, gas_frequency

RATE_UNITS = ("gas", "tau")


@dataclass(frozen=True)
class LyapunovSettings:
    """Averaging settings. Period counts are in drive periods.

    ``rate_unit`` selects the time unit of the reported exponents: ``"tau"``
    is the integration time ``omega0 t``; ``"gas"`` (default) is
    ``t * sqrt(3 gamma P0 / (rho R0^2))``, the free-gas oscillation frequency.
    ``zero_eps`` is in the reported unit.
    """

    transient_periods: int = 2000
    average_periods: int = 20000
    renorm_interval: float = 1.0
    convergence_window: float = 0.5
    zero_eps: float = 5e-3
    batches: int = 20
    rate_unit: str = "gas"

    def __post_init__(self):
        if self.transient_periods < 0 or self.average_periods < 1:
            raise InvalidParameters("need transient_periods >= 0 and average_periods >= 1")
        if not self.renorm_interval > 0:
            raise InvalidParameters("renorm_interval must be positive")
        if not 0 < self.convergence_window <= 1:
            raise InvalidParameters("convergence_window must lie in (0, 1]")
        if not self.zero_eps > 0:
            raise InvalidParameters("zero_eps must be positive")
        if self.batches < 2:
            raise InvalidParameters("batches must be >= 2")
        if self.rate_unit not in RATE_UNITS:
            raise InvalidParameters(f"rate_unit must be one of {RATE_UNITS}")

    @classmethod
    def scan_grade(cls, **kw) -> "LyapunovSettings":
        return cls(**kw)

    @classmethod
    def chart_grade(cls, **kw) -> "LyapunovSettings":
        kw.setdefault("transient_periods", 500)
        kw.setdefault("average_periods", 3000)
        return cls(**kw)

    def replace(self, **kw) -> "LyapunovSettings":
        return replace(self, **kw)


def rate_scale(dp: DimensionlessParams, unit: str) -> float:
    """Factor converting a per-tau rate into the requested unit."""
    if unit == "tau":
        return 1.0
    return dp.omega0 / gas_frequency(dp.source)


@dataclass(frozen=True)
class LyapunovResult:
    """Exponent estimates sorted descending, with batch-means standard errors."""

    exponents: np.ndarray
    stderr: np.ndarray
    trivial_index: int
    converged: bool
    final_state: State
    zero_eps: float
    rate_unit: str
    steps: int = 0
    rejected: int = 0

    @property
    def nontrivial(self) -> np.ndarray:
        return np.delete(self.exponents, self.trivial_index)

    @property
    def nontrivial_stderr(self) -> np.ndarray:
        return np.delete(self.stderr, self.trivial_index)

    @property
    def sum(self) -> float:
        return float(np.sum(self.exponents))

    def zero_band(self) -> np.ndarray:
        """Per-exponent half width ``max(zero_eps, 3 stderr)``."""
        return np.maximum(self.zero_eps, 3.0 * self.stderr)


@dataclass(frozen=True)
class LyapunovPair:
    """The two largest nontrivial exponents."""

    l1: float
    l2: float
    stderr1: float
    stderr2: float
    converged: bool
    final_state: State
    zero_eps: float
    rate_unit: str
    steps: int = 0
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def __iter__(self):
        return iter((self.l1, self.l2, (self.stderr1, self.stderr2)))


def _batch_stderr(rates: np.ndarray, window: float, batches: int) -> np.ndarray:
    n = rates.shape[0]
    w = max(1, int(math.ceil(window * n)))
    tail = rates[n - w:]
    b = min(batches, w)
    if b < 2:
        return np.full(rates.shape[1], np.inf)
    size = w // b
    tail = tail[w - size * b:]
    means = tail.reshape(b, size, -1).mean(axis=1)
    return means.std(axis=0, ddof=1) / math.sqrt(b)


def _propagate(dp, s0, ctl, settings, basis):
    """Transient, then tangent propagation. Returns raw per-vector rates."""
    ctl = ctl or StepControl()
    coef = dp.as_array()
    carr = ctl.as_array()
    h = ctl.h_init
    steps = rej = 0
    s = s0
    if s.theta != 0.0:
        o = integrate_to_phase(dp, s, 1, ctl)
        o.raise_for_status()
        s, h, steps, rej = o.state, o.h_next, o.steps, o.rejected
    y = s.as_array()
    if settings.transient_periods:
        status, done, st, r, h = kernels.run_periods(
            coef, y, int(settings.transient_periods), dp.period, carr, h)
        steps += st
        rej += r
        if status != kernels.COMPLETED:
            _fail(status, y, steps, rej, h, f"transient period {done}")
    V = np.ascontiguousarray(basis, dtype=np.float64)
    nseg = max(1, int(round(settings.average_periods / settings.renorm_interval)))
    seg_len = settings.renorm_interval * dp.period
    seg_phase = math.fmod(settings.renorm_interval * TWO_PI, TWO_PI)
    logs = np.zeros((nseg, V.shape[0]))
    status, done, st, r, h = kernels.lyapunov(coef, y, V, nseg, seg_len, seg_phase, carr, h,
                                              logs)
    steps += st
    rej += r
    if status != kernels.COMPLETED:
        _fail(status, y, steps, rej, h, f"averaging segment {done}")
    y[4] = 0.0 if abs(y[4] - TWO_PI) < 1e-12 else y[4]
    return logs / seg_len, State.from_array(y), steps, rej


def _fail(status, y, steps, rej, h, where):
    outcome = IntegrationOutcome(State.from_array(y), steps, rej, Status(status), math.nan, h)
    raise_status(status, outcome, where)


def spectrum(dp: DimensionlessParams, s0: State, ctl: StepControl | None = None,
             settings: LyapunovSettings | None = None) -> LyapunovResult:
    """Full 5-exponent spectrum.

    The tangent basis starts as the identity with the phase direction last;
    since no tangent of the (r, u) block ever acquires a phase component, the
    phase vector stays exactly orthogonal to them and yields the trivial zero.
    """
    settings = settings or LyapunovSettings()
    rates, final, steps, rej = _propagate(dp, s0, ctl, settings, np.eye(5))
    scale = rate_scale(dp, settings.rate_unit)
    raw = rates.mean(axis=0) * scale
    se = _batch_stderr(rates, settings.convergence_window, settings.batches) * scale
    order = np.argsort(-raw, kind="stable")
    exps = raw[order]
    se = se[order]
    trivial = int(np.nonzero(order == 4)[0][0])
    top = [i for i in range(5) if i != trivial][:2]
    converged = bool(np.all(se[top] <= settings.zero_eps))
    return LyapunovResult(exps, se, trivial, converged, final, settings.zero_eps,
                          settings.rate_unit, steps, rej)


def two_largest(dp: DimensionlessParams, s0: State, ctl: StepControl | None = None,
                settings: LyapunovSettings | None = None) -> LyapunovPair:
    """Two largest nontrivial exponents from two tangent vectors.

    The tangents start along ``r1`` and ``u1``, the first two vectors of the
    basis used by :func:`spectrum`, so both functions return the same leading
    pair for the same inputs.
    """
    settings = settings or LyapunovSettings()
    rates, final, steps, _ = _propagate(dp, s0, ctl, settings, np.eye(5)[:2])
    scale = rate_scale(dp, settings.rate_unit)
    raw = rates.mean(axis=0) * scale
    se = _batch_stderr(rates, settings.convergence_window, settings.batches) * scale
    if raw[1] > raw[0]:
        raw, se = raw[::-1], se[::-1]
    converged = bool(np.all(se <= settings.zero_eps))
    return LyapunovPair(float(raw[0]), float(raw[1]), float(se[0]), float(se[1]), converged,
                        final, settings.zero_eps, settings.rate_unit, steps)
