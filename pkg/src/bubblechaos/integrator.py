"""Adaptive Dormand-Prince 5(4) integration with exact stops at requested times.

The field-specific loop lives in the compiled kernels (``_core``). The
generic functions here accept any callable field and serve small systems and
the tests; passing a :class:`DimensionlessParams` instead of a callable routes
to the kernels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import tableau
from ._core import kernels
from .errors import Collapsed, IntegrationError, InvalidParameters, StepLimit, StepUnderflow
from .model import TWO_PI, State
from .params import DimensionlessParams

_NODES, _ROWS, _B5, _ERR = tableau.as_floats()
_A = [np.array(r, dtype=np.float64) for r in _ROWS]
_B5 = np.array(_B5)
_ERR = np.array(_ERR)

FAC_MIN = 0.2
FAC_MAX = 5.0


class Status(enum.IntEnum):
    COMPLETED = kernels.COMPLETED
    COLLAPSED = kernels.COLLAPSED
    STEP_UNDERFLOW = kernels.STEP_UNDERFLOW
    STEP_LIMIT = kernels.STEP_LIMIT
    SINGULAR = kernels.SINGULAR


@dataclass(frozen=True)
class StepControl:
    """Tolerances and step bounds. ``max_steps`` caps each integration leg
    (one drive period when several periods are run back to back)."""

    atol: float = 1e-10
    rtol: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 1.0
    safety: float = 0.9
    max_steps: int = 1_000_000
    r_floor: float = 0.05

    def __post_init__(self):
        if not (self.atol > 0 and self.rtol > 0):
            raise InvalidParameters("atol and rtol must be positive")
        if not (0 < self.h_min <= self.h_init <= self.h_max):
            raise InvalidParameters("need 0 < h_min <= h_init <= h_max")
        if not (0 < self.safety < 1):
            raise InvalidParameters("safety must lie in (0, 1)")
        if self.max_steps < 1:
            raise InvalidParameters("max_steps must be >= 1")
        if not self.r_floor >= 0:
            raise InvalidParameters("r_floor must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.atol, self.rtol, self.h_min, self.h_max, self.safety,
                         float(self.max_steps), self.r_floor], dtype=np.float64)


@dataclass(frozen=True)
class IntegrationOutcome:
    state: State
    steps: int
    rejected: int
    status: Status
    elapsed: float
    h_next: float

    @property
    def ok(self) -> bool:
        return self.status == Status.COMPLETED

    def raise_for_status(self) -> "IntegrationOutcome":
        raise_status(self.status, self, f"after {self.steps} steps")
        return self


def raise_status(status, outcome=None, context=""):
    """Raise the :class:`IntegrationError` subclass matching a kernel status."""
    status = Status(status)
    if status == Status.COMPLETED:
        return
    msg = f"integration {status.name.lower()}" + (f" ({context})" if context else "")
    if status == Status.COLLAPSED:
        raise Collapsed(msg, outcome)
    if status == Status.STEP_UNDERFLOW:
        raise StepUnderflow(msg, outcome)
    if status == Status.STEP_LIMIT:
        raise StepLimit(msg, outcome)
    raise IntegrationError(msg + ": singular mass matrix", outcome)


def _as_callable(field):
    if isinstance(field, DimensionlessParams):
        coef = field.as_array()

        def f(y):
            code, val = kernels.field(coef, np.asarray(y, dtype=np.float64))
            if code:
                from .model import _raise_field_code
                _raise_field_code(code, y)
            return np.asarray(val)
        return f
    return lambda y: np.asarray(field(y), dtype=np.float64)


def _rk_stages(f, y, h, k1=None):
    ks = [f(y) if k1 is None else k1]
    for i in range(1, 7):
        yi = y + h * np.dot(_A[i][:i], ks)
        ks.append(f(yi))
    return yi, ks


def _error_norm(y, ynew, ks, h, atol, rtol):
    # the weights sum to zero, so differences against k1 vanish exactly
    # for a constant field
    ks = np.asarray(ks)
    e = h * np.dot(_ERR[1:], ks[1:] - ks[0])
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
    return float(np.sqrt(np.mean((e / scale) ** 2)))


def step(field, s, h: float, ctl: StepControl | None = None):
    """One Dormand-Prince step of size ``h``.

    Returns ``(candidate, error_estimate)`` where the estimate is the weighted
    RMS of the embedded difference; ``<= 1`` means the step meets tolerance.
    ``s`` may be a :class:`State` or any 1-D array.
    """
    if not h > 0:
        raise InvalidParameters("step size must be positive")
    ctl = ctl or StepControl()
    y = s.as_array() if isinstance(s, State) else np.asarray(s, dtype=np.float64)
    ynew, ks = _rk_stages(_as_callable(field), y, h)
    err = _error_norm(y, ynew, ks, h, ctl.atol, ctl.rtol)
    if isinstance(s, State):
        return State.from_array(ynew), err
    return ynew, err


def _integrate_generic(f, y, tau_end, ctl, h):
    steps = rejected = 0
    t = 0.0
    k1 = f(y)
    status = Status.COMPLETED
    while t < tau_end:
        if steps + rejected >= ctl.max_steps:
            status = Status.STEP_LIMIT
            break
        last = t + h >= tau_end
        hs = tau_end - t if last else h
        ynew, ks = _rk_stages(f, y, hs, k1)
        err = _error_norm(y, ynew, ks, hs, ctl.atol, ctl.rtol)
        if err <= 1.0:
            steps += 1
            fac = FAC_MAX if err == 0.0 else min(FAC_MAX, max(FAC_MIN, ctl.safety * err ** -0.2))
            t = tau_end if last else t + hs
            y, k1 = ynew, ks[6]
            hn = min(hs * fac, ctl.h_max)
            h = max(h, hn) if (last and hs < h) else hn
        else:
            rejected += 1
            fac = FAC_MIN if not math.isfinite(err) else max(FAC_MIN, ctl.safety * err ** -0.2)
            h = hs * fac
            if h < ctl.h_min:
                status = Status.STEP_UNDERFLOW
                break
    return status, y, steps, rejected, h, t


def integrate_to(field, s: State, tau_end: float, ctl: StepControl | None = None,
                 h: float | None = None) -> IntegrationOutcome:
    """Integrate for ``tau_end`` units of scaled time starting from ``s``.

    The last step is shortened to land exactly on ``tau_end``. The returned
    outcome carries the status; call ``raise_for_status`` to turn failures
    into exceptions.
    """
    if not tau_end > 0:
        raise InvalidParameters("tau_end must be positive")
    ctl = ctl or StepControl()
    h = ctl.h_init if h is None else h
    if isinstance(field, DimensionlessParams):
        y = s.as_array()
        theta_end = math.fmod(s.theta + field.big_omega * tau_end, TWO_PI)
        status, steps, rej, h_next = kernels.integrate(
            field.as_array(), y, float(tau_end), theta_end, ctl.as_array(), float(h))
        elapsed = tau_end if status == kernels.COMPLETED else math.nan
        return IntegrationOutcome(State.from_array(y), steps, rej, Status(status), elapsed, h_next)
    f = _as_callable(field)
    status, y, steps, rej, h_next, t = _integrate_generic(f, s.as_array(), float(tau_end), ctl, h)
    return IntegrationOutcome(State.from_array(y), steps, rej, status, t, h_next)


def time_to_phase(dp: DimensionlessParams, s: State, periods: int) -> float:
    """Scaled time from ``s`` to the ``periods``-th following crossing of theta = 0."""
    if periods < 1:
        raise InvalidParameters("periods must be >= 1")
    if s.theta == 0.0:
        return periods * dp.period
    return (TWO_PI - s.theta) / dp.big_omega + (periods - 1) * dp.period


def integrate_to_phase(dp: DimensionlessParams, s: State, periods: int = 1,
                       ctl: StepControl | None = None, h: float | None = None
                       ) -> IntegrationOutcome:
    """Integrate to the ``periods``-th drive-phase zero ahead of ``s``.

    The crossing time is known in closed form because theta advances at the
    constant rate Omega, so the stop is exact and the phase ends at 0.
    """
    ctl = ctl or StepControl()
    h = ctl.h_init if h is None else h
    total = time_to_phase(dp, s, periods)
    y = s.as_array()
    coef = dp.as_array()
    carr = ctl.as_array()
    steps = rej = 0
    if s.theta != 0.0:
        status, st, r, h = kernels.integrate(coef, y, (TWO_PI - s.theta) / dp.big_omega,
                                             0.0, carr, float(h))
        steps += st
        rej += r
        periods -= 1
        if status != kernels.COMPLETED:
            return IntegrationOutcome(State.from_array(y), steps, rej, Status(status),
                                      math.nan, h)
    status = kernels.COMPLETED
    if periods > 0:
        status, done, st, r, h = kernels.run_periods(coef, y, int(periods), dp.period, carr,
                                                     float(h))
        steps += st
        rej += r
    elapsed = total if status == kernels.COMPLETED else math.nan
    return IntegrationOutcome(State.from_array(y), steps, rej, Status(status), elapsed, h)


def trajectory(dp: DimensionlessParams, s: State, tau_end: float, n_out: int,
               ctl: StepControl | None = None):
    """Sample the solution at ``n_out`` equally spaced times in ``(0, tau_end]``.

    Returns ``(taus, states)`` with ``states`` of shape ``(n_out + 1, 5)``
    including the initial state. Raises on failure.
    """
    if n_out < 1:
        raise InvalidParameters("n_out must be >= 1")
    ctl = ctl or StepControl()
    dt = tau_end / n_out
    taus = np.linspace(0.0, tau_end, n_out + 1)
    out = np.empty((n_out + 1, 5))
    out[0] = s.as_array()
    h = ctl.h_init
    cur = s
    for i in range(1, n_out + 1):
        o = integrate_to(dp, cur, dt, ctl, h)
        o.raise_for_status()
        cur, h = o.state, o.h_next
        out[i] = cur.as_array()
    return taus, out
