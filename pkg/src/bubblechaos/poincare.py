"""Stroboscopic sections at drive-phase zero, period detection and attractor fingerprints."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .errors import InvalidParameters, ParamsMismatch, SeriesTooShort
from .integrator import IntegrationOutcome, Status, StepControl, integrate_to_phase, raise_status
from .model import State
from .params import DimensionlessParams

P_MAX = 64
POINT_TOL = 1e-6
SYNC_TOL = 1e-8
CLOUD_TOL = 1e-3


@dataclass(frozen=True)
class SectionSeries:
    """Consecutive section points ``(r1, u1, r2, u2)``, one per drive period."""

    points: np.ndarray
    transient_skipped: int
    params_hash: str
    final_state: State | None = None

    def __len__(self):
        return self.points.shape[0]

    def swapped(self) -> "SectionSeries":
        return SectionSeries(self.points[:, [2, 3, 0, 1]].copy(), self.transient_skipped,
                             self.params_hash, self.final_state and self.final_state.swap())


@dataclass(frozen=True)
class Fingerprint:
    detected_period: int | None
    cloud_center: np.ndarray
    cloud_radius: float
    sync_deviation: float

    @property
    def synchronous(self) -> bool:
        return self.sync_deviation < SYNC_TOL


def section(dp: DimensionlessParams, s0: State, ctl: StepControl | None = None,
            transient: int = 0, n: int = 1) -> SectionSeries:
    """Skip ``transient`` drive periods, then record ``n`` section points.

    A start off the section first advances to the next phase zero; that
    partial period is not counted.
    """
    if n < 1:
        raise InvalidParameters("n must be >= 1")
    if transient < 0:
        raise InvalidParameters("transient must be >= 0")
    ctl = ctl or StepControl()
    h = ctl.h_init
    s = s0
    if s.theta != 0.0:
        o = integrate_to_phase(dp, s, 1, ctl)
        o.raise_for_status()
        s, h = o.state, o.h_next
    y = s.as_array()
    coef = dp.as_array()
    carr = ctl.as_array()
    if transient:
        status, done, st, rej, h = kernels.run_periods(coef, y, int(transient), dp.period,
                                                       carr, h)
        if status != kernels.COMPLETED:
            _fail(status, y, st, rej, h, f"transient period {done}")
    out = np.empty((n, 5))
    status, done, st, rej, h = kernels.run_periods(coef, y, int(n), dp.period, carr, h, out)
    if status != kernels.COMPLETED:
        _fail(status, y, st, rej, h, f"section sample {done}")
    return SectionSeries(out[:, :4].copy(), int(transient), dp.source.digest(),
                         State.from_array(y))


def _fail(status, y, steps, rej, h, where):
    outcome = IntegrationOutcome(State.from_array(y), steps, rej, Status(status), float("nan"), h)
    raise_status(status, outcome, where)


def _points(series) -> np.ndarray:
    return series.points if isinstance(series, SectionSeries) else np.asarray(series, float)


def detect_period(series, point_tol: float = POINT_TOL, p_max: int = P_MAX) -> int | None:
    """Smallest ``p <= p_max`` with ``|x[k+p] - x[k]|_inf < point_tol`` for all ``k``."""
    x = _points(series)
    if x.shape[0] < 2 * p_max:
        raise SeriesTooShort(f"need at least {2 * p_max} points, got {x.shape[0]}")
    for p in range(1, p_max + 1):
        if np.max(np.abs(x[p:] - x[:-p])) < point_tol:
            return p
    return None


def fingerprint(series, point_tol: float = POINT_TOL) -> Fingerprint:
    """Period, cloud centre and radius, and distance from the synchronous manifold.

    The period search uses ``p_max = min(64, len // 2)``.
    """
    x = _points(series)
    if x.shape[0] == 0:
        raise InvalidParameters("empty series")
    p_max = min(P_MAX, x.shape[0] // 2)
    period = detect_period(x, point_tol, p_max) if p_max >= 1 else None
    center = x.mean(axis=0)
    radius = float(np.max(np.linalg.norm(x - center, axis=1)))
    sync = float(np.max(np.maximum(np.abs(x[:, 0] - x[:, 2]), np.abs(x[:, 1] - x[:, 3]))))
    return Fingerprint(period, center, radius, sync)


def _nn_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each row of ``a`` to its nearest row of ``b``."""
    best = np.full(a.shape[0], np.inf)
    for lo in range(0, b.shape[0], 512):
        chunk = b[lo:lo + 512]
        d = np.sqrt(((a[:, None, :] - chunk[None, :, :]) ** 2).sum(axis=2))
        best = np.minimum(best, d.min(axis=1))
    return best


def _self_spacing(a: np.ndarray) -> float:
    """Mean distance from each sample to its nearest other sample.

    Zero for a periodic cloud, whose points recur exactly.
    """
    n = a.shape[0]
    p_max = min(P_MAX, n // 2)
    if n < 2 or (p_max >= 1 and detect_period(a, POINT_TOL, p_max) is not None):
        return 0.0
    best = np.full(n, np.inf)
    for lo in range(0, n, 512):
        chunk = a[lo:lo + 512]
        d = np.sqrt(((a[:, None, :] - chunk[None, :, :]) ** 2).sum(axis=2))
        d[np.arange(lo, lo + chunk.shape[0]), np.arange(chunk.shape[0])] = np.inf
        best = np.minimum(best, d.min(axis=1))
    return float(np.mean(best))


def cloud_distance(a, b) -> float:
    """Symmetric mean nearest-neighbour distance between two point clouds."""
    x, y = _points(a), _points(b)
    return 0.5 * (float(_nn_dist(x, y).mean()) + float(_nn_dist(y, x).mean()))


def distinct(a: SectionSeries, b: SectionSeries, tol: float = CLOUD_TOL) -> bool:
    """Whether two section clouds belong to different attractors.

    Swap images count as the same attractor. The threshold is ``tol``, raised
    to twice the clouds' own sampling spacing so that two finite samples of
    one chaotic attractor are not told apart.
    """
    if a.params_hash != b.params_hash:
        raise ParamsMismatch("series were generated with different parameters")
    x, y = _points(a), _points(b)
    thr = max(tol, 2.0 * max(_self_spacing(x), _self_spacing(y)))
    ys = y[:, [2, 3, 0, 1]]
    return cloud_distance(x, y) > thr and cloud_distance(x, ys) > thr
