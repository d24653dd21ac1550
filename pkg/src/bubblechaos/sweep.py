"""Bifurcation scans, two-parameter Lyapunov charts and multistability probes."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classify import Regime, RegimeClass, classify
from .errors import IntegrationError, InvalidParameters
from .integrator import StepControl
from .lyapunov import LyapunovPair, LyapunovSettings, two_largest
from .model import State
from .params import PhysicalParams, nondimensionalize, preset
from .poincare import CLOUD_TOL, Fingerprint, SectionSeries, distinct, fingerprint, section

SYNC_SEED = State(1.0, 0.0, 1.0, 0.0, 0.0)
ASYM_SEED = State(1.05, 0.0, 0.95, 0.0, 0.0)
SWEPT = ("d_over_r0", "p_ac")
DIRECTIONS = ("forward", "backward")
SEEDINGS = ("continuation", "fresh")
CHART_SEEDINGS = ("fixed", "sweep_right", "sweep_left", "sweep_up", "sweep_down")


def _with(p: PhysicalParams, name: str, value: float) -> PhysicalParams:
    return p.replace(**{name: float(value)})


@dataclass(frozen=True)
class PointResult:
    """Everything computed at one parameter point from one seed."""

    params: PhysicalParams
    seed: State
    status: str
    pair: LyapunovPair | None = None
    series: SectionSeries | None = None
    fingerprint: Fingerprint | None = None
    regime: RegimeClass | None = None
    final_state: State | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status in ("ok", "inconsistent", "incoherent")


def regime_of(pair: LyapunovPair, fp: Fingerprint) -> tuple[RegimeClass, str]:
    """Class of an attractor from its leading exponents and section fingerprint.

    A detected section period with ``l1`` inside the zero band (marginal
    stability at a bifurcation) is labelled periodic. Returns the class and
    a status: ``"ok"``, ``"inconsistent"`` (synchronous hyperchaos or torus)
    or ``"incoherent"`` (a period detected with a clearly positive ``l1``).
    """
    rc = classify(pair.l1, pair.l2, pair.stderr1, pair.stderr2, pair.zero_eps,
                  fp.sync_deviation, strict=False)
    status = "ok"
    if fp.detected_period is not None and rc.kind is not Regime.PERIODIC:
        if rc.kind is Regime.QUASIPERIODIC:
            rc = RegimeClass(Regime.PERIODIC, rc.synchronous, 0.0)
        else:
            status = "incoherent"
    if not rc.consistent:
        status = "inconsistent"
    return rc, status


def evaluate_point(p: PhysicalParams, seed: State, ctl: StepControl | None = None,
                   settings: LyapunovSettings | None = None,
                   section_points: int = 128) -> PointResult:
    """Settle onto an attractor, measure its two leading exponents, then record
    ``section_points`` section points. Integration failures are returned as a
    status rather than raised."""
    ctl = ctl or StepControl()
    settings = settings or LyapunovSettings()
    dp = nondimensionalize(p)
    try:
        pair = two_largest(dp, seed, ctl, settings)
        series = section(dp, pair.final_state, ctl, 0, section_points)
    except IntegrationError as exc:
        status = type(exc).__name__.lower()
        if status == "integrationerror":
            status = "singular"
        return PointResult(p, seed, status, message=str(exc))
    fp = fingerprint(series)
    rc, status = regime_of(pair, fp)
    return PointResult(p, seed, status, pair, series, fp, rc, series.final_state)


@dataclass(frozen=True)
class ScanSpec:
    """One-parameter scan. ``fixed`` optionally pins the other control parameter."""

    swept: str = "d_over_r0"
    start: float = 13.0
    stop: float = 25.0
    steps: int = 100
    direction: str = "forward"
    seeding: str = "continuation"
    seed: State = ASYM_SEED
    fixed: tuple | None = None
    base: PhysicalParams = field(default_factory=lambda: preset("sonovue-1.72um"))
    section_points: int = 128
    settings: LyapunovSettings = field(default_factory=LyapunovSettings.scan_grade)
    ctl: StepControl = field(default_factory=StepControl)

    def __post_init__(self):
        if self.swept not in SWEPT:
            raise InvalidParameters(f"swept must be one of {SWEPT}")
        if not self.start < self.stop:
            raise InvalidParameters("need start < stop")
        if self.steps < 2:
            raise InvalidParameters("need steps >= 2")
        if self.direction not in DIRECTIONS:
            raise InvalidParameters(f"direction must be one of {DIRECTIONS}")
        if self.seeding not in SEEDINGS:
            raise InvalidParameters(f"seeding must be one of {SEEDINGS}")
        if self.fixed is not None:
            name, _ = self.fixed
            if name not in SWEPT or name == self.swept:
                raise InvalidParameters("fixed must name the other control parameter")
        if self.section_points < 1:
            raise InvalidParameters("section_points must be >= 1")

    def values(self) -> np.ndarray:
        v = np.linspace(self.start, self.stop, self.steps)
        return v if self.direction == "forward" else v[::-1].copy()

    def params(self) -> PhysicalParams:
        return _with(self.base, *self.fixed) if self.fixed else self.base


@dataclass(frozen=True)
class ScanRow:
    index: int
    value: float
    d_over_r0: float
    p_ac: float
    status: str
    l1: float
    l2: float
    stderr1: float
    stderr2: float
    regime: RegimeClass | None
    period: int | None
    sync_deviation: float
    tree: np.ndarray
    seed: State
    final_state: State | None

    @classmethod
    def from_point(cls, index, value, res: PointResult) -> "ScanRow":
        nan = math.nan
        pair, fp = res.pair, res.fingerprint
        return cls(
            index, float(value), res.params.d_over_r0, res.params.p_ac, res.status,
            pair.l1 if pair else nan, pair.l2 if pair else nan,
            pair.stderr1 if pair else nan, pair.stderr2 if pair else nan,
            res.regime, fp.detected_period if fp else None,
            fp.sync_deviation if fp else nan,
            res.series.points[:, 0].copy() if res.series else np.empty(0),
            res.seed, res.final_state,
        )


def _scan_values(base, name, values, seed, seeding, ctl, settings, n):
    rows = []
    cur = seed
    for i, v in enumerate(values):
        res = evaluate_point(_with(base, name, v), cur, ctl, settings, n)
        rows.append(ScanRow.from_point(i, v, res))
        if seeding == "continuation" and res.final_state is not None:
            cur = res.final_state
    return rows


def bifurcation_scan(spec: ScanSpec) -> list[ScanRow]:
    """Step the swept parameter through ``spec.values()``.

    Under continuation each step starts from the previous step's final state;
    under fresh seeding every step starts from ``spec.seed``. A collapsed step
    is recorded with its status and the next step reuses the last good state.
    """
    return _scan_values(spec.params(), spec.swept, spec.values(), spec.seed, spec.seeding,
                        spec.ctl, spec.settings, spec.section_points)


@dataclass(frozen=True)
class ChartSpec:
    d_range: tuple = (5.0, 35.0, 40)
    p_range: tuple = (1.0e6, 1.8e6, 40)
    seeding: str = "fixed"
    seed: State = ASYM_SEED
    base: PhysicalParams = field(default_factory=lambda: preset("sonovue-1.72um"))
    section_points: int = 64
    settings: LyapunovSettings = field(default_factory=LyapunovSettings.chart_grade)
    ctl: StepControl = field(default_factory=StepControl)

    def __post_init__(self):
        for name, (a, b, n) in (("d_range", self.d_range), ("p_range", self.p_range)):
            if int(n) != n or n < 1:
                raise InvalidParameters(f"{name}: count must be a positive integer")
            if n >= 2 and not 0 < a < b:
                raise InvalidParameters(f"{name}: need 0 < start < stop")
            if n == 1 and not (a > 0 and a == b):
                raise InvalidParameters(f"{name}: a single cell needs start == stop > 0")
        if self.seeding not in CHART_SEEDINGS:
            raise InvalidParameters(f"seeding must be one of {CHART_SEEDINGS}")

    @property
    def d_values(self) -> np.ndarray:
        a, b, n = self.d_range
        return np.linspace(a, b, int(n))

    @property
    def p_values(self) -> np.ndarray:
        a, b, n = self.p_range
        return np.linspace(a, b, int(n))


@dataclass(frozen=True)
class ChartCell:
    i_p: int
    i_d: int
    d_over_r0: float
    p_ac: float
    status: str
    l1: float
    l2: float
    stderr1: float
    stderr2: float
    regime: RegimeClass | None
    period: int | None
    sync_deviation: float
    seed: State
    final_state: State | None

    @classmethod
    def from_point(cls, i_p, i_d, res: PointResult) -> "ChartCell":
        row = ScanRow.from_point(0, 0.0, res)
        return cls(i_p, i_d, row.d_over_r0, row.p_ac, row.status, row.l1, row.l2,
                   row.stderr1, row.stderr2, row.regime, row.period, row.sync_deviation,
                   row.seed, row.final_state)


@dataclass(frozen=True)
class ChartGrid:
    """Cells indexed ``[i_p][i_d]``: rows of constant ``p_ac``, ascending."""

    d_values: np.ndarray
    p_values: np.ndarray
    cells: tuple
    seeding: str = "fixed"

    @property
    def shape(self) -> tuple:
        return len(self.p_values), len(self.d_values)

    def cell(self, i_p: int, i_d: int) -> ChartCell:
        return self.cells[i_p][i_d]

    def __iter__(self):
        for row in self.cells:
            yield from row

    def field(self, name: str) -> np.ndarray:
        return np.array([[getattr(c, name) for c in row] for row in self.cells])

    def kinds(self) -> np.ndarray:
        """Object array of :class:`Regime` (``None`` where no class)."""
        out = np.empty(self.shape, dtype=object)
        for c in self:
            out[c.i_p, c.i_d] = c.regime.kind if c.regime else None
        return out


def _chart_unit(args):
    kind, index, spec = args
    d_vals, p_vals = spec.d_values, spec.p_values
    if kind == "cell":
        i_p, i_d = index
        res = evaluate_point(spec.base.at(d_vals[i_d], p_vals[i_p]), spec.seed, spec.ctl,
                             spec.settings, spec.section_points)
        return [ChartCell.from_point(i_p, i_d, res)]
    if kind == "row":
        i_p = index
        order = range(len(d_vals)) if spec.seeding == "sweep_right" else \
            range(len(d_vals) - 1, -1, -1)
        coords = [(i_p, i_d) for i_d in order]
    else:
        i_d = index
        order = range(len(p_vals)) if spec.seeding == "sweep_up" else \
            range(len(p_vals) - 1, -1, -1)
        coords = [(i_p, i_d) for i_p in order]
    out = []
    cur = spec.seed
    for i_p, i_d in coords:
        res = evaluate_point(spec.base.at(d_vals[i_d], p_vals[i_p]), cur, spec.ctl,
                             spec.settings, spec.section_points)
        out.append(ChartCell.from_point(i_p, i_d, res))
        if res.final_state is not None:
            cur = res.final_state
    return out


def _map(fn, units, workers):
    if workers is None or workers <= 1 or len(units) <= 1:
        return [fn(u) for u in units]
    with ProcessPoolExecutor(max_workers=min(workers, len(units))) as pool:
        return list(pool.map(fn, units))


def chart2d(spec: ChartSpec, workers: int | None = None) -> ChartGrid:
    """Fill a (d/R0, p_ac) grid with leading exponents and classes.

    ``fixed`` seeding evaluates every cell from ``spec.seed``; ``sweep_*``
    seedings run each row (right/left) or column (up/down) as a continuation
    scan. Work units go to a process pool and are reassembled by index, so the
    result does not depend on ``workers``.
    """
    n_p, n_d = len(spec.p_values), len(spec.d_values)
    if spec.seeding == "fixed":
        units = [("cell", (i_p, i_d), spec) for i_p in range(n_p) for i_d in range(n_d)]
    elif spec.seeding in ("sweep_right", "sweep_left"):
        units = [("row", i_p, spec) for i_p in range(n_p)]
    else:
        units = [("col", i_d, spec) for i_d in range(n_d)]
    grid = [[None] * n_d for _ in range(n_p)]
    for part in _map(_chart_unit, units, workers):
        for c in part:
            grid[c.i_p][c.i_d] = c
    return ChartGrid(spec.d_values, spec.p_values, tuple(tuple(r) for r in grid), spec.seeding)


@dataclass(frozen=True)
class Attractor:
    fingerprint: Fingerprint
    regime: RegimeClass
    series: SectionSeries
    seed: State
    l1: float
    l2: float
    stderr1: float
    stderr2: float
    status: str
    seeds: tuple = ()

    def __iter__(self):
        return iter((self.fingerprint, self.regime, self.series))


@dataclass(frozen=True)
class ProbeReport:
    attractors: tuple
    dropped: tuple

    def __len__(self):
        return len(self.attractors)

    def __iter__(self):
        return iter(self.attractors)


def default_ensemble(n_random: int = 0, rng_seed: int = 0) -> list[State]:
    """Synchronous and asymmetric default seeds plus ``n_random`` random states."""
    rng = np.random.default_rng(rng_seed)
    seeds = [SYNC_SEED, ASYM_SEED]
    for _ in range(n_random):
        r = rng.uniform(0.6, 1.6, 2)
        u = rng.uniform(-0.5, 0.5, 2)
        seeds.append(State(r[0], u[0], r[1], u[1], 0.0))
    return seeds


def _probe_unit(args):
    p, seed, ctl, settings, n = args
    return evaluate_point(p, seed, ctl, settings, n)


def probe_multistability(point: tuple, ensemble, ctl: StepControl | None = None,
                         settings: LyapunovSettings | None = None,
                         base: PhysicalParams | None = None, section_points: int = 1000,
                         tol: float = CLOUD_TOL, workers: int | None = None) -> ProbeReport:
    """Attractors reached from an ensemble of seeds at ``point = (d/R0, p_ac)``.

    Each seed is settled, measured and fingerprinted; attractors that
    :func:`distinct` cannot tell apart (swap images included) are merged.
    Seeds that fail to integrate are listed in ``dropped`` with their status.
    """
    ensemble = list(ensemble)
    if not ensemble:
        raise InvalidParameters("ensemble must not be empty")
    p = (base or preset("sonovue-1.72um")).at(*point)
    ctl = ctl or StepControl()
    settings = settings or LyapunovSettings()
    results = _map(_probe_unit, [(p, s, ctl, settings, section_points) for s in ensemble],
                   workers)
    found: list[Attractor] = []
    dropped = []
    for res in results:
        if not res.ok:
            dropped.append((res.seed, res.status))
            continue
        for k, a in enumerate(found):
            if not distinct(a.series, res.series, tol):
                found[k] = Attractor(*[getattr(a, f) for f in (
                    "fingerprint", "regime", "series", "seed", "l1", "l2", "stderr1", "stderr2",
                    "status")], seeds=a.seeds + (res.seed,))
                break
        else:
            pr = res.pair
            found.append(Attractor(res.fingerprint, res.regime, res.series, res.seed, pr.l1,
                                   pr.l2, pr.stderr1, pr.stderr2, res.status, (res.seed,)))
    return ProbeReport(tuple(found), tuple(dropped))
