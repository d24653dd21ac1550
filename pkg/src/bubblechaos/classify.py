"""Regime classification from the two leading Lyapunov exponents."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InconsistentClassification, InvalidParameters

ZERO_EPS = 5e-3
SYNC_TOL = 1e-8


class Regime(enum.Enum):
    PERIODIC = "periodic"
    QUASIPERIODIC = "quasiperiodic"
    CHAOTIC = "chaotic"
    HYPERCHAOTIC = "hyperchaotic"


COLORS = {
    Regime.PERIODIC: (0, 0, 255),
    Regime.QUASIPERIODIC: (0, 200, 0),
    Regime.CHAOTIC: (255, 215, 0),
    Regime.HYPERCHAOTIC: (220, 0, 0),
}
COLLAPSED_COLOR = (0, 0, 0)


@dataclass(frozen=True)
class RegimeClass:
    kind: Regime
    synchronous: bool
    confidence: float

    @property
    def consistent(self) -> bool:
        return not (self.synchronous and self.kind in (Regime.HYPERCHAOTIC, Regime.QUASIPERIODIC))

    @property
    def label(self) -> str:
        return ("sync-" if self.synchronous else "async-") + self.kind.value


def _margin(value, edge, eps):
    return min(1.0, max(0.0, abs(value - edge) / eps))


def classify(l1: float, l2: float, stderr1: float = 0.0, stderr2: float = 0.0,
             zero_eps: float = ZERO_EPS, sync_deviation: float = float("inf"),
             sync_tol: float = SYNC_TOL, strict: bool = True) -> RegimeClass:
    """Classify by the signs of ``l1 >= l2`` relative to a zero band.

    Each exponent has its own band ``max(zero_eps, 3 stderr)``. Two exponents
    inside the band (a higher torus) count as quasiperiodic. With ``strict``,
    a synchronous hyperchaotic or quasiperiodic result raises
    :class:`InconsistentClassification`.
    """
    if l2 > l1:
        raise InvalidParameters(f"need l1 >= l2, got {l1} < {l2}")
    e1 = max(zero_eps, 3.0 * stderr1)
    e2 = max(zero_eps, 3.0 * stderr2)
    if l1 < -e1:
        kind = Regime.PERIODIC
        conf = _margin(l1, -e1, e1)
    elif l1 <= e1:
        kind = Regime.QUASIPERIODIC
        conf = min(_margin(l1, e1 if l1 >= 0 else -e1, e1),
                   _margin(l2, -e2, e2) if l2 < -e2 else 0.0)
    elif l2 <= e2:
        kind = Regime.CHAOTIC
        conf = min(_margin(l1, e1, e1), _margin(l2, e2, e2))
    else:
        kind = Regime.HYPERCHAOTIC
        conf = min(_margin(l1, e1, e1), _margin(l2, e2, e2))
    rc = RegimeClass(kind, bool(sync_deviation < sync_tol), conf)
    if strict and not rc.consistent:
        raise InconsistentClassification(
            f"{kind.value} regime flagged synchronous (sync deviation {sync_deviation:.3g})")
    return rc


def color(rc: RegimeClass | None) -> tuple:
    """RGB bytes of a class; ``None`` (no class, e.g. collapsed) is black."""
    if rc is None:
        return COLLAPSED_COLOR
    return COLORS[rc.kind]
