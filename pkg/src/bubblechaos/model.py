"""State type and the scaled 5D vector field of two coupled encapsulated bubbles.

The explicit first-order form (mass matrix, right-hand side, Jacobian) is
written out in DERIVATION.md at the repository root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .errors import NonPositiveRadius, SingularMassMatrix
from .params import DimensionlessParams

TWO_PI = 2.0 * math.pi
SINGULAR_REL = 1e-12


@dataclass(frozen=True)
class State:
    """Scaled state: radii and wall velocities of both bubbles and drive phase."""

    r1: float
    u1: float
    r2: float
    u2: float
    theta: float = 0.0

    def __post_init__(self):
        th = math.fmod(float(self.theta), TWO_PI)
        if th < 0.0:
            th += TWO_PI
        if th >= TWO_PI:
            th = 0.0
        object.__setattr__(self, "theta", th)

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.u1, self.r2, self.u2, self.theta], dtype=np.float64)

    @classmethod
    def from_array(cls, y) -> "State":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]), float(y[4]))

    @property
    def sync_deviation(self) -> float:
        return max(abs(self.r1 - self.r2), abs(self.u1 - self.u2))

    def swap(self) -> "State":
        return swap(self)


REST = State(1.0, 0.0, 1.0, 0.0, 0.0)


def swap(s: State) -> State:
    """Exchange the two bubbles; an involution."""
    return State(s.r2, s.u2, s.r1, s.u1, s.theta)


def swap_vector(v) -> np.ndarray:
    """Apply the bubble exchange to a 5-vector (state or derivative)."""
    v = np.asarray(v, dtype=np.float64)
    return v[[2, 3, 0, 1, 4]]


def _check_radius(*radii):
    for r in radii:
        if not r > 0.0:
            raise NonPositiveRadius(f"radius must be positive, got {r}")


def wall_pressure(dp: DimensionlessParams, r: float, u: float, theta: float) -> float:
    """Scaled liquid pressure at the wall of one bubble (gas + shell + drive)."""
    _check_radius(r)
    return (
        dp.pg0 * r ** (-3.0 * dp.gamma)
        - 4.0 * dp.eta * u / r
        - 2.0 * dp.sig / r
        - dp.p0
        - 4.0 * dp.chi * (1.0 - 1.0 / r)
        - 4.0 * dp.kap * u / r ** 2
        - dp.pac * math.sin(theta)
    )


def mass_matrix(dp: DimensionlessParams, s: State) -> np.ndarray:
    """The 2x2 matrix multiplying the accelerations ``(du1, du2)``."""
    _check_radius(s.r1, s.r2)
    diag = [
        (1.0 - u / dp.cs) * r + (4.0 * dp.eta + 4.0 * dp.kap / r) / dp.cs
        for r, u in ((s.r1, s.u1), (s.r2, s.u2))
    ]
    return np.array([[diag[0], s.r2 ** 2 / dp.dist], [s.r1 ** 2 / dp.dist, diag[1]]])


def _raise_field_code(code, s):
    if code == kernels.FIELD_RADIUS:
        raise NonPositiveRadius(f"non-positive radius in {s}")
    raise SingularMassMatrix(f"singular mass matrix at {s}")


def vector_field(dp: DimensionlessParams, s: State) -> np.ndarray:
    """Time derivative ``(dr1, du1, dr2, du2, dtheta)`` in scaled time."""
    code, f = kernels.field(dp.as_array(), s.as_array())
    if code:
        _raise_field_code(code, s)
    return np.asarray(f)


def analytic_jacobian(dp: DimensionlessParams, s: State) -> np.ndarray:
    """Exact 5x5 Jacobian of :func:`vector_field` (used by the tangent kernels)."""
    code, _, jac = kernels.field_jac(dp.as_array(), s.as_array())
    if code:
        _raise_field_code(code, s)
    return np.asarray(jac)


def jacobian(dp: DimensionlessParams, s: State) -> np.ndarray:
    """Central finite-difference Jacobian of :func:`vector_field`.

    Column ``j`` uses the step ``cbrt(eps) * max(1, |s_j|)``. The phase is
    perturbed without reduction so the stencil stays symmetric.
    """
    y = s.as_array()
    coef = dp.as_array()
    eps3 = np.finfo(float).eps ** (1.0 / 3.0)
    jac = np.empty((5, 5))
    for j in range(5):
        h = eps3 * max(1.0, abs(y[j]))
        yp = y.copy()
        ym = y.copy()
        yp[j] += h
        ym[j] -= h
        h2 = yp[j] - ym[j]
        cp, fp = kernels.field(coef, yp)
        cm, fm = kernels.field(coef, ym)
        if cp or cm:
            _raise_field_code(cp or cm, s)
        jac[:, j] = (np.asarray(fp) - np.asarray(fm)) / h2
    return jac
