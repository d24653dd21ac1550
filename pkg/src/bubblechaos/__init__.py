"""Nonlinear dynamics of two coupled encapsulated microbubbles.

Integration, Lyapunov spectra, Poincare sections, regime classification,
bifurcation scans, two-parameter charts and multistability probes.
"""

__version__ = "0.1.0"

from ._core import BACKEND
from .classify import Regime, RegimeClass, classify, color
from .errors import (BubbleChaosError, Collapsed, ConfigError, InconsistentClassification,
                     IntegrationError, InvalidParameters, IoError, NonPositiveRadius,
                     ParamsMismatch, SeriesTooShort, SingularMassMatrix, StepLimit,
                     StepUnderflow)
from .integrator import (IntegrationOutcome, Status, StepControl, integrate_to,
                         integrate_to_phase, step)
from .lyapunov import LyapunovPair, LyapunovResult, LyapunovSettings, spectrum, two_largest
from .model import State, jacobian, swap, vector_field, wall_pressure
from .params import (DimensionlessParams, PhysicalParams, natural_frequency,
                     nondimensionalize, preset)
from .poincare import Fingerprint, SectionSeries, detect_period, distinct, fingerprint, section
from .sweep import (ASYM_SEED, SYNC_SEED, ChartCell, ChartGrid, ChartSpec, ScanRow, ScanSpec,
                    bifurcation_scan, chart2d, probe_multistability)

__all__ = [n for n in dir() if not n.startswith("_")]
