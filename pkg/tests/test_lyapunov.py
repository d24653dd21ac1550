import numpy as np
import pytest

from bubblechaos import InvalidParameters, LyapunovSettings, State, spectrum, swap, two_largest
from bubblechaos.lyapunov import _batch_stderr, rate_scale
from conftest import dp_at

SHORT = LyapunovSettings(transient_periods=300, average_periods=1500)


def check_result(res):
    assert res.sum < 0
    band = res.zero_band()
    assert abs(res.exponents[res.trivial_index]) <= band[res.trivial_index]
    assert np.all(np.diff(res.nontrivial) <= 0)


def test_rest_spectrum_negative(dp_rest):
    res = spectrum(dp_rest, State(1, 0, 1, 0, 0), settings=SHORT)
    check_result(res)
    assert np.all(res.nontrivial < -0.01)
    assert res.exponents[res.trivial_index] == pytest.approx(0.0, abs=1e-12)


def test_two_largest_matches_spectrum_bitwise():
    dp = dp_at(22, 1.2e6)
    s = State(1.15, -0.472, 1.354, 0.038, 0)
    full = spectrum(dp, s, settings=SHORT)
    pair = two_largest(dp, s, settings=SHORT)
    assert (pair.l1, pair.l2) == tuple(full.nontrivial[:2])
    assert (pair.stderr1, pair.stderr2) == tuple(full.nontrivial_stderr[:2])


@pytest.mark.parametrize("point", [(8, 1.1e6), (14.5, 1.2e6), (25, 1.5e6), (33, 1.75e6),
                                   (11, 1.0e6)])
def test_two_largest_within_stderr_of_spectrum(point):
    dp = dp_at(*point)
    s = State(1.05, 0, 0.95, 0, 0)
    settings = LyapunovSettings.chart_grade()
    full = spectrum(dp, s, settings=settings)
    pair = two_largest(dp, s, settings=settings)
    tol = 3 * (pair.stderr1 + pair.stderr2) + 1e-12
    assert abs(pair.l1 - full.nontrivial[0]) <= tol
    assert abs(pair.l2 - full.nontrivial[1]) <= tol
    check_result(full)


def test_swap_symmetry():
    dp = dp_at(20, 1.3e6)
    s = State(1.1, 0.05, 0.92, -0.1, 0)
    a = spectrum(dp, s, settings=SHORT)
    b = spectrum(dp, swap(s), settings=SHORT)
    tol = 3 * np.maximum(a.stderr, b.stderr) + 1e-9
    assert np.all(np.abs(a.exponents - b.exponents) <= tol)


def test_synchronous_two_cycle_value():
    """Synchronous 2-cycle at d/R0 = 6.75, P_ac = 1.7 MPa."""
    res = spectrum(dp_at(6.75, 1.7e6), State(1, 0, 1, 0, 0))
    check_result(res)
    l1, l2 = res.nontrivial[:2]
    assert l1 == pytest.approx(-0.1437, abs=0.02)
    assert l2 == pytest.approx(-0.2057, abs=0.02)
    assert res.converged


def test_rate_units():
    dp = dp_at()
    tau = LyapunovSettings(transient_periods=100, average_periods=200, rate_unit="tau")
    gas = tau.replace(rate_unit="gas")
    s = State(1.05, 0, 0.95, 0, 0)
    a = two_largest(dp, s, settings=tau)
    b = two_largest(dp, s, settings=gas)
    assert b.l1 == pytest.approx(a.l1 * rate_scale(dp, "gas"), rel=1e-12)
    assert rate_scale(dp, "gas") > 1


def test_batch_stderr_of_constant_is_zero():
    rates = np.tile([1.0, -2.0], (400, 1))
    assert np.all(_batch_stderr(rates, 0.5, 20) == 0)


def test_batch_stderr_of_white_noise():
    rng = np.random.default_rng(3)
    rates = rng.normal(size=(20000, 1))
    se = _batch_stderr(rates, 0.5, 20)[0]
    assert se == pytest.approx(1 / np.sqrt(10000), rel=0.5)


@pytest.mark.parametrize("kw", [
    {"average_periods": 0}, {"renorm_interval": 0}, {"convergence_window": 1.5},
    {"zero_eps": 0}, {"rate_unit": "seconds"},
])
def test_settings_validation(kw):
    with pytest.raises(InvalidParameters):
        LyapunovSettings(**kw)


def test_chart_grade_defaults():
    s = LyapunovSettings.chart_grade()
    assert (s.transient_periods, s.average_periods) == (500, 3000)
    s = LyapunovSettings.scan_grade()
    assert (s.transient_periods, s.average_periods, s.renorm_interval) == (2000, 20000, 1.0)
