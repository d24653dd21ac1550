import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bubblechaos import (ParamsMismatch, SeriesTooShort, State, detect_period, distinct,
                         fingerprint, section)
from bubblechaos.poincare import SectionSeries, cloud_distance
from conftest import dp_at


def test_rest_samples_constant(dp_rest):
    s = section(dp_rest, State(1, 0, 1, 0, 0), transient=0, n=10)
    assert len(s) == 10
    assert np.max(np.abs(s.points - [1, 0, 1, 0])) < 1e-10
    assert s.final_state.theta == 0.0


def test_synchronous_two_cycle():
    dp = dp_at(6.75, 1.7e6)
    s = section(dp, State(1, 0, 1, 0, 0), transient=1000, n=128)
    assert detect_period(s) == 2
    fp = fingerprint(s)
    assert fp.detected_period == 2 and fp.synchronous
    assert len(np.unique(np.round(s.points, 6), axis=0)) == 2


def test_period_sound_under_doubling():
    dp = dp_at(6.75, 1.7e6)
    a = section(dp, State(1, 0, 1, 0, 0), transient=1000, n=128)
    b = section(dp, State(1, 0, 1, 0, 0), transient=1000, n=256)
    assert detect_period(a) == detect_period(b) == 2


def test_section_starts_off_phase():
    dp = dp_at(6.75, 1.7e6)
    s = section(dp, State(1, 0, 1, 0, 1.0), transient=0, n=3)
    assert s.final_state.theta == 0.0 and len(s) == 3


def _series(points, h="x"):
    return SectionSeries(np.asarray(points, float), 0, h)


def test_detect_period_basics():
    const = np.tile([1.0, 0, 1, 0], (130, 1))
    assert detect_period(const) == 1
    alt = np.array([[1.0, 0, 1, 0], [1.2, 0.1, 1.2, 0.1]] * 65)
    assert detect_period(alt) == 2
    rng = np.random.default_rng(0)
    assert detect_period(rng.normal(size=(128, 4))) is None
    with pytest.raises(SeriesTooShort):
        detect_period(const[:100])


@given(st.integers(1, 20), st.integers(0, 2 ** 31))
def test_detect_period_recovers_cycle(p, seed):
    rng = np.random.default_rng(seed)
    cycle = rng.normal(size=(p, 4))
    x = np.tile(cycle, (200 // p + 1, 1))[:160]
    found = detect_period(x, p_max=64)
    assert found is not None and p % found == 0
    assert np.all(np.abs(x[found:] - x[:-found]) < 1e-6)


def test_fingerprint_swap_image():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(200, 4))
    a, b = _series(pts), _series(pts).swapped()
    fa, fb = fingerprint(a), fingerprint(b)
    assert fa.sync_deviation == fb.sync_deviation
    assert np.allclose(fa.cloud_center[[2, 3, 0, 1]], fb.cloud_center)
    assert fa.cloud_radius == pytest.approx(fb.cloud_radius)
    assert fa.detected_period == fb.detected_period


def test_distinct_identity_swap_and_mismatch():
    rng = np.random.default_rng(2)
    a = _series(0.05 * rng.normal(size=(150, 4)))
    assert not distinct(a, a)
    assert not distinct(a, a.swapped())
    far = _series(a.points + 1.0)
    assert distinct(a, far) and distinct(far, a)
    with pytest.raises(ParamsMismatch):
        distinct(a, _series(a.points, "y"))


def test_distinct_two_samples_of_one_torus():
    # long enough for both samples to cover the invariant curves
    dp = dp_at(14.5, 1.2e6)
    a = section(dp, State(1.53, 0.3, 1.23, -0.22, 0), transient=1500, n=1000)
    b = section(dp, a.final_state, transient=37, n=1000)
    assert fingerprint(a).detected_period is None
    assert cloud_distance(a, b) > 0
    assert not distinct(a, b)


@given(st.integers(0, 2 ** 31), st.floats(0, 0.01))
def test_distinct_symmetric(seed, shift):
    rng = np.random.default_rng(seed)
    a = _series(rng.normal(size=(60, 4)))
    b = _series(rng.normal(size=(60, 4)) * 0.01 + a.points + shift)
    assert distinct(a, b) == distinct(b, a)
