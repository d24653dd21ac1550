import numpy as np
import pytest

from bubblechaos import (ChartSpec, InvalidParameters, LyapunovSettings, Regime, ScanSpec, State,
                         StepControl, bifurcation_scan, chart2d, fingerprint,
                         probe_multistability, section, swap, two_largest)
from bubblechaos.params import PhysicalParams, nondimensionalize
from bubblechaos.poincare import distinct
from bubblechaos.sweep import default_ensemble

TINY = LyapunovSettings(transient_periods=100, average_periods=200)
SMALL = LyapunovSettings(transient_periods=300, average_periods=800)


def _scan(**kw):
    base = dict(swept="d_over_r0", start=6.0, stop=7.0, steps=3, fixed=("p_ac", 1.7e6),
                seed=State(1, 0, 1, 0, 0), settings=TINY, section_points=16)
    base.update(kw)
    return ScanSpec(**base)


def test_scan_continuation_chain_and_determinism():
    a = bifurcation_scan(_scan())
    b = bifurcation_scan(_scan())
    assert [r.l1 for r in a] == [r.l1 for r in b]
    assert [r.tree.tobytes() for r in a] == [r.tree.tobytes() for r in b]
    assert a[0].seed == State(1, 0, 1, 0, 0)
    for prev, row in zip(a, a[1:]):
        assert row.seed == prev.final_state
    assert [r.value for r in a] == [6.0, 6.5, 7.0]
    assert all(r.l1 >= r.l2 for r in a)
    assert all(np.all(r.tree > 0) for r in a)


def test_scan_fresh_and_backward():
    rows = bifurcation_scan(_scan(seeding="fresh", direction="backward"))
    assert [r.value for r in rows] == [7.0, 6.5, 6.0]
    assert all(r.seed == State(1, 0, 1, 0, 0) for r in rows)


def test_scan_records_collapsed_rows():
    rows = bifurcation_scan(_scan(ctl=StepControl(r_floor=0.99)))
    assert len(rows) == 3
    assert all(r.status == "collapsed" and r.regime is None for r in rows)
    assert all(np.isnan(r.l1) for r in rows)


def test_scan_tree_spectrum_coherence():
    rows = bifurcation_scan(_scan(steps=4, settings=SMALL, section_points=128))
    for r in rows:
        if r.period is not None:
            assert r.regime.kind is Regime.PERIODIC


@pytest.mark.parametrize("kw", [
    {"start": 7.0, "stop": 6.0}, {"steps": 1}, {"swept": "omega"}, {"direction": "up"},
    {"seeding": "random"}, {"fixed": ("d_over_r0", 3.0)},
])
def test_scan_spec_validation(kw):
    with pytest.raises(InvalidParameters):
        _scan(**kw)


def test_chart_single_cell_equals_two_largest():
    spec = ChartSpec(d_range=(6.75, 6.75, 1), p_range=(1.7e6, 1.7e6, 1), settings=TINY,
                     seed=State(1, 0, 1, 0, 0))
    grid = chart2d(spec)
    dp = nondimensionalize(PhysicalParams().at(6.75, 1.7e6))
    pair = two_largest(dp, State(1, 0, 1, 0, 0), settings=TINY)
    c = grid.cell(0, 0)
    assert (c.l1, c.l2, c.stderr1, c.stderr2) == (pair.l1, pair.l2, pair.stderr1, pair.stderr2)


@pytest.mark.parametrize("seeding", ["fixed", "sweep_right", "sweep_down"])
def test_chart_independent_of_workers(seeding):
    spec = ChartSpec(d_range=(6.0, 9.0, 2), p_range=(1.2e6, 1.6e6, 2), settings=TINY,
                     seeding=seeding, section_points=8)
    a = chart2d(spec, workers=1)
    b = chart2d(spec, workers=2)
    assert a.shape == (2, 2)
    assert np.array_equal(a.field("l1"), b.field("l1"))
    assert np.array_equal(a.field("l2"), b.field("l2"))
    for c in a:
        assert (c.d_over_r0, c.p_ac) == pytest.approx((a.d_values[c.i_d], a.p_values[c.i_p]))


def test_chart_sweep_seeds_follow_direction():
    spec = ChartSpec(d_range=(6.0, 7.0, 3), p_range=(1.2e6, 1.2e6, 1), settings=TINY,
                     seeding="sweep_left", section_points=8)
    g = chart2d(spec)
    assert g.cell(0, 2).seed == spec.seed
    assert g.cell(0, 1).seed == g.cell(0, 2).final_state
    assert g.cell(0, 0).seed == g.cell(0, 1).final_state


def test_chart_directions_agree_in_periodic_region():
    kw = dict(d_range=(5.0, 7.5, 4), p_range=(1.0e6, 1.15e6, 3), settings=SMALL,
              section_points=32)
    right = chart2d(ChartSpec(seeding="sweep_right", **kw)).kinds()
    left = chart2d(ChartSpec(seeding="sweep_left", **kw)).kinds()
    assert np.mean(right == left) >= 0.99
    assert np.all(right == Regime.PERIODIC)


def test_chart_spec_validation():
    with pytest.raises(InvalidParameters):
        ChartSpec(d_range=(5.0, 4.0, 3))
    with pytest.raises(InvalidParameters):
        ChartSpec(seeding="diagonal")
    with pytest.raises(InvalidParameters):
        ChartSpec(p_range=(1e6, 2e6, 1))


def test_probe_merges_swap_pair():
    s = State(1.3, 0.1, 0.8, -0.1, 0)
    rep = probe_multistability((10.0, 1.2e6), [s, swap(s)], settings=SMALL)
    assert len(rep) == 1
    assert len(rep.attractors[0].seeds) == 2


def test_probe_unique_synchronous_cycle():
    """Uniqueness of the synchronous 2-cycle at d/R0 = 6.75, P_ac = 1.7 MPa.

    Known to fail: the model also has a second synchronous 2-cycle and an
    asynchronous 2-cycle there, reached from some random seeds.
    """
    ens = default_ensemble(14, rng_seed=7)
    assert len(ens) == 16
    rep = probe_multistability((6.75, 1.7e6), ens, settings=LyapunovSettings.chart_grade())
    assert len(rep) == 1 and not rep.dropped
    a = rep.attractors[0]
    assert a.regime.kind is Regime.PERIODIC and a.regime.synchronous
    assert a.fingerprint.detected_period == 2


def test_probe_synchronous_seed_reaches_cited_cycle():
    rep = probe_multistability((6.75, 1.7e6), default_ensemble(14, rng_seed=7),
                               settings=LyapunovSettings.chart_grade())
    first = rep.attractors[0]
    assert first.seed == State(1, 0, 1, 0, 0)
    assert first.regime.kind is Regime.PERIODIC and first.regime.synchronous
    assert first.fingerprint.detected_period == 2
    assert first.l1 == pytest.approx(-0.1437, abs=0.02)


def test_probe_soundness():
    settings = LyapunovSettings.chart_grade()
    rep = probe_multistability((14.5, 1.2e6), default_ensemble(1, 3), settings=settings)
    dp = nondimensionalize(PhysicalParams().at(14.5, 1.2e6))
    for a in rep:
        again = two_largest(dp, a.seed, settings=settings)
        ser = section(dp, again.final_state, n=len(a.series))
        assert not distinct(a.series, ser)
        assert fingerprint(ser).detected_period == a.fingerprint.detected_period


def test_probe_drops_collapsing_seeds():
    rep = probe_multistability((10.0, 1.2e6), [State(1, 0, 1, 0, 0)], StepControl(r_floor=0.99),
                               TINY)
    assert len(rep) == 0 and rep.dropped[0][1] == "collapsed"
    with pytest.raises(InvalidParameters):
        probe_multistability((10.0, 1.2e6), [])
