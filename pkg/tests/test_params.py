import math

import pytest

from bubblechaos import ConfigError, InvalidParameters, PhysicalParams, preset
from bubblechaos.params import (DimensionlessParams, gas_frequency, load_params,
                                natural_frequency, params_from_mapping)
from oracles import OMEGA0_PRESET


def test_preset_natural_frequency_regression():
    assert natural_frequency(preset("sonovue-1.72um")) == pytest.approx(OMEGA0_PRESET, rel=1e-14)


def test_free_bubble_limit():
    p = PhysicalParams(sigma=1e-300, chi=1e-300)
    expected = math.sqrt(3 * p.gamma * p.p0 / (p.rho * p.r0 ** 2))
    assert natural_frequency(p) == pytest.approx(expected, rel=1e-15)
    assert gas_frequency(p) == pytest.approx(expected, rel=1e-15)


def test_doubling_radius_halves_free_frequency():
    p = PhysicalParams(sigma=1e-300, chi=1e-300)
    q = p.replace(r0=2 * p.r0, d=2 * p.d)
    assert natural_frequency(q) == pytest.approx(natural_frequency(p) / 2, rel=1e-14)


def test_dimensionless_rebuild_is_bit_identical():
    p = PhysicalParams().at(17.3, 1.41e6)
    a = DimensionlessParams.from_physical(p).as_array()
    b = DimensionlessParams.from_physical(p).as_array()
    assert a.tobytes() == b.tobytes()
    assert DimensionlessParams.from_physical(p).omega0 > 0


@pytest.mark.parametrize("change", [
    {"rho": 0.0}, {"c": -1.0}, {"r0": float("nan")}, {"p_ac": -1.0},
    {"d_over_r0": 2.0}, {"p_v": 2e5},
])
def test_invalid_parameters_rejected(change):
    with pytest.raises(InvalidParameters):
        PhysicalParams().replace(**change)


def test_zero_drive_allowed():
    assert PhysicalParams(p_ac=0.0).p_ac == 0.0


def test_d_over_r0_and_d_are_exclusive():
    with pytest.raises(InvalidParameters):
        PhysicalParams().replace(d=1e-5, d_over_r0=10)
    with pytest.raises(ConfigError):
        params_from_mapping({"d": "1e-5", "d_over_r0": "10"})


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# two bubbles\np_ac = 1.68e6\nd_over_r0 = 32  # ratio\n")
    p = load_params(path)
    assert p.p_ac == 1.68e6
    assert p.d_over_r0 == pytest.approx(32)
    path.write_text("p_acc = 1\n")
    with pytest.raises(ConfigError, match="unknown"):
        load_params(path)
    path.write_text("p_ac = loud\n")
    with pytest.raises(ConfigError):
        load_params(path)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nope")


def test_digest_tracks_values():
    p = PhysicalParams()
    assert p.digest() == PhysicalParams().digest()
    assert p.digest() != p.replace(p_ac=1.3e6).digest()
