import pytest

from hdrconform.calibrate import TARGETS, abl_exponent, calibrate, sustained_luminance, heating
from hdrconform.ends import ParameterError
from hdrconform.panelsim import load_profile
from hdrconform.photometry import time_above


@pytest.mark.parametrize("name", sorted(TARGETS))
def test_shipped_constants(name) -> None:
    shipped = load_profile(name)
    fitted = calibrate(shipped, TARGETS[name])
    assert fitted.abl.exponent == pytest.approx(shipped.abl.exponent, rel=0.02)
    assert fitted.thermal.k_heat == pytest.approx(shipped.thermal.k_heat, rel=0.02)
    assert fitted.name == shipped.name


def test_abl_exponent() -> None:
    profile = load_profile("lcd")
    exponent = abl_exponent(profile, 22.0, 1500.0)
    profile.abl.set_param(exponent=exponent)
    assert profile.peak_small_window * profile.m_abl(22.0) == pytest.approx(1500.0)
    with pytest.raises(ParameterError):
        abl_exponent(profile, 5.0, 1500.0)
    with pytest.raises(ParameterError):
        abl_exponent(profile, 22.0, 2000.0)


def test_heating() -> None:
    profile = load_profile("lcd")
    target = TARGETS["lcd"]
    profile.thermal.set_param(k_heat=heating(profile, target))
    times, lum = sustained_luminance(profile, target.duration)
    assert time_above(times, lum, 1500.0) == pytest.approx(180.0, abs=0.5)
    assert load_profile("lcd").thermal.k_heat == pytest.approx(profile.thermal.k_heat, rel=0.02)
