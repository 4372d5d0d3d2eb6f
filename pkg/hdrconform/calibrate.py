#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# Copyright 2023 by the hdrconform authors
#
# This file is part of hdrconform
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, see <http://www.gnu.org/licenses/>.

"""Calibration of the shipped panel profiles.

Profile constants are solved so that the model reproduces published measurements of each panel:
  - the ABL exponent places a luminance level at a given window size;
  - the heating coefficient places the sustained brightness response of a 1% window in time
    (time spent above a level, or decay onset).

Run as 'python -m hdrconform.calibrate [profile...]' to print calibrated profiles as json.

"""

import sys
from dataclasses import dataclass
from typing import Dict, Optional, List, Tuple, Callable

import numpy as np
from scipy.optimize import brentq

from hdrconform.ends import ParameterError
from hdrconform.inputs import AnalysisParam
from hdrconform.logger import LOGGER
from hdrconform.panelsim import PanelProfile, load_profile, thermal_response
from hdrconform.photometry import time_above, decay_onset


@dataclass
class CalibrationTarget:
    """Published behaviour of a panel."""

    window: float
    """window size (%) ..."""
    nits: float
    """... where the static limiter brings luminance down to this level"""
    heat: str = ""
    """'' (heating kept), 'time_above' or 'decay_onset'"""
    level: float = 0.0
    """luminance threshold of 'time_above' (nits)"""
    seconds: float = 0.0
    """target time above level, or target decay onset (s)"""
    duration: float = 600.0
    """sustained run duration (s)"""


TARGETS: Dict[str, CalibrationTarget] = {
    "reference": CalibrationTarget(13.0, 1000.0),
    "lcd": CalibrationTarget(22.0, 1500.0, "time_above", 1500.0, 180.0),
    "oled": CalibrationTarget(5.5, 900.0, "decay_onset", 0.0, 100.0),
}
"""calibration targets of the shipped profiles"""
SUSTAINED_APL = 0.01
"""mean linear light of the sustained run (1% peak white window)"""


def _copy(profile: PanelProfile) -> PanelProfile:
    return PanelProfile.readdict(profile.asdict())


def abl_exponent(profile: PanelProfile, window: float, nits: float) -> float:
    """Exponent of the static limiter reaching 'nits' at 'window' %.

    @raise ParameterError: target unreachable (outside the flat zone, under the floor and
        under the peak)
    """
    peak, abl = profile.peak_small_window, profile.abl
    if not window > abl.flat_until or not abl.floor < nits < peak:
        raise ParameterError(f"no limiter exponent gives {nits} nits at {window}%")

    def error(exponent: float) -> float:
        return peak * (abl.flat_until / window) ** exponent - nits

    return float(brentq(error, 1e-6, 50.0, xtol=1e-10))


def sustained_luminance(
    profile: PanelProfile, duration: float, dt: float = 0.1
) -> Tuple[np.ndarray, np.ndarray]:
    """Times and luminance of a sustained 1% peak white window from ambient temperature."""
    times, _, derates = thermal_response(profile, SUSTAINED_APL, duration, dt)
    lum = profile.peak_small_window * profile.m_abl(100 * SUSTAINED_APL) * derates
    return times, lum


def _heat_error(
    profile: PanelProfile, target: CalibrationTarget, param: AnalysisParam
) -> Callable[[float], float]:
    def error(k_heat: float) -> float:
        profile.thermal.set_param(k_heat=k_heat)
        times, lum = sustained_luminance(profile, target.duration)
        if target.heat == "time_above":
            return time_above(times, lum, target.level) - target.seconds
        onset = decay_onset(times, lum, param.decay_fraction, param.hold)
        return (target.duration if onset is None else onset) - target.seconds

    return error


def heating(
    profile: PanelProfile, target: CalibrationTarget, param: Optional[AnalysisParam] = None
) -> float:
    """Heating coefficient matching the sustained response target.

    @raise ParameterError: target not bracketed by k_heat in [0.01, 1000]
    """
    param = AnalysisParam() if param is None else param
    error = _heat_error(_copy(profile), target, param)
    low, high = 0.01, 1000.0
    if error(low) * error(high) > 0:
        raise ParameterError(f"{target.heat} target {target.seconds} s out of reach")
    return float(brentq(error, low, high, xtol=1e-4))


def calibrate(profile: PanelProfile, target: CalibrationTarget) -> PanelProfile:
    """Calibrated copy of a profile (ABL exponent, then heating coefficient)."""
    res = _copy(profile)
    res.abl.set_param(exponent=abl_exponent(res, target.window, target.nits))
    if target.heat:
        res.thermal.set_param(k_heat=heating(res, target))
    LOGGER.info(
        f"{res.name}: ABL exponent {res.abl.exponent:.5g}, heating {res.thermal.k_heat:.4g}"
    )
    return res


def main(names: List[str]) -> None:
    """Print calibrated shipped profiles."""
    for name in names if names else sorted(TARGETS):
        if name not in TARGETS:
            known = ", ".join(TARGETS)
            raise ParameterError(f"no calibration target for {name} (known: {known})")
        print(calibrate(load_profile(name), TARGETS[name]).dumps())


if __name__ == "__main__":
    main(sys.argv[1:])
