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

"""Survey of panels: window sweep, local dimming and capability of each profile.

Usage: display_survey.py [profile.json ...]

Without arguments, the shipped profiles are surveyed. The consolidated markdown summary is
printed.
"""

import sys
from typing import List

from hdrconform import Geometry, Report, build_playlist, consolidate, load_profile, simulate
from hdrconform.inputs import AnalysisParam
from hdrconform.photometry import analyze_local_dimming, analyze_window_sweep
from hdrconform.verify import verify_capability

GEOM = Geometry.parse("960x540")
PARAM = AnalysisParam.readdict({"capability_window": 10.0})


def survey(name: str) -> List[Report]:
    profile = load_profile(name)
    sweep, _ = build_playlist("window", GEOM, duration=2.0)
    night, _ = build_playlist("night-sky", GEOM, duration=2.0)
    curve = analyze_window_sweep(simulate(sweep, profile), PARAM)
    dimming = analyze_local_dimming(simulate(night, profile), PARAM)
    reports = [curve.report(), dimming.report(), verify_capability(curve.curve, PARAM)]
    # one entry per panel in the summary
    for report in reports:
        report.set_param(name=f"{report.name} ({profile.name})")
    return reports


if __name__ == "__main__":
    names = sys.argv[1:] if len(sys.argv) > 1 else ["reference", "lcd", "oled"]
    print(consolidate([rep for name in names for rep in survey(name)]).markdown())
