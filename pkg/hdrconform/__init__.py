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

"""HDR conformance toolkit.

This package checks that HDR10 content and displays behave as the standards say they should.

  - L{hdrconform.colorimetry}: PQ transfer function, quantization, colour matrices and gamuts.
  - L{hdrconform.patterns}: deterministic test patterns and sweep playlists.
  - L{hdrconform.media_io}: Y4M, raw planar and ISOBMFF reading, sidecar manifests.
  - L{hdrconform.verify}: signalling, bit depth, banding and round trip verifications.
  - L{hdrconform.photometry}: analyses of photometer logs.
  - L{hdrconform.panelsim}: simulated panels producing photometer logs.
  - A run can be launched from a json configuration with L{launch}, or from the command line
    with L{main}.
  - L{LOGGER} is the global logging object.

"""


from hdrconform.version import __version__
from hdrconform.colorimetry import pq_eotf, pq_inv_eotf, quantize, dequantize
from hdrconform.patterns import build_playlist, generate, make_spec
from hdrconform.media_io import read_y4m, write_y4m, scan_isobmff, Geometry
from hdrconform.verify import verify_signalling
from hdrconform.photometry import MeasurementLog
from hdrconform.panelsim import PanelSimulator, load_profile, simulate
from hdrconform.report import Report, consolidate
from hdrconform.result import SimReader
from hdrconform.launcher import launch
from hdrconform.cli import main
from hdrconform.logger import LOGGER


__all__ = [
    "pq_eotf",
    "pq_inv_eotf",
    "quantize",
    "dequantize",
    "build_playlist",
    "generate",
    "make_spec",
    "read_y4m",
    "write_y4m",
    "scan_isobmff",
    "Geometry",
    "verify_signalling",
    "MeasurementLog",
    "PanelSimulator",
    "load_profile",
    "simulate",
    "Report",
    "consolidate",
    "SimReader",
    "launch",
    "main",
    "LOGGER",
    "__version__",
]
"""To be imported by 'from hdrconform import *'"""
