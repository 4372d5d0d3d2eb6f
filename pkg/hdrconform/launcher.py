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

"""High level interface to launch a run from a configuration file.

It provides L{launch}, running the subcommand described by a .json L{RunParam} file, with eventual
additional parameters overriding the file ones.

"""

from typing import Any, List

from hdrconform.cli import main
from hdrconform.ends import ParameterError
from hdrconform.inputs import RunParam

FLAGS = ("name", "outdir", "seed", "loglevel", "logdir", "comment")
"""run parameters that can be overridden"""


def launch(parameters: str, **kwd: Any) -> int:
    """Launch a hdrconform run.

    @param parameters: name of the run configuration file (.json)
    @type parameters: str
    @param kwd: additional run parameters (override the ones defined in the configuration file),
        among L{FLAGS} and 'formats'
    @return: exit code (0 pass, 1 error, 2 conformance failure)
    @rtype: int
    @raise FileNotFound: missing configuration file
    @raise ParameterError: unknown run parameter

    """
    RunParam.readfile(parameters)
    argv: List[str] = ["--config", parameters]
    for key, val in kwd.items():
        if key == "formats":
            argv += ["--format", ",".join(val) if isinstance(val, (list, tuple)) else str(val)]
        elif key in FLAGS:
            argv += [f"--{key}", str(val)]
        else:
            raise ParameterError(f"unknown run parameter '{key}'")
    return main(argv)
