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

"""
Module for dealing with output files organization.

It provides an L{Output} class for accessing output files and folders, and L{atomic_write} for
writing files through a temporary file renamed in place, so that an interrupted run never leaves a
half-written output.

"""

from os import path, replace, remove, getpid
from socket import gethostname
from datetime import datetime
from contextlib import contextmanager
from typing import TYPE_CHECKING, Union, Iterator, BinaryIO

from hdrconform.logger import LOGGER
from hdrconform.ends import NotAFolder, FileCreationError

if TYPE_CHECKING:
    from hdrconform.inputs import RunParam


@contextmanager
def atomic_open(filename: str) -> Iterator[BinaryIO]:
    """Open a temporary binary file, renamed to 'filename' when the context exits cleanly.

    On any exception the temporary file is removed and 'filename' is left untouched.

    @param filename: destination file name
    @type filename: str
    @raise FileCreationError: if the file cannot be written

    """
    tmpname = f"{filename}.{getpid()}.tmp"
    try:
        out = open(tmpname, "wb")
    except OSError as err:
        raise FileCreationError(f"{filename} ({err})")
    try:
        with out:
            yield out
        replace(tmpname, filename)
    except OSError as err:
        raise FileCreationError(f"{filename} ({err})")
    finally:
        if path.exists(tmpname):
            remove(tmpname)
    LOGGER.debug(f"Wrote {filename}")


def atomic_write(filename: str, data: Union[bytes, str]) -> None:
    """Write 'data' to 'filename' via a temporary file renamed in place.

    @param filename: destination file name
    @type filename: str
    @param data: file content (str are utf-8 encoded)
    @type data: Union[bytes, str]
    @raise FileCreationError: if the file cannot be written

    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    with atomic_open(filename) as out:
        out.write(data)


class Output:
    """Access to output files and folders."""

    def __init__(self, param: "RunParam"):
        """
        Generate files structures from parameters.

        @param param: parameters
        @type param: RunParam
        """
        self.name: str = param.name
        """run name"""
        self.savedir: str = param.outdir if param.outdir else path.curdir
        """save folder"""
        if not path.isdir(self.savedir):
            raise NotAFolder(f"Bad folder name {self.savedir}")
        self.logdir: str = param.logdir
        """log folder"""
        if self.logdir and not path.isdir(self.logdir):
            LOGGER.debug(
                f"Logs will be sent to standard error because {self.logdir} is not a folder."
            )
        self.hostname: str = gethostname()
        """host name, only used in log file names"""
        self.starttime: str = datetime.now().strftime("%Y%m%d-%H%M%S")
        """run start time, only used in log file names"""

    def file(self, suffix: str, ext: str) -> str:
        """Output file name (with full path), as <run name>-<suffix>.<ext>.

        Names are reproducible: they never carry timestamps.

        @param suffix: file role (e.g. 'report', 'sweep', 'manifest')
        @type suffix: str
        @param ext: file extension, without dot
        @type ext: str
        @return: file name
        @rtype: str

        """
        base = f"{self.name}-{suffix}" if suffix else self.name
        return path.join(self.savedir, f"{base}.{ext}")

    @property
    def h5file(self) -> str:
        """hdf5 file name (with full path).

        @return: hdf5 file name
        @rtype: str

        """
        return self.file("sim", "hdf5")

    @property
    def logfile(self) -> str:
        """Logfile name with full path (or empty string if log to standard error).

        @return: log file name
        @rtype: str

        """
        if self.logdir and path.isdir(self.logdir):
            return path.join(self.logdir, f"{self.name}-{self.hostname}-{self.starttime}.log")
        return ""
