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

"""Logging of conformance runs.

L{LOGGER} is the global L{Log} used throughout hdrconform. Lines read
C{LEVEL : message   (rt=<process time>, t=<wall clock>)}; wall-clock time only ever appears in
logs, never in report files. Warnings are also kept in memory until the next
L{Log.reset_timer}, so that the CLI can attach them to the report of the run. During a
simulation, log lines can be mirrored to the HDF5 archive by any L{LogSaver} (see
L{hdrconform.hdf5.SimWriter}).

"""

from time import process_time
from logging import getLogger, FileHandler, StreamHandler, Handler, Logger
from datetime import datetime
from typing import Optional, List, Tuple, Protocol

from hdrconform.inval import invalidstr, isvalid


LEVELS = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40, "CRITICAL": 50}
"""logging level names and their numerical value"""


class LogSaver(Protocol):
    """Anything that can archive log lines."""

    def write_log(self, level: int, time: str, runtime: float, msg: str) -> None:
        ...


class Timer:
    """Processing time since a checkpoint."""

    def __init__(self) -> None:
        self._ptime0: float = process_time()

    def reset(self) -> None:
        self._ptime0 = process_time()

    @property
    def time(self) -> float:
        return process_time() - self._ptime0


class Log:
    """Run logger, writing to standard error or to a log file."""

    def __init__(self, level: str = "INFO", timeformat: str = "%H:%M:%S, %d/%m/%y"):
        self.timeformat: str = timeformat
        """strftime format of the wall clock"""
        self.level: str = level
        self.filename: str = invalidstr
        """log file, invalid for standard error"""
        self.writer: Optional[LogSaver] = None
        """archive mirror, if any"""
        self.warnings: List[Tuple[str, str]] = []
        """(time, message) of the warnings emitted since the last reset"""
        self._timer: Timer = Timer()
        self._logger: Logger = getLogger("hdrconform")
        self._handler: Optional[Handler] = None
        self.setlevel(level)
        self.connect()

    def configure(self, level: str, timeformat: str, filename: str = "") -> None:
        """Prepare the logger for a new run: level, clock format, destination, timer.

        @param level: level name (DEBUG, INFO, WARNING, ERROR)
        @param timeformat: strftime format of the wall clock
        @param filename: log file (empty: standard error)

        """
        self.setlevel(level)
        self.timeformat = timeformat
        self.connect(filename)
        self.reset_timer()

    def setsaver(self, writer: Optional[LogSaver]) -> None:
        """Mirror log lines to an archive writer (None to stop)."""
        self.writer = writer

    def setlevel(self, level: str = "INFO") -> None:
        self.debug(f"Switched to level {level}")
        self.level = level
        self._logger.setLevel(level)

    def connect(self, filename: str = "") -> None:
        """Send log lines to a file, or to standard error if filename is empty."""
        if self._handler is not None:
            self.disconnect(f"redirecting to {filename or 'stream'}")
        self.filename = filename if filename else invalidstr
        self._handler = FileHandler(self.filename) if isvalid(self.filename) else StreamHandler()
        self._logger.addHandler(self._handler)
        self.debug(f"Logging to {filename or 'stream'}")

    def disconnect(self, reason: str = "unknown") -> None:
        self.debug(f"Disconnecting; reason: {reason}")
        if self._handler is not None:
            self._logger.removeHandler(self._handler)
            self._handler.close()
            self._handler = None

    def _log(self, levelname: str, msg: str) -> None:
        level = LEVELS[levelname]
        if self.writer is not None and level >= LEVELS.get(self.level, 0):
            self.writer.write_log(level, self.time, self.runtime, msg)
        self._logger.log(level, f"{levelname} : {msg}   (rt={self.runtime:.3f}, t={self.time})")

    def debug(self, msg: str) -> None:
        self._log("DEBUG", msg)

    def info(self, msg: str) -> None:
        self._log("INFO", msg)

    def warning(self, msg: str) -> None:
        """Log a recoverable finding, and keep it for the run report."""
        self.warnings.append((self.time, msg))
        self._log("WARNING", msg)

    def error(self, msg: str) -> None:
        self._log("ERROR", msg)

    def warned(self, exclude: Tuple[str, ...] = ()) -> List[str]:
        """Messages of the kept warnings, in order, skipping those already in exclude."""
        return [msg for _, msg in self.warnings if msg not in exclude]

    @property
    def time(self) -> str:
        """Wall clock."""
        return datetime.now().strftime(self.timeformat)

    @property
    def runtime(self) -> float:
        """Processing time of the run (in seconds)."""
        return self._timer.time

    def reset_timer(self) -> None:
        """Restart the run clock and forget past warnings."""
        self.debug("Timer reset")
        self._timer.reset()
        self.warnings = []


LOGGER = Log()
"""Global object for logging messages"""
