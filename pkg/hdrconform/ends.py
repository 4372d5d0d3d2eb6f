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

"""General exceptions to be used in hdrconform code.

Exception categories inherit from L{HdrError}:
 - L{ConformanceFailure} is intended for a completed check whose verdict is a failure
 - L{Aborted} is intended to signal that a computation ended earlier than expected,
   but lead to a nonetheless usable result
 - L{BadEnding} is intended to signal that something went wrong; its subcategories
   L{InputError} (files, streams, logs) and L{ParameterError} (values given by the caller)
   tell where the problem comes from.

All exceptions intended to be used are derived from one of these categories, indicating the general
context of the exception. Each category carries the process exit code the command line uses when
the exception reaches it.

"""

from typing import Union, Callable, Optional
from types import FrameType
from signal import (
    signal,
    getsignal,
    Signals,
    Handlers,
    SIGTERM,
    SIGINT,
    SIG_IGN,
)


class HdrError(Exception):
    """General exception raised by hdrconform."""

    num = -1
    """exception number"""
    error_message = "Stopped for unknown reason"
    """exception base message"""
    exitcode = 1
    """process exit code when raised up to the command line"""

    def __init__(self, detail: str = ""):
        """When the exception is raised, details can be added to the base error mesage.

        @param detail: details to be added to error message
        @type detail: str

        """
        self.detail = detail
        """additional information"""
        super().__init__(detail)

    @property
    def message(self) -> str:
        """Format the exception message.

        @return: full exception message
        @rtype: str

        """
        msg = self.error_message
        if self.detail != "":
            msg = msg + " -> " + self.detail
        return msg

    def __str__(self) -> str:
        """Return a formatted error message."""
        return f"Error ({self.num}): {self.message}"


# Exception categories


class ConformanceFailure(HdrError):
    """Raised when a check completed with a failing verdict."""

    num = 2
    error_message = "Conformance check failed"
    exitcode = 2


class BadEnding(HdrError):
    """Raised for faulty completion."""


class Aborted(HdrError):
    """Raised for shortened, but usable, completion."""


class InputError(BadEnding):
    """Raised when problems are encountered when reading input files or streams."""


class ParameterError(BadEnding, ValueError):
    """Raised when a value given by the caller is outside its domain."""

    num = 10
    error_message = "Invalid parameter"


# Generic


class InternalError(BadEnding):
    """Something went bad in the code."""

    num = 0
    error_message = "Something went bad in the code"


# Parameters and numerical domains


class DomainError(ParameterError):
    """A numerical input lies outside the domain of the operation."""

    num = 11
    error_message = "Value outside the operation domain"


class DegenerateInput(ParameterError):
    """An input has no meaningful result (zero sum, degenerate triangle, singular matrix)."""

    num = 12
    error_message = "Degenerate input"


class UnsupportedSignal(ParameterError):
    """The frame signalling is not supported by the requested operation."""

    num = 13
    error_message = "Unsupported signal"


class InsufficientSignal(ParameterError):
    """The analysed region does not hold enough information."""

    num = 14
    error_message = "Insufficient signal for analysis"


class GeometryMismatch(ParameterError):
    """Two inputs were expected to share the same geometry."""

    num = 15
    error_message = "Geometry mismatch"


class ValidationError(ParameterError):
    """A parameter set violates one of its invariants."""

    num = 16
    error_message = "Invalid parameter set"


# Shortened runs


class Interrupted(Aborted):
    """Asked to stop."""

    num = 32
    error_message = "Asked to stop"


# IO errors


class FileNotFound(InputError):
    """The provided file was not found."""

    num = 40
    error_message = "The provided file was not found."


class BadFile(InputError):
    """The provided file is badly formed."""

    num = 41
    error_message = "The provided file is badly formed"


class BadJSON(InputError):
    """Bad JSON format."""

    num = 42
    error_message = "Bad JSON format"


class FileCreationError(InputError):
    """The file couldn't be created."""

    num = 43
    error_message = "The file couldn't be created"


class NotAFolder(InputError):
    """The provided foldername is not a folder."""

    num = 44
    error_message = "The provided foldername is not a folder"


class ParseError(BadFile):
    """A binary stream does not follow its grammar."""

    num = 45
    error_message = "Parse error"

    def __init__(self, detail: str = "", offset: Optional[int] = None):
        """Record the byte offset where parsing failed.

        @param detail: details to be added to error message
        @type detail: str
        @param offset: byte offset of the faulty element (None if unknown)
        @type offset: Optional[int]

        """
        self.offset: Optional[int] = offset
        """byte offset of the faulty element"""
        if offset is not None:
            detail = f"{detail} (at byte {offset})"
        super().__init__(detail)


class TruncationError(ParseError):
    """The stream ended in the middle of an element."""

    num = 46
    error_message = "Truncated stream"


class StructureError(ParseError):
    """A container element overruns its parent or the file."""

    num = 47
    error_message = "Structural error"


class LogError(BadFile):
    """A measurement log line is invalid."""

    num = 48
    error_message = "Invalid measurement log"

    def __init__(self, detail: str = "", line: Optional[int] = None):
        """Record the line number of the faulty log entry.

        @param detail: details to be added to error message
        @type detail: str
        @param line: line number in the log file, starting at 1 (None if unknown)
        @type line: Optional[int]

        """
        self.line: Optional[int] = line
        """faulty line number"""
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(detail)


class SchemaError(BadFile):
    """A JSON document has an unknown schema or version, or misses a required field."""

    num = 49
    error_message = "Schema violation"


class DigestMismatch(InputError):
    """A file does not match the digest recorded in its manifest."""

    num = 50
    error_message = "Digest mismatch"


# Signal handling

SignHandler = Union[Callable[[Signals, FrameType], None], int, Handlers, None]
"""Generic type that can be returned as a signal handler"""


class SignalCatcher:
    """Catch temporarily SIGTERM and SIGINT signal interruptions."""

    def __init__(self) -> None:
        """Simply create the object, and do not change anything to signal handling."""
        self.alive: bool = False
        """aliveness flag
        (when set in listen state, it is True until SIGINT or SIGTERM is received)"""
        self.signal: str = ""
        """Name of the signal received while in 'listen' state"""
        self._initial_term: SignHandler = getsignal(SIGTERM)
        """Initial handler to which SIGTERM was connected"""
        self._initial_int: SignHandler = getsignal(SIGINT)
        """Initial handler to which SIGTINT was connected"""

    def reset(self) -> None:
        """Return to the signal handling state as it was at object creation."""
        try:
            signal(SIGTERM, self._initial_term)
            signal(SIGINT, self._initial_int)
        except ValueError:
            # not in main thread
            pass

    def ignore(self) -> None:
        """SIGTERM and SIGINT signals to be ignored."""
        self.init_signal(SIG_IGN)

    def listen(self) -> None:
        """SIGTERM and SIGINT signal to be set to listen.

        When a signal is received, L{signal_listen} is called, namely setting the flag alive to
        False. Listening is only possible from the main thread; elsewhere the catcher stays
        alive and signals keep their previous handlers.

        """
        self.alive = True
        try:
            self.init_signal(self.signal_listen)
        except ValueError:
            # not in main thread
            pass

    @staticmethod
    def init_signal(handler: SignHandler) -> None:
        """Connect the SIGTERM and SIGINT signals to a specific handler.

        @param handler: signal handler to connect to
        @type handler: SignHandler

        """
        signal(SIGTERM, handler)
        signal(SIGINT, handler)

    def signal_listen(self, received_signal: Signals, frame: FrameType) -> None:
        """Actions to be performed when SIGINT or SIGTERM are received when in 'listen' state.

        It switches the self.alive flag to False, saves the signal name in self.signal, then
        switches the signal reception to 'ignore'

        @param received_signal: received signal
        @type received_signal: Signals
        @param frame: context frame at signal reception
        @type frame: FrameType

        """
        self.alive = False
        self.signal = Signals(received_signal).name
        self.ignore()
