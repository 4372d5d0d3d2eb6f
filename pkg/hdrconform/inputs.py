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

"""Definition of structured json files for parameter inputs.

This module provides a generic L{Readerclass} for reading parameters by defining dataclasses that
will mirror the json file structure, as well as the parameter sets shared by several hdrconform
modules (run configuration, signalling policy, analysis thresholds). Domain-specific parameter
sets (pattern specifications, panel profiles, signalling metadata) derive from L{Readerclass} in
their own modules.

"""

from json import load, dumps, JSONDecodeError
from os import environ
from typing import List, Dict, TypeVar, Type, Any, Tuple, ClassVar
from dataclasses import dataclass, field, fields

from hdrconform.caster import Caster
from hdrconform.ends import BadJSON, FileNotFound, SchemaError, ValidationError
from hdrconform.inval import isvalid, jsonable
from hdrconform.version import SCHEMA_VERSION

R = TypeVar("R", bound="Readerclass")
"""Generic type for L{Readerclass} and  its subclasses"""

OUTDIR_ENV = "HDRCONFORM_OUTDIR"
"""environment variable holding the default output directory"""


class LockedError(Exception):
    """Exception raised when attempting to modify a locked Readerclass."""


class Castreader(Caster):
    """Extend a L{Caster} for dealing with L{Readerclass}, converting them as dictionary."""

    def __call__(self, value: Any) -> Any:
        """Convert 'value' to self.dest type."""
        if value is None and self.optional:
            return None
        if isinstance(value, Readerclass):
            return value
        if issubclass(self.dest, Readerclass):
            return self.dest.readdict(value)
        if self.dest is list and issubclass(self.args[0].dest, Readerclass):
            return [
                val if isinstance(val, Readerclass) else self.args[0].dest.readdict(val)
                for val in value
            ]
        return super().__call__(value)


@dataclass
class Readerclass:
    """Dataclass with interface for reading its data from json files.

    Subclasses may declare:
      - _schema: a schema name written in, and checked from, json files together with
        L{SCHEMA_VERSION}
      - _required: names of fields that must be present in input dictionaries
    and may override L{check} to validate their invariants.

    """

    _schema: ClassVar[str] = ""
    """schema name (empty: no schema header)"""
    _required: ClassVar[Tuple[str, ...]] = ()
    """fields that must be given in input dictionaries"""

    def __post_init__(self) -> None:
        """(Re)Calculate data after fields init or change."""
        self._locked: bool
        """lock flag"""
        self._autocast: bool
        """autocast flag"""
        self._checktype: bool
        """checktype flag"""

    @staticmethod
    def _fromfile(filename: str) -> Dict[str, Any]:
        """Read a json file named 'filename' as a dict.

        @param filename: name of json file
        @type filename: str
        @return: json data as dict
        @rtype: Dict[str, Any]

        """
        if filename == "":
            return {}
        try:
            with open(filename, encoding="utf-8") as json_data:
                parameters: Dict[str, Any] = load(json_data)
        except FileNotFoundError:
            raise FileNotFound(f"Unknown file {filename}")
        except JSONDecodeError as jerr:
            raise BadJSON(f"{filename} ({jerr})")
        if not isinstance(parameters, dict):
            raise BadJSON(f"{filename} does not hold a json object")
        return parameters

    @classmethod
    def _strip_schema(cls, parameters: Dict[str, Any]) -> Dict[str, Any]:
        """Check and remove the schema header from a parameter dictionary.

        @param parameters: raw parameters
        @type parameters: Dict[str, Any]
        @return: parameters without header
        @rtype: Dict[str, Any]
        @raise SchemaError: wrong schema name or unknown version

        """
        if not cls._schema:
            return parameters
        params = dict(parameters)
        schema = params.pop("schema", cls._schema)
        version = params.pop("version", SCHEMA_VERSION)
        if schema != cls._schema:
            raise SchemaError(f"expected schema '{cls._schema}', found '{schema}'")
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unknown {cls._schema} schema version {version}")
        return params

    @classmethod
    def readdict(
        cls: Type[R],
        parameters: Dict[str, Any],
        checktype: bool = True,
        autocast: bool = True,
    ) -> R:
        """Return a Readerclass object, updated by the data from parameters dict.

        @param parameters: parameters to be set (override the default values)
        @type parameters: Dict[str, Any]
        @param checktype: if True, an error will be raised if the parameters are given
            in a faulty type (Default value = True)
        @type checktype: bool
        @param autocast: if True, given parameters will be catsed to the correct type
            (Default value = True)
        @type autocast: bool
        @return: new object
        @rtype: Readerclass
        @raise SchemaError: a required field is missing

        """
        if not isinstance(parameters, dict):
            raise SchemaError(f"{cls.__name__} expects a json object, not {parameters!r}")
        parameters = cls._strip_schema(parameters)
        for name in cls._required:
            if name not in parameters:
                raise SchemaError(f"{cls.__name__}: missing required field '{name}'")
        new = cls()
        if checktype:
            new.set_checktype()
        else:
            new.unset_checktype()
        if autocast:
            new.set_autocast()
        else:
            new.unset_autocast()
        new.set_param(**parameters)
        return new

    @classmethod
    def readfile(
        cls: Type[R], filename: str, checktype: bool = True, autocast: bool = True,
    ) -> R:
        """Return a Readerclass object, updated by the data from a json file.

        @param filename: name of json file
        @type filename: str
        @param checktype: if True, an error will be raised if the parameters are given
            in a faulty type (Default value = True)
        @type checktype: bool
        @param autocast: if True, given parameters will be catsed to the correct type
            (Default value = True)
        @type autocast: bool
        @return: new object
        @rtype: Readerclass

        """
        return cls.readdict(
            parameters=cls._fromfile(filename), checktype=checktype, autocast=autocast
        )

    @classmethod
    def list_param(cls) -> Dict[str, Castreader]:
        """List all the parameters of the class, with a caster to their type.

        @return: dictionary {parameter name: parameter caster}
        @rtype: Dict[str, Castreader]

        """
        if "_list_param" not in cls.__dict__:
            cls._list_param = {
                val.name: Castreader(val.type)
                for val in fields(cls)  # type: ignore
                if val.init
            }
        return cls._list_param  # type: ignore

    @classmethod
    def conv_param(cls, param: str) -> Castreader:
        """Return the caster to the type defined for 'param'.

        @param param: parameter name
        @type param: str
        @return: caster to the parameter type
        @rtype: Castreader

        """
        return cls.list_param()[param]

    def checked_items(self, key: str, val: Any) -> Any:
        """Autocast and check 'val' to the consistent type defined for 'key'.

        The operations performed will depend on self.autocast and self.checktype flags

        @param key: name of the parameter
        @type key: str
        @param val: value to be checked
        @return: converted value consistent with 'key' type
        @raise ValidationError: raised if 'val' cannot be casted, or if 'val' if not of the
          correct type (in case of an autocast set to False, or of a faulty Caster)

        """
        err = ""
        if key not in self.list_param().keys():
            err += f"'{key}' parameter unknown. "
        else:
            caster = self.conv_param(key)
            if self.autocast:
                try:
                    val = caster(val)
                except (ValueError, TypeError) as cast_err:
                    err += f"Couldn't cast '{val}' into {caster.dest} ({cast_err}). "
            if self.checktype and not err:
                if not (isinstance(val, caster.dest) or (val is None and caster.optional)):
                    err += f"{key} parameter should be of type {caster.dest}, "
                    err += f"not {type(val)}"
        if err != "":
            raise ValidationError(f"{type(self).__name__}.{key}: {err.strip()}")
        return val

    def set_param(self, **kwd: Any) -> None:
        """Set the object parameters, then check the invariants.

        This function must be used, instead of directly setting parameters,
        so that the check/autocast/lock features can be correctly used.

        @raise LockedError: raised if attempted on a locked object
        @raise ValidationError: raised if parameters value are of uncorrect type, or break an
            invariant

        """
        if self.locked:
            raise LockedError
        for key, val in kwd.items():
            val = self.checked_items(key, val)
            setattr(self, key, val)
        self.__post_init__()
        self.check()

    def check(self) -> None:
        """Check the invariants of the parameter set.

        To be overriden in subclasses; shall raise L{ValidationError} naming the faulty field.

        """

    def fail(self, key: str, reason: str) -> None:
        """Raise a validation error on field 'key'.

        @param key: faulty field name
        @type key: str
        @param reason: why the value is invalid
        @type reason: str
        @raise ValidationError: always

        """
        raise ValidationError(f"{type(self).__name__}.{key}: {reason} ({getattr(self, key)!r})")

    def asdict(self) -> Dict[str, Any]:
        """Convert the object data to a dictionary.

        Absent values are converted to None.

        @return:  full set of parameters as a dictionary
        @rtype: Dict[str, Any]

        """
        res = {}
        for key in self.list_param().keys():
            res[key] = _plain(getattr(self, key))
        return res

    def tojson(self, filename: str) -> None:
        """Write all parameters in a json file (atomically), with schema header if defined.

        @param filename: name of json file
        @type filename: str

        """
        from hdrconform.outputs import atomic_write

        atomic_write(filename, self.dumps().encode("utf-8"))

    def dumps(self) -> str:
        """Serialize all parameters as a json string, with schema header if defined.

        @return: json text (keys in declaration order, 4 spaces indent, final newline)
        @rtype: str

        """
        data = self.asdict()
        if self._schema:
            data = {"schema": self._schema, "version": SCHEMA_VERSION, **data}
        return dumps(data, indent=4) + "\n"

    def lock(self) -> None:
        """Lock the object, preventing parameter changes."""
        self._locked = True

    def unlock(self) -> None:
        """Unlock the object, enabling parameter changes."""
        self._locked = False

    @property
    def locked(self) -> bool:
        """Lock state."""
        if not hasattr(self, "_locked"):
            self._locked = False
        return self._locked

    def set_autocast(self) -> None:
        """Set the autocast feature."""
        self._autocast = True

    def unset_autocast(self) -> None:
        """Unset the autocast feature."""
        self._autocast = False

    @property
    def autocast(self) -> bool:
        """Autocast state."""
        if not hasattr(self, "_autocast"):
            self._autocast = True
        return self._autocast

    def set_checktype(self) -> None:
        """Set the checktype feature."""
        self._checktype = True

    def unset_checktype(self) -> None:
        """Unset the checktype feature."""
        self._checktype = False

    @property
    def checktype(self) -> bool:
        """Checktype state."""
        if not hasattr(self, "_checktype"):
            self._checktype = True
        return self._checktype


def _plain(val: Any) -> Any:
    """Convert a parameter value to plain json-compatible data."""
    if isinstance(val, Readerclass):
        return val.asdict()
    if isinstance(val, dict):
        return {key: _plain(subval) for key, subval in val.items()}
    if isinstance(val, (list, tuple)):
        return [_plain(subval) for subval in val]
    return jsonable(val)


@dataclass
class RunParam(Readerclass):
    """Run configuration, shared by every command line invocation."""

    name: str = "run"
    """Run name (used as output files prefix)"""
    comment: str = ""
    """Run comment"""
    outdir: str = ""
    """Where output files will be saved. Defaults to $HDRCONFORM_OUTDIR, then working dir"""
    logdir: str = ""
    """Where the logs will be saved. If empty, log to standard error"""
    loglevel: str = "INFO"
    """logging level (CRITICAL, ERROR, WARNING, INFO, or DEBUG)"""
    formats: List[str] = field(default_factory=lambda: ["json"])
    """report formats, among json, csv, svg"""
    seed: int = 0
    """global seed; every random stream derives a named sub-seed from it"""
    timeformat: str = "[%d.%m.%Y-%H:%M:%S]"
    """timeformat used in log files"""
    command: str = ""
    """subcommand to launch (when run from a configuration file)"""
    options: Dict[str, Any] = field(default_factory=dict)
    """subcommand options, named as the command line flags (without leading dashes)"""

    def __post_init__(self) -> None:
        if not self.outdir:
            self.outdir = environ.get(OUTDIR_ENV, "")

    def check(self) -> None:
        for fmt in self.formats:
            if fmt not in ("json", "csv", "svg"):
                self.fail("formats", f"unknown report format '{fmt}'")
        if self.loglevel not in ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"):
            self.fail("loglevel", "unknown logging level")
        if self.seed < 0 or self.seed >= 2 ** 64:
            self.fail("seed", "seed must fit in 64 unsigned bits")


PRIMARIES_CODES = (1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 12, 22)
"""colour primaries code points (ITU-T H.273)"""
TRANSFER_CODES = tuple(range(1, 19))
"""transfer characteristics code points (ITU-T H.273)"""
MATRIX_CODES = tuple(range(0, 15))
"""matrix coefficients code points (ITU-T H.273)"""


@dataclass
class SignallingPolicy(Readerclass):
    """What a conforming HDR10 signalling must declare."""

    _schema: ClassVar[str] = "hdrconform.policy"

    transfer: int = 16
    """required transfer characteristics (16: SMPTE ST 2084 PQ)"""
    primaries: int = 9
    """required colour primaries (9: BT.2020)"""
    matrix: int = 9
    """required matrix coefficients (9: BT.2020 non-constant luminance)"""
    min_bit_depth: int = 10
    """minimal bit depth"""
    mdcv: str = "warn"
    """mastering display metadata: 'require', 'warn' or 'ignore' when absent"""
    clli: str = "warn"
    """content light level metadata: 'require', 'warn' or 'ignore' when absent"""

    def check(self) -> None:
        if self.transfer not in TRANSFER_CODES:
            self.fail("transfer", "not a transfer characteristics code")
        if self.primaries not in PRIMARIES_CODES:
            self.fail("primaries", "not a colour primaries code")
        if self.matrix not in MATRIX_CODES:
            self.fail("matrix", "not a matrix coefficients code")
        if self.min_bit_depth not in (8, 10, 12, 16):
            self.fail("min_bit_depth", "bit depth must be 8, 10, 12 or 16")
        for key in ("mdcv", "clli"):
            if getattr(self, key) not in ("require", "warn", "ignore"):
                self.fail(key, "must be 'require', 'warn' or 'ignore'")


@dataclass
class AnalysisParam(Readerclass):
    """Thresholds and constants of the photometric analyses."""

    _schema: ClassVar[str] = "hdrconform.analysis"

    thresholds: List[float] = field(default_factory=lambda: [900.0, 1000.0, 1500.0])
    """luminance thresholds (nits) of the sustained time-above map"""
    levels: List[float] = field(default_factory=lambda: [900.0, 1000.0, 1500.0])
    """luminance levels (nits) of the window sweep max_window_at map"""
    decay_fraction: float = 0.9
    """decay onset when luminance falls under this fraction of the running peak"""
    hold: float = 10.0
    """seconds the luminance must stay under the decay limit"""
    stable_fraction: float = 0.1
    """final fraction of samples whose median is the stabilized level"""
    peak_tolerance: float = 0.005
    """relative tolerance defining the samples still 'at peak'"""
    duplicate_tolerance: float = 0.05
    """relative disagreement of duplicated window sizes raising a warning"""
    dimming_slope: float = 0.001
    """poor dimming when black slope exceeds this fraction of the white peak per percent"""
    dimming_r: float = 0.8
    """minimal correlation coefficient for a poor dimming verdict"""
    eotf_split: float = 100.0
    """low/high luminance boundary of EOTF tracking (nits)"""
    eotf_tolerance: float = 0.02
    """relative deviation accepted as EOTF tracking"""
    t_safe: float = 40.0
    """temperature (°C) under which measurements may restart"""
    t_ambient: float = 25.0
    """ambient temperature (°C) assumed when too few samples allow fitting it"""
    capability_nits: float = 1000.0
    """minimal luminance a HDR display must reach..."""
    capability_window: float = 5.0
    """...at this window size (%)"""

    def check(self) -> None:
        if not 0 < self.decay_fraction < 1:
            self.fail("decay_fraction", "must lie in (0, 1)")
        if self.hold < 0:
            self.fail("hold", "must be positive")
        if not 0 < self.stable_fraction <= 1:
            self.fail("stable_fraction", "must lie in (0, 1]")
        if self.dimming_slope <= 0:
            self.fail("dimming_slope", "must be positive")
        if not 0 <= self.dimming_r <= 1:
            self.fail("dimming_r", "must lie in [0, 1]")
        if any(not isvalid(val) or val < 0 for val in self.thresholds + self.levels):
            self.fail("thresholds", "luminance thresholds must be positive")
