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

"""Interface to hdf5 simulation archives.

It provides the L{SimWriter} class, storing the thermal state of a panel simulation step by
step, the played entries, the probe readings and the log lines of the run. Archives are read back
with L{hdrconform.result.SimReader}.

"""

from json import dumps
from typing import Dict, Any, Optional, Sequence, TYPE_CHECKING
from h5py import File, Group, Dataset, string_dtype

import numpy as np

from hdrconform.ends import HdrError, FileCreationError, InternalError
from hdrconform.inval import isvalid
from hdrconform.version import __version__

if TYPE_CHECKING:
    from hdrconform.panelsim import PanelProfile, ProbeSpec
    from hdrconform.patterns import Playlist
    from hdrconform.photometry import MeasurementLog

STATE_NAMES = ["t_s", "temp_c", "apl", "m_abl", "m_thermal"]
"""columns of the 'Dataset/states' dataset"""


class SimWriter:
    """Storage for the data of a panel simulation."""

    def __init__(self, filename: str, maxstrlen: int = 256, lengrow: int = 1024) -> None:
        """Open the hdf5 archive.

        @param filename: name of the hdf5 file
        @type filename: str
        @param maxstrlen: maximum length of strings stored in the file (Default value = 256)
        @type maxstrlen: int
        @param lengrow: rows reserved each time a dataset runs out of space
            (Default value = 1024)
        @type lengrow: int
        @raise FileCreationError: if the file cannot be created

        """
        if not isvalid(filename) or filename == "":
            raise FileCreationError("Please enter a valid output file name")
        self.filename: str = filename
        """name of hdf5 file"""
        self.maxstrlen: int = maxstrlen
        """maximum length of strings stored in the file"""
        self.lengrow: int = lengrow
        """rows added when space goes missing"""
        try:
            self.h5file: File = File(filename, "w")
            """hdf5 file object"""
        except OSError as err:
            raise FileCreationError(f"'{filename}': {err}")
        self._init_stat: bool = False
        """flag indicating if the writer is initialized"""
        self.run: Group
        """hdf5 Group 'Run' for storing generic run informations"""
        self.params: Group
        """hdf5 Group 'Parameters' for storing the profile, playlist and probes"""
        self.dataset: Group
        """hdf5 Group 'Dataset' for storing the simulation data"""
        self.states: Dataset
        """hdf5 Dataset 'Dataset/states' (thermal state at each step)"""
        self.entries: Dataset
        """hdf5 Dataset 'Dataset/entries' (played entries)"""
        self.end: Dataset
        """hdf5 Dataset 'Dataset/end' (ending message)"""
        self.samples: Group
        """hdf5 Group 'Samples' for storing the probe readings"""
        self.nbstates: int = 0
        """number of recorded steps"""
        self.nbentries: int = 0
        """number of recorded entries"""
        # Logging data
        self._init_log: bool = False
        """flag indicating if logging into the writer is initialized"""
        self.maxlog: int
        """maximum log line to be recorded in file"""
        self.dlog: int
        """log line increment to add in file when space goes missing"""
        self.logging: Group
        """hdf5 Group 'Logging' for storing log data"""
        self.logcount: int = 0
        """number of recorded log lines"""
        self.logs: Dataset
        """hdf5 Dataset 'Logging/logs' (recorded log lines)"""

    def init_log(self, maxlog: int) -> None:
        """Init logging interface to hdf5 file.

        @param maxlog: (initial) maximum log line to reserve in hdf5 file
            if more space is needed, maxlog more lines will be reserved.
            unused lines will be removed at run end.
        @type maxlog: int

        """
        self.maxlog = maxlog
        self.dlog = maxlog
        self.logging = self.h5file.create_group("Logging")
        self.logs = self.logging.create_dataset(
            "logs",
            (maxlog,),
            maxshape=(None,),
            dtype=[
                ("level", "int32"),
                ("time", string_dtype(length=32)),
                ("runtime", "float32"),
                ("message", string_dtype(length=self.maxstrlen)),
            ],
        )
        self._init_log = True

    def write_log(self, level: int, time: str, runtime: float, msg: str) -> None:
        """Write a log line in the file.

        @param level: logging level number
        @type level: int
        @param time: time at logging event
        @type time: str
        @param runtime: runtime at logging event
        @type runtime: float
        @param msg: logged message
        @type msg: str

        """
        if not self._init_log:
            return
        try:
            if self.logcount >= self.maxlog:
                self.maxlog += self.dlog
                self.logs.resize(self.maxlog, axis=0)
            self.logs[self.logcount] = (
                level,
                time.encode()[:32],
                runtime,
                msg.encode()[: self.maxstrlen],
            )
            self.logcount += 1
        except (OSError, ValueError):
            # no more room, stop logging
            self._init_log = False

    def close_log(self) -> None:
        """Stop logging in file."""
        if hasattr(self, "logs"):
            self.logs.resize(self.logcount, axis=0)
        self._init_log = False

    def init_sim(
        self,
        profile: "PanelProfile",
        playlist: "Playlist",
        probes: Sequence["ProbeSpec"],
        dt: float,
        seed: int,
        comment: str = "",
    ) -> None:
        """Initialize the simulation recording.

        @param profile: panel profile
        @type profile: PanelProfile
        @param playlist: played patterns
        @type playlist: Playlist
        @param probes: photometer probes
        @type probes: Sequence[ProbeSpec]
        @param dt: time step (s)
        @type dt: float
        @param seed: photometer noise seed
        @type seed: int
        @param comment: run comment
        @type comment: str

        """
        self.run = self.h5file.create_group("Run")
        self.run.attrs["version"] = __version__
        self.run.attrs["comment"] = comment
        self.run.attrs["dt"] = dt
        self.run.attrs["seed"] = str(seed)
        self.params = self.h5file.create_group("Parameters")
        self.dict_as_attr(self.params.create_group("Profile"), profile.asdict())
        self.params.attrs["playlist"] = playlist.dumps()
        self.params.attrs["probes"] = dumps([probe.asdict() for probe in probes])
        self.dataset = self.h5file.create_group("Dataset")
        self.dataset.attrs["datanames"] = STATE_NAMES
        self.states = self.dataset.create_dataset(
            "states",
            (self.lengrow, len(STATE_NAMES)),
            maxshape=(None, len(STATE_NAMES)),
            fillvalue=np.nan,
        )
        self.entries = self.dataset.create_dataset(
            "entries",
            (0,),
            maxshape=(None,),
            dtype=[
                ("index", "int32"),
                ("label", string_dtype(length=self.maxstrlen)),
                ("start", "float64"),
                ("duration", "float64"),
            ],
        )
        self.end = self.dataset.create_dataset(
            "end",
            (1,),
            dtype=[
                ("num", "int32"),
                ("message", string_dtype(length=self.maxstrlen)),
                ("runtime", "float32"),
            ],
        )
        self.samples = self.h5file.create_group("Samples")
        self._init_stat = True

    def test_initialized(self) -> None:
        """Test if the file was intialized for storing the simulation.

        @raise InternalError: if not initialized

        """
        if not self._init_stat:
            raise InternalError("Attempt to write in HDF5 file before intialization")

    def add_states(self, block: np.ndarray) -> None:
        """Append rows of thermal state (columns as L{STATE_NAMES}).

        @param block: (steps, 5) array
        @type block: np.ndarray

        """
        self.test_initialized()
        rows = block.shape[0]
        if self.nbstates + rows > self.states.shape[0]:
            self.states.resize(self.nbstates + rows + self.lengrow, axis=0)
        self.states[self.nbstates : self.nbstates + rows] = block
        self.nbstates += rows

    def add_entry(self, index: int, label: str, start: float, duration: float) -> None:
        """Record a played entry."""
        self.test_initialized()
        self.entries.resize(self.nbentries + 1, axis=0)
        self.entries[self.nbentries] = (index, label.encode()[: self.maxstrlen], start, duration)
        self.nbentries += 1

    def add_samples(self, log: "MeasurementLog") -> None:
        """Store the probe readings, one dataset per column."""
        self.test_initialized()
        for name in log.data.columns:
            values = log.data[name].to_numpy()
            if name == "probe":
                self.samples.create_dataset(
                    name, data=values.astype(str).astype("S8").view(string_dtype(length=8))
                )
            else:
                self.samples.create_dataset(name, data=values.astype(np.float64))

    def add_end(self, ending: Optional[HdrError], runtime: float) -> None:
        """Write the ending message (num 0 when the run completed).

        @param ending: exception that stopped the run, if any
        @type ending: Optional[HdrError]
        @param runtime: run time (s)
        @type runtime: float

        """
        self.test_initialized()
        if ending is None:
            self.end[0] = (0, b"completed", runtime)
        else:
            self.end[0] = (ending.num, ending.message.encode()[: self.maxstrlen], runtime)

    def close(self) -> None:
        """Trim the datasets and close the hdf5 file."""
        if self._init_stat:
            self.states.resize(self.nbstates, axis=0)
        self.close_log()
        self._init_stat = False
        self.h5file.close()

    def dict_as_attr(self, group: Group, datas: Dict[str, Any], name: str = "") -> None:
        """Write the data dictionary as a set of attributes in hdf5 group.

        In case of embedded dictionary {'key1':{'key2': value}},
        attributes will be flatten as {'key1->key2' : value}

        @param group: hdf5 group to which attributes will be written
        @type group: Group
        @param datas: dictionary to be stored as attributes.
        @type datas: Dict[str, Any]
        @param name: name of embedding (for flattening embedded dictionaries,
            intended to be used only by recursive calls)
            Ignored if empty (default).
        @type name: str

        """
        for key, val in datas.items():
            if name:
                key = f"{name}->{key}"
            if isinstance(val, dict):
                self.dict_as_attr(group, val, name=key)
            elif val is None:
                group.attrs[key] = "null"
            else:
                group.attrs[key] = val
