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

"""Interface for processing data from finished simulations.

It provides L{SimReader}, a class for reading and extracting data from a .hdf5 simulation
archive written by L{hdrconform.hdf5.SimWriter}.

"""

from json import loads
from typing import List, Dict, Tuple, Any, Optional

import numpy as np
from pandas import DataFrame
from h5py import File, Group, Dataset

from hdrconform.ends import BadFile, FileNotFound
from hdrconform.inval import invalidint, isvalid
from hdrconform.panelsim import PanelProfile, ProbeSpec
from hdrconform.patterns import Playlist
from hdrconform.photometry import MeasurementLog, COLUMNS


def _unflatten(attrs: Dict[str, Any]) -> Dict[str, Any]:
    """Rebuild embedded dictionaries from 'key1->key2' attribute names."""
    res: Dict[str, Any] = {}
    for key, val in attrs.items():
        if isinstance(val, np.ndarray):
            val = val.tolist()
        elif isinstance(val, np.generic):
            val = val.item()
        if val == "null":
            val = None
        target = res
        *parents, last = key.split("->")
        for parent in parents:
            target = target.setdefault(parent, {})
        target[last] = val
    return res


class SimReader:
    """Interface for a hdf5 simulation archive."""

    def __init__(self, filename: str) -> None:
        """
        Create a reader connected to a .hdf5 simulation archive.

        @param filename: name of the .hdf5 file
        @type filename: str
        @raise FileNotFound: no such file
        @raise BadFile: not a simulation archive
        """
        self.filename: str = filename
        """name of HDF5 file"""
        try:
            self.h5file: File = File(filename, "r")
            """HDF5 file"""
        except FileNotFoundError:
            raise FileNotFound(filename)
        except OSError as err:
            raise BadFile(f"{filename}: {err}")
        try:
            self.run: Group = self.h5file["Run"]
            """'Run' group"""
            self.params: Group = self.h5file["Parameters"]
            """'Parameters' group"""
            self.dataset: Group = self.h5file["Dataset"]
            """'Dataset' group"""
            self.datanames: List[str] = [str(name) for name in self.dataset.attrs["datanames"]]
            """list of state names"""
            self.states: Dataset = self.dataset["states"]
            """'Dataset/states' dataset"""
            self.entries: Dataset = self.dataset["entries"]
            """'Dataset/entries' dataset"""
            self.end: Dataset = self.dataset["end"]
            """'Dataset/end' dataset"""
            self.samples: Group = self.h5file["Samples"]
            """'Samples' group"""
        except KeyError as err:
            raise BadFile(f"{filename} is not a simulation archive ({err})")
        self.logs: Optional[Dataset] = (
            self.h5file["Logging/logs"] if "Logging" in self.h5file else None
        )
        """'Logging/logs' dataset (None if the run was not logged in the file)"""

    def __enter__(self) -> "SimReader":
        return self

    def __exit__(self, *args: Any) -> None:
        self.close()

    def close(self) -> None:
        """Close the hdf5 file."""
        self.h5file.close()

    def __getitem__(self, field: str) -> np.ndarray:
        """Return the state array named 'field' (valid names in self.datanames)."""
        return self.get(field)

    def _loc(self, field: str) -> int:
        try:
            return self.datanames.index(field)
        except ValueError:
            raise KeyError(f"{field} is not a recorded state name")

    def get(self, field: str, meanlength: int = invalidint) -> np.ndarray:
        """Return the recorded state named 'field'.

        If meanlength is set, a running mean of the corresponding length is returned.

        @param field: state name
        @type field: str
        @param meanlength: running mean length  (Default value = invalidint)
        @type meanlength: int
        @return: state values at each step
        @rtype: ndarray

        """
        res = self.states[:, self._loc(field)]
        return (
            np.convolve(res, np.ones((meanlength,)) / meanlength, mode="valid")
            if isvalid(meanlength)
            else res
        )

    def x_y(self, y: str = "temp_c", x: str = "t_s") -> Tuple[np.ndarray, np.ndarray]:
        """Return two state fields, ready to be plotted."""
        return self.get(x), self.get(y)

    def table(self) -> DataFrame:
        """Thermal state at each step."""
        return DataFrame(self.states[:], columns=self.datanames)

    def entry_table(self) -> DataFrame:
        """Played entries."""
        return DataFrame(
            {
                "index": self.entries["index"],
                "label": [label.decode() for label in self.entries["label"]],
                "start": self.entries["start"],
                "duration": self.entries["duration"],
            }
        )

    @property
    def measurements(self) -> MeasurementLog:
        """Probe readings."""
        data = {}
        for name in COLUMNS:
            values = self.samples[name][:]
            data[name] = [val.decode() for val in values] if name == "probe" else values
        return MeasurementLog(DataFrame(data, columns=COLUMNS), self.filename)

    def ending(self) -> Tuple[int, str, float]:
        """Return the ending number, message and run time."""
        endnum, message, time = self.end[0]
        return int(endnum), message.decode(), float(time)

    @property
    def profile(self) -> PanelProfile:
        """Panel profile used for the run."""
        return PanelProfile.readdict(_unflatten(dict(self.params["Profile"].attrs)))

    @property
    def playlist(self) -> Playlist:
        """Played patterns."""
        return Playlist.readdict(loads(self.params.attrs["playlist"]))

    @property
    def probes(self) -> List[ProbeSpec]:
        """Photometer probes."""
        return [ProbeSpec.readdict(probe) for probe in loads(self.params.attrs["probes"])]

    @property
    def runinfo(self) -> Dict[str, Any]:
        """Structured information of the full run."""
        return _unflatten(dict(self.run.attrs))

    def log_table(self) -> DataFrame:
        """Log lines recorded during the run."""
        if self.logs is None:
            return DataFrame(columns=["level", "time", "runtime", "message"])
        logs = self.logs[:]
        return DataFrame(
            {
                "level": logs["level"],
                "time": [val.decode() for val in logs["time"]],
                "runtime": logs["runtime"],
                "message": [val.decode() for val in logs["message"]],
            }
        )

    @property
    def printinfo(self) -> str:
        """Summary of the run."""
        endnum, message, time = self.ending()
        info = self.runinfo
        return (
            f"----------------\n"
            f"{info.get('comment', '')}\n"
            f"----------------\n"
            f"hdrconform version {info['version']}, dt={info['dt']} s, seed={info['seed']}\n"
            f"profile {self.profile.name}, {len(self.entries)} entries, "
            f"{len(self.states)} steps\n"
            f"ending n°{endnum} at runtime t={time:.3f}s; {message}\n"
            f"results saved in '{self.filename}'\n"
            f"----------------"
        )
