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

"""Photometric behaviour model of display panels.

A L{PanelProfile} describes how a panel limits its luminance with the displayed area (ABL), with
its temperature (thermal derating) and how its backlight leaks into black areas (local dimming
zones). L{PanelSimulator} plays a L{Playlist} on such a panel and emits the readings of
photometer probes as a L{MeasurementLog}, the same format as lab measurements, so that every
photometry analysis can be exercised without hardware.

Per time step dt, with A the mean linear light of the frame (PQ luminance / 10000) and S_eff
the white area (% of pixels above the black code):
  - m_abl = 1 if S_eff <= S0, else max((S0/S_eff)^gamma, floor/peak)
  - m_T = clamp(1 - alpha.max(T - t_knee, 0), derate_floor, 1)
  - samples are emitted at t = i.dt, then T <- T + dt.(k_heat.A.m_abl.m_T - k_cool.(T - t_ambient))

"""

from dataclasses import dataclass, field
from os import path
from typing import List, Dict, Any, Optional, Tuple, ClassVar, Sequence, TYPE_CHECKING

import numpy as np
import pandas as pd
from numba import jit

from hdrconform.colorimetry import pq_eotf, dequantize, luma_limits
from hdrconform.ends import (
    GeometryMismatch,
    Interrupted,
    ParameterError,
    SignalCatcher,
    FileNotFound,
)
from hdrconform.inputs import Readerclass
from hdrconform.logger import LOGGER
from hdrconform.media_io import Frame, Geometry
from hdrconform.patterns import Playlist, window_region
from hdrconform.photometry import MeasurementLog, COLUMNS, PROBES
from hdrconform.rng import Generator

if TYPE_CHECKING:
    from hdrconform.hdf5 import SimWriter

PROFILE_DIR = path.join(path.dirname(__file__), "profiles")
"""folder of the shipped profiles"""
SHIPPED_PROFILES: Dict[str, str] = {
    "sony-bvm-x300": "reference.json",
    "sony-kd-75zd9": "lcd.json",
    "sony-a80j": "oled.json",
    "reference": "reference.json",
    "lcd": "lcd.json",
    "oled": "oled.json",
}
"""shipped profile names (and technology aliases) to file names"""
TECHNOLOGIES = ("oled", "lcd", "reference")
EOTF_MODES = ("scaled", "clip")


@dataclass
class AblParam(Readerclass):
    """Static brightness limiter: luminance multiplier against the white area."""

    flat_until: float = 10.0
    """area S0 (%) up to which the full peak is available"""
    exponent: float = 0.5
    """decay exponent gamma beyond S0"""
    floor: float = 100.0
    """lowest luminance the limiter allows (nits)"""

    def check(self) -> None:
        if not 0 < self.flat_until <= 100:
            self.fail("flat_until", "must lie in (0, 100]")
        if self.exponent < 0:
            self.fail("exponent", "must be positive")
        if self.floor < 0:
            self.fail("floor", "must be positive")


@dataclass
class ThermalParam(Readerclass):
    """One-pole thermal model with linear derating above a knee temperature."""

    k_heat: float = 1.0
    """heating rate (°C/s per unit optical load)"""
    k_cool: float = 0.01
    """cooling rate (1/s)"""
    t_ambient: float = 25.0
    """ambient temperature (°C), also the initial panel temperature"""
    t_knee: float = 60.0
    """temperature above which the luminance is derated (°C)"""
    derate_alpha: float = 0.02
    """derating slope (1/°C)"""
    derate_floor: float = 0.5
    """lowest thermal multiplier"""

    def check(self) -> None:
        for key in ("k_heat", "k_cool", "derate_alpha"):
            if getattr(self, key) < 0:
                self.fail(key, "must be positive")
        if not 0 < self.derate_floor <= 1:
            self.fail("derate_floor", "must lie in (0, 1]")


@dataclass
class DimmingParam(Readerclass):
    """Local dimming zones and their leakage into black areas."""

    zones_x: int = 1
    """horizontal zone count"""
    zones_y: int = 1
    """vertical zone count"""
    leak_fraction: float = 0.0
    """fraction of the neighbouring zones load leaking into black (blooming)"""
    black_floor: float = 0.0
    """luminance of a black area with no load (nits)"""
    comment: str = ""

    def check(self) -> None:
        if self.zones_x < 1:
            self.fail("zones_x", "at least one zone")
        if self.zones_y < 1:
            self.fail("zones_y", "at least one zone")
        if not 0 <= self.leak_fraction <= 1:
            self.fail("leak_fraction", "must lie in [0, 1]")
        if self.black_floor < 0:
            self.fail("black_floor", "must be positive")


@dataclass
class PanelProfile(Readerclass):
    """Photometric model of a display panel."""

    _schema: ClassVar[str] = "hdrconform.profile"
    _required: ClassVar[Tuple[str, ...]] = ("name", "peak_small_window")

    name: str = ""
    """profile name"""
    technology: str = "reference"
    """oled, lcd or reference"""
    peak_small_window: float = 1000.0
    """small window peak luminance (nits)"""
    abl: AblParam = field(default_factory=AblParam)
    thermal: ThermalParam = field(default_factory=ThermalParam)
    dimming: DimmingParam = field(default_factory=DimmingParam)
    eotf: str = "scaled"
    """'scaled': PQ luminance scaled by peak/10000; 'clip': PQ luminance clipped at peak"""
    noise: float = 0.0
    """relative standard deviation of the photometer readings"""
    comment: str = ""

    def check(self) -> None:
        if self.technology not in TECHNOLOGIES:
            self.fail("technology", f"must be one of {', '.join(TECHNOLOGIES)}")
        if not self.peak_small_window > self.abl.floor >= 0:
            self.fail("peak_small_window", f"must exceed the ABL floor {self.abl.floor}")
        if self.eotf not in EOTF_MODES:
            self.fail("eotf", f"must be one of {', '.join(EOTF_MODES)}")
        if self.noise < 0:
            self.fail("noise", "must be positive")
        self.abl.check()
        self.thermal.check()
        self.dimming.check()

    def m_abl(self, s_eff: float) -> float:
        """Static limiter multiplier at effective white area 's_eff' (%)."""
        if s_eff <= self.abl.flat_until:
            return 1.0
        return max(
            (self.abl.flat_until / s_eff) ** self.abl.exponent,
            self.abl.floor / self.peak_small_window,
        )

    def displayed(self, nits: np.ndarray) -> np.ndarray:
        """Luminance shown for PQ luminances 'nits', before limiters."""
        if self.eotf == "clip":
            return np.minimum(nits, self.peak_small_window)
        return nits * self.peak_small_window / 10000

    def steady_temperature(self, load: float) -> float:
        """Fixed point of the thermal state under a constant optical load (without derating)."""
        return self.thermal.t_ambient + self.thermal.k_heat * load / self.thermal.k_cool


def load_profile(name: str) -> PanelProfile:
    """Read a panel profile from a json file, or a shipped profile by name.

    @param name: file name, or key of L{SHIPPED_PROFILES}
    @type name: str
    @return: validated profile
    @rtype: PanelProfile
    @raise ValidationError: invariant violated (naming the field)

    """
    if name in SHIPPED_PROFILES and not path.isfile(name):
        name = path.join(PROFILE_DIR, SHIPPED_PROFILES[name])
    elif not path.isfile(name):
        raise FileNotFound(
            f"{name} is neither a file nor a shipped profile ({', '.join(SHIPPED_PROFILES)})"
        )
    profile = PanelProfile.readfile(name)
    LOGGER.debug(f"Loaded profile {profile.name} from {name}")
    return profile


def save_profile(profile: PanelProfile, filename: str) -> None:
    """Write a panel profile as json."""
    profile.check()
    profile.tojson(filename)


@dataclass
class ProbeSpec(Readerclass):
    """Photometer probe: a pixel rectangle and what it measures."""

    name: str = "white"
    region: List[int] = field(default_factory=lambda: [0, 0, 1, 1])
    """x, y, width, height (pixels)"""
    kind: str = "white"
    """white: lit pixels; black: unlit area; full: whole region"""

    def check(self) -> None:
        if self.kind not in PROBES:
            self.fail("kind", f"must be one of {', '.join(PROBES)}")
        if len(self.region) != 4 or self.region[2] < 1 or self.region[3] < 1:
            self.fail("region", "must be [x, y, width, height] with a positive size")
        if self.region[0] < 0 or self.region[1] < 0:
            self.fail("region", "must lie in the frame")

    def within(self, geom: Geometry) -> None:
        """Check that the region lies inside the frame.

        @raise GeometryMismatch: region outside the frame
        """
        xpos, ypos, width, height = self.region
        if xpos < 0 or ypos < 0 or xpos + width > geom.width or ypos + height > geom.height:
            raise GeometryMismatch(
                f"probe {self.name} {self.region} outside the {geom.width}x{geom.height} frame"
            )

    @property
    def center(self) -> Tuple[int, int]:
        """Center pixel (x, y)."""
        return self.region[0] + self.region[2] // 2, self.region[1] + self.region[3] // 2


def default_probes(geom: Geometry, kinds: Sequence[str] = ("white", "black")) -> List[ProbeSpec]:
    """Standard probes: white at the screen center (10% area), black in the top left corner."""
    probes = []
    for kind in kinds:
        if kind == "black":
            _, _, width, height = window_region(geom, 1.0)
            region = [0, 0, width, height]
        else:
            region = list(window_region(geom, 10.0))
        probes.append(ProbeSpec.readdict({"name": kind, "region": region, "kind": kind}))
    return probes


@dataclass
class ProbeSet(Readerclass):
    """Probes of a simulation, as read from json."""

    _schema: ClassVar[str] = "hdrconform.probes"

    probes: List[ProbeSpec] = field(default_factory=list)

    def check(self) -> None:
        if not self.probes:
            self.fail("probes", "at least one probe")


def read_probes(filename: str) -> List[ProbeSpec]:
    """Read probes from a json file {"probes": [{"name", "region", "kind"}, ...]}."""
    return ProbeSet.readfile(filename).probes


@jit(nopython=True, cache=True)  # type: ignore
def _integrate(
    temp: float,
    steps: int,
    dt: float,
    load: float,
    m_abl: float,
    k_heat: float,
    k_cool: float,
    t_ambient: float,
    t_knee: float,
    alpha: float,
    derate_floor: float,
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Thermal state and multiplier at each step of a constant load, and the final state."""
    temps = np.empty(steps)
    derates = np.empty(steps)
    for i in range(steps):
        m_t = 1.0 - alpha * max(temp - t_knee, 0.0)
        m_t = min(max(m_t, derate_floor), 1.0)
        temps[i] = temp
        derates[i] = m_t
        temp += dt * (k_heat * load * m_abl * m_t - k_cool * (temp - t_ambient))
    return temps, derates, temp


def thermal_response(
    profile: PanelProfile,
    apl: float,
    duration: float,
    dt: float = 0.1,
    white_area: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Response of a panel at ambient temperature to a constant frame of mean linear light 'apl'.

    The white area (%) defaults to 100.apl, that of peak white patterns on black.

    @return: sample times, temperatures, thermal multipliers
    @rtype: Tuple[np.ndarray, np.ndarray, np.ndarray]

    """
    steps = int(round(duration / dt))
    therm = profile.thermal
    temps, derates, _ = _integrate(
        therm.t_ambient,
        steps,
        dt,
        apl,
        profile.m_abl(100 * apl if white_area is None else white_area),
        therm.k_heat,
        therm.k_cool,
        therm.t_ambient,
        therm.t_knee,
        therm.derate_alpha,
        therm.derate_floor,
    )
    return np.round(np.arange(steps) * dt, 9), temps, derates


@dataclass
class FrameLoad:
    """Luminance load of a frame on the panel."""

    apl: float
    """mean linear light A (PQ luminance / 10000)"""
    white_area: float
    """percentage of pixels above the black code"""
    m_abl: float
    """static limiter multiplier"""
    zones: np.ndarray
    """mean linear light of each dimming zone"""
    lit: List[Tuple[float, float]] = field(default_factory=list)
    """per probe, in probe order: (lit pixel fraction, mean displayed luminance of lit pixels)"""


class PanelSimulator:
    """Play patterns on a simulated panel and read its probes."""

    def __init__(
        self,
        profile: PanelProfile,
        probes: Optional[Sequence[ProbeSpec]] = None,
        dt: float = 0.1,
        seed: int = 0,
    ):
        """Set up a simulation.

        @param profile: panel profile
        @type profile: PanelProfile
        @param probes: photometer probes (Default value = None: L{default_probes})
        @type probes: Optional[Sequence[ProbeSpec]]
        @param dt: time step (s) (Default value = 0.1)
        @type dt: float
        @param seed: seed of the photometer noise stream (Default value = 0)
        @type seed: int

        """
        if dt <= 0:
            raise ParameterError(f"time step must be positive (dt={dt})")
        profile.check()
        self.profile: PanelProfile = profile
        self.probes: Optional[List[ProbeSpec]] = None if probes is None else list(probes)
        self.dt: float = dt
        self.seed: int = seed
        self.temperature: float = profile.thermal.t_ambient
        """current panel temperature"""
        self.step: int = 0
        """index of the next time step"""
        self.signcatch: SignalCatcher = SignalCatcher()
        """Signal catcher for dealing with interruptions"""
        self._noise: Generator = Generator(seed, "photometer")
        self._luts: Dict[Tuple[int, str], np.ndarray] = {}
        self._chunks: List[pd.DataFrame] = []

    def _lut(self, frame: Frame) -> np.ndarray:
        """Linear light of every luma code of the frame format."""
        key = (frame.bit_depth, frame.signal_range)
        if key not in self._luts:
            codes = np.arange(2 ** frame.bit_depth)
            signal = np.clip(dequantize(codes, frame.bit_depth, frame.signal_range), 0.0, 1.0)
            self._luts[key] = pq_eotf(signal) / 10000
        return self._luts[key]

    def frame_load(self, frame: Frame, probes: Sequence[ProbeSpec]) -> FrameLoad:
        """Compute the load of a frame, and what each probe sees of it.

        @raise GeometryMismatch: more zones than pixels
        """
        dim = self.profile.dimming
        height, width = frame.luma.shape
        if dim.zones_x > width or dim.zones_y > height:
            raise GeometryMismatch(f"{dim.zones_x}x{dim.zones_y} zones on a {width}x{height} frame")
        linear = self._lut(frame)[frame.luma]
        apl = float(linear.mean())
        black_code = luma_limits(frame.bit_depth, frame.signal_range)[0]
        white_area = 100 * np.count_nonzero(frame.luma > black_code) / frame.luma.size
        edges_y = (np.arange(dim.zones_y + 1) * height) // dim.zones_y
        edges_x = (np.arange(dim.zones_x + 1) * width) // dim.zones_x
        sums = np.add.reduceat(np.add.reduceat(linear, edges_y[:-1], axis=0), edges_x[:-1], axis=1)
        zones = sums / np.outer(np.diff(edges_y), np.diff(edges_x))
        load = FrameLoad(apl, white_area, self.profile.m_abl(white_area), zones)
        for probe in probes:
            xpos, ypos, pwidth, pheight = probe.region
            codes = frame.luma[ypos : ypos + pheight, xpos : xpos + pwidth]
            lit = codes > black_code
            count = int(np.count_nonzero(lit))
            shown = 0.0
            if count:
                nits = linear[ypos : ypos + pheight, xpos : xpos + pwidth][lit] * 10000
                shown = float(self.profile.displayed(nits).mean())
            load.lit.append((count / codes.size, shown))
        return load

    def black_level(self, load: FrameLoad, probe: ProbeSpec, height: int, width: int) -> float:
        """Luminance of unlit pixels at a probe: leakage of the neighbouring zones plus floor."""
        dim = self.profile.dimming
        xpos, ypos = probe.center
        zone_y = min(ypos * dim.zones_y // height, dim.zones_y - 1)
        zone_x = min(xpos * dim.zones_x // width, dim.zones_x - 1)
        near = load.zones[
            max(zone_y - 1, 0) : zone_y + 2, max(zone_x - 1, 0) : zone_x + 2
        ].mean()
        level = dim.leak_fraction * near * self.profile.peak_small_window + dim.black_floor
        return min(level, self.profile.peak_small_window)

    def run(self, playlist: Playlist, writer: Optional["SimWriter"] = None) -> MeasurementLog:
        """Play 'playlist' from the current panel state.

        The panel state (temperature, time) is kept between calls, so that successive playlists
        chain on the same panel.

        @param playlist: patterns and durations
        @type playlist: Playlist
        @param writer: archive of the thermal state (Default value = None)
        @type writer: Optional[SimWriter]
        @return: probe readings
        @rtype: MeasurementLog
        @raise GeometryMismatch: a probe lies outside the frames
        @raise Interrupted: stopped by SIGINT/SIGTERM (L{partial} holds the readings so far)

        """
        if not playlist.entries:
            raise ParameterError("empty playlist")
        geom = playlist.geometry
        probes = default_probes(geom) if self.probes is None else self.probes
        for probe in probes:
            probe.within(geom)
        therm = self.profile.thermal
        peak = self.profile.peak_small_window
        self._chunks = []
        elapsed = self.step * self.dt
        LOGGER.info(
            f"Simulating {playlist.name} ({len(playlist.entries)} entries, "
            f"{playlist.duration:g} s) on {self.profile.name}"
        )
        self.signcatch.listen()
        try:
            for index, (entry, frame, info) in enumerate(playlist.frames()):
                if not self.signcatch.alive:
                    raise Interrupted(f"by {self.signcatch.signal} at t={self.step * self.dt:g} s")
                elapsed += entry.duration
                steps = int(round(elapsed / self.dt)) - self.step
                if steps <= 0:
                    LOGGER.warning(f"entry {index} ({entry.duration} s) shorter than dt, skipped")
                    continue
                load = self.frame_load(frame, probes)
                temps, derates, self.temperature = _integrate(
                    self.temperature,
                    steps,
                    self.dt,
                    load.apl,
                    load.m_abl,
                    therm.k_heat,
                    therm.k_cool,
                    therm.t_ambient,
                    therm.t_knee,
                    therm.derate_alpha,
                    therm.derate_floor,
                )
                times = np.round((self.step + np.arange(steps)) * self.dt, 9)
                if writer is not None:
                    writer.add_entry(index, info.get("label", ""), float(times[0]), entry.duration)
                    writer.add_states(
                        np.column_stack(
                            [
                                times,
                                temps,
                                np.full(steps, load.apl),
                                np.full(steps, load.m_abl),
                                derates,
                            ]
                        )
                    )
                readings = self._readings(load, probes, info, frame, times, temps, derates, peak)
                if len(readings):
                    self._chunks.append(readings)
                self.step += steps
                LOGGER.debug(
                    f"entry {index} '{info.get('label', '')}': A={load.apl:.4f}, "
                    f"S={load.white_area:.2f}%, m_abl={load.m_abl:.3f}, T={self.temperature:.2f}"
                )
        finally:
            self.signcatch.reset()
        LOGGER.info(f"Simulation done at t={self.step * self.dt:g} s, T={self.temperature:.2f} °C")
        return self.partial

    @property
    def partial(self) -> MeasurementLog:
        """Readings emitted by the last (possibly interrupted) run."""
        if not self._chunks:
            return MeasurementLog(pd.DataFrame(columns=COLUMNS), self.profile.name)
        return MeasurementLog(pd.concat(self._chunks, ignore_index=True), self.profile.name)

    def _readings(
        self,
        load: FrameLoad,
        probes: Sequence[ProbeSpec],
        info: Dict[str, Any],
        frame: Frame,
        times: np.ndarray,
        temps: np.ndarray,
        derates: np.ndarray,
        peak: float,
    ) -> pd.DataFrame:
        """Probe readings of one entry, interleaved probe by probe at each step."""
        height, width = frame.luma.shape
        columns: List[np.ndarray] = []
        kinds: List[str] = []
        for probe, (fraction, shown) in zip(probes, load.lit):
            if probe.kind == "black":
                columns.append(np.full(times.size, self.black_level(load, probe, height, width)))
            elif probe.kind == "white":
                if fraction == 0:
                    continue
                columns.append(shown * load.m_abl * derates)
            else:
                black = self.black_level(load, probe, height, width)
                columns.append(fraction * shown * load.m_abl * derates + (1 - fraction) * black)
            kinds.append(probe.kind)
        if not columns:
            return pd.DataFrame(columns=COLUMNS)
        lum = np.column_stack(columns).reshape(-1)
        if self.profile.noise > 0:
            lum = lum * (1 + self.profile.noise * self._noise.normal(lum.size))
        lum = np.clip(lum, 0.0, peak)
        window = info.get("area_percent", info.get("percent", np.nan))
        code = info.get("peak_code", info.get("code", np.nan))
        count = len(kinds)
        return pd.DataFrame(
            {
                "t_s": np.repeat(times, count),
                "luminance_nits": lum,
                "probe": np.tile(kinds, times.size),
                "window_pct": np.full(lum.size, window, dtype=np.float64),
                "code_level": np.full(lum.size, code, dtype=np.float64),
                "temp_c": np.repeat(temps, count),
            },
            columns=COLUMNS,
        )


def simulate(
    playlist: Playlist,
    profile: PanelProfile,
    probes: Optional[Sequence[ProbeSpec]] = None,
    dt: float = 0.1,
    seed: int = 0,
    writer: Optional["SimWriter"] = None,
) -> MeasurementLog:
    """Simulate the probe readings of 'playlist' played on a fresh (ambient) panel.

    @param playlist: patterns and durations
    @type playlist: Playlist
    @param profile: panel profile
    @type profile: PanelProfile
    @param probes: photometer probes (Default value = None: L{default_probes})
    @type probes: Optional[Sequence[ProbeSpec]]
    @param dt: time step (s) (Default value = 0.1)
    @type dt: float
    @param seed: photometer noise seed (Default value = 0)
    @type seed: int
    @param writer: archive of the thermal state (Default value = None)
    @type writer: Optional[SimWriter]
    @return: measurement log
    @rtype: MeasurementLog

    """
    return PanelSimulator(profile, probes, dt, seed).run(playlist, writer)
