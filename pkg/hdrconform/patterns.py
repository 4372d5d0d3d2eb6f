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

"""Deterministic generation of test patterns.

Patterns are described by L{PatternSpec} dataclasses (readable from json like every parameter
set) and rendered into L{Frame} objects with a L{PatternManifest} accounting for their pixels:

  - L{NightSkySpec}: p% of randomly placed peak-white pixels on black
  - L{WhiteWindowSpec}: centered peak-white rectangle covering S% of the screen
  - L{GreyRampSpec}: monotone bands of increasing code inside a centered window
  - L{FlatFieldSpec}: constant colour (hex) or code
  - L{NoiseOverlaySpec}: any of the above with additive gaussian code noise

Sweeps of patterns (night-sky percentages, window sizes, sustained window, PQ steps) are built
as L{Playlist} objects by L{build_playlist}.

All randomness comes from L{hdrconform.rng.Generator} streams named after their use.

"""

import re
from dataclasses import dataclass, field
from typing import List, Dict, Any, Tuple, Optional, ClassVar, Type, Iterator, Sequence

import numpy as np

from hdrconform.colorimetry import (
    quantize,
    dequantize,
    pq_eotf,
    pq_inv_eotf,
    luma_limits,
    chroma_limits,
    rgb_to_ycbcr,
    round_half_away,
)
from hdrconform.ends import ParameterError
from hdrconform.inputs import Readerclass
from hdrconform.inval import invalidint, invalidfloat, isvalid
from hdrconform.logger import LOGGER
from hdrconform.media_io import Frame, Geometry, HdrSignalling, ContentLight, PatternManifest
from hdrconform.rng import Generator

NIGHT_SKY_PERCENTS: Tuple[float, ...] = (1, 2, 5, 10, 20, 50, 80)
"""default night-sky white pixel percentages"""
WINDOW_SIZES: Tuple[float, ...] = (
    1, 2, 3, 4, 5, 7, 10, 12, 15, 20, 25, 30, 40, 50, 60, 75, 80, 90, 100
)
"""default window sweep sizes (% of screen area)"""
EBU_WINDOW_SIZES: Tuple[float, ...] = (4, 10, 25, 81)
"""legacy EBU window sizes"""
EOTF_LEVELS: Tuple[float, ...] = (
    0.1, 0.5, 1, 2, 5, 10, 20, 50, 100, 200, 400, 600, 800, 1000, 1500, 2000, 4000,
)
"""default PQ step luminances (nits) of EOTF tracking playlists"""
SUSTAINED_DURATION = 600.0
"""default duration of the sustained brightness test (s)"""
HEX_COLOUR = re.compile(r"#?[0-9A-Fa-f]{6}")
"""8-bit R'G'B' hex colour, leading '#' optional"""
GREY_SCREEN = "#555555"
"""intermediate grey screen colour"""


@dataclass
class PatternSpec(Readerclass):
    """Common parameters of all patterns."""

    kind: ClassVar[str] = ""
    """pattern kind (key of L{SPECS})"""

    bit_depth: int = 10
    """sample bit depth"""
    signal_range: str = "narrow"
    """signal range"""
    subsampling: str = "420"
    """chroma subsampling"""
    label: str = ""
    """free label (default: generated from the parameters)"""

    def check(self) -> None:
        if self.bit_depth not in (8, 10, 12):
            self.fail("bit_depth", "patterns are 8, 10 or 12-bit")
        if self.signal_range not in ("narrow", "full"):
            self.fail("signal_range", "must be 'narrow' or 'full'")
        if self.subsampling not in ("420", "444"):
            self.fail("subsampling", "must be '420' or '444'")

    @property
    def seed(self) -> int:
        """Seed of random patterns (0 for deterministic ones)."""
        return 0

    @property
    def limits(self) -> Tuple[int, int]:
        """Black and white luma codes."""
        return luma_limits(self.bit_depth, self.signal_range)

    @property
    def neutral(self) -> int:
        """Chroma code of achromatic colours."""
        return int(quantize(0.0, self.bit_depth, self.signal_range, "chroma"))

    @property
    def name(self) -> str:
        """Label or generated description."""
        return self.label if self.label else self.describe()

    def describe(self) -> str:
        """Short description of the pattern."""
        return self.kind

    def todict(self) -> Dict[str, Any]:
        """Parameters with the pattern kind."""
        return {"kind": self.kind, **self.asdict()}


@dataclass
class _PeakSpec(PatternSpec):
    """Patterns with a peak-white level."""

    peak_code: int = invalidint
    """peak luma code (default: white code of the range)"""
    peak_nits: float = invalidfloat
    """peak luminance, PQ coded (used when peak_code is absent)"""

    @property
    def peak(self) -> int:
        """Peak luma code."""
        if isvalid(self.peak_code):
            return int(self.peak_code)
        if isvalid(self.peak_nits):
            return int(quantize(pq_inv_eotf(self.peak_nits), self.bit_depth, self.signal_range))
        return self.limits[1]

    def check(self) -> None:
        super().check()
        if isvalid(self.peak_code) and not 0 <= self.peak_code < 2 ** self.bit_depth:
            self.fail("peak_code", "outside the container")
        if isvalid(self.peak_nits) and not 0 <= self.peak_nits <= 10000:
            self.fail("peak_nits", "must lie in [0, 10000]")


@dataclass
class NightSkySpec(_PeakSpec):
    """Peak-white pixels randomly distributed on black."""

    kind: ClassVar[str] = "night-sky"

    percent: float = 1.0
    """percentage p of white pixels"""
    seed: int = 0  # type: ignore
    """random seed"""

    def check(self) -> None:
        super().check()
        if not 0 < self.percent <= 100:
            self.fail("percent", "must lie in (0, 100]")

    def describe(self) -> str:
        return f"night-sky p={self.percent:g}%"


@dataclass
class WhiteWindowSpec(_PeakSpec):
    """Centered peak-white window on black."""

    kind: ClassVar[str] = "window"

    area_percent: float = 1.0
    """screen area S covered by the window (%)"""

    def check(self) -> None:
        super().check()
        if not 0 < self.area_percent <= 100:
            self.fail("area_percent", "must lie in (0, 100]")

    def describe(self) -> str:
        return f"window S={self.area_percent:g}%"


@dataclass
class GreyRampSpec(PatternSpec):
    """Grey ramp of equal-width bands inside a centered window."""

    kind: ClassVar[str] = "ramp"

    signal_range: str = "full"
    levels: int = 1024
    """number of bands"""
    window_percent: float = 100.0
    """screen area of the ramp window (%)"""
    orientation: str = "horizontal"
    """'horizontal': codes increase left to right (vertical bands); 'vertical': top to bottom"""

    def check(self) -> None:
        super().check()
        if not 0 < self.window_percent <= 100:
            self.fail("window_percent", "must lie in (0, 100]")
        if self.orientation not in ("horizontal", "vertical"):
            self.fail("orientation", "must be 'horizontal' or 'vertical'")
        low, high = self.limits
        if not 2 <= self.levels <= high - low + 1:
            self.fail("levels", f"must lie in [2, {high - low + 1}] for {self.signal_range} range")

    def describe(self) -> str:
        return f"ramp {self.levels} levels"

    def code(self, index: np.ndarray) -> np.ndarray:
        """Code of band(s) 'index'."""
        low, high = self.limits
        return low + round_half_away(index * (high - low) / (self.levels - 1)).astype(np.int64)


@dataclass
class FlatFieldSpec(PatternSpec):
    """Constant frame."""

    kind: ClassVar[str] = "flat"

    signal_range: str = "full"
    colour: str = "#000000"
    """8-bit full range R'G'B' hex colour"""
    code: int = invalidint
    """luma code (overrides colour)"""

    def check(self) -> None:
        super().check()
        self.rgb8()
        if isvalid(self.code) and not 0 <= self.code < 2 ** self.bit_depth:
            self.fail("code", "outside the container")

    def rgb8(self) -> Tuple[int, int, int]:
        """8-bit R'G'B' codes of the colour."""
        if not HEX_COLOUR.fullmatch(self.colour):
            self.fail("colour", "malformed hex colour (6 hex digits expected)")
        val = int(self.colour.lstrip("#"), 16)
        return (val >> 16) & 255, (val >> 8) & 255, val & 255

    def describe(self) -> str:
        return f"flat code {self.code}" if isvalid(self.code) else f"flat {self.colour}"


@dataclass
class NoiseOverlaySpec(PatternSpec):
    """Base pattern with additive gaussian noise."""

    kind: ClassVar[str] = "noise"

    base: Dict[str, Any] = field(default_factory=lambda: {"kind": "flat", "colour": "#808080"})
    """base pattern parameters (with their 'kind')"""
    sigma: float = 0.0
    """noise standard deviation (code steps)"""
    seed: int = 0  # type: ignore
    """random seed"""

    def check(self) -> None:
        if self.sigma < 0:
            self.fail("sigma", "must be positive")
        self.base_spec()

    def base_spec(self) -> PatternSpec:
        """Base pattern specification."""
        return make_spec(self.base)

    def describe(self) -> str:
        return f"{self.base_spec().name} + noise sigma={self.sigma:g}"


SPECS: Dict[str, Type[PatternSpec]] = {
    spec.kind: spec
    for spec in (NightSkySpec, WhiteWindowSpec, GreyRampSpec, FlatFieldSpec, NoiseOverlaySpec)
}
"""pattern specifications, by kind"""


def make_spec(params: Dict[str, Any]) -> PatternSpec:
    """Build a pattern specification from a dictionary holding its 'kind'.

    @raise ParameterError: unknown kind
    """
    params = dict(params)
    kind = params.pop("kind", "")
    if kind not in SPECS:
        raise ParameterError(f"unknown pattern kind '{kind}' (known: {', '.join(SPECS)})")
    return SPECS[kind].readdict(params)


# Frames


def _blank(spec: PatternSpec, geom: Geometry, code: Optional[int] = None) -> Frame:
    """Achromatic constant frame (black by default)."""
    luma = np.full((geom.height, geom.width), spec.limits[0] if code is None else code, np.uint16)
    cshape = Frame.chroma_shape(geom.width, geom.height, spec.subsampling)
    chroma = np.full(cshape, spec.neutral, np.uint16)
    signalling = HdrSignalling.hdr10(full_range=spec.signal_range == "full")
    return Frame(
        [luma, chroma, chroma.copy()],
        spec.bit_depth,
        spec.subsampling,
        spec.signal_range,
        "ycbcr",
        signalling,
    )


def window_size(geom: Geometry, percent: float) -> Tuple[int, int]:
    """Window width and height covering 'percent' of the screen, with the screen aspect ratio.

    The width is searched around W.sqrt(S/100) for the best area match.

    @return: (width, height)
    @rtype: Tuple[int, int]

    """
    target = percent / 100 * geom.pixels
    guess = int(round_half_away(geom.width * np.sqrt(percent / 100)))
    best: Tuple[float, int, int] = (np.inf, 0, 0)
    for width in range(max(1, guess - 3), min(geom.width, guess + 3) + 1):
        height = int(min(max(round_half_away(target / width), 1), geom.height))
        err = abs(width * height - target)
        if err < best[0]:
            best = (err, width, height)
    return best[1], best[2]


def window_region(geom: Geometry, percent: float) -> Tuple[int, int, int, int]:
    """Centered window (x, y, width, height) covering 'percent' of the screen."""
    width, height = window_size(geom, percent)
    return (geom.width - width) // 2, (geom.height - height) // 2, width, height


def _signalled(frame: Frame) -> Frame:
    """Attach content light levels computed from the luma plane."""
    nits = pq_eotf(
        np.clip(dequantize(frame.luma, frame.bit_depth, frame.signal_range), 0, 1)
    )
    frame.signalling.content_light = ContentLight(
        float(round(float(np.max(nits)))), float(round(float(np.mean(nits))))
    )
    return frame


def _entry(spec: PatternSpec, frame: Frame, **extra: Any) -> Dict[str, Any]:
    low, _ = spec.limits
    entry = {"label": spec.name, "kind": spec.kind, "total_pixels": frame.pixel_count}
    entry.update(extra)
    if "peak_code" in entry:
        entry["nominal_peak_nits"] = float(
            pq_eotf(
                np.clip(dequantize(entry["peak_code"], spec.bit_depth, spec.signal_range), 0, 1)
            )
        )
        entry["black_code"] = low
    return entry


def gen_night_sky(spec: NightSkySpec, geom: Geometry) -> Tuple[Frame, Dict[str, Any]]:
    """Night-sky pattern: exactly round(p/100.W.H) peak pixels, drawn without replacement.

    @param spec: pattern parameters
    @type spec: NightSkySpec
    @param geom: frame geometry
    @type geom: Geometry
    @return: frame and its manifest entry
    @rtype: Tuple[Frame, Dict[str, Any]]

    """
    frame = _blank(spec, geom)
    count = int(round_half_away(spec.percent / 100 * geom.pixels))
    positions = Generator(spec.seed, "night-sky").sample(geom.pixels, count)
    frame.luma.reshape(-1)[positions] = spec.peak
    return _signalled(frame), _entry(
        spec, frame, percent=spec.percent, peak_code=spec.peak, peak_pixels=count
    )


def gen_white_window(spec: WhiteWindowSpec, geom: Geometry) -> Tuple[Frame, Dict[str, Any]]:
    """White window pattern.

    @param spec: pattern parameters
    @type spec: WhiteWindowSpec
    @param geom: frame geometry
    @type geom: Geometry
    @return: frame and its manifest entry
    @rtype: Tuple[Frame, Dict[str, Any]]

    """
    frame = _blank(spec, geom)
    xpos, ypos, width, height = window_region(geom, spec.area_percent)
    frame.luma[ypos : ypos + height, xpos : xpos + width] = spec.peak
    return _signalled(frame), _entry(
        spec,
        frame,
        area_percent=spec.area_percent,
        region=[xpos, ypos, width, height],
        peak_code=spec.peak,
        peak_pixels=width * height,
    )


def gen_grey_ramp(spec: GreyRampSpec, geom: Geometry) -> Tuple[Frame, Dict[str, Any]]:
    """Grey ramp pattern.

    Band i of n spans [floor(i.w/n), floor((i+1).w/n)) along the progression axis of the window,
    at code low + round(i.(high-low)/(n-1)).

    @param spec: pattern parameters
    @type spec: GreyRampSpec
    @param geom: frame geometry
    @type geom: Geometry
    @return: frame and its manifest entry
    @rtype: Tuple[Frame, Dict[str, Any]]
    @raise ParameterError: window too small to hold every band

    """
    frame = _blank(spec, geom)
    xpos, ypos, width, height = window_region(geom, spec.window_percent)
    span = width if spec.orientation == "horizontal" else height
    if span < spec.levels:
        raise ParameterError(f"{spec.levels} bands do not fit in a {span} pixels wide window")
    band = (np.arange(span) * spec.levels) // span
    codes = spec.code(band).astype(np.uint16)
    region = frame.luma[ypos : ypos + height, xpos : xpos + width]
    if spec.orientation == "horizontal":
        region[:, :] = codes[np.newaxis, :]
    else:
        region[:, :] = codes[:, np.newaxis]
    return _signalled(frame), _entry(
        spec,
        frame,
        levels=spec.levels,
        region=[xpos, ypos, width, height],
        low_code=int(codes[0]),
        high_code=int(codes[-1]),
        band_width=span / spec.levels,
    )


def gen_flat(spec: FlatFieldSpec, geom: Geometry) -> Tuple[Frame, Dict[str, Any]]:
    """Constant frame.

    Achromatic hex colours map to luma codes by bit shift in full range (#555555 gives 85 at 8
    bits, 340 at 10 bits); other colours go through the BT.2020 Y'CbCr matrix.

    @param spec: pattern parameters
    @type spec: FlatFieldSpec
    @param geom: frame geometry
    @type geom: Geometry
    @return: frame and its manifest entry
    @rtype: Tuple[Frame, Dict[str, Any]]

    """
    if isvalid(spec.code):
        frame = _blank(spec, geom, int(spec.code))
        signal = float(dequantize(int(spec.code), spec.bit_depth, spec.signal_range))
    else:
        rgb8 = spec.rgb8()
        signal = rgb8[1] / 255
        if rgb8[0] == rgb8[1] == rgb8[2]:
            if spec.signal_range == "full":
                code = rgb8[0] << (spec.bit_depth - 8)
            else:
                code = int(quantize(signal, spec.bit_depth, "narrow"))
            frame = _blank(spec, geom, code)
        else:
            ycc = rgb_to_ycbcr(np.array(rgb8) / 255, "bt2020")
            signal = float(ycc[0])
            frame = _blank(spec, geom, int(quantize(ycc[0], spec.bit_depth, spec.signal_range)))
            for i in (1, 2):
                frame.planes[i][:] = quantize(ycc[i], spec.bit_depth, spec.signal_range, "chroma")
    nominal = float(pq_eotf(min(max(signal, 0.0), 1.0)))
    return _signalled(frame), _entry(
        spec, frame, code=int(frame.luma[0, 0]), nominal_nits=nominal
    )


def add_noise(frame: Frame, sigma: float, seed: int = 0) -> Frame:
    """Add rounded gaussian noise in the code domain, clamped to the legal range.

    Every plane receives its own draws, in plane order, from the 'noise' stream of 'seed'.

    @param frame: input frame
    @type frame: Frame
    @param sigma: standard deviation (code steps)
    @type sigma: float
    @param seed: random seed (Default value = 0)
    @type seed: int
    @return: new frame
    @rtype: Frame

    """
    if sigma < 0:
        raise ParameterError("noise sigma must be positive")
    if sigma == 0:
        return frame.derive(planes=[plane.copy() for plane in frame.planes])
    gen = Generator(seed, "noise")
    planes = []
    for index, plane in enumerate(frame.planes):
        if frame.colour == "ycbcr" and index > 0:
            low, high = chroma_limits(frame.bit_depth, frame.signal_range)
        else:
            low, high = luma_limits(frame.bit_depth, frame.signal_range)
        noise = round_half_away(gen.normal(plane.size) * sigma).reshape(plane.shape)
        planes.append(np.clip(plane.astype(np.int64) + noise.astype(np.int64), low, high))
    return frame.derive(planes=planes)


def render(spec: PatternSpec, geom: Geometry) -> Tuple[Frame, Dict[str, Any]]:
    """Render any pattern specification.

    @return: frame and its manifest entry
    @rtype: Tuple[Frame, Dict[str, Any]]
    """
    if isinstance(spec, NoiseOverlaySpec):
        frame, entry = render(spec.base_spec(), geom)
        entry.update(label=spec.name, noise_sigma=spec.sigma, seed=spec.seed)
        return _signalled(add_noise(frame, spec.sigma, spec.seed)), entry
    generator = {
        NightSkySpec: gen_night_sky,
        WhiteWindowSpec: gen_white_window,
        GreyRampSpec: gen_grey_ramp,
        FlatFieldSpec: gen_flat,
    }[type(spec)]
    LOGGER.debug(f"Rendering {spec.name} at {geom.width}x{geom.height}")
    return generator(spec, geom)  # type: ignore


def recount(frame: Frame, entry: Dict[str, Any]) -> int:
    """Count the peak pixels of a frame, to be checked against its manifest entry."""
    return int(np.count_nonzero(frame.luma == entry["peak_code"]))


def pattern_manifest(
    spec: PatternSpec, geom: Geometry, entries: List[Dict[str, Any]], signalling: HdrSignalling
) -> PatternManifest:
    """Manifest of rendered pattern frames."""
    return PatternManifest(
        spec.kind,
        spec.todict(),
        spec.seed,
        geom,
        spec.bit_depth,
        spec.signal_range,
        spec.subsampling,
        signalling,
        entries,
    )


def generate(spec: PatternSpec, geom: Geometry) -> Tuple[List[Frame], PatternManifest]:
    """Render geom.frame_count identical frames of a pattern, with their manifest."""
    frame, entry = render(spec, geom)
    return [frame] * geom.frame_count, pattern_manifest(spec, geom, [entry], frame.signalling)


# Playlists


@dataclass
class PlaylistEntry(Readerclass):
    """One pattern shown for a given duration."""

    pattern: Dict[str, Any] = field(default_factory=dict)
    """pattern parameters, with their 'kind'"""
    duration: float = 1.0
    """display duration (s)"""

    def check(self) -> None:
        if self.duration <= 0:
            self.fail("duration", "must be positive")

    @property
    def spec(self) -> PatternSpec:
        """Pattern specification."""
        return make_spec(self.pattern)


@dataclass
class Playlist(Readerclass):
    """Ordered patterns with durations."""

    _schema: ClassVar[str] = "hdrconform.playlist"

    name: str = ""
    """playlist name (sweep kind)"""
    geometry: Geometry = field(default_factory=Geometry)
    """frame geometry"""
    entries: List[PlaylistEntry] = field(default_factory=list)
    """entries in display order"""

    def check(self) -> None:
        if not self.entries:
            self.fail("entries", "a playlist holds at least one entry")

    @property
    def duration(self) -> float:
        """Total duration (s)."""
        return sum(entry.duration for entry in self.entries)

    def frames(self) -> Iterator[Tuple[PlaylistEntry, Frame, Dict[str, Any]]]:
        """Render entries one at a time."""
        for entry in self.entries:
            frame, info = render(entry.spec, self.geometry)
            info["duration"] = entry.duration
            yield entry, frame, info

    def manifest(self) -> PatternManifest:
        """Manifest describing the playlist entries (without rendering)."""
        first = self.entries[0].spec
        return PatternManifest(
            f"playlist:{self.name}",
            self.asdict(),
            first.seed,
            self.geometry,
            first.bit_depth,
            first.signal_range,
            first.subsampling,
            HdrSignalling.hdr10(full_range=first.signal_range == "full"),
            [
                {"label": entry.spec.name, "kind": entry.spec.kind, "duration": entry.duration}
                for entry in self.entries
            ],
        )


SWEEPS = ("night-sky", "window", "ebu", "sustained", "eotf")
"""playlist kinds"""


def build_playlist(
    sweep: str,
    geom: Geometry,
    values: Optional[Sequence[float]] = None,
    duration: Optional[float] = None,
    gap: float = 0.0,
    seed: int = 0,
    options: Optional[Dict[str, Any]] = None,
) -> Tuple[Playlist, PatternManifest]:
    """Build a sweep playlist.

    Sweeps:
      - 'night-sky': night-sky patterns at p in 'values' (default L{NIGHT_SKY_PERCENTS})
      - 'window': white windows at S in 'values' (default L{WINDOW_SIZES})
      - 'ebu': white windows at the legacy sizes L{EBU_WINDOW_SIZES}
      - 'sustained': a single 1% window (or values[0]) held for 'duration' (default 600 s)
      - 'eotf': 10% windows at the PQ codes of luminances in 'values' (default L{EOTF_LEVELS})

    @param sweep: sweep kind
    @type sweep: str
    @param geom: frame geometry
    @type geom: Geometry
    @param values: swept values (Default value = None: sweep default)
    @param duration: duration of each entry (Default value = None: 1 s, 600 s when sustained)
    @param gap: if positive, duration of black frames inserted between entries (Default value = 0)
    @type gap: float
    @param seed: random seed of night-sky patterns (Default value = 0)
    @type seed: int
    @param options: other pattern parameters (bit_depth, signal_range, peak_nits...)
    @return: playlist, manifest
    @rtype: Tuple[Playlist, PatternManifest]
    @raise ParameterError: unknown sweep or empty value set

    """
    options = dict(options or {})
    if sweep not in SWEEPS:
        raise ParameterError(f"unknown sweep '{sweep}' (known: {', '.join(SWEEPS)})")
    defaults = {
        "night-sky": NIGHT_SKY_PERCENTS,
        "window": WINDOW_SIZES,
        "ebu": EBU_WINDOW_SIZES,
        "sustained": (1.0,),
        "eotf": EOTF_LEVELS,
    }
    values = defaults[sweep] if values is None else list(values)
    if len(values) == 0:
        raise ParameterError(f"empty {sweep} sweep")
    if duration is None:
        duration = SUSTAINED_DURATION if sweep == "sustained" else 1.0
    patterns: List[Dict[str, Any]] = []
    for val in values:
        if sweep == "night-sky":
            patterns.append({"kind": "night-sky", "percent": val, "seed": seed, **options})
        elif sweep == "eotf":
            patterns.append({"kind": "window", "area_percent": 10.0, "peak_nits": val, **options})
        else:
            patterns.append({"kind": "window", "area_percent": val, **options})
    entries = []
    for index, pattern in enumerate(patterns):
        if gap > 0 and index > 0:
            black: Dict[str, Any] = {"kind": "flat", "signal_range": "narrow"}
            black.update(_format_options(options))
            black["code"] = luma_limits(black.get("bit_depth", 10), black["signal_range"])[0]
            entries.append(PlaylistEntry.readdict({"pattern": black, "duration": gap}))
        entries.append(PlaylistEntry.readdict({"pattern": pattern, "duration": duration}))
    playlist = Playlist.readdict({"name": sweep, "geometry": geom, "entries": entries})
    LOGGER.info(f"Built {sweep} playlist: {len(entries)} entries, {playlist.duration:g} s")
    return playlist, playlist.manifest()


def _format_options(options: Dict[str, Any]) -> Dict[str, Any]:
    return {
        key: options[key] for key in ("bit_depth", "signal_range", "subsampling") if key in options
    }


def gen_pq_steps(
    levels: Sequence[float], geom: Geometry, window_percent: float = 10.0, **options: Any
) -> Tuple[List[Frame], PatternManifest]:
    """Windows at the PQ codes of a list of luminances, for EOTF tracking measurements.

    @param levels: luminances (nits)
    @param geom: frame geometry
    @type geom: Geometry
    @param window_percent: window size (Default value = 10.0)
    @type window_percent: float
    @return: one frame per level, manifest
    @rtype: Tuple[List[Frame], PatternManifest]

    """
    if len(levels) == 0:
        raise ParameterError("no PQ step level")
    frames, entries = [], []
    for nits in levels:
        spec = make_spec(
            {"kind": "window", "area_percent": window_percent, "peak_nits": nits, **options}
        )
        frame, entry = render(spec, geom)
        entry["target_nits"] = nits
        frames.append(frame)
        entries.append(entry)
    manifest = pattern_manifest(spec, geom, entries, frames[0].signalling)
    manifest.set_param(kind="pq-steps")
    return frames, manifest
