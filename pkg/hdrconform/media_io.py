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

"""Bit-exact media input/output and container signalling.

It provides:
  - L{Frame}, the planar image all patterns and verifiers operate on, with its
    L{HdrSignalling} (colour codes, mastering display and content light metadata)
  - YUV4MPEG2 reading and writing (L{read_y4m}, L{write_y4m}), including the extended
    'Cxxxp10' colourspace tags and the 'XCOLORRANGE' extension
  - raw planar reading and writing described by a L{RawDescriptor}
  - L{scan_isobmff}, a read-only walk of ISOBMFF (MP4/MOV/HEIF) box trees extracting
    'colr', 'mdcv' and 'clli' boxes
  - sidecar manifests (L{SidecarManifest}) with sha256 digests of the emitted files

Y4M has no field for HDR metadata: signalling of Y4M files lives in their sidecar manifest.

"""

from dataclasses import dataclass, field, replace as dc_replace
from hashlib import sha256
from os import path
from struct import unpack_from
from typing import List, Dict, Any, Tuple, Optional, Iterator, ClassVar, Union

import numpy as np

from hdrconform.colorimetry import (
    BIT_DEPTHS,
    RANGES,
    BT709,
    BT2020,
    P3D65,
    quantize,
    dequantize,
    ycbcr_planes_to_rgb,
)
from hdrconform.ends import (
    ParameterError,
    UnsupportedSignal,
    FileNotFound,
    BadFile,
    ParseError,
    TruncationError,
    StructureError,
    DigestMismatch,
)
from hdrconform.inputs import Readerclass
from hdrconform.inval import invalidint, isvalid
from hdrconform.logger import LOGGER
from hdrconform.outputs import atomic_open, atomic_write

# Signalling


@dataclass
class MasteringDisplay(Readerclass):
    """Mastering display colour volume (SMPTE ST 2086)."""

    _required: ClassVar[Tuple[str, ...]] = ("red", "green", "blue", "white", "max_lum", "min_lum")

    red: List[float] = field(default_factory=lambda: [0.708, 0.292])
    """red primary xy"""
    green: List[float] = field(default_factory=lambda: [0.170, 0.797])
    """green primary xy"""
    blue: List[float] = field(default_factory=lambda: [0.131, 0.046])
    """blue primary xy"""
    white: List[float] = field(default_factory=lambda: [0.3127, 0.3290])
    """white point xy"""
    max_lum: float = 1000.0
    """maximal luminance (nits)"""
    min_lum: float = 0.0001
    """minimal luminance (nits)"""

    def check(self) -> None:
        for key in ("red", "green", "blue", "white"):
            val = getattr(self, key)
            if len(val) != 2 or not all(0.0 <= coord <= 1.0 for coord in val):
                self.fail(key, "chromaticity must be a xy pair in [0,1]")
        if self.min_lum < 0:
            self.fail("min_lum", "must be positive")
        if self.max_lum < self.min_lum:
            self.fail("max_lum", "must not be lower than min_lum")


@dataclass
class ContentLight(Readerclass):
    """Content light level information (CTA-861.3)."""

    _required: ClassVar[Tuple[str, ...]] = ("max_cll", "max_fall")

    max_cll: float = 1000.0
    """maximum content light level (nits)"""
    max_fall: float = 400.0
    """maximum frame-average light level (nits)"""

    def check(self) -> None:
        for key in ("max_cll", "max_fall"):
            if getattr(self, key) < 0:
                self.fail(key, "must be positive")


@dataclass
class HdrSignalling(Readerclass):
    """Colour signalling of a stream; absent fields stay absent."""

    colour_primaries: int = invalidint
    """colour primaries code (ITU-T H.273)"""
    transfer_characteristics: int = invalidint
    """transfer characteristics code"""
    matrix_coefficients: int = invalidint
    """matrix coefficients code"""
    full_range_flag: Optional[bool] = None
    """full range flag"""
    mastering_display: Optional[MasteringDisplay] = None
    """mastering display metadata"""
    content_light: Optional[ContentLight] = None
    """content light level metadata"""
    source: str = ""
    """where the signalling was found (box type, 'y4m', 'manifest', 'generator'...)"""

    @classmethod
    def hdr10(
        cls, full_range: bool = False, max_cll: float = 0.0, max_fall: float = 0.0
    ) -> "HdrSignalling":
        """Signalling of a HDR10 stream (BT.2020 primaries and matrix, PQ transfer).

        Content light metadata is given only when max_cll is positive.

        """
        res = cls(9, 16, 9, full_range, MasteringDisplay(), None, "generator")
        if max_cll > 0:
            res.content_light = ContentLight(max_cll, max_fall)
        return res

    @property
    def colour_present(self) -> bool:
        """True if colour codes were found."""
        return isvalid(self.transfer_characteristics)

    def copy(self, **changes: Any) -> "HdrSignalling":
        """Return an updated copy."""
        new = HdrSignalling.readdict(self.asdict())
        new.set_param(**changes)
        return new


# Frames


SUBSAMPLINGS = ("444", "420")
"""supported chroma subsamplings"""
COLOURS = ("ycbcr", "rgb")
"""supported colour models"""


@dataclass
class Frame:
    """Planar image.

    planes are uint16 arrays: (Y', Cb, Cr) for 'ycbcr' frames (chroma planes halved in both
    directions, rounded up, for 4:2:0), (R', G', B') for 'rgb' frames (always 4:4:4).

    """

    planes: List[np.ndarray]
    bit_depth: int = 10
    subsampling: str = "420"
    signal_range: str = "narrow"
    colour: str = "ycbcr"
    signalling: HdrSignalling = field(default_factory=HdrSignalling.hdr10)

    def __post_init__(self) -> None:
        if self.bit_depth not in BIT_DEPTHS:
            raise ParameterError(f"unsupported bit depth {self.bit_depth}")
        if self.signal_range not in RANGES:
            raise ParameterError(f"unknown signal range '{self.signal_range}'")
        if self.subsampling not in SUBSAMPLINGS or self.colour not in COLOURS:
            raise ParameterError(f"unsupported format {self.colour} {self.subsampling}")
        if self.colour == "rgb" and self.subsampling != "444":
            raise ParameterError("rgb frames must be 4:4:4")
        if len(self.planes) != 3:
            raise ParameterError(f"a frame holds 3 planes, not {len(self.planes)}")
        self.planes = [self._samples(plane, self.bit_depth) for plane in self.planes]
        height, width = self.planes[0].shape
        if width < 1 or height < 1:
            raise ParameterError("empty frame")
        cshape = self.chroma_shape(width, height, self.subsampling)
        for plane in self.planes[1:]:
            if plane.shape != cshape:
                raise ParameterError(
                    f"plane shape {plane.shape} inconsistent with "
                    f"{self.subsampling} {width}x{height}"
                )

    @staticmethod
    def _samples(plane: Any, bit_depth: int) -> np.ndarray:
        """Plane as uint16 codes, checked before the cast.

        @raise ParameterError: negative, fractional or too large sample values
        """
        arr = np.asarray(plane)
        if arr.dtype.kind not in "uif":
            raise ParameterError(f"samples of type {arr.dtype} are not codes")
        if arr.size:
            if arr.dtype.kind == "f" and not np.array_equal(arr, np.floor(arr)):
                raise ParameterError("fractional sample values")
            if arr.min() < 0 or arr.max() >= 2 ** bit_depth:
                raise ParameterError(f"sample value outside the {bit_depth}-bit range")
        return arr.astype(np.uint16)

    @staticmethod
    def chroma_shape(width: int, height: int, subsampling: str) -> Tuple[int, int]:
        """(rows, columns) of chroma planes."""
        if subsampling == "420":
            return (height + 1) // 2, (width + 1) // 2
        return height, width

    @property
    def width(self) -> int:
        """Frame width."""
        return int(self.planes[0].shape[1])

    @property
    def height(self) -> int:
        """Frame height."""
        return int(self.planes[0].shape[0])

    @property
    def luma(self) -> np.ndarray:
        """First plane (Y' or R')."""
        return self.planes[0]

    @property
    def pixel_count(self) -> int:
        """Number of pixels."""
        return self.width * self.height

    @property
    def matrix(self) -> Union[int, str]:
        """Y'CbCr matrix of the frame (BT.2020 if unsignalled)."""
        code = self.signalling.matrix_coefficients
        return int(code) if isvalid(code) else "bt2020"

    def rgb_signal(self) -> np.ndarray:
        """Non-linear normalized R'G'B' signal, (H, W, 3) float array.

        @raise UnsupportedSignal: Y'CbCr frame with an unsupported matrix
        """
        if self.colour == "rgb":
            return np.stack(
                [dequantize(plane, self.bit_depth, self.signal_range) for plane in self.planes],
                axis=-1,
            )
        return ycbcr_planes_to_rgb(
            self.planes, self.bit_depth, self.signal_range, self.matrix, self.subsampling
        )

    @classmethod
    def from_rgb(
        cls,
        rgb: np.ndarray,
        bit_depth: int = 12,
        signal_range: str = "full",
        signalling: Optional[HdrSignalling] = None,
    ) -> "Frame":
        """Quantize a (H, W, 3) R'G'B' signal into a RGB 4:4:4 frame."""
        rgb = np.asarray(rgb, dtype=np.float64)
        planes = [quantize(rgb[..., i], bit_depth, signal_range) for i in range(3)]
        if signalling is None:
            signalling = HdrSignalling.hdr10(full_range=signal_range == "full")
        return cls(planes, bit_depth, "444", signal_range, "rgb", signalling)

    def to_rgb(self) -> np.ndarray:
        """Normalized R'G'B' signal clipped to [0,1]."""
        return np.clip(self.rgb_signal(), 0.0, 1.0)

    def derive(self, **changes: Any) -> "Frame":
        """Return a new frame with some fields changed.

        Frame fields are given by their name; signalling fields (e.g. matrix_coefficients) are
        applied to a copy of the signalling. The full range flag follows signal_range.

        """
        names = HdrSignalling.list_param()
        sigkeys = {key: changes.pop(key) for key in list(changes) if key in names}
        if "signal_range" in changes:
            sigkeys["full_range_flag"] = changes["signal_range"] == "full"
        if sigkeys:
            changes["signalling"] = changes.get("signalling", self.signalling).copy(**sigkeys)
        return dc_replace(self, **changes)

    def same_samples(self, other: "Frame") -> bool:
        """True if both frames are bit-identical (same format, same samples)."""
        return (
            (self.bit_depth, self.subsampling, self.signal_range, self.colour)
            == (other.bit_depth, other.subsampling, other.signal_range, other.colour)
            and all(np.array_equal(pla, plb) for pla, plb in zip(self.planes, other.planes))
        )


# YUV4MPEG2

Y4M_MAGIC = b"YUV4MPEG2"
_Y4M_COLOURSPACES: Dict[str, Tuple[str, int]] = {
    "420jpeg": ("420", 8),
    "420paldv": ("420", 8),
    "420mpeg2": ("420", 8),
    "420": ("420", 8),
    "444": ("444", 8),
    "420p10": ("420", 10),
    "444p10": ("444", 10),
    "420p12": ("420", 12),
    "444p12": ("444", 12),
}
"""Y4M colourspace tags and their (subsampling, bit depth)"""


@dataclass
class Y4mHeader:
    """Stream parameters of a YUV4MPEG2 file."""

    width: int
    height: int
    fps: Tuple[int, int] = (25, 1)
    interlace: str = "p"
    aspect: Tuple[int, int] = (1, 1)
    colourspace: str = "420p10"
    signal_range: str = "narrow"
    extensions: List[str] = field(default_factory=list)
    """other X tags, kept verbatim"""

    @property
    def subsampling(self) -> str:
        """Chroma subsampling."""
        return _Y4M_COLOURSPACES[self.colourspace][0]

    @property
    def bit_depth(self) -> int:
        """Sample bit depth."""
        return _Y4M_COLOURSPACES[self.colourspace][1]

    def tobytes(self) -> bytes:
        """Header line, with final newline."""
        tags = [
            f"W{self.width}",
            f"H{self.height}",
            f"F{self.fps[0]}:{self.fps[1]}",
            f"I{self.interlace}",
            f"A{self.aspect[0]}:{self.aspect[1]}",
            f"C{self.colourspace}",
            f"XCOLORRANGE={'FULL' if self.signal_range == 'full' else 'LIMITED'}",
        ] + self.extensions
        return Y4M_MAGIC + b" " + " ".join(tags).encode("ascii") + b"\n"

    @property
    def frame_bytes(self) -> int:
        """Size of one frame payload."""
        crow, ccol = Frame.chroma_shape(self.width, self.height, self.subsampling)
        samples = self.width * self.height + 2 * crow * ccol
        return samples * (1 if self.bit_depth == 8 else 2)


@dataclass
class Y4mSequence:
    """Frames read from a Y4M file, with their stream header."""

    header: Y4mHeader
    frames: List[Frame]

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, index: int) -> Frame:
        return self.frames[index]


def _ratio(token: str, offset: int) -> Tuple[int, int]:
    try:
        num, den = token.split(":")
        return int(num), int(den)
    except ValueError:
        raise ParseError(f"bad ratio '{token}'", offset)


def _parse_y4m_header(data: bytes) -> Tuple[Y4mHeader, int]:
    """Parse the stream header; return it with the offset of the first frame."""
    if not data.startswith(Y4M_MAGIC + b" "):
        raise ParseError("missing YUV4MPEG2 magic", 0)
    end = data.find(b"\n")
    if end < 0:
        raise TruncationError("unterminated Y4M header", len(data))
    width = height = -1
    fps, interlace, aspect = (25, 1), "p", (1, 1)
    colourspace, signal_range = "420", "narrow"
    extensions: List[str] = []
    offset = len(Y4M_MAGIC) + 1
    for token_b in data[offset:end].split(b" "):
        try:
            token = token_b.decode("ascii")
        except UnicodeDecodeError:
            raise ParseError("non ascii Y4M header", offset)
        if not token:
            raise ParseError("empty Y4M header token", offset)
        tag, value = token[0], token[1:]
        try:
            if tag == "W":
                width = int(value)
            elif tag == "H":
                height = int(value)
            elif tag == "F":
                fps = _ratio(value, offset)
            elif tag == "I":
                interlace = value
            elif tag == "A":
                aspect = _ratio(value, offset)
            elif tag == "C":
                if value not in _Y4M_COLOURSPACES:
                    raise ParseError(f"unsupported colourspace '{value}'", offset)
                colourspace = value
            elif tag == "X":
                if value.startswith("COLORRANGE="):
                    signal_range = "full" if value[11:] == "FULL" else "narrow"
                else:
                    extensions.append(token)
            else:
                raise ParseError(f"unknown Y4M tag '{token}'", offset)
        except ValueError:
            raise ParseError(f"bad Y4M token '{token}'", offset)
        offset += len(token_b) + 1
    if width <= 0 or height <= 0:
        raise ParseError("Y4M header without valid width and height", 0)
    header = Y4mHeader(width, height, fps, interlace, aspect, colourspace, signal_range, extensions)
    return header, end + 1


def _decode_planes(
    data: bytes, offset: int, header: Y4mHeader, dtype: str, shapes: List[Tuple[int, int]]
) -> List[np.ndarray]:
    planes = []
    bps = 1 if header.bit_depth == 8 else 2
    for rows, cols in shapes:
        count = rows * cols
        plane = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
        planes.append(plane.astype(np.uint16).reshape(rows, cols))
        offset += count * bps
    return planes


def read_y4m(filename: str) -> Y4mSequence:
    """Read a YUV4MPEG2 file.

    @param filename: file name
    @type filename: str
    @return: frames and stream header
    @rtype: Y4mSequence
    @raise ParseError: malformed header (with byte offset)
    @raise TruncationError: truncated frame

    """
    try:
        with open(filename, "rb") as infile:
            data = infile.read()
    except FileNotFoundError:
        raise FileNotFound(filename)
    return parse_y4m(data)


def parse_y4m(data: bytes) -> Y4mSequence:
    """Parse YUV4MPEG2 bytes (see L{read_y4m})."""
    header, offset = _parse_y4m_header(data)
    shapes = [(header.height, header.width)] + 2 * [
        Frame.chroma_shape(header.width, header.height, header.subsampling)
    ]
    dtype = "u1" if header.bit_depth == 8 else "<u2"
    signalling = HdrSignalling(full_range_flag=header.signal_range == "full", source="y4m")
    frames = []
    while offset < len(data):
        if not data.startswith(b"FRAME", offset):
            raise ParseError("expected FRAME marker", offset)
        end = data.find(b"\n", offset)
        if end < 0:
            raise TruncationError("unterminated FRAME header", offset)
        start = end + 1
        if start + header.frame_bytes > len(data):
            raise TruncationError(
                f"frame {len(frames)} needs {header.frame_bytes} bytes, "
                f"{len(data) - start} left",
                start,
            )
        planes = _decode_planes(data, start, header, dtype, shapes)
        try:
            frames.append(
                Frame(
                    planes,
                    header.bit_depth,
                    header.subsampling,
                    header.signal_range,
                    "ycbcr",
                    signalling.copy(),
                )
            )
        except ParameterError as err:
            raise ParseError(err.detail, start)
        offset = start + header.frame_bytes
    LOGGER.debug(
        f"Read {len(frames)} Y4M frames {header.width}x{header.height} C{header.colourspace}"
    )
    return Y4mSequence(header, frames)


def y4m_header_for(frame: Frame, fps: Tuple[int, int] = (25, 1)) -> Y4mHeader:
    """Y4M header describing frames like 'frame'.

    @raise UnsupportedSignal: format not expressible in Y4M
    """
    if frame.colour != "ycbcr":
        raise UnsupportedSignal("Y4M only holds Y'CbCr frames")
    if frame.bit_depth not in (8, 10, 12):
        raise UnsupportedSignal(f"Y4M does not hold {frame.bit_depth}-bit samples")
    tag = frame.subsampling if frame.bit_depth == 8 else f"{frame.subsampling}p{frame.bit_depth}"
    if tag == "420":
        tag = "420jpeg"
    return Y4mHeader(
        frame.width, frame.height, fps, colourspace=tag, signal_range=frame.signal_range
    )


def write_y4m(
    frames: Union[List[Frame], Y4mSequence],
    filename: str,
    fps: Tuple[int, int] = (25, 1),
) -> None:
    """Write frames to a YUV4MPEG2 file (atomically).

    @param frames: frames sharing the same format, or a sequence read by L{read_y4m} (its header
        is then written back unchanged)
    @param filename: file name
    @type filename: str
    @param fps: frame rate as a rational (Default value = (25, 1))
    @type fps: Tuple[int, int]
    @raise ParameterError: empty sequence, or frames of different formats

    """
    if isinstance(frames, Y4mSequence):
        header, frames = frames.header, frames.frames
    else:
        if not frames:
            raise ParameterError("no frame to write")
        header = y4m_header_for(frames[0], fps)
    dtype = "u1" if header.bit_depth == 8 else "<u2"
    with atomic_open(filename) as out:
        out.write(header.tobytes())
        for frame in frames:
            if (frame.colour, frame.width, frame.height, frame.signal_range) != (
                "ycbcr",
                header.width,
                header.height,
                header.signal_range,
            ) or (frame.subsampling, frame.bit_depth) != (header.subsampling, header.bit_depth):
                raise ParameterError("all frames of a Y4M file must share the same format")
            out.write(b"FRAME\n")
            for plane in frame.planes:
                out.write(plane.astype(dtype).tobytes())


# Raw planar


@dataclass
class RawDescriptor(Readerclass):
    """Description of a raw planar file (frames of consecutive planes, no header)."""

    _schema: ClassVar[str] = "hdrconform.raw"
    _required: ClassVar[Tuple[str, ...]] = ("width", "height", "bit_depth")

    width: int = 0
    """frame width"""
    height: int = 0
    """frame height"""
    bit_depth: int = 16
    """sample bit depth (1 byte per sample up to 8 bits, 2 bytes else)"""
    planes: List[str] = field(default_factory=lambda: ["R", "G", "B"])
    """plane order: R, G, B or Y, Cb, Cr"""
    subsampling: str = "444"
    """chroma subsampling"""
    endianness: str = "little"
    """byte order of 2-byte samples ('little' or 'big')"""
    signal_range: str = "full"
    """signal range"""

    def check(self) -> None:
        if self.width < 0 or self.height < 0:
            self.fail("width", "dimensions must be positive")
        if self.bit_depth not in BIT_DEPTHS:
            self.fail("bit_depth", "unsupported bit depth")
        if sorted(self.planes) not in (["B", "G", "R"], ["Cb", "Cr", "Y"]):
            self.fail("planes", "planes must be a permutation of R,G,B or Y,Cb,Cr")
        if self.endianness not in ("little", "big"):
            self.fail("endianness", "must be 'little' or 'big'")
        if self.subsampling not in SUBSAMPLINGS:
            self.fail("subsampling", "must be '444' or '420'")
        if self.signal_range not in RANGES:
            self.fail("signal_range", "must be 'narrow' or 'full'")

    @property
    def colour(self) -> str:
        """Colour model of the planes."""
        return "rgb" if "R" in self.planes else "ycbcr"

    @property
    def dtype(self) -> str:
        """numpy dtype of samples."""
        if self.bit_depth <= 8:
            return "u1"
        return "<u2" if self.endianness == "little" else ">u2"

    @property
    def canonical(self) -> List[str]:
        """Frame plane order."""
        return ["R", "G", "B"] if self.colour == "rgb" else ["Y", "Cb", "Cr"]

    def shapes(self) -> Dict[str, Tuple[int, int]]:
        """Shape of each plane."""
        cshape = Frame.chroma_shape(self.width, self.height, self.subsampling)
        return {
            name: (self.height, self.width) if name in ("R", "G", "B", "Y") else cshape
            for name in self.planes
        }

    @property
    def frame_bytes(self) -> int:
        """Size of one frame."""
        size = sum(rows * cols for rows, cols in self.shapes().values())
        return size * (1 if self.bit_depth <= 8 else 2)


def read_raw_planar(filename: str, descriptor: RawDescriptor) -> List[Frame]:
    """Read a raw planar file.

    @param filename: file name
    @type filename: str
    @param descriptor: file layout
    @type descriptor: RawDescriptor
    @return: frames
    @rtype: List[Frame]
    @raise BadFile: file size is not a (non zero) multiple of the descriptor frame size

    """
    try:
        with open(filename, "rb") as infile:
            data = infile.read()
    except FileNotFoundError:
        raise FileNotFound(filename)
    if descriptor.frame_bytes == 0 or len(data) == 0 or len(data) % descriptor.frame_bytes:
        raise BadFile(
            f"{filename}: {len(data)} bytes is not a multiple of the "
            f"{descriptor.frame_bytes} bytes frame size"
        )
    shapes = descriptor.shapes()
    bps = 1 if descriptor.bit_depth <= 8 else 2
    frames = []
    offset = 0
    while offset < len(data):
        planes: Dict[str, np.ndarray] = {}
        for name in descriptor.planes:
            rows, cols = shapes[name]
            plane = np.frombuffer(data, dtype=descriptor.dtype, count=rows * cols, offset=offset)
            planes[name] = plane.astype(np.uint16).reshape(rows, cols)
            offset += rows * cols * bps
        try:
            frames.append(
                Frame(
                    [planes[name] for name in descriptor.canonical],
                    descriptor.bit_depth,
                    descriptor.subsampling,
                    descriptor.signal_range,
                    descriptor.colour,
                    HdrSignalling(full_range_flag=descriptor.signal_range == "full", source="raw"),
                )
            )
        except ParameterError as err:
            raise BadFile(f"{filename}: {err.detail}")
    return frames


def write_raw_planar(frames: List[Frame], filename: str, descriptor: RawDescriptor) -> None:
    """Write frames to a raw planar file (atomically), following the descriptor layout.

    @raise ParameterError: frames inconsistent with the descriptor
    """
    with atomic_open(filename) as out:
        for frame in frames:
            if (frame.width, frame.height, frame.colour, frame.subsampling, frame.bit_depth) != (
                descriptor.width,
                descriptor.height,
                descriptor.colour,
                descriptor.subsampling,
                descriptor.bit_depth,
            ):
                raise ParameterError("frame format differs from the raw descriptor")
            byname = dict(zip(descriptor.canonical, frame.planes))
            for name in descriptor.planes:
                out.write(byname[name].astype(descriptor.dtype).tobytes())


# ISOBMFF

_CONTAINERS = {
    "moov", "trak", "mdia", "minf", "stbl", "dinf", "edts", "udta", "mvex", "moof",
    "traf", "mfra", "iprp", "ipco", "sinf", "schi", "meco", "grpl", "tref",
}
"""plain container boxes"""
_FULLBOX_CONTAINERS = {"meta": 4, "stsd": 8, "iref": 4}
"""containers with a header before their children (version/flags, entry count)"""
_SAMPLE_ENTRIES = {
    "avc1", "avc3", "hvc1", "hev1", "dvh1", "dvhe", "av01", "vp08", "vp09", "mp4v",
    "encv", "apv1", "vvc1", "vvi1", "j2ki", "mjp2",
}
"""visual sample entries (78 bytes before their child boxes)"""
_VISUAL_ENTRY_HEADER = 78
_MAX_DEPTH = 32


@dataclass
class BoxInfo:
    """One box of a ISOBMFF file."""

    type: str
    """four character code"""
    offset: int
    """byte offset of the box header"""
    size: int
    """box size, header included"""
    header_size: int
    """header size (8, 16 for largesize, +16 for uuid)"""
    depth: int
    """nesting level (0 for top level boxes)"""
    path: str
    """slash separated types from the top level"""

    def asdict(self) -> Dict[str, Any]:
        """Plain dictionary."""
        return {
            "type": self.type,
            "offset": self.offset,
            "size": self.size,
            "header_size": self.header_size,
            "depth": self.depth,
            "path": self.path,
        }


@dataclass
class IsobmffScan:
    """Result of an ISOBMFF scan."""

    signalling: HdrSignalling
    boxes: List[BoxInfo]
    file_size: int

    @property
    def top_level_extent(self) -> int:
        """Sum of the sizes of the top level boxes."""
        return sum(box.size for box in self.boxes if box.depth == 0)

    def inventory(self) -> Dict[str, int]:
        """Number of boxes of each type."""
        res: Dict[str, int] = {}
        for box in self.boxes:
            res[box.type] = res.get(box.type, 0) + 1
        return res


class _BoxWalker:
    """Recursive box tree walker collecting signalling boxes."""

    def __init__(self, data: bytes):
        self.data = data
        self.boxes: List[BoxInfo] = []
        self.colr: List[Tuple[int, Dict[str, Any]]] = []
        self.mdcv: List[MasteringDisplay] = []
        self.clli: List[ContentLight] = []

    def walk(self, start: int, end: int, depth: int, parent: str) -> None:
        if depth > _MAX_DEPTH:
            raise StructureError("box nesting too deep", start)
        pos = start
        while pos < end:
            if end - pos < 8:
                raise TruncationError(f"{end - pos} trailing bytes cannot hold a box header", pos)
            size, raw_type = unpack_from(">I4s", self.data, pos)
            btype = raw_type.decode("latin-1")
            header = 8
            if size == 1:
                if end - pos < 16:
                    raise TruncationError("truncated largesize header", pos)
                (size,) = unpack_from(">Q", self.data, pos + 8)
                header = 16
            elif size == 0:
                size = end - pos
            if btype == "uuid":
                header += 16
            if size < header:
                raise StructureError(f"box '{btype}' size {size} smaller than its header", pos)
            if pos + size > end:
                raise StructureError(
                    f"box '{btype}' of size {size} overruns its parent (ends at {end})", pos
                )
            bpath = f"{parent}/{btype}" if parent else btype
            self.boxes.append(BoxInfo(btype, pos, size, header, depth, bpath))
            self.visit(btype, pos + header, pos + size, depth, bpath)
            pos += size

    def visit(self, btype: str, start: int, end: int, depth: int, bpath: str) -> None:
        skip = None
        if btype in _CONTAINERS:
            skip = 0
        elif btype in _FULLBOX_CONTAINERS:
            skip = _FULLBOX_CONTAINERS[btype]
        elif btype in _SAMPLE_ENTRIES and "stsd" in bpath:
            skip = _VISUAL_ENTRY_HEADER
        if skip is not None:
            if end - start < skip:
                raise StructureError(f"'{btype}' too short for its header", start)
            self.walk(start + skip, end, depth + 1, bpath)
        elif btype == "colr":
            self.parse_colr(start, end)
        elif btype == "mdcv":
            self.mdcv.append(self.parse_mdcv(start, end))
        elif btype == "clli":
            self.clli.append(self.parse_clli(start, end))

    def parse_colr(self, start: int, end: int) -> None:
        if end - start < 4:
            raise StructureError("colr box without colour type", start)
        ctype = self.data[start : start + 4].decode("latin-1")
        if ctype == "nclx":
            if end - start < 11:
                raise StructureError("nclx colr box too short", start)
            prim, trc, mat, flags = unpack_from(">HHHB", self.data, start + 4)
            self.colr.append(
                (start, {"colour_primaries": prim, "transfer_characteristics": trc,
                         "matrix_coefficients": mat, "full_range_flag": bool(flags & 0x80),
                         "source": "colr/nclx"})
            )
        elif ctype == "nclc":
            if end - start < 10:
                raise StructureError("nclc colr box too short", start)
            prim, trc, mat = unpack_from(">HHH", self.data, start + 4)
            self.colr.append(
                (start, {"colour_primaries": prim, "transfer_characteristics": trc,
                         "matrix_coefficients": mat, "source": "colr/nclc"})
            )
        else:
            LOGGER.debug(f"colr box of type '{ctype}' (ICC profile) not interpreted")

    def parse_mdcv(self, start: int, end: int) -> MasteringDisplay:
        if end - start < 24:
            raise StructureError("mdcv box too short", start)
        values = unpack_from(">8H2I", self.data, start)
        stored = [(values[2 * i] / 50000, values[2 * i + 1] / 50000) for i in range(3)]
        labelled = label_primaries(stored)
        try:
            return MasteringDisplay.readdict(
                {
                    "red": list(labelled[0]),
                    "green": list(labelled[1]),
                    "blue": list(labelled[2]),
                    "white": [values[6] / 50000, values[7] / 50000],
                    "max_lum": values[8] / 10000,
                    "min_lum": values[9] / 10000,
                }
            )
        except ParameterError as err:
            raise StructureError(f"invalid mdcv content ({err.detail})", start)

    def parse_clli(self, start: int, end: int) -> ContentLight:
        if end - start < 4:
            raise StructureError("clli box too short", start)
        max_cll, max_fall = unpack_from(">HH", self.data, start)
        return ContentLight(float(max_cll), float(max_fall))


def label_primaries(
    stored: List[Tuple[float, float]], tolerance: float = 0.002
) -> List[Tuple[float, float]]:
    """Order mastering display primaries as red, green, blue.

    Each stored chromaticity is matched against the primaries of BT.2020, DCI-P3 and BT.709
    within 'tolerance'; if the three are recognized as distinct red, green and blue they are
    ordered accordingly, else the stored order is assumed to be green, blue, red.

    @param stored: the three xy pairs as stored
    @type stored: List[Tuple[float, float]]
    @param tolerance: matching distance in xy (Default value = 0.002)
    @type tolerance: float
    @return: red, green and blue xy pairs
    @rtype: List[Tuple[float, float]]

    """
    labels: Dict[str, Tuple[float, float]] = {}
    for xy in stored:
        for prim in (BT2020, P3D65, BT709):
            for name in ("red", "green", "blue"):
                ref = getattr(prim, name)
                if np.hypot(xy[0] - ref[0], xy[1] - ref[1]) <= tolerance:
                    labels.setdefault(name, xy)
    if len(labels) == 3 and len(set(labels.values())) == 3:
        return [labels["red"], labels["green"], labels["blue"]]
    return [stored[2], stored[0], stored[1]]


def scan_isobmff(filename: str) -> IsobmffScan:
    """Walk the box tree of an ISOBMFF file and extract its HDR signalling.

    Unknown boxes are skipped and inventoried. Absent boxes give absent signalling fields.
    When several colour boxes are found, the first nclx (else nclc) is used.

    @param filename: file name
    @type filename: str
    @return: signalling and box inventory
    @rtype: IsobmffScan
    @raise StructureError: a box overruns its parent or the file (with byte offset)
    @raise TruncationError: truncated box header

    """
    try:
        with open(filename, "rb") as infile:
            data = infile.read()
    except FileNotFoundError:
        raise FileNotFound(filename)
    return scan_isobmff_bytes(data)


def scan_isobmff_bytes(data: bytes) -> IsobmffScan:
    """Scan ISOBMFF bytes (see L{scan_isobmff})."""
    if len(data) < 8:
        raise TruncationError("file too short for a box", 0)
    walker = _BoxWalker(data)
    walker.walk(0, len(data), 0, "")
    sig = HdrSignalling(source="isobmff")
    if walker.colr:
        colrs = sorted(walker.colr, key=lambda item: item[1]["source"] != "colr/nclx")
        values = colrs[0][1]
        for _, other in colrs[1:]:
            keys = ("colour_primaries", "transfer_characteristics", "matrix_coefficients")
            if any(other[key] != values[key] for key in keys):
                LOGGER.warning(f"Conflicting colour boxes: {values} vs {other}")
        sig.set_param(**values)
    if walker.mdcv:
        sig.set_param(mastering_display=walker.mdcv[0])
    if walker.clli:
        sig.set_param(content_light=walker.clli[0])
    LOGGER.debug(f"Scanned {len(walker.boxes)} boxes")
    return IsobmffScan(sig, walker.boxes, len(data))


def build_box(btype: str, payload: bytes = b"", children: Optional[List[bytes]] = None) -> bytes:
    """Serialize a box (used for fixtures and re-muxing signalling).

    @param btype: four character code
    @type btype: str
    @param payload: box payload before children
    @type payload: bytes
    @param children: serialized child boxes
    @type children: Optional[List[bytes]]
    @return: box bytes
    @rtype: bytes

    """
    body = payload + b"".join(children or [])
    return (8 + len(body)).to_bytes(4, "big") + btype.encode("latin-1") + body


def colr_nclx(sig: HdrSignalling) -> bytes:
    """Serialize a colr/nclx box of the signalling."""
    flags = 0x80 if sig.full_range_flag else 0
    payload = (
        b"nclx"
        + int(sig.colour_primaries).to_bytes(2, "big")
        + int(sig.transfer_characteristics).to_bytes(2, "big")
        + int(sig.matrix_coefficients).to_bytes(2, "big")
        + bytes([flags])
    )
    return build_box("colr", payload)


def mdcv_box(mdcv: MasteringDisplay) -> bytes:
    """Serialize a mdcv box (primaries stored in green, blue, red order)."""
    payload = b""
    for xy in (mdcv.green, mdcv.blue, mdcv.red, mdcv.white):
        payload += b"".join(int(round(coord * 50000)).to_bytes(2, "big") for coord in xy)
    payload += int(round(mdcv.max_lum * 10000)).to_bytes(4, "big")
    payload += int(round(mdcv.min_lum * 10000)).to_bytes(4, "big")
    return build_box("mdcv", payload)


def clli_box(clli: ContentLight) -> bytes:
    """Serialize a clli box."""
    return build_box(
        "clli", int(clli.max_cll).to_bytes(2, "big") + int(clli.max_fall).to_bytes(2, "big")
    )


# Manifests


@dataclass
class Geometry(Readerclass):
    """Frame geometry and timing of a pattern sequence."""

    width: int = 3840
    """frame width (even)"""
    height: int = 2160
    """frame height (even)"""
    fps: List[int] = field(default_factory=lambda: [25, 1])
    """frame rate as numerator, denominator"""
    frame_count: int = 1
    """frames per pattern"""

    def check(self) -> None:
        for key in ("width", "height"):
            val = getattr(self, key)
            if val <= 0 or val % 2:
                self.fail(key, "must be even and positive")
        if self.frame_count < 1:
            self.fail("frame_count", "must be at least 1")
        if len(self.fps) != 2 or min(self.fps) <= 0:
            self.fail("fps", "must be a positive rational [num, den]")

    @property
    def pixels(self) -> int:
        """Pixels per frame."""
        return self.width * self.height

    @classmethod
    def parse(cls, size: str, **kwd: Any) -> "Geometry":
        """Geometry from a 'WxH' string."""
        try:
            width, height = (int(val) for val in size.lower().split("x"))
        except ValueError:
            raise ParameterError(f"bad frame size '{size}' (expected WxH)")
        return cls.readdict({"width": width, "height": height, **kwd})


@dataclass
class PatternManifest(Readerclass):
    """Reproducibility record of generated frames."""

    kind: str = ""
    """pattern kind"""
    spec: Dict[str, Any] = field(default_factory=dict)
    """pattern specification echo"""
    seed: int = 0
    """seed used (0 for deterministic patterns)"""
    geometry: Geometry = field(default_factory=Geometry)
    """frame geometry"""
    bit_depth: int = 10
    """sample bit depth"""
    signal_range: str = "narrow"
    """signal range"""
    subsampling: str = "420"
    """chroma subsampling"""
    signalling: HdrSignalling = field(default_factory=HdrSignalling)
    """colour signalling of the frames"""
    entries: List[Dict[str, Any]] = field(default_factory=list)
    """per frame accounting (label, duration, codes and pixel counts)"""


@dataclass
class SidecarManifest(PatternManifest):
    """Pattern manifest, signalling and digests of the emitted files."""

    _schema: ClassVar[str] = "hdrconform.manifest"
    _required: ClassVar[Tuple[str, ...]] = ("kind", "geometry", "signalling", "files")

    files: Dict[str, str] = field(default_factory=dict)
    """sha256 digests of the emitted files, by file name (relative to the manifest)"""

    @classmethod
    def from_pattern(cls, manifest: PatternManifest) -> "SidecarManifest":
        """Wrap a pattern manifest (no file yet)."""
        return cls.readdict({**manifest.asdict(), "files": {}})

    def add_file(self, filename: str) -> str:
        """Record the digest of a file (under its base name); return the digest."""
        digest = file_digest(filename)
        self.files[path.basename(filename)] = digest
        return digest

    @property
    def digest(self) -> str:
        """sha256 of the manifest json text."""
        return sha256(self.dumps().encode("utf-8")).hexdigest()


def file_digest(filename: str) -> str:
    """sha256 hex digest of a file."""
    hasher = sha256()
    try:
        with open(filename, "rb") as infile:
            for chunk in iter(lambda: infile.read(1 << 20), b""):
                hasher.update(chunk)
    except FileNotFoundError:
        raise FileNotFound(filename)
    return hasher.hexdigest()


def write_manifest(manifest: SidecarManifest, filename: str) -> None:
    """Write a manifest (atomically)."""
    atomic_write(filename, manifest.dumps())


def read_manifest(filename: str) -> SidecarManifest:
    """Read a manifest.

    @raise SchemaError: unknown schema version or missing required field
    """
    return SidecarManifest.readfile(filename)


def verify_manifest(manifest: SidecarManifest, basedir: str = "") -> None:
    """Check every recorded digest against the files.

    @param manifest: manifest
    @type manifest: SidecarManifest
    @param basedir: folder of the files (Default value = "": working directory)
    @type basedir: str
    @raise DigestMismatch: a file differs from its recorded digest

    """
    for name, digest in manifest.files.items():
        actual = file_digest(path.join(basedir, name))
        if actual != digest:
            raise DigestMismatch(f"{name}: expected {digest}, found {actual}")
