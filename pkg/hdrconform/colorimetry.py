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

"""Colorimetry: PQ transfer function, quantization, colour matrices and gamut containment.

All transfer and matrix computations are done in double precision on numpy arrays (or python
floats, returned as such). Quantization rounds half away from zero.

Arrays holding colour triples carry the three components on their last axis.

"""

from dataclasses import dataclass
from typing import Tuple, Dict, Union, Optional, List

import numpy as np

from hdrconform.ends import DomainError, DegenerateInput, ParameterError, UnsupportedSignal

Real = Union[float, np.ndarray]
"""scalar or array argument"""

# SMPTE ST 2084 constants
PQ_M1 = 2610 / 16384
PQ_M2 = 2523 / 4096 * 128
PQ_C1 = 3424 / 4096
PQ_C2 = 2413 / 4096 * 32
PQ_C3 = 2392 / 4096 * 32
PQ_PEAK = 10000.0
"""PQ absolute peak luminance (nits)"""

BIT_DEPTHS = (8, 10, 12, 16)
"""supported container bit depths"""
RANGES = ("narrow", "full")
"""signal ranges"""


def _back(arr: np.ndarray, like: Real) -> Real:
    """Return 'arr' as python float if 'like' was a scalar."""
    if np.ndim(like) == 0 and not isinstance(like, np.ndarray):
        return float(arr)
    return arr


def _check_domain(arr: np.ndarray, low: float, high: float, what: str, clamp: bool) -> np.ndarray:
    if clamp:
        return np.clip(arr, low, high)
    if np.isnan(arr).any() or (arr < low).any() or (arr > high).any():
        bad = arr[np.isnan(arr) | (arr < low) | (arr > high)].flat[0]
        raise DomainError(f"{what} {bad} outside [{low}, {high}]")
    return arr


class TransferCode(float):
    """Normalized non-linear PQ signal E' in [0, 1]."""

    def __new__(cls, value: float, clamp: bool = False) -> "TransferCode":
        """Build a transfer code, clamping or rejecting out-of-range values.

        @raise DomainError: if value is out of [0,1] and clamp is False
        """
        if clamp:
            value = min(max(value, 0.0), 1.0)
        elif not 0.0 <= value <= 1.0:
            raise DomainError(f"transfer code {value} outside [0, 1]")
        return super().__new__(cls, value)


class Luminance(float):
    """Luminance in nits (cd/m²), non-negative."""

    def __new__(cls, nits: float) -> "Luminance":
        if not nits >= 0.0:
            raise DomainError(f"luminance {nits} is negative")
        return super().__new__(cls, nits)

    @property
    def pq_representable(self) -> bool:
        """True if the luminance can be coded in PQ."""
        return self <= PQ_PEAK


@dataclass(frozen=True)
class CodeValue:
    """Integer sample code at a given bit depth and range."""

    code: int
    bit_depth: int = 10
    signal_range: str = "narrow"

    def __post_init__(self) -> None:
        if self.bit_depth not in BIT_DEPTHS:
            raise ParameterError(f"unsupported bit depth {self.bit_depth}")
        if self.signal_range not in RANGES:
            raise ParameterError(f"unknown signal range '{self.signal_range}'")
        if not 0 <= self.code <= 2 ** self.bit_depth - 1:
            raise DomainError(f"code {self.code} outside {self.bit_depth}-bit container")

    @property
    def legal(self) -> bool:
        """True if the code lies within the luma range of its signal range."""
        low, high = luma_limits(self.bit_depth, self.signal_range)
        return low <= self.code <= high

    @property
    def signal(self) -> float:
        """Normalized luma signal coded by this value."""
        return float(dequantize(self.code, self.bit_depth, self.signal_range))

    @property
    def nits(self) -> float:
        """PQ nominal luminance of this code (signal clamped to [0,1])."""
        return float(pq_eotf(self.signal, clamp=True))


# PQ transfer


def pq_eotf(e: Real, clamp: bool = False) -> Real:
    """PQ EOTF: normalized non-linear signal to luminance.

    @param e: signal(s) in [0,1]
    @param clamp: clamp out-of-range input instead of raising (Default value = False)
    @type clamp: bool
    @return: luminance (nits)
    @raise DomainError: input out of [0,1] and clamp is False

    """
    arr = _check_domain(np.asarray(e, dtype=np.float64), 0.0, 1.0, "PQ signal", clamp)
    epow = arr ** (1 / PQ_M2)
    ratio = np.maximum(epow - PQ_C1, 0.0) / (PQ_C2 - PQ_C3 * epow)
    return _back(PQ_PEAK * ratio ** (1 / PQ_M1), e)


def pq_inv_eotf(y: Real, clamp: bool = False) -> Real:
    """Inverse PQ EOTF: luminance to normalized non-linear signal.

    @param y: luminance(s) in [0,10000] nits
    @param clamp: clamp out-of-range input instead of raising (Default value = False)
    @type clamp: bool
    @return: PQ signal in [0,1]
    @raise DomainError: input out of [0,10000] and clamp is False

    """
    arr = _check_domain(np.asarray(y, dtype=np.float64), 0.0, PQ_PEAK, "luminance", clamp)
    ypow = (arr / PQ_PEAK) ** PQ_M1
    return _back(((PQ_C1 + PQ_C2 * ypow) / (1 + PQ_C3 * ypow)) ** PQ_M2, y)


# Quantization


def round_half_away(x: Real) -> np.ndarray:
    """Round to nearest integer, halves away from zero."""
    arr = np.asarray(x, dtype=np.float64)
    return np.copysign(np.floor(np.abs(arr) + 0.5), arr)


def _check_format(bit_depth: int, signal_range: str, plane: str = "luma") -> None:
    if bit_depth not in BIT_DEPTHS:
        raise ParameterError(f"unsupported bit depth {bit_depth}")
    if signal_range not in RANGES:
        raise ParameterError(f"unknown signal range '{signal_range}'")
    if plane not in ("luma", "chroma"):
        raise ParameterError(f"unknown plane kind '{plane}'")


def quantize(
    e: Real, bit_depth: int = 10, signal_range: str = "narrow", plane: str = "luma"
) -> Union[int, np.ndarray]:
    """Quantize normalized component(s) to integer codes.

    Luma (and R, G, B) components are in [0,1], chroma components in [-0.5,0.5]. Codes are
    only bounded by the container; narrow-range excursions are kept.

    @param e: normalized component(s)
    @param bit_depth: container bit depth (Default value = 10)
    @type bit_depth: int
    @param signal_range: 'narrow' or 'full' (Default value = "narrow")
    @type signal_range: str
    @param plane: 'luma' or 'chroma' (Default value = "luma")
    @type plane: str
    @return: code(s) (python int for scalar input, int64 array else)

    """
    _check_format(bit_depth, signal_range, plane)
    arr = np.asarray(e, dtype=np.float64)
    if signal_range == "narrow":
        scale = 2 ** (bit_depth - 8)
        if plane == "luma":
            val = (219 * arr + 16) * scale
        else:
            val = (224 * arr + 128) * scale
    else:
        val = arr * (2 ** bit_depth - 1)
        if plane == "chroma":
            val = val + 2 ** (bit_depth - 1)
    codes = np.clip(round_half_away(val), 0, 2 ** bit_depth - 1).astype(np.int64)
    if np.ndim(e) == 0 and not isinstance(e, np.ndarray):
        return int(codes)
    return codes


def dequantize(
    code: Union[int, np.ndarray],
    bit_depth: int = 10,
    signal_range: str = "narrow",
    plane: str = "luma",
) -> Real:
    """Convert integer code(s) back to normalized component(s) (inverse of L{quantize}).

    @param code: code(s)
    @param bit_depth: container bit depth (Default value = 10)
    @type bit_depth: int
    @param signal_range: 'narrow' or 'full' (Default value = "narrow")
    @type signal_range: str
    @param plane: 'luma' or 'chroma' (Default value = "luma")
    @type plane: str
    @return: normalized component(s)

    """
    _check_format(bit_depth, signal_range, plane)
    arr = np.asarray(code, dtype=np.float64)
    if signal_range == "narrow":
        arr = arr / 2 ** (bit_depth - 8)
        res = (arr - 16) / 219 if plane == "luma" else (arr - 128) / 224
    else:
        if plane == "chroma":
            arr = arr - 2 ** (bit_depth - 1)
        res = arr / (2 ** bit_depth - 1)
    return _back(res, code)


def luma_limits(bit_depth: int, signal_range: str) -> Tuple[int, int]:
    """Lowest and highest legal luma code.

    @return: (black code, white code)
    @rtype: Tuple[int, int]
    """
    _check_format(bit_depth, signal_range)
    if signal_range == "narrow":
        return 16 * 2 ** (bit_depth - 8), 235 * 2 ** (bit_depth - 8)
    return 0, 2 ** bit_depth - 1


def chroma_limits(bit_depth: int, signal_range: str) -> Tuple[int, int]:
    """Lowest and highest legal chroma code."""
    _check_format(bit_depth, signal_range)
    if signal_range == "narrow":
        return 16 * 2 ** (bit_depth - 8), 240 * 2 ** (bit_depth - 8)
    return 0, 2 ** bit_depth - 1


# Y'CbCr matrices

MATRICES: Dict[str, Tuple[float, float]] = {"bt709": (0.2126, 0.0722), "bt2020": (0.2627, 0.0593)}
"""luma coefficients (Kr, Kb) of the supported matrices"""
MATRIX_CODES: Dict[int, str] = {1: "bt709", 9: "bt2020"}
"""matrix coefficients code points (ITU-T H.273) of the supported matrices"""


def matrix_name(matrix: Union[str, int]) -> str:
    """Normalize a matrix given by name or H.273 code.

    @raise UnsupportedSignal: unknown matrix
    """
    if isinstance(matrix, (int, np.integer)):
        if int(matrix) not in MATRIX_CODES:
            raise UnsupportedSignal(f"matrix coefficients {matrix} not supported")
        return MATRIX_CODES[int(matrix)]
    name = matrix.lower().replace(".", "").replace("-", "").replace("ncl", "")
    if name not in MATRICES:
        raise UnsupportedSignal(f"matrix '{matrix}' not supported")
    return name


def rgb_to_ycbcr(rgb: np.ndarray, matrix: Union[str, int] = "bt2020") -> np.ndarray:
    """Convert non-linear R'G'B' to Y'CbCr (non-constant luminance).

    @param rgb: array (..., 3) of components in [0,1]
    @param matrix: 'bt709' or 'bt2020' (or H.273 code) (Default value = "bt2020")
    @return: array (..., 3) of Y' in [0,1], Cb and Cr in [-0.5,0.5]
    @rtype: np.ndarray

    """
    kr, kb = MATRICES[matrix_name(matrix)]
    rgb = np.asarray(rgb, dtype=np.float64)
    red, green, blue = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    luma = kr * red + (1 - kr - kb) * green + kb * blue
    return np.stack(
        [luma, (blue - luma) / (2 * (1 - kb)), (red - luma) / (2 * (1 - kr))], axis=-1
    )


def ycbcr_to_rgb(ycc: np.ndarray, matrix: Union[str, int] = "bt2020") -> np.ndarray:
    """Convert Y'CbCr to non-linear R'G'B' (inverse of L{rgb_to_ycbcr}).

    @param ycc: array (..., 3) of Y', Cb, Cr
    @param matrix: 'bt709' or 'bt2020' (or H.273 code) (Default value = "bt2020")
    @return: array (..., 3) of R', G', B'
    @rtype: np.ndarray

    """
    kr, kb = MATRICES[matrix_name(matrix)]
    ycc = np.asarray(ycc, dtype=np.float64)
    luma, c_b, c_r = ycc[..., 0], ycc[..., 1], ycc[..., 2]
    red = luma + 2 * (1 - kr) * c_r
    blue = luma + 2 * (1 - kb) * c_b
    green = (luma - kr * red - kb * blue) / (1 - kr - kb)
    return np.stack([red, green, blue], axis=-1)


# Primaries and gamut

XY = Tuple[float, float]


@dataclass(frozen=True)
class PrimariesSet:
    """CIE 1931 xy chromaticities of a RGB colour space."""

    name: str
    red: XY
    green: XY
    blue: XY
    white: XY = (0.3127, 0.3290)
    code: int = 2
    """colour primaries code point (ITU-T H.273, 2 when unspecified)"""

    def __post_init__(self) -> None:
        if gamut_area(self) <= 1e-9:
            raise DegenerateInput(f"primaries {self.name} form a degenerate triangle")
        if not 0 < self.white[1] <= 1:
            raise DegenerateInput(f"white point y of {self.name} must lie in (0,1]")

    @property
    def vertices(self) -> np.ndarray:
        """(3,2) array of the primaries chromaticities."""
        return np.array([self.red, self.green, self.blue], dtype=np.float64)

    @property
    def to_xyz(self) -> np.ndarray:
        """RGB to XYZ matrix."""
        return primaries_matrix(self)

    def asdict(self) -> Dict[str, object]:
        """Plain dictionary of the primaries."""
        return {
            "name": self.name,
            "red": list(self.red),
            "green": list(self.green),
            "blue": list(self.blue),
            "white": list(self.white),
            "code": self.code,
        }


def gamut_area(prim: Union[PrimariesSet, np.ndarray]) -> float:
    """Area of the xy triangle (or convex polygon) of a primaries set."""
    pts = prim.vertices if isinstance(prim, PrimariesSet) else np.asarray(prim, dtype=float)
    xcoord, ycoord = pts[:, 0], pts[:, 1]
    cross = np.dot(xcoord, np.roll(ycoord, -1)) - np.dot(ycoord, np.roll(xcoord, -1))
    return float(0.5 * abs(cross))


def primaries_matrix(prim: PrimariesSet) -> np.ndarray:
    """Linear RGB to CIE XYZ matrix, white scaled to Y=1.

    @param prim: primaries set
    @type prim: PrimariesSet
    @return: 3x3 matrix M with XYZ = M @ RGB
    @rtype: np.ndarray
    @raise DegenerateInput: singular primaries matrix

    """
    verts = prim.vertices
    base = np.stack([verts[:, 0] / verts[:, 1], np.ones(3), (1 - verts.sum(axis=1)) / verts[:, 1]])
    xw, yw = prim.white
    white = np.array([xw / yw, 1.0, (1 - xw - yw) / yw])
    try:
        scale = np.linalg.solve(base, white)
    except np.linalg.LinAlgError:
        raise DegenerateInput(f"primaries {prim.name} give a singular matrix")
    return base * scale


def conversion_matrix(source: PrimariesSet, target: PrimariesSet) -> np.ndarray:
    """Linear RGB conversion matrix from 'source' to 'target' primaries."""
    return np.linalg.solve(primaries_matrix(target), primaries_matrix(source))


def rgb_space_convert(
    rgb_linear: np.ndarray, source: PrimariesSet, target: PrimariesSet
) -> np.ndarray:
    """Convert linear-light RGB between primaries sets; out-of-gamut components are kept.

    @param rgb_linear: array (..., 3) of linear components
    @param source: source primaries
    @type source: PrimariesSet
    @param target: target primaries
    @type target: PrimariesSet
    @return: array (..., 3) of linear components in target primaries
    @rtype: np.ndarray

    """
    return np.asarray(rgb_linear, dtype=np.float64) @ conversion_matrix(source, target).T


def rgb_to_xyz(rgb_linear: np.ndarray, prim: PrimariesSet) -> np.ndarray:
    """Linear RGB to XYZ."""
    return np.asarray(rgb_linear, dtype=np.float64) @ primaries_matrix(prim).T


def xyz_to_rgb(xyz: np.ndarray, prim: PrimariesSet) -> np.ndarray:
    """XYZ to linear RGB."""
    return np.asarray(xyz, dtype=np.float64) @ np.linalg.inv(primaries_matrix(prim)).T


def xy_chromaticity(xyz: np.ndarray) -> Tuple[Real, Real]:
    """CIE 1931 chromaticity coordinates of XYZ triple(s).

    @param xyz: array (..., 3)
    @return: (x, y)
    @raise DegenerateInput: a triple sums to zero (or less)

    """
    arr = np.asarray(xyz, dtype=np.float64)
    total = arr.sum(axis=-1)
    if (total <= 0).any():
        raise DegenerateInput("XYZ triple with non-positive sum has no chromaticity")
    xval, yval = arr[..., 0] / total, arr[..., 1] / total
    if arr.ndim == 1:
        return float(xval), float(yval)
    return xval, yval


def point_in_gamut(xy: np.ndarray, prim: PrimariesSet, tolerance: float = 0.0) -> np.ndarray:
    """Test whether xy chromaticities lie inside the primaries triangle.

    @param xy: array (..., 2) of chromaticities
    @param prim: primaries set
    @type prim: PrimariesSet
    @param tolerance: signed-distance slack (xy units) (Default value = 0.0)
    @type tolerance: float
    @return: boolean array (...)
    @rtype: np.ndarray

    """
    pts = np.asarray(xy, dtype=np.float64)
    verts = prim.vertices
    orient = np.sign(_cross(verts[1] - verts[0], verts[2] - verts[0]))
    inside = np.ones(pts.shape[:-1], dtype=bool)
    for i in range(3):
        edge = verts[(i + 1) % 3] - verts[i]
        dist = orient * _cross(edge, pts - verts[i]) / np.hypot(*edge)
        inside &= dist >= -tolerance
    return inside


def _cross(vec_a: np.ndarray, vec_b: np.ndarray) -> np.ndarray:
    return vec_a[..., 0] * vec_b[..., 1] - vec_a[..., 1] * vec_b[..., 0]


def _clip_polygon(subject: List[np.ndarray], clip: np.ndarray) -> List[np.ndarray]:
    """Sutherland-Hodgman clipping of a polygon by a counter-clockwise convex polygon."""
    output = subject
    for i, start in enumerate(clip):
        end = clip[(i + 1) % len(clip)]
        points, output = output, []
        if not points:
            break
        for j, cur in enumerate(points):
            prev = points[j - 1]
            cur_in = _cross(end - start, cur - start) >= 0
            prev_in = _cross(end - start, prev - start) >= 0
            if cur_in != prev_in:
                dprev, dcur = _cross(end - start, prev - start), _cross(end - start, cur - start)
                output.append(prev + (cur - prev) * dprev / (dprev - dcur))
            if cur_in:
                output.append(cur)
    return output


def _ccw(verts: np.ndarray) -> np.ndarray:
    if _cross(verts[1] - verts[0], verts[2] - verts[0]) < 0:
        return verts[::-1]
    return verts


def gamut_coverage(measured: PrimariesSet, target: PrimariesSet) -> float:
    """Fraction of the target xy triangle covered by the measured triangle.

    @param measured: primaries whose coverage is computed
    @type measured: PrimariesSet
    @param target: reference primaries
    @type target: PrimariesSet
    @return: covered area fraction in [0,1]
    @rtype: float

    """
    inter = _clip_polygon(list(_ccw(measured.vertices)), _ccw(target.vertices))
    if len(inter) < 3:
        return 0.0
    return gamut_area(np.array(inter)) / gamut_area(target)


BT709 = PrimariesSet("BT.709", (0.64, 0.33), (0.30, 0.60), (0.15, 0.06), code=1)
BT2020 = PrimariesSet("BT.2020", (0.708, 0.292), (0.170, 0.797), (0.131, 0.046), code=9)
P3D65 = PrimariesSet("DCI-P3-D65", (0.680, 0.320), (0.265, 0.690), (0.150, 0.060), code=12)

PRIMARIES: Dict[str, PrimariesSet] = {
    "bt709": BT709,
    "bt2020": BT2020,
    "p3": P3D65,
    "p3d65": P3D65,
    "dci-p3-d65": P3D65,
}
"""named primaries presets"""


def get_primaries(name: Union[str, int]) -> PrimariesSet:
    """Find a primaries preset by name or H.273 code.

    @raise UnsupportedSignal: unknown primaries
    """
    if isinstance(name, (int, np.integer)):
        for prim in (BT709, BT2020, P3D65):
            if prim.code == name:
                return prim
        raise UnsupportedSignal(f"colour primaries {name} not supported")
    key = name.lower().replace(".", "").replace("_", "-")
    if key not in PRIMARIES:
        raise UnsupportedSignal(f"unknown primaries '{name}'")
    return PRIMARIES[key]


@dataclass
class OutOfGamutMap:
    """Pixels out of a target gamut."""

    target: str
    """target primaries name"""
    mask: np.ndarray
    """boolean (H, W) map of flagged pixels"""
    count: int
    """number of flagged pixels"""
    fraction: float
    """flagged fraction of the frame"""

    def asdict(self) -> Dict[str, object]:
        """Report without the mask."""
        return {"target": self.target, "count": self.count, "fraction": self.fraction}


def gamut_marker(  # type: ignore
    frame, target: PrimariesSet, tolerance: float = 1e-4
) -> OutOfGamutMap:
    """Flag pixels of a BT.2020 PQ frame lying outside the 'target' gamut.

    @param frame: frame with BT.2020 PQ signalling (L{hdrconform.media_io.Frame})
    @param target: target primaries
    @type target: PrimariesSet
    @param tolerance: linear-light tolerance (Default value = 1e-4)
    @type tolerance: float
    @return: out of gamut map
    @rtype: OutOfGamutMap
    @raise UnsupportedSignal: frame not signalled as PQ, or not in a BT.2020 container

    """
    sig = frame.signalling
    if sig.transfer_characteristics != 16:
        raise UnsupportedSignal(
            f"gamut marker needs PQ transfer (16), got {sig.transfer_characteristics}"
        )
    if sig.colour_primaries != BT2020.code:
        raise UnsupportedSignal(
            f"gamut marker needs BT.2020 primaries (9), got {sig.colour_primaries}"
        )
    linear = pq_eotf(frame.rgb_signal(), clamp=True) / PQ_PEAK
    converted = rgb_space_convert(linear, BT2020, target)
    mask = ((converted < -tolerance) | (converted > 1 + tolerance)).any(axis=-1)
    count = int(mask.sum())
    return OutOfGamutMap(target.name, mask, count, count / mask.size)


# 4:2:0 resampling


def downsample_420(plane: np.ndarray) -> np.ndarray:
    """Downsample a full resolution chroma plane to 4:2:0.

    Horizontal [1,2,1]/4 filter at even columns (left-aligned siting, edges replicated), then
    vertical [1,1]/2 average of row pairs.

    @param plane: (H, W) float plane, H and W even
    @return: (H/2, W/2) float plane
    @rtype: np.ndarray

    """
    padded = np.pad(plane, ((0, 0), (1, 1)), mode="edge")
    center = padded[:, 1:-1]
    horiz = (padded[:, 0:-2] + 2 * center + padded[:, 2:]) / 4
    horiz = horiz[:, 0::2]
    return (horiz[0::2, :] + horiz[1::2, :]) / 2


def upsample_420(plane: np.ndarray) -> np.ndarray:
    """Upsample a 4:2:0 chroma plane to full resolution (bilinear, left-aligned siting).

    Horizontally, even columns take the chroma sample and odd columns the mean of their two
    neighbours; vertically, chroma samples sit between row pairs (weights 3/4, 1/4).

    @param plane: (H/2, W/2) float plane
    @return: (H, W) float plane
    @rtype: np.ndarray

    """
    height, width = plane.shape
    padded = np.pad(plane, ((1, 1), (0, 1)), mode="edge")
    horiz = np.empty((height + 2, 2 * width), dtype=np.float64)
    horiz[:, 0::2] = padded[:, :-1]
    horiz[:, 1::2] = (padded[:, :-1] + padded[:, 1:]) / 2
    full = np.empty((2 * height, 2 * width), dtype=np.float64)
    full[0::2, :] = 0.25 * horiz[:-2, :] + 0.75 * horiz[1:-1, :]
    full[1::2, :] = 0.75 * horiz[1:-1, :] + 0.25 * horiz[2:, :]
    return full


def ycbcr_planes_to_rgb(
    planes: List[np.ndarray],
    bit_depth: int,
    signal_range: str,
    matrix: Union[str, int] = "bt2020",
    subsampling: str = "444",
) -> np.ndarray:
    """Non-linear R'G'B' signal of Y'CbCr code planes.

    @return: (H, W, 3) array (unclipped)
    @rtype: np.ndarray
    """
    luma = dequantize(planes[0], bit_depth, signal_range, "luma")
    chroma = [dequantize(plane, bit_depth, signal_range, "chroma") for plane in planes[1:]]
    if subsampling == "420":
        rows, cols = np.shape(luma)
        chroma = [upsample_420(np.asarray(plane))[:rows, :cols] for plane in chroma]
    return ycbcr_to_rgb(np.stack([luma, chroma[0], chroma[1]], axis=-1), matrix)


def convert_rgb444_to_ycbcr420(
    frames,  # type: ignore
    matrix: Union[str, int] = "bt2020",
    bit_depth: int = 10,
    signal_range: str = "narrow",
) -> list:  # type: ignore
    """Convert PQ R'G'B' 4:4:4 frames to Y'CbCr 4:2:0.

    Chroma is computed at full resolution in double precision, filtered by L{downsample_420},
    then quantized; identical input codes always give identical output codes.

    @param frames: sequence of RGB 4:4:4 frames (L{hdrconform.media_io.Frame})
    @param matrix: Y'CbCr matrix (Default value = "bt2020")
    @param bit_depth: output bit depth (Default value = 10)
    @type bit_depth: int
    @param signal_range: output range (Default value = "narrow")
    @type signal_range: str
    @return: list of Y'CbCr 4:2:0 frames
    @raise ParameterError: odd frame dimensions
    @raise UnsupportedSignal: frame not RGB 4:4:4

    """
    name = matrix_name(matrix)
    code = {val: key for key, val in MATRIX_CODES.items()}[name]
    res = []
    for frame in frames:
        if frame.colour != "rgb" or frame.subsampling != "444":
            raise UnsupportedSignal("conversion input must be RGB 4:4:4")
        if frame.width % 2 or frame.height % 2:
            raise ParameterError(
                f"4:2:0 needs even dimensions, got {frame.width}x{frame.height}"
            )
        ycc = rgb_to_ycbcr(frame.rgb_signal(), name)
        planes = [quantize(ycc[..., 0], bit_depth, signal_range, "luma")]
        for i in (1, 2):
            planes.append(quantize(downsample_420(ycc[..., i]), bit_depth, signal_range, "chroma"))
        res.append(
            frame.derive(
                planes=[plane.astype(np.uint16) for plane in planes],
                bit_depth=bit_depth,
                signal_range=signal_range,
                subsampling="420",
                colour="ycbcr",
                matrix_coefficients=code,
            )
        )
    return res


def ycbcr420_to_rgb444(frames, bit_depth: Optional[int] = None) -> list:  # type: ignore
    """Reconstruct full range R'G'B' 4:4:4 frames from Y'CbCr frames (any subsampling).

    @param frames: sequence of Y'CbCr frames
    @param bit_depth: output bit depth (Default value = same as input)
    @type bit_depth: Optional[int]
    @return: list of RGB 4:4:4 full range frames

    """
    res = []
    for frame in frames:
        depth = frame.bit_depth if bit_depth is None else bit_depth
        rgb = np.clip(frame.rgb_signal(), 0.0, 1.0)
        planes = [quantize(rgb[..., i], depth, "full").astype(np.uint16) for i in range(3)]
        res.append(
            frame.derive(
                planes=planes,
                bit_depth=depth,
                signal_range="full",
                subsampling="444",
                colour="rgb",
            )
        )
    return res
