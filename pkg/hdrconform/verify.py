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

"""Conformance checks of signals.

  - L{verify_signalling}: signalling against a L{SignallingPolicy}
  - L{signal_stats}: exact per-plane statistics and legal range violations
  - L{estimate_effective_bitdepth} and L{detect_banding}: bit depth fidelity of ramps
  - L{roundtrip_fidelity}: conversion fidelity between two frames
  - L{verify_capability} and L{check_primaries}: display capability and colour readings

"""

from dataclasses import dataclass, field
from math import log2, log10
from typing import List, Dict, Any, Optional, Tuple, Sequence, Union

import numpy as np

from hdrconform.colorimetry import (
    luma_limits,
    chroma_limits,
    pq_eotf,
    round_half_away,
    gamut_coverage,
    PrimariesSet,
)
from hdrconform.ends import InsufficientSignal, GeometryMismatch, ParameterError
from hdrconform.inputs import SignallingPolicy, AnalysisParam
from hdrconform.inval import isvalid
from hdrconform.logger import LOGGER
from hdrconform.media_io import Frame, HdrSignalling
from hdrconform.report import Report

Region = Tuple[int, int, int, int]
"""rectangle (x, y, width, height) in pixels"""

TRANSFER_NAMES = {1: "BT.709", 14: "BT.2020 10-bit", 15: "BT.2020 12-bit", 16: "PQ", 18: "HLG"}
PRIMARIES_NAMES = {1: "BT.709", 9: "BT.2020", 12: "DCI-P3-D65", 11: "DCI-P3"}
MATRIX_NAMES = {0: "identity", 1: "BT.709", 9: "BT.2020 NCL", 10: "BT.2020 CL"}
IDENTICAL = "identical"
"""PSNR marker of identical signals"""


# Signalling


@dataclass
class Clause:
    """One checked policy clause."""

    name: str
    status: str
    """pass, warn or fail"""
    reason: str = ""


@dataclass
class SignallingReport:
    """Itemized signalling verification."""

    clauses: List[Clause]

    @property
    def passed(self) -> bool:
        """True unless a clause fails."""
        return all(clause.status != "fail" for clause in self.clauses)

    @property
    def violations(self) -> List[Clause]:
        """Failed clauses."""
        return [clause for clause in self.clauses if clause.status == "fail"]

    @property
    def warnings(self) -> List[str]:
        """Reasons of the clauses passing with a warning."""
        return [clause.reason for clause in self.clauses if clause.status == "warn"]

    def report(self) -> Report:
        """Conformance report."""
        violations = self.violations
        summary = (
            "; ".join(clause.reason for clause in violations) if violations else "HDR10 signalling"
        )
        return Report.build(
            "signalling",
            "playback",
            "pass" if self.passed else "fail",
            summary,
            {"clauses": [vars(clause) for clause in self.clauses]},
            self.warnings,
        )


def _code_clause(name: str, found: int, required: int, names: Dict[int, str]) -> Clause:
    label = names.get(required, str(required))
    if not isvalid(found):
        return Clause(name, "fail", f"{name} absent (expected {label})")
    if found != required:
        return Clause(
            name, "fail", f"{name} not {label} (found {found}: {names.get(found, 'other')})"
        )
    return Clause(name, "pass", f"{name} {label}")


def _metadata_clause(name: str, present: bool, mode: str) -> Clause:
    if present:
        return Clause(name, "pass", f"{name} present")
    if mode == "require":
        return Clause(name, "fail", f"{name} metadata absent")
    if mode == "warn":
        return Clause(name, "warn", f"{name} metadata absent")
    return Clause(name, "pass", f"{name} not checked")


def verify_signalling(
    sig: HdrSignalling, bit_depth: int, policy: Optional[SignallingPolicy] = None
) -> SignallingReport:
    """Check a signalling against a policy.

    Every clause passes, warns or fails; the whole fails iff one clause fails.

    @param sig: parsed signalling (possibly absent fields)
    @type sig: HdrSignalling
    @param bit_depth: stream bit depth (absent marker if unknown)
    @type bit_depth: int
    @param policy: policy (Default value = None: HDR10 policy)
    @type policy: Optional[SignallingPolicy]
    @return: itemized report
    @rtype: SignallingReport

    """
    if policy is None:
        policy = SignallingPolicy()
    clauses = [
        _code_clause(
            "transfer characteristics",
            sig.transfer_characteristics,
            policy.transfer,
            TRANSFER_NAMES,
        ),
        _code_clause("colour primaries", sig.colour_primaries, policy.primaries, PRIMARIES_NAMES),
        _code_clause("matrix coefficients", sig.matrix_coefficients, policy.matrix, MATRIX_NAMES),
    ]
    if not isvalid(bit_depth):
        clauses.append(Clause("bit depth", "warn", "bit depth unknown"))
    elif bit_depth < policy.min_bit_depth:
        clauses.append(
            Clause("bit depth", "fail", f"bit depth {bit_depth} below {policy.min_bit_depth}")
        )
    else:
        clauses.append(Clause("bit depth", "pass", f"{bit_depth}-bit"))
    clauses.append(
        _metadata_clause("mastering display", sig.mastering_display is not None, policy.mdcv)
    )
    clauses.append(
        _metadata_clause("content light level", sig.content_light is not None, policy.clli)
    )
    for clause in clauses:
        if clause.status != "pass":
            LOGGER.debug(f"Signalling clause {clause.name}: {clause.status} ({clause.reason})")
    return SignallingReport(clauses)


# Statistics


@dataclass
class PlaneStats:
    """Exact statistics of one plane over all frames."""

    minimum: int
    maximum: int
    total: int
    """sum of samples"""
    count: int
    """number of samples"""
    below: int
    """samples under the legal range"""
    above: int
    """samples over the legal range"""
    histogram: np.ndarray = field(repr=False)
    """sample count of each code"""

    @property
    def mean(self) -> float:
        """Mean code."""
        return self.total / self.count

    @property
    def violations(self) -> int:
        """Samples outside the legal range."""
        return self.below + self.above

    def asdict(self) -> Dict[str, Any]:
        """Plain dictionary (without histogram)."""
        return {
            "min": self.minimum,
            "max": self.maximum,
            "mean": self.mean,
            "below_range": self.below,
            "above_range": self.above,
        }


@dataclass
class SignalStats:
    """Per-plane statistics of a frame sequence."""

    planes: List[PlaneStats]
    names: List[str]
    frames: int

    @property
    def violations(self) -> int:
        """Total number of samples outside the legal range."""
        return sum(plane.violations for plane in self.planes)

    def report(self) -> Report:
        """Conformance report (fails on legal range violations)."""
        return Report.build(
            "stats",
            "playback",
            "fail" if self.violations else "pass",
            f"{self.frames} frames, {self.violations} samples out of the legal range",
            {
                "frames": self.frames,
                **{name: pla.asdict() for name, pla in zip(self.names, self.planes)},
            },
        )


def signal_stats(frames: Sequence[Frame]) -> SignalStats:
    """Exact per-plane statistics of frames.

    Narrow range samples are counted as violations outside [16, 235] (luma, R, G, B) or [16, 240]
    (chroma) scaled to the bit depth; full range frames have no violation.

    @param frames: at least one frame, all of the same format
    @type frames: Sequence[Frame]
    @return: statistics
    @rtype: SignalStats
    @raise InsufficientSignal: no frame

    """
    if len(frames) == 0:
        raise InsufficientSignal("no frame")
    first = frames[0]
    names = ["Y", "Cb", "Cr"] if first.colour == "ycbcr" else ["R", "G", "B"]
    stats: List[PlaneStats] = []
    for index in range(3):
        if first.colour == "ycbcr" and index > 0:
            low, high = chroma_limits(first.bit_depth, first.signal_range)
        else:
            low, high = luma_limits(first.bit_depth, first.signal_range)
        hist = np.zeros(2 ** first.bit_depth, dtype=np.int64)
        for frame in frames:
            if (frame.colour, frame.bit_depth, frame.signal_range) != (
                first.colour,
                first.bit_depth,
                first.signal_range,
            ):
                raise GeometryMismatch("frames of different formats")
            hist += np.bincount(frame.planes[index].ravel(), minlength=hist.size)
        codes = np.nonzero(hist)[0]
        stats.append(
            PlaneStats(
                int(codes[0]),
                int(codes[-1]),
                int(np.dot(hist, np.arange(hist.size, dtype=np.int64))),
                int(hist.sum()),
                int(hist[:low].sum()),
                int(hist[high + 1 :].sum()),
                hist,
            )
        )
    return SignalStats(stats, names, len(frames))


# Bit depth


def _crop(frame: Frame, region: Optional[Region]) -> np.ndarray:
    luma = frame.luma.astype(np.int64)
    if region is None:
        return luma
    xpos, ypos, width, height = region
    positive = min(xpos, ypos) >= 0 and min(width, height) >= 1
    if not positive or xpos + width > frame.width or ypos + height > frame.height:
        raise ParameterError(f"region {region} outside the {frame.width}x{frame.height} frame")
    return luma[ypos : ypos + height, xpos : xpos + width]


def _profile(data: np.ndarray) -> np.ndarray:
    """Rounded median code of each column (codes progress along columns)."""
    return round_half_away(np.median(data, axis=0)).astype(np.int64)


def _step(codes: np.ndarray) -> int:
    distinct = np.unique(codes)
    if distinct.size < 2:
        return 0
    return int(np.gcd.reduce(np.diff(distinct)))


@dataclass
class BitDepthReport:
    """Effective bit depth of a ramp region."""

    bit_depth: int
    """container bit depth"""
    distinct_levels: int
    step_gcd: int
    """gcd of the differences of the distinct codes"""
    effective_bits: float
    """bit_depth - log2(step_gcd)"""
    noise_sigma_estimate: float
    """noise standard deviation estimate (code steps)"""
    denoised_step: int
    """step of the codes of the band medians"""
    confidence: str
    """high, low or noise-masked"""

    @property
    def verdict(self) -> str:
        """'clean chain', '<n>-bit decimation' or 'noise-masked'."""
        if self.confidence == "noise-masked":
            return "noise-masked"
        step = self.step_gcd if self.confidence == "high" else self.denoised_step
        if step <= 1:
            return "clean chain"
        return f"{self.bit_depth - log2(step):g}-bit decimation"

    def report(self) -> Report:
        """Conformance report (decimation fails, noise masking warns)."""
        verdict = self.verdict
        status = {"clean chain": "pass", "noise-masked": "warn"}.get(verdict, "fail")
        warnings = []
        if status == "warn":
            warnings.append(
                f"noise (sigma {self.noise_sigma_estimate:.2f}) "
                f"masks a step of {self.denoised_step}"
            )
        return Report.build("bitdepth", "bit-depth", status, verdict, vars(self), warnings)


def estimate_effective_bitdepth(
    frame: Frame, region: Optional[Region] = None, orientation: str = "horizontal"
) -> BitDepthReport:
    """Estimate the effective bit depth of a ramp region of the luma plane.

    The noise standard deviation is estimated from the first differences along the ramp
    progression within bands, 1.4826.MAD/sqrt(2) (0 if no band spans two columns); the band
    medians give a denoised step. The confidence is 'noise-masked' when the noise reaches half
    the denoised step, 'low' when the raw and denoised steps disagree, 'high' else.

    @param frame: frame holding a ramp
    @type frame: Frame
    @param region: ramp region (Default value = None: whole frame)
    @type region: Optional[Region]
    @param orientation: 'horizontal' if codes progress along rows (Default value = "horizontal")
    @type orientation: str
    @return: bit depth report
    @rtype: BitDepthReport
    @raise InsufficientSignal: less than two distinct codes in the region

    """
    data = _crop(frame, region)
    if orientation == "vertical":
        data = data.T
    distinct = np.unique(data)
    if distinct.size < 2:
        raise InsufficientSignal(f"{distinct.size} distinct code in the ramp region")
    step = _step(data)
    # band edges are where the column medians change
    inband = np.diff(_profile(data)) == 0
    diffs = np.diff(data, axis=1)[:, inband].ravel()
    if diffs.size:
        mad = np.median(np.abs(diffs - np.median(diffs)))
        sigma = float(1.4826 * mad / np.sqrt(2))
    else:
        sigma = 0.0
    denoised = _step(_profile(data)) or step
    if sigma >= 0.5 * denoised:
        confidence = "noise-masked"
    elif step == denoised:
        confidence = "high"
    else:
        confidence = "low"
    res = BitDepthReport(
        frame.bit_depth,
        int(distinct.size),
        step,
        frame.bit_depth - log2(step),
        sigma,
        denoised,
        confidence,
    )
    LOGGER.debug(f"Bit depth estimate: {res}")
    return res


@dataclass
class BandingReport:
    """Bands of a gradient region."""

    band_count: int
    mean_width: float
    edges: List[int]
    """positions where the code changes (first column of each band but the first)"""
    widths: List[int]
    monotone: bool

    @property
    def width_spread(self) -> int:
        """Difference between the widest and narrowest band."""
        return max(self.widths) - min(self.widths)

    def report(self) -> Report:
        """Measurement report."""
        warnings = [] if self.monotone else ["region is not a monotone gradient"]
        return Report.build(
            "banding",
            "bit-depth",
            "info",
            f"{self.band_count} bands, mean width {self.mean_width:.2f} px",
            {
                "band_count": self.band_count,
                "mean_width": self.mean_width,
                "width_spread": self.width_spread,
                "edges": self.edges,
            },
            warnings,
        )


def detect_banding(
    frame: Frame, region: Optional[Region] = None, orientation: str = "horizontal"
) -> BandingReport:
    """Find the bands of a gradient region.

    Bands are found on the median profile along the band axis, so that noise does not
    create spurious edges.

    @param frame: frame
    @type frame: Frame
    @param region: gradient region (Default value = None: whole frame)
    @type region: Optional[Region]
    @param orientation: 'horizontal' if codes progress along rows (Default value = "horizontal")
    @type orientation: str
    @return: banding report
    @rtype: BandingReport

    """
    data = _crop(frame, region)
    if orientation == "vertical":
        data = data.T
    profile = _profile(data)
    steps = np.diff(profile)
    edges = (np.nonzero(steps)[0] + 1).tolist()
    bounds = [0] + edges + [profile.size]
    widths = np.diff(bounds).tolist()
    monotone = bool((steps >= 0).all() or (steps <= 0).all())
    if not monotone:
        LOGGER.warning("Banding analysis of a non monotone region")
    return BandingReport(len(widths), float(np.mean(widths)), edges, widths, monotone)


# Fidelity


@dataclass
class FidelityReport:
    """Per channel fidelity of a reconstruction."""

    psnr: List[Union[float, str]]
    """PSNR (dB) of R', G', B' over [0,1] components, or 'identical'"""
    max_abs_error: List[float]
    """maximal absolute error of normalized components"""
    mean_linear_distance: float
    """mean euclidean distance of linear light RGB (nits)"""
    threshold: float = 60.0
    """PSNR pass threshold (dB)"""

    @property
    def identical(self) -> bool:
        """True if all channels are identical."""
        return all(val == IDENTICAL for val in self.psnr)

    @property
    def passed(self) -> bool:
        """True if every channel reaches the threshold."""
        return all(val == IDENTICAL or val >= self.threshold for val in self.psnr)

    def report(self) -> Report:
        """Conformance report."""
        if self.identical:
            summary = IDENTICAL
        else:
            summary = "PSNR " + ", ".join(
                val if isinstance(val, str) else f"{val:.2f}" for val in self.psnr
            ) + " dB"
        return Report.build(
            "fidelity", "conversions", "pass" if self.passed else "fail", summary, vars(self)
        )


def roundtrip_fidelity(
    reference: Frame, reconstructed: Frame, threshold: float = 60.0
) -> FidelityReport:
    """Compare a reconstructed frame to its reference.

    @param reference: reference frame
    @type reference: Frame
    @param reconstructed: reconstructed frame (any format of the same geometry)
    @type reconstructed: Frame
    @param threshold: PSNR pass threshold (Default value = 60.0)
    @type threshold: float
    @return: fidelity report
    @rtype: FidelityReport
    @raise GeometryMismatch: frames of different sizes

    """
    if (reference.width, reference.height) != (reconstructed.width, reconstructed.height):
        raise GeometryMismatch(
            f"{reference.width}x{reference.height} vs {reconstructed.width}x{reconstructed.height}"
        )
    ref, rec = reference.to_rgb(), reconstructed.to_rgb()
    err = rec - ref
    psnr: List[Union[float, str]] = []
    for chan in range(3):
        mse = float(np.mean(err[..., chan] ** 2))
        psnr.append(IDENTICAL if mse == 0 else 10 * log10(1 / mse))
    distance = np.linalg.norm(pq_eotf(rec) - pq_eotf(ref), axis=-1)
    return FidelityReport(
        psnr,
        [float(val) for val in np.abs(err).reshape(-1, 3).max(axis=0)],
        float(distance.mean()),
        threshold,
    )


# Display capability and colour


def verify_capability(curve: Dict[float, float], param: Optional[AnalysisParam] = None) -> Report:
    """Check that a display reaches the HDR capability luminance at the capability window.

    The luminance at the capability window is interpolated (linearly in window size) from the
    measured window sweep curve.

    @param curve: window size (%) to steady luminance (nits)
    @type curve: Dict[float, float]
    @param param: analysis parameters (Default value = None: defaults)
    @type param: Optional[AnalysisParam]
    @return: conformance report
    @rtype: Report

    """
    param = AnalysisParam() if param is None else param
    if not curve:
        raise InsufficientSignal("empty window sweep curve")
    sizes = np.array(sorted(curve))
    values = np.array([curve[size] for size in sizes])
    level = float(np.interp(param.capability_window, sizes, values))
    passed = level >= param.capability_nits
    return Report.build(
        "capability",
        "displays",
        "pass" if passed else "fail",
        f"{level:.0f} nits at {param.capability_window:g}% window "
        f"({'>=' if passed else '<'} {param.capability_nits:g})",
        {"window": param.capability_window, "luminance": level, "required": param.capability_nits},
    )


@dataclass
class PrimariesCheck:
    """Measured primaries against target primaries."""

    errors: Dict[str, float]
    """xy distance of each measured primary (and white) to its target"""
    coverage: float
    """fraction of the target gamut covered by the measured one"""
    tolerance: float

    @property
    def passed(self) -> bool:
        """True if all primaries lie within tolerance."""
        return all(val <= self.tolerance for val in self.errors.values())

    def report(self) -> Report:
        """Conformance report."""
        worst = max(self.errors, key=self.errors.get)  # type: ignore
        return Report.build(
            "primaries",
            "colour",
            "pass" if self.passed else "fail",
            f"coverage {100 * self.coverage:.1f}%, worst {worst} error {self.errors[worst]:.4f}",
            vars(self),
        )


def check_primaries(
    measured: PrimariesSet, target: PrimariesSet, tolerance: float = 0.005
) -> PrimariesCheck:
    """Compare measured primary chromaticities to a target set.

    @param measured: measured primaries
    @type measured: PrimariesSet
    @param target: target primaries
    @type target: PrimariesSet
    @param tolerance: accepted xy distance (Default value = 0.005)
    @type tolerance: float
    @return: check result
    @rtype: PrimariesCheck

    """
    errors = {
        name: float(np.hypot(*(np.array(getattr(measured, name)) - getattr(target, name))))
        for name in ("red", "green", "blue", "white")
    }
    return PrimariesCheck(errors, gamut_coverage(measured, target), tolerance)
