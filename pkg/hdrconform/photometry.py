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

"""Analysis of photometer measurement logs.

Measurement logs are CSV files (see L{MeasurementLog}) holding time-stamped luminance samples of
a probe ('white', 'black' or 'full' field), with optional window size (or night-sky percentage),
code level and panel temperature columns. They come from a lab photometer or from
L{hdrconform.panelsim}.

Analyses:
  - L{analyze_sustained}: sustained brightness of a fixed window over time
  - L{analyze_window_sweep}: steady luminance as a function of the window size
  - L{analyze_eotf_tracking}: deviation from the PQ EOTF
  - L{analyze_local_dimming}: black and white probe evolution over night-sky sweeps
  - L{cooloff_recommendation}: wait time before the panel is back under a safe temperature
  - L{analyze_chromaticity}: primaries chromaticities from XYZ readings

"""

from dataclasses import dataclass, field
from io import StringIO
from math import ceil, log
from typing import List, Dict, Any, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit
from scipy.stats import linregress

from hdrconform.colorimetry import (
    pq_eotf,
    dequantize,
    luma_limits,
    xy_chromaticity,
    gamut_coverage,
    PrimariesSet,
    BT709,
    BT2020,
    P3D65,
)
from hdrconform.ends import (
    LogError,
    FileNotFound,
    InsufficientSignal,
    DomainError,
    ParameterError,
    DegenerateInput,
)
from hdrconform.inputs import AnalysisParam
from hdrconform.inval import invalidfloat, isvalid
from hdrconform.logger import LOGGER
from hdrconform.outputs import atomic_write
from hdrconform.report import Report
from hdrconform.verify import check_primaries

COLUMNS = ["t_s", "luminance_nits", "probe", "window_pct", "code_level", "temp_c"]
"""measurement log header"""
PROBES = ("white", "black", "full")
"""probe kinds"""
_FORMATS = {"t_s": "{:.3f}", "luminance_nits": "{:.4f}", "window_pct": "{:g}", "temp_c": "{:.3f}"}


@dataclass
class MeasurementSample:
    """One photometer reading."""

    t: float
    """time (s)"""
    luminance: float
    """luminance (nits)"""
    probe: str = "white"
    """probe kind"""
    window_percent: float = invalidfloat
    """window size or night-sky percentage (%)"""
    code_level: float = invalidfloat
    """displayed code level"""
    temperature: float = invalidfloat
    """panel temperature (°C)"""


class MeasurementLog:
    """Time ordered measurement samples, as a pandas table with the L{COLUMNS} columns."""

    def __init__(self, data: pd.DataFrame, source: str = ""):
        """Wrap a table of samples, checking its content.

        @param data: samples
        @type data: pd.DataFrame
        @param source: file name (for messages)
        @type source: str
        @raise LogError: invalid content

        """
        self.source: str = source
        """file the log was read from"""
        self.data: pd.DataFrame = data.reset_index(drop=True)
        """samples"""
        missing = [col for col in COLUMNS if col not in self.data.columns]
        if missing:
            raise LogError(f"{source}: missing columns {', '.join(missing)}")
        for col in ("t_s", "luminance_nits", "window_pct", "code_level", "temp_c"):
            self.data[col] = self.data[col].astype(np.float64)
        if self.data["t_s"].isna().any() or self.data["luminance_nits"].isna().any():
            raise LogError(f"{source}: time and luminance are required")
        if (self.data["t_s"] < 0).any() or (self.data["luminance_nits"] < 0).any():
            raise LogError(f"{source}: negative time or luminance")
        if (np.diff(self.data["t_s"].to_numpy()) < 0).any():
            raise LogError(f"{source}: non-monotone timestamps")
        bad = ~self.data["probe"].isin(PROBES)
        if bad.any():
            raise LogError(f"{source}: unknown probe '{self.data['probe'][bad].iloc[0]}'")

    def __len__(self) -> int:
        return len(self.data)

    @classmethod
    def from_samples(
        cls, samples: Sequence[MeasurementSample], source: str = ""
    ) -> "MeasurementLog":
        """Build a log from samples."""
        return cls(
            pd.DataFrame(
                [
                    [s.t, s.luminance, s.probe, s.window_percent, s.code_level, s.temperature]
                    for s in samples
                ],
                columns=COLUMNS,
            ),
            source,
        )

    @classmethod
    def read_csv(cls, filename: str) -> "MeasurementLog":
        """Read a CSV measurement log.

        Lines starting with '#' and blank lines are ignored. Errors name the line number.

        @param filename: file name
        @type filename: str
        @return: measurement log
        @rtype: MeasurementLog
        @raise LogError: invalid header, cell or timestamp order

        """
        try:
            with open(filename, encoding="utf-8") as infile:
                text = infile.read()
        except FileNotFoundError:
            raise FileNotFound(filename)
        except UnicodeDecodeError as err:
            raise LogError(f"{filename}: not UTF-8 ({err})")
        return cls.from_text(text, filename)

    @classmethod
    def from_text(cls, text: str, source: str = "") -> "MeasurementLog":
        """Parse CSV text (see L{read_csv})."""
        lines: List[Tuple[int, str]] = [
            (num, line)
            for num, line in enumerate(text.splitlines(), start=1)
            if line.strip() and not line.lstrip().startswith("#")
        ]
        if not lines:
            raise LogError(f"{source}: empty log")
        header_line, header = lines[0]
        if [col.strip() for col in header.split(",")] != COLUMNS:
            raise LogError(f"header must be {','.join(COLUMNS)}", header_line)
        for num, line in lines[1:]:
            if line.count(",") != len(COLUMNS) - 1:
                raise LogError(f"expected {len(COLUMNS)} cells", num)
        numbers = [num for num, _ in lines[1:]]
        table = pd.read_csv(
            StringIO("\n".join(line for _, line in lines)),
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
        data = pd.DataFrame({"probe": table["probe"].str.strip()})
        for col in ("t_s", "luminance_nits", "window_pct", "code_level", "temp_c"):
            raw = table[col].str.strip()
            values = pd.to_numeric(raw.where(raw != "", None), errors="coerce")
            bad = values.isna() & (raw != "")
            if col in ("t_s", "luminance_nits"):
                bad |= raw == ""
            if bad.any():
                index = int(np.argmax(bad.to_numpy()))
                raise LogError(f"invalid {col} '{raw.iloc[index]}'", numbers[index])
            data[col] = values.astype(np.float64)
        for col in ("t_s", "luminance_nits"):
            negative = (data[col] < 0).to_numpy()
            if negative.any():
                raise LogError(f"negative {col}", numbers[int(np.argmax(negative))])
        backwards = np.diff(data["t_s"].to_numpy()) < 0
        if backwards.any():
            raise LogError("non-monotone timestamps", numbers[int(np.argmax(backwards)) + 1])
        unknown = (~data["probe"].isin(PROBES)).to_numpy()
        if unknown.any():
            index = int(np.argmax(unknown))
            raise LogError(f"unknown probe '{data['probe'].iloc[index]}'", numbers[index])
        return cls(data[COLUMNS], source)

    def to_csv(self) -> str:
        """CSV text of the log (fixed number formats, empty cells for absent values)."""
        rows = [",".join(COLUMNS)]
        for rec in self.data.itertuples(index=False):
            cells = []
            for col, val in zip(COLUMNS, rec):
                if col == "probe":
                    cells.append(str(val))
                elif not isvalid(val):
                    cells.append("")
                elif col == "code_level":
                    cells.append(str(int(val)))
                else:
                    cells.append(_FORMATS[col].format(val))
            rows.append(",".join(cells))
        return "\n".join(rows) + "\n"

    def write_csv(self, filename: str) -> None:
        """Write the log as CSV (atomically)."""
        atomic_write(filename, self.to_csv())

    def probe(self, kind: str) -> "MeasurementLog":
        """Samples of one probe kind."""
        return MeasurementLog(self.data[self.data["probe"] == kind], self.source)

    def main_probe(self) -> "MeasurementLog":
        """Samples of the white probe, or of the full field probe if there is no white sample."""
        white = self.probe("white")
        return white if len(white) else self.probe("full")

    @property
    def t(self) -> np.ndarray:
        """Sample times."""
        return self.data["t_s"].to_numpy()

    @property
    def luminance(self) -> np.ndarray:
        """Sample luminances."""
        return self.data["luminance_nits"].to_numpy()


def merge_logs(logs: Sequence[MeasurementLog]) -> MeasurementLog:
    """Chain logs in time: each log is shifted to start where the previous one ended.

    @raise InsufficientSignal: no log
    """
    if not logs:
        raise InsufficientSignal("no measurement log")
    chunks = []
    offset = 0.0
    for log in logs:
        if not len(log):
            continue
        data = log.data.copy()
        data["t_s"] = data["t_s"] - data["t_s"].iloc[0] + offset
        offset = float(data["t_s"].iloc[-1])
        chunks.append(data)
    if not chunks:
        return logs[0]
    source = "+".join(log.source for log in logs)
    return MeasurementLog(pd.concat(chunks, ignore_index=True), source)


def _sorted(log: MeasurementLog) -> pd.DataFrame:
    """Samples ordered by time, then luminance (independent of the order of equal times)."""
    return log.data.sort_values(["t_s", "luminance_nits"], kind="mergesort").reset_index(drop=True)


def _steady(values: np.ndarray) -> float:
    """Median of the last half of a plateau."""
    return float(np.median(values[len(values) // 2 :]))


# Sustained brightness


def time_above(t: np.ndarray, lum: np.ndarray, threshold: float) -> float:
    """Time spent at or above 'threshold', luminance being linear between samples.

    @param t: sample times (sorted)
    @param lum: luminances
    @param threshold: luminance threshold
    @type threshold: float
    @return: seconds
    @rtype: float

    """
    total = 0.0
    for start, end, lum0, lum1 in zip(t[:-1], t[1:], lum[:-1], lum[1:]):
        span = end - start
        high, low = max(lum0, lum1), min(lum0, lum1)
        if low >= threshold:
            total += span
        elif high > threshold:
            total += span * (high - threshold) / (high - low)
    return float(total)


def decay_onset(t: np.ndarray, lum: np.ndarray, fraction: float, hold: float) -> Optional[float]:
    """Earliest time the luminance falls under fraction.(running peak) for at least 'hold' s.

    @return: onset time, None if no decay
    @rtype: Optional[float]

    """
    below = lum < fraction * np.maximum.accumulate(lum)
    index = 0
    while index < len(below):
        if not below[index]:
            index += 1
            continue
        end = index
        while end + 1 < len(below) and below[end + 1]:
            end += 1
        if t[end] - t[index] >= hold:
            return float(t[index])
        index = end + 1
    return None


@dataclass
class SustainedReport:
    """Sustained brightness of a fixed window."""

    peak: float
    """peak luminance (nits)"""
    time_above: Dict[float, float]
    """seconds at or above each threshold (nits)"""
    decay_onset: Optional[float]
    """decay onset (s), None if the luminance never decays"""
    stabilized: float
    """median luminance of the final samples (nits)"""
    temperature_at_peak: Optional[float]
    """temperature of the last sample still at peak (°C)"""
    temperature_correlation: Optional[float]
    """correlation coefficient between luminance and temperature"""
    duration: float
    """log duration (s)"""
    window_percent: Optional[float]
    """window size (%)"""
    curve: pd.DataFrame = field(repr=False, default_factory=pd.DataFrame)
    """t_s, luminance_nits (and temp_c) samples"""

    def report(self) -> Report:
        """Measurement report."""
        onset = "no decay" if self.decay_onset is None else f"decay onset {self.decay_onset:.1f} s"
        above = ", ".join(f">={thr:g}: {sec:.1f} s" for thr, sec in self.time_above.items())
        data = {key: val for key, val in vars(self).items() if key != "curve"}
        return Report.build(
            "sustained",
            "brightness",
            "info",
            f"peak {self.peak:.0f} nits, {onset}, stabilized {self.stabilized:.0f} nits ({above})",
            data,
        )


def analyze_sustained(
    log: MeasurementLog, param: Optional[AnalysisParam] = None
) -> SustainedReport:
    """Analyze a sustained brightness log (white probe, or full field probe).

    @param log: measurement log of a single window size
    @type log: MeasurementLog
    @param param: thresholds and constants (Default value = None: defaults)
    @type param: Optional[AnalysisParam]
    @return: sustained brightness report
    @rtype: SustainedReport
    @raise InsufficientSignal: less than two samples
    @raise ParameterError: several window sizes in the log

    """
    param = AnalysisParam() if param is None else param
    data = _sorted(log.main_probe())
    if len(data) < 2:
        raise InsufficientSignal("sustained analysis needs at least two samples")
    windows = data["window_pct"].dropna().unique()
    if len(windows) > 1:
        raise ParameterError(
            f"sustained analysis needs a single window size, got {sorted(windows)}"
        )
    t = data["t_s"].to_numpy()
    lum = data["luminance_nits"].to_numpy()
    peak = float(lum.max())
    above = {float(thr): time_above(t, lum, thr) for thr in sorted(param.thresholds)}
    onset = decay_onset(t, lum, param.decay_fraction, param.hold)
    last = max(1, ceil(param.stable_fraction * len(lum)))
    stabilized = float(np.median(lum[-last:]))
    temp = data["temp_c"].to_numpy()
    valid = ~np.isnan(temp)
    t_peak = corr = None
    if valid.any():
        at_peak = np.nonzero(valid & (lum >= (1 - param.peak_tolerance) * peak))[0]
        if at_peak.size:
            t_peak = float(temp[at_peak[-1]])
        if valid.sum() > 2 and np.ptp(temp[valid]) > 0 and np.ptp(lum[valid]) > 0:
            corr = float(np.corrcoef(lum[valid], temp[valid])[0, 1])
    LOGGER.info(f"Sustained: peak {peak:.1f}, onset {onset}, stabilized {stabilized:.1f}")
    return SustainedReport(
        peak,
        above,
        onset,
        stabilized,
        t_peak,
        corr,
        float(t[-1] - t[0]),
        float(windows[0]) if len(windows) else None,
        data[["t_s", "luminance_nits", "temp_c"]],
    )


# Window sweep


@dataclass
class WindowSweepReport:
    """Steady luminance against window size."""

    curve: Dict[float, float]
    """window size (%) to steady luminance (nits), by increasing size"""
    peak: float
    """highest steady luminance (nits)"""
    max_window_at: Dict[float, Optional[float]]
    """largest measured window still reaching each level (None if none does)"""
    crossing_at: Dict[float, Optional[float]]
    """window size where the curve crosses each level (linear interpolation)"""
    knee: float
    """largest window before the first decline of the curve (%)"""
    warnings: List[str] = field(default_factory=list)

    def report(self) -> Report:
        """Measurement report."""
        maxw = ", ".join(
            f">={lvl:g}: {'none' if size is None else f'{size:g}%'}"
            for lvl, size in self.max_window_at.items()
        )
        return Report.build(
            "sweep",
            "brightness",
            "warn" if self.warnings else "info",
            f"peak {self.peak:.0f} nits, knee {self.knee:g}% ({maxw})",
            {key: val for key, val in vars(self).items() if key != "warnings"},
            self.warnings,
        )

    def frame(self) -> pd.DataFrame:
        """Curve as a table."""
        return pd.DataFrame(
            {"window_pct": list(self.curve), "luminance_nits": list(self.curve.values())}
        )


def plateaus(data: pd.DataFrame, key: str = "window_pct") -> List[Tuple[float, np.ndarray]]:
    """Split time ordered samples into runs of constant 'key'.

    @return: (key value, luminances) of each run
    @rtype: List[Tuple[float, np.ndarray]]
    """
    keys = data[key].to_numpy()
    lum = data["luminance_nits"].to_numpy()
    runs: List[Tuple[float, np.ndarray]] = []
    start = 0
    for index in range(1, len(keys) + 1):
        if index == len(keys) or keys[index] != keys[start]:
            runs.append((float(keys[start]), lum[start:index]))
            start = index
    return runs


def _per_key(
    data: pd.DataFrame, tolerance: float, what: str
) -> Tuple[Dict[float, float], List[str]]:
    """Steady level of each key value, merging duplicated plateaus."""
    values: Dict[float, List[float]] = {}
    for key, lum in plateaus(data):
        values.setdefault(key, []).append(_steady(lum))
    warnings = []
    for key, levels in values.items():
        if len(levels) > 1 and max(levels) > (1 + tolerance) * min(levels):
            msg = (
                f"inconsistent repeated {what} {key:g}% "
                f"({min(levels):.1f} to {max(levels):.1f} nits)"
            )
            LOGGER.warning(msg)
            warnings.append(msg)
    return {key: float(np.median(values[key])) for key in sorted(values)}, warnings


def analyze_window_sweep(
    log: MeasurementLog, param: Optional[AnalysisParam] = None
) -> WindowSweepReport:
    """Analyze a window size sweep log (white probe, or full field probe).

    Each run of samples at a window size is a plateau whose steady level is the median of its
    last half; repeated sizes are merged by median.

    @param log: measurement log with window sizes
    @type log: MeasurementLog
    @param param: levels and tolerances (Default value = None: defaults)
    @type param: Optional[AnalysisParam]
    @return: window sweep report
    @rtype: WindowSweepReport
    @raise InsufficientSignal: less than four window sizes

    """
    param = AnalysisParam() if param is None else param
    data = _sorted(log.main_probe())
    unsized = data["window_pct"].isna()
    if unsized.any():
        LOGGER.warning(f"{int(unsized.sum())} samples without window size ignored")
        data = data[~unsized]
    curve, warnings = _per_key(data, param.duplicate_tolerance, "window size")
    if len(curve) < 4:
        raise InsufficientSignal(f"window sweep needs at least 4 sizes, got {len(curve)}")
    sizes = np.array(list(curve))
    lum = np.array(list(curve.values()))
    max_window: Dict[float, Optional[float]] = {}
    crossing: Dict[float, Optional[float]] = {}
    for level in sorted(param.levels):
        reached = np.nonzero(lum >= level)[0]
        if reached.size == 0:
            max_window[float(level)] = crossing[float(level)] = None
            continue
        last = int(reached[-1])
        max_window[float(level)] = float(sizes[last])
        if last + 1 < len(sizes):
            frac = (lum[last] - level) / (lum[last] - lum[last + 1])
            crossing[float(level)] = float(sizes[last] + frac * (sizes[last + 1] - sizes[last]))
        else:
            crossing[float(level)] = float(sizes[last])
    knee = float(sizes[-1])
    for index in range(len(lum) - 2):
        if lum[index] > lum[index + 1] > lum[index + 2]:
            knee = float(sizes[index])
            break
    return WindowSweepReport(curve, float(lum.max()), max_window, crossing, knee, warnings)


# EOTF tracking


@dataclass
class EotfReport:
    """Deviation of measured luminances from the PQ EOTF."""

    samples: pd.DataFrame = field(repr=False)
    """code_level, ideal_nits, luminance_nits, deviation (relative) of each sample"""
    max_deviation: float
    """largest absolute relative deviation of in-range samples"""
    mean_deviation: float
    """mean absolute relative deviation of in-range samples"""
    low: Dict[str, float]
    """statistics under the split luminance"""
    high: Dict[str, float]
    """statistics over the split luminance"""
    clip_code: Optional[int]
    """first code from which all samples deviate beyond tolerance (None if none)"""
    clip_nits: Optional[float]
    """ideal luminance of clip_code"""
    tolerance: float
    peak_anchor: float

    @property
    def passed(self) -> bool:
        """True if in-range samples track the EOTF within tolerance."""
        return self.max_deviation <= self.tolerance

    def report(self) -> Report:
        """Conformance report."""
        clip = "" if self.clip_code is None else f", deviates from code {self.clip_code}"
        data = {key: val for key, val in vars(self).items() if key != "samples"}
        data["samples"] = self.samples.to_dict(orient="list")
        return Report.build(
            "eotf",
            "displays",
            "pass" if self.passed else "fail",
            f"max deviation {100 * self.max_deviation:.2f}% "
            f"(low {100 * self.low['max']:.2f}%, high {100 * self.high['max']:.2f}%){clip}",
            data,
        )


def _dev_stats(dev: np.ndarray) -> Dict[str, float]:
    if dev.size == 0:
        return {"max": 0.0, "mean": 0.0, "count": 0}
    absdev = np.abs(dev)
    return {"max": float(absdev.max()), "mean": float(absdev.mean()), "count": int(dev.size)}


def analyze_eotf_tracking(
    log: MeasurementLog,
    peak_anchor: float = 10000.0,
    param: Optional[AnalysisParam] = None,
    bit_depth: int = 10,
    signal_range: str = "narrow",
) -> EotfReport:
    """Compare (code level, luminance) samples with the PQ EOTF.

    Statistics only include samples whose ideal luminance does not exceed 'peak_anchor' (the
    display peak); the low/high split is at param.eotf_split nits.

    @param log: measurement log with code levels
    @type log: MeasurementLog
    @param peak_anchor: display peak luminance (Default value = 10000.0)
    @type peak_anchor: float
    @param param: split and tolerance (Default value = None: defaults)
    @type param: Optional[AnalysisParam]
    @param bit_depth: bit depth of the code levels (Default value = 10)
    @type bit_depth: int
    @param signal_range: range of the code levels (Default value = "narrow")
    @type signal_range: str
    @return: EOTF tracking report
    @rtype: EotfReport
    @raise InsufficientSignal: less than 3 distinct code levels
    @raise DomainError: code level outside the legal range

    """
    param = AnalysisParam() if param is None else param
    data = _sorted(log.main_probe())
    data = data[~data["code_level"].isna()]
    codes = data["code_level"].to_numpy()
    if np.unique(codes).size < 3:
        raise InsufficientSignal("EOTF tracking needs at least 3 distinct code levels")
    low, high = luma_limits(bit_depth, signal_range)
    if (codes < low).any() or (codes > high).any():
        bad = codes[(codes < low) | (codes > high)][0]
        raise DomainError(f"code level {bad:g} outside the legal range [{low}, {high}]")
    ideal = pq_eotf(dequantize(codes, bit_depth, signal_range))
    lum = data["luminance_nits"].to_numpy()
    positive = ideal > 0
    if not positive.all():
        LOGGER.warning(f"{int((~positive).sum())} black samples without relative deviation")
    dev = np.where(positive, (lum - ideal) / np.where(positive, ideal, 1.0), np.nan)
    table = pd.DataFrame(
        {"code_level": codes, "ideal_nits": ideal, "luminance_nits": lum, "deviation": dev}
    )
    inrange = positive & (ideal <= peak_anchor * (1 + 1e-9))
    stats = _dev_stats(dev[inrange])
    clip_code = clip_nits = None
    off = positive & (np.abs(np.nan_to_num(dev)) > param.eotf_tolerance)
    order = np.argsort(codes, kind="mergesort")
    codes_sorted, off_sorted = codes[order], off[order]
    for code in np.unique(codes_sorted):
        if off_sorted[codes_sorted >= code].all():
            clip_code = int(code)
            clip_nits = float(pq_eotf(dequantize(code, bit_depth, signal_range)))
            break
    return EotfReport(
        table,
        stats["max"],
        stats["mean"],
        _dev_stats(dev[inrange & (ideal < param.eotf_split)]),
        _dev_stats(dev[inrange & (ideal >= param.eotf_split)]),
        clip_code,
        clip_nits,
        param.eotf_tolerance,
        peak_anchor,
    )


# Local dimming


@dataclass
class DimmingReport:
    """Black and white probe luminance against night-sky percentage."""

    percents: List[float]
    black: List[float]
    """steady black probe luminance at each percentage (nits)"""
    white: List[float]
    """steady white probe luminance at each percentage (nits)"""
    black_slope: float
    """nits per percentage point"""
    black_intercept: float
    black_r: float
    black_residual: float
    """root mean square residual of the black fit (nits)"""
    white_slope: float
    white_intercept: float
    white_r: float
    white_residual: float
    white_peak: float
    slope_threshold: float
    r_threshold: float
    notes: List[str] = field(default_factory=list)

    @property
    def normalized_black_slope(self) -> float:
        """Black slope relative to the white peak (per percentage point)."""
        return self.black_slope / self.white_peak if self.white_peak > 0 else float("inf")

    @property
    def classification(self) -> str:
        """'poor' if the black probe rises significantly and linearly with p, 'good' else."""
        if self.normalized_black_slope > self.slope_threshold and self.black_r > self.r_threshold:
            return "poor"
        return "good"

    def report(self) -> Report:
        """Conformance report (poor local dimming fails)."""
        data = dict(vars(self))
        data.update(
            normalized_black_slope=self.normalized_black_slope, classification=self.classification
        )
        return Report.build(
            "dimming",
            "displays",
            "fail" if self.classification == "poor" else "pass",
            f"{self.classification} local dimming (black slope {self.black_slope:.4g} nits/%, "
            f"r={self.black_r:.3f})",
            data,
            self.notes,
        )


def _fit(xval: np.ndarray, yval: np.ndarray) -> Tuple[float, float, float, float]:
    fit = linregress(xval, yval)
    residual = yval - (fit.slope * xval + fit.intercept)
    rvalue = 0.0 if np.isnan(fit.rvalue) else float(fit.rvalue)
    return float(fit.slope), float(fit.intercept), rvalue, float(np.sqrt(np.mean(residual ** 2)))


def analyze_local_dimming(
    log: MeasurementLog, param: Optional[AnalysisParam] = None
) -> DimmingReport:
    """Analyze night-sky sweep readings of black and white probes.

    The window_pct column holds the night-sky percentage p. Steady levels per p are fitted by
    least squares lines; local dimming is poor when the black slope relative to the white peak
    exceeds param.dimming_slope with a correlation above param.dimming_r.

    @param log: measurement log with black and white probes
    @type log: MeasurementLog
    @param param: thresholds (Default value = None: defaults)
    @type param: Optional[AnalysisParam]
    @return: dimming report
    @rtype: DimmingReport
    @raise InsufficientSignal: unpaired probes, or less than 3 percentages

    """
    param = AnalysisParam() if param is None else param
    levels = {}
    for kind in ("black", "white"):
        data = _sorted(log.probe(kind))
        valid = data[~data["window_pct"].isna()]
        levels[kind], _ = _per_key(valid, param.duplicate_tolerance, "percentage")
    unpaired = sorted(set(levels["black"]) ^ set(levels["white"]))
    if unpaired:
        listed = ", ".join(f"{val:g}" for val in unpaired)
        raise InsufficientSignal(f"unpaired probes at p = {listed}")
    percents = sorted(levels["black"])
    if len(percents) < 3:
        raise InsufficientSignal(f"local dimming needs 3 percentages, got {len(percents)}")
    pval = np.array(percents)
    black = np.array([levels["black"][val] for val in percents])
    white = np.array([levels["white"][val] for val in percents])
    bfit, wfit = _fit(pval, black), _fit(pval, white)
    notes = []
    if wfit[0] < 0 and wfit[2] < -param.dimming_r:
        notes.append("white probe luminance declines with p (brightness limiter)")
    return DimmingReport(
        percents,
        black.tolist(),
        white.tolist(),
        *bfit,
        *wfit,
        float(white.max()),
        param.dimming_slope,
        param.dimming_r,
        notes,
    )


# Cool-off


@dataclass
class CooloffReport:
    """Cool-off recommendation."""

    cooling: bool
    """False if the trailing temperatures do not decrease"""
    wait: Optional[float]
    """recommended wait (s) before the temperature falls under t_safe (None if unknown)"""
    final_temperature: float
    t_safe: float
    ambient: Optional[float]
    """fitted (or assumed) ambient temperature"""
    tau: Optional[float]
    """fitted relaxation time (s)"""
    finding: str

    def report(self) -> Report:
        """Recommendation report (warns when the panel does not cool)."""
        return Report.build(
            "cooloff",
            "brightness",
            "info" if self.cooling or self.wait == 0 else "warn",
            self.finding,
            vars(self),
            [] if self.cooling or self.wait == 0 else [self.finding],
        )


def _relax(t: np.ndarray, ambient: float, amplitude: float, tau: float) -> np.ndarray:
    return ambient + amplitude * np.exp(-t / tau)


def cooloff_recommendation(
    t: Union[np.ndarray, Sequence[float]],
    temperature: Union[np.ndarray, Sequence[float]],
    param: Optional[AnalysisParam] = None,
) -> CooloffReport:
    """Recommend a cool-off time from a temperature series.

    An exponential relaxation toward ambient is fitted on the trailing segment (after the last
    temperature maximum); the ambient is fitted with at least 4 points, else param.t_ambient
    is assumed.

    @param t: sample times (s)
    @param temperature: temperatures (°C)
    @param param: t_safe and assumed ambient (Default value = None: defaults)
    @type param: Optional[AnalysisParam]
    @return: recommendation
    @rtype: CooloffReport
    @raise InsufficientSignal: less than two temperature samples

    """
    param = AnalysisParam() if param is None else param
    tval = np.asarray(t, dtype=np.float64)
    temp = np.asarray(temperature, dtype=np.float64)
    keep = ~np.isnan(temp)
    tval, temp = tval[keep], temp[keep]
    if temp.size < 2:
        raise InsufficientSignal("cool-off needs at least two temperature samples")
    final = float(temp[-1])
    if final <= param.t_safe:
        return CooloffReport(True, 0.0, final, param.t_safe, None, None,
                             f"{final:.1f} °C already under {param.t_safe:g} °C")
    start = int(len(temp) - 1 - np.argmax(temp[::-1]))
    seg_t, seg_temp = tval[start:] - tval[start], temp[start:]
    if seg_temp.size < 2 or seg_temp[-1] >= seg_temp[0]:
        return CooloffReport(False, None, final, param.t_safe, None, None,
                             f"not cooling ({final:.1f} °C)")
    amb = param.t_ambient
    tau: Optional[float] = None
    if seg_temp.size >= 4:
        try:
            popt, _ = curve_fit(
                _relax,
                seg_t,
                seg_temp,
                p0=(amb, seg_temp[0] - amb, max(seg_t[-1], 1.0)),
                bounds=([-50.0, 0.0, 1e-3], [seg_temp.min(), 200.0, 1e6]),
                maxfev=10000,
            )
            amb, tau = float(popt[0]), float(popt[2])
        except (RuntimeError, ValueError) as err:
            LOGGER.warning(f"Ambient fit failed ({err}), assuming {param.t_ambient} °C")
            amb = param.t_ambient
    if tau is None:
        excess = seg_temp - amb
        if (excess <= 0).any():
            return CooloffReport(True, None, final, param.t_safe, amb, None,
                                 f"temperature under the assumed {amb:g} °C ambient")
        slope = linregress(seg_t, np.log(excess)).slope
        if slope >= 0:
            return CooloffReport(False, None, final, param.t_safe, amb, None,
                                 f"not cooling ({final:.1f} °C)")
        tau = -1 / slope
    if amb >= param.t_safe:
        return CooloffReport(True, None, final, param.t_safe, amb, tau,
                             f"panel relaxes to {amb:.1f} °C, above {param.t_safe:g} °C")
    wait = tau * log((final - amb) / (param.t_safe - amb))
    return CooloffReport(True, float(wait), final, param.t_safe, amb, tau,
                         f"wait {wait:.0f} s to cool from {final:.1f} to {param.t_safe:g} °C")


# Chromaticity


def read_xyz_csv(filename: str) -> pd.DataFrame:
    """Read tristimulus readings: header 'patch,X,Y,Z', comment lines starting with '#'.

    @raise LogError: bad header or cell
    """
    try:
        table = pd.read_csv(filename, comment="#", skipinitialspace=True)
    except FileNotFoundError:
        raise FileNotFound(filename)
    except (ValueError, pd.errors.ParserError) as err:
        raise LogError(f"{filename}: {err}")
    if list(table.columns) != ["patch", "X", "Y", "Z"]:
        raise LogError(f"{filename}: header must be patch,X,Y,Z")
    try:
        table[["X", "Y", "Z"]] = table[["X", "Y", "Z"]].astype(np.float64)
    except ValueError as err:
        raise LogError(f"{filename}: {err}")
    return table


@dataclass
class ChromaticityReport:
    """Chromaticities of primary patches."""

    xy: Dict[str, Tuple[float, float]]
    """mean xy of each patch"""
    errors: Dict[str, float]
    """xy distance to the target"""
    coverage: Dict[str, float]
    """coverage of reference gamuts by the measured one"""
    target: str
    tolerance: float

    @property
    def passed(self) -> bool:
        """True if all patches lie within tolerance of the target."""
        return all(val <= self.tolerance for val in self.errors.values())

    def report(self) -> Report:
        """Conformance report."""
        cover = ", ".join(f"{name} {100 * val:.1f}%" for name, val in self.coverage.items())
        return Report.build(
            "chromaticity",
            "colour",
            "pass" if self.passed else "fail",
            f"{self.target} primaries {'within' if self.passed else 'beyond'} "
            f"{self.tolerance:g} xy (coverage {cover})",
            vars(self),
        )


def analyze_chromaticity(
    readings: pd.DataFrame, target: PrimariesSet = P3D65, tolerance: float = 0.005
) -> ChromaticityReport:
    """Chromaticities of red, green, blue and white patch readings against a target.

    @param readings: patch, X, Y, Z table (several readings of a patch are averaged)
    @type readings: pd.DataFrame
    @param target: target primaries (Default value = DCI-P3-D65)
    @type target: PrimariesSet
    @param tolerance: accepted xy distance (Default value = 0.005)
    @type tolerance: float
    @return: chromaticity report
    @rtype: ChromaticityReport
    @raise InsufficientSignal: missing patch

    """
    means = readings.groupby("patch")[["X", "Y", "Z"]].mean()
    xy: Dict[str, Tuple[float, float]] = {}
    for patch in ("red", "green", "blue", "white"):
        if patch not in means.index:
            raise InsufficientSignal(f"no reading of the {patch} patch")
        xy[patch] = xy_chromaticity(means.loc[patch].to_numpy())  # type: ignore
    try:
        measured = PrimariesSet("measured", xy["red"], xy["green"], xy["blue"], xy["white"])
    except DegenerateInput:
        raise InsufficientSignal("measured primaries are degenerate")
    check = check_primaries(measured, target, tolerance)
    coverage = {ref.name: gamut_coverage(measured, ref) for ref in (BT709, P3D65, BT2020)}
    return ChromaticityReport(xy, check.errors, coverage, target.name, tolerance)
