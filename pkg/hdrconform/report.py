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

"""Schema-versioned conformance reports.

Every check of hdrconform ends in a L{Report}: a named verdict (pass, warn, fail, or info for
pure measurements) with a one-line summary, the check data and its warnings. Reports are json
documents; L{consolidate} merges several of them into a L{Summary} whose overall verdict fails
as soon as one check fails.

"""

from dataclasses import dataclass, field
from math import isinf, isnan
from typing import Any, Dict, List, ClassVar, Tuple, Sequence

import numpy as np

from hdrconform.ends import ParameterError, ConformanceFailure
from hdrconform.inputs import Readerclass
from hdrconform.inval import isvalid

VERDICTS = ("pass", "warn", "fail", "info")
"""report verdicts"""
SECTIONS: Dict[str, str] = {
    "playback": "Playback signalling",
    "displays": "Display behaviour",
    "brightness": "Brightness",
    "colour": "Colour",
    "bit-depth": "Bit depth",
    "conversions": "Conversions",
    "environment": "Testing environment",
}
"""workflow sections of the checks, with their titles"""


def plain(value: Any) -> Any:
    """Convert a value to json-compatible data.

    numpy scalars and arrays become python numbers and lists, absent values and NaN become None,
    infinities become the strings 'inf' and '-inf'. Dictionary keys become strings.

    """
    if isinstance(value, dict):
        return {_key(key): plain(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(val) for val in value]
    if isinstance(value, np.ndarray):
        return [plain(val) for val in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, Readerclass):
        return value.asdict()
    if not isvalid(value):
        return None
    if isinstance(value, float) and isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _key(key: Any) -> str:
    if isinstance(key, (float, np.floating)):
        return f"{float(key):g}"
    return str(key)


@dataclass
class Report(Readerclass):
    """Result of one check."""

    _schema: ClassVar[str] = "hdrconform.report"
    _required: ClassVar[Tuple[str, ...]] = ("name", "verdict")

    name: str = ""
    """check name (e.g. 'signalling', 'bitdepth', 'sustained')"""
    section: str = "playback"
    """workflow section (key of L{SECTIONS})"""
    verdict: str = "info"
    """pass, warn, fail or info"""
    summary: str = ""
    """one line summary"""
    data: Dict[str, Any] = field(default_factory=dict)
    """check results"""
    warnings: List[str] = field(default_factory=list)
    """recoverable findings"""
    inputs: List[str] = field(default_factory=list)
    """input files"""

    def check(self) -> None:
        if self.verdict not in VERDICTS:
            self.fail("verdict", f"must be one of {', '.join(VERDICTS)}")
        if self.section not in SECTIONS:
            self.fail("section", f"must be one of {', '.join(SECTIONS)}")

    @classmethod
    def build(
        cls,
        name: str,
        section: str,
        verdict: str,
        summary: str,
        data: Dict[str, Any],
        warnings: Sequence[str] = (),
    ) -> "Report":
        """Create a report from raw (numpy) data."""
        return cls.readdict(
            {
                "name": name,
                "section": section,
                "verdict": verdict,
                "summary": summary,
                "data": plain(data),
                "warnings": list(warnings),
            }
        )

    @property
    def failed(self) -> bool:
        """True if the verdict is fail."""
        return self.verdict == "fail"

    def raise_on_failure(self) -> None:
        """Raise L{ConformanceFailure} if the verdict is fail."""
        if self.failed:
            raise ConformanceFailure(f"{self.name}: {self.summary}")

    def text(self) -> str:
        """Human readable text."""
        lines = [f"[{self.verdict.upper()}] {self.name}: {self.summary}"]
        lines += [f"  warning: {warn}" for warn in self.warnings]
        return "\n".join(lines)


@dataclass
class Summary(Readerclass):
    """Consolidated conformance report."""

    _schema: ClassVar[str] = "hdrconform.summary"

    overall: str = "pass"
    """pass or fail"""
    failing: List[str] = field(default_factory=list)
    """names of the failed checks"""
    reports: List[Report] = field(default_factory=list)
    """merged reports"""

    def markdown(self) -> str:
        """Markdown summary, one table row per check, grouped by section."""
        lines = [
            "# HDR conformance report",
            "",
            f"Overall: **{self.overall.upper()}**",
            "",
        ]
        if self.failing:
            lines += [f"Failing checks: {', '.join(self.failing)}", ""]
        for key, title in SECTIONS.items():
            reports = [rep for rep in self.reports if rep.section == key]
            if not reports:
                continue
            lines += [f"## {title}", "", "| check | verdict | summary |", "|---|---|---|"]
            for rep in reports:
                lines.append(f"| {rep.name} | {rep.verdict.upper()} | {rep.summary} |")
            warnings = [f"- {rep.name}: {warn}" for rep in reports for warn in rep.warnings]
            lines += [""] + (warnings + [""] if warnings else [])
        return "\n".join(lines)


def consolidate(reports: Sequence[Report]) -> Summary:
    """Merge reports.

    @param reports: reports of prior checks
    @type reports: Sequence[Report]
    @return: summary, failing iff one report fails
    @rtype: Summary
    @raise ParameterError: no report

    """
    if not reports:
        raise ParameterError("no report to consolidate")
    failing = [rep.name for rep in reports if rep.failed]
    return Summary("fail" if failing else "pass", failing, list(reports))
