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

"""Line plots as standalone SVG documents.

L{LinePlot} draws one or more (x, y) series with labelled axes in a fixed view box. Output only
depends on the data (fixed number formatting, no timestamp), so that plots are diffable and
reproducible.

"""

from math import floor, log10
from typing import List, Tuple, Sequence, Dict, Any
from xml.etree import ElementTree as ET

import numpy as np

from hdrconform.ends import ParameterError
from hdrconform.outputs import atomic_write

WIDTH, HEIGHT = 640, 400
MARGIN = (70, 20, 30, 50)
"""left, right, top, bottom margins"""
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def nice_ticks(low: float, high: float, count: int = 6) -> np.ndarray:
    """Round tick positions (steps of 1, 2 or 5 times a power of ten) covering [low, high]."""
    if high <= low:
        high = low + 1.0
    raw = (high - low) / max(count - 1, 1)
    power = 10 ** floor(log10(raw))
    step = min((mult * power for mult in (1, 2, 5, 10) if mult * power >= raw), default=10 * power)
    first = np.floor(low / step) * step
    last = np.ceil(high / step) * step
    return np.round(np.arange(first, last + step / 2, step), 10)


def _fmt(val: float) -> str:
    return f"{val:.2f}"


def _el(parent: ET.Element, tag: str, attrs: Dict[str, Any], text: str = "") -> ET.Element:
    """Add a child element (attribute values are converted to strings)."""
    elem = ET.SubElement(parent, tag, {key: str(val) for key, val in attrs.items()})
    if text:
        elem.text = text
    return elem


class LinePlot:
    """Line plot builder."""

    def __init__(self, title: str, xlabel: str, ylabel: str):
        self.title: str = title
        self.xlabel: str = xlabel
        self.ylabel: str = ylabel
        self.series: List[Tuple[str, np.ndarray, np.ndarray, bool]] = []
        """label, x, y, markers"""
        self.hlines: List[Tuple[str, float]] = []
        """label, y of horizontal reference lines"""

    def add(
        self, xval: Sequence[float], yval: Sequence[float], label: str = "", markers: bool = False
    ) -> "LinePlot":
        """Add a series (NaN values are skipped).

        @raise ParameterError: x and y of different lengths
        """
        xarr = np.asarray(xval, dtype=np.float64)
        yarr = np.asarray(yval, dtype=np.float64)
        if xarr.shape != yarr.shape:
            raise ParameterError(f"plot series of lengths {xarr.size} and {yarr.size}")
        keep = ~(np.isnan(xarr) | np.isnan(yarr))
        self.series.append((label, xarr[keep], yarr[keep], markers))
        return self

    def add_hline(self, yval: float, label: str = "") -> "LinePlot":
        """Add a horizontal reference line."""
        self.hlines.append((label, float(yval)))
        return self

    def _ranges(self) -> Tuple[np.ndarray, np.ndarray]:
        xall = np.concatenate([ser[1] for ser in self.series] + [np.zeros(0)])
        yall = np.concatenate(
            [ser[2] for ser in self.series] + [np.array([val for _, val in self.hlines])]
        )
        if xall.size == 0:
            xall = np.array([0.0, 1.0])
        if yall.size == 0:
            yall = np.array([0.0, 1.0])
        return (
            nice_ticks(float(xall.min()), float(xall.max())),
            nice_ticks(min(0.0, float(yall.min())), float(yall.max())),
        )

    def render(self) -> str:
        """SVG document."""
        left, right, top, bottom = MARGIN
        xticks, yticks = self._ranges()
        plot_w, plot_h = WIDTH - left - right, HEIGHT - top - bottom
        mid_y = top + plot_h // 2

        def xpos(val: np.ndarray) -> np.ndarray:
            return left + (val - xticks[0]) / (xticks[-1] - xticks[0]) * plot_w

        def ypos(val: np.ndarray) -> np.ndarray:
            return top + plot_h - (val - yticks[0]) / (yticks[-1] - yticks[0]) * plot_h

        svg = ET.Element(
            "svg",
            {
                "xmlns": "http://www.w3.org/2000/svg",
                "viewBox": f"0 0 {WIDTH} {HEIGHT}",
                "width": str(WIDTH),
                "height": str(HEIGHT),
                "font-family": "sans-serif",
                "font-size": "11",
            },
        )
        _el(svg, "rect", {"width": WIDTH, "height": HEIGHT, "fill": "white"})
        _el(svg, "text", {"x": WIDTH // 2, "y": 18, "text-anchor": "middle"}, self.title)
        grid = _el(svg, "g", {"stroke": "#888", "stroke-width": 0.5})
        for tick in xticks:
            pos = _fmt(float(xpos(tick)))
            _el(grid, "line", {"x1": pos, "x2": pos, "y1": top, "y2": top + plot_h})
            attrs = {"x": pos, "y": top + plot_h + 14, "text-anchor": "middle"}
            _el(svg, "text", attrs, f"{tick:g}")
        for tick in yticks:
            pos = _fmt(float(ypos(tick)))
            _el(grid, "line", {"x1": left, "x2": left + plot_w, "y1": pos, "y2": pos})
            _el(svg, "text", {"x": left - 4, "y": pos, "text-anchor": "end"}, f"{tick:g}")
        attrs = {"x": left + plot_w // 2, "y": HEIGHT - 10, "text-anchor": "middle"}
        _el(svg, "text", attrs, self.xlabel)
        _el(
            svg,
            "text",
            {"x": 14, "y": mid_y, "text-anchor": "middle", "transform": f"rotate(-90 14 {mid_y})"},
            self.ylabel,
        )
        for label, val in self.hlines:
            pos = _fmt(float(ypos(val)))
            attrs = {"x1": left, "x2": left + plot_w, "y1": pos, "y2": pos, "stroke": "#444"}
            _el(svg, "line", {**attrs, "stroke-dasharray": "4 3"})
            attrs = {"x": left + plot_w - 2, "y": pos, "text-anchor": "end", "dy": -3}
            _el(svg, "text", attrs, label)
        for num, (label, xarr, yarr, markers) in enumerate(self.series):
            colour = COLOURS[num % len(COLOURS)]
            points = " ".join(f"{_fmt(xv)},{_fmt(yv)}" for xv, yv in zip(xpos(xarr), ypos(yarr)))
            attrs = {"points": points, "fill": "none", "stroke": colour, "stroke-width": 1.5}
            _el(svg, "polyline", attrs)
            if markers:
                for xv, yv in zip(xpos(xarr), ypos(yarr)):
                    _el(svg, "circle", {"cx": _fmt(xv), "cy": _fmt(yv), "r": 2.5, "fill": colour})
            _el(svg, "text", {"x": left + 8, "y": top + 14 + 14 * num, "fill": colour}, label)
        return ET.tostring(svg, encoding="unicode") + "\n"

    def save(self, filename: str) -> None:
        """Write the SVG document (atomically)."""
        atomic_write(filename, self.render())
