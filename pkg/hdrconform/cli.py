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

"""Command line interface.

One subcommand per invocation::

    hdrconform [global options] pattern   KIND        write a test pattern (Y4M + manifest)
    hdrconform [global options] playlist  SWEEP       write a sweep playlist (json)
    hdrconform [global options] inspect   MEDIA       verify the HDR signalling of a file
    hdrconform [global options] verify    CHECK FILE  bit depth, banding, fidelity, stats, gamut
    hdrconform [global options] analyze   KIND LOG    photometer log analyses
    hdrconform [global options] sim                   simulate a panel on a playlist
    hdrconform [global options] report    REPORTS     consolidate reports

Global options set the L{RunParam} run configuration; '--config file.json' reads it from a
file whose 'command' and 'options' (flags without dashes) supply the subcommand and its
defaults. Flags given on the command line override the file.

Exit codes: 0 pass, 1 structural or usage error, 2 conformance failure.

"""

import sys
from argparse import ArgumentParser, Namespace
from glob import glob
from os import path
from typing import List, Dict, Any, Optional, Sequence, Callable, Tuple, NoReturn

import numpy as np
import pandas as pd

from hdrconform.colorimetry import get_primaries, gamut_marker
from hdrconform.ends import HdrError, ParameterError, Interrupted, BadFile
from hdrconform.inputs import RunParam, SignallingPolicy, AnalysisParam
from hdrconform.inval import invalidint
from hdrconform.logger import LOGGER
from hdrconform.media_io import (
    Frame,
    Geometry,
    RawDescriptor,
    SidecarManifest,
    read_y4m,
    read_raw_planar,
    write_y4m,
    write_raw_planar,
    write_manifest,
    read_manifest,
    verify_manifest,
    scan_isobmff,
)
from hdrconform.outputs import Output, atomic_write
from hdrconform.hdf5 import SimWriter
from hdrconform.panelsim import PanelSimulator, load_profile, default_probes, read_probes
from hdrconform.patterns import (
    SPECS,
    SWEEPS,
    Playlist,
    build_playlist,
    make_spec,
    generate,
    gen_pq_steps,
)
from hdrconform.photometry import (
    MeasurementLog,
    merge_logs,
    analyze_sustained,
    analyze_window_sweep,
    analyze_eotf_tracking,
    analyze_local_dimming,
    cooloff_recommendation,
    analyze_chromaticity,
    read_xyz_csv,
)
from hdrconform.report import Report, consolidate
from hdrconform.svgplot import LinePlot
from hdrconform.verify import (
    verify_signalling,
    signal_stats,
    estimate_effective_bitdepth,
    detect_banding,
    roundtrip_fidelity,
    verify_capability,
)
from hdrconform.version import __version__

POSITIONALS: Dict[str, List[str]] = {
    "pattern": ["kind"],
    "playlist": ["sweep"],
    "inspect": ["media"],
    "verify": ["check", "inputs"],
    "analyze": ["analysis", "logs"],
    "sim": [],
    "report": ["reports"],
}
"""positional arguments of each subcommand, as named in configuration files"""
PRESETS = ("sustained", "sweep", "ebu", "night-sky", "eotf")
"""simulation presets"""


class HdrParser(ArgumentParser):
    """Argument parser raising L{ParameterError} (exit code 1) on usage errors."""

    def __init__(self, *args: Any, **kwd: Any):
        super().__init__(*args, **kwd)
        self.commands: Dict[str, ArgumentParser] = {}
        """subcommand parsers"""

    def error(self, message: str) -> NoReturn:
        raise ParameterError(f"usage: {message}")


# Argument helpers


def _region(text: str) -> Tuple[int, int, int, int]:
    try:
        xpos, ypos, width, height = (int(val) for val in text.split(","))
    except ValueError:
        raise ParameterError(f"bad region '{text}' (expected x,y,width,height)")
    return xpos, ypos, width, height


def _fps(text: str) -> List[int]:
    num, _, den = text.partition("/")
    try:
        return [int(num), int(den) if den else 1]
    except ValueError:
        raise ParameterError(f"bad frame rate '{text}' (expected num/den)")


def _geometry(args: Namespace) -> Geometry:
    return Geometry.parse(args.size, fps=_fps(args.fps), frame_count=args.frames)


def _format_options(args: Namespace) -> Dict[str, Any]:
    res = {}
    pairs = (("bit_depth", "bit_depth"), ("signal_range", "range"), ("subsampling", "subsampling"))
    for key, dest in pairs:
        val = getattr(args, dest, None)
        if val is not None:
            res[key] = val
    return res


def _add_format(sub: ArgumentParser) -> None:
    sub.add_argument("--size", type=str, default="3840x2160", help="frame size WxH")
    sub.add_argument("--fps", type=str, default="25/1", help="frame rate num/den")
    sub.add_argument("--frames", type=int, default=1, help="frames per pattern")
    sub.add_argument("--bit-depth", dest="bit_depth", type=int, choices=(8, 10, 12), default=None)
    sub.add_argument("--range", type=str, choices=("narrow", "full"), default=None)
    sub.add_argument("--subsampling", type=str, choices=("420", "444"), default=None)


def get_parser() -> HdrParser:
    """Build the command line parser.

    @return: parser, with its subcommand parsers in 'commands'
    @rtype: HdrParser

    """
    parser = HdrParser(prog="hdrconform", description="HDR conformance toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=str, default="", help="run configuration (json)")
    parser.add_argument("--name", type=str, default=None, help="run name (output file prefix)")
    parser.add_argument("--outdir", type=str, default=None, help="output folder")
    parser.add_argument("--seed", type=int, default=None, help="global random seed")
    parser.add_argument(
        "--format", dest="formats", type=str, default=None, help="report formats: json,csv,svg"
    )
    parser.add_argument("--loglevel", type=str, default=None, help="log level")
    parser.add_argument("--logdir", type=str, default=None, help="log folder")
    parser.add_argument("--comment", type=str, default=None, help="run comment")
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub = subs.add_parser("pattern", help="write a test pattern")
    sub.add_argument("kind", type=str, choices=sorted(SPECS) + ["pq-steps"])
    sub.add_argument("--percent", type=float, default=None, help="night-sky white pixels (%%)")
    sub.add_argument("--area", type=float, default=None, help="window area (%%)")
    sub.add_argument("--peak-code", dest="peak_code", type=int, default=None)
    sub.add_argument("--peak-nits", dest="peak_nits", type=float, default=None)
    sub.add_argument("--levels", type=int, default=None, help="ramp bands")
    sub.add_argument("--window", type=float, default=None, help="ramp or step window (%%)")
    sub.add_argument("--orientation", type=str, choices=("horizontal", "vertical"), default=None)
    sub.add_argument("--hex", type=str, default=None, help="flat field colour RRGGBB")
    sub.add_argument("--code", type=int, default=None, help="flat field luma code")
    sub.add_argument("--base", type=str, default="flat", help="base pattern of 'noise'")
    sub.add_argument("--sigma", type=float, default=None, help="noise sigma (code steps)")
    sub.add_argument("--values", type=float, nargs="+", default=None, help="pq-steps levels")
    sub.add_argument("--label", type=str, default=None)
    sub.add_argument("--raw", action="store_true", help="also write raw planar samples")
    _add_format(sub)
    parser.commands["pattern"] = sub

    sub = subs.add_parser("playlist", help="write a sweep playlist")
    sub.add_argument("sweep", type=str, choices=SWEEPS)
    sub.add_argument("--values", type=float, nargs="+", default=None)
    sub.add_argument("--duration", type=float, default=None, help="entry duration (s)")
    sub.add_argument("--gap", type=float, default=0.0, help="black gap between entries (s)")
    sub.add_argument("--peak-nits", dest="peak_nits", type=float, default=None)
    _add_format(sub)
    parser.commands["playlist"] = sub

    sub = subs.add_parser("inspect", help="verify the signalling of a file")
    sub.add_argument("media", type=str, help="mp4/mov/heif, y4m (with manifest) or manifest")
    sub.add_argument("--manifest", type=str, default="", help="sidecar manifest of a y4m file")
    sub.add_argument("--policy", type=str, default="", help="signalling policy (json)")
    sub.add_argument("--bit-depth", dest="bit_depth", type=int, default=None)
    parser.commands["inspect"] = sub

    sub = subs.add_parser("verify", help="pixel verifications")
    sub.add_argument(
        "check",
        type=str,
        choices=("bitdepth", "banding", "fidelity", "stats", "gamut", "capability"),
    )
    sub.add_argument("inputs", type=str, nargs="+")
    sub.add_argument("--region", type=_region, default=None, help="x,y,width,height")
    sub.add_argument(
        "--orientation", type=str, choices=("horizontal", "vertical"), default="horizontal"
    )
    sub.add_argument("--frame", type=int, default=0, help="frame index")
    sub.add_argument("--descriptor", type=str, default="", help="raw planar descriptor (json)")
    sub.add_argument("--threshold", type=float, default=60.0, help="fidelity PSNR threshold")
    sub.add_argument("--target", type=str, default="bt709", help="gamut marker target primaries")
    sub.add_argument("--analysis", dest="analysis_file", type=str, default="")
    parser.commands["verify"] = sub

    sub = subs.add_parser("analyze", help="photometer log analyses")
    sub.add_argument(
        "analysis",
        type=str,
        choices=("sustained", "sweep", "eotf", "dimming", "cooloff", "chromaticity"),
    )
    sub.add_argument("logs", type=str, nargs="+")
    sub.add_argument("--params", type=str, default="", help="analysis parameters (json)")
    sub.add_argument("--peak-anchor", dest="peak_anchor", type=float, default=10000.0)
    sub.add_argument("--bit-depth", dest="bit_depth", type=int, default=10)
    sub.add_argument("--range", type=str, choices=("narrow", "full"), default="narrow")
    sub.add_argument("--target", type=str, default="p3", help="chromaticity target primaries")
    sub.add_argument("--tolerance", type=float, default=0.005, help="chromaticity xy tolerance")
    parser.commands["analyze"] = sub

    sub = subs.add_parser("sim", help="simulate a panel")
    sub.add_argument("--profile", type=str, default="reference", help="shipped name or json file")
    sub.add_argument("--playlist", type=str, default="", help="playlist (json)")
    sub.add_argument("--preset", type=str, choices=PRESETS, default="sustained")
    sub.add_argument("--values", type=float, nargs="+", default=None)
    sub.add_argument("--duration", type=float, default=None, help="entry duration (s)")
    sub.add_argument("--gap", type=float, default=0.0, help="black gap between entries (s)")
    sub.add_argument("--probes", type=str, default="", help="probes (json)")
    sub.add_argument("--dt", type=float, default=0.1, help="time step (s)")
    sub.add_argument(
        "--eotf-mode", dest="eotf_mode", type=str, choices=("scaled", "clip"), default=None
    )
    sub.add_argument("--hdf5", action="store_true", help="archive the thermal state")
    sub.add_argument("--size", type=str, default="3840x2160", help="frame size WxH")
    parser.commands["sim"] = sub

    sub = subs.add_parser("report", help="consolidate reports")
    sub.add_argument("reports", type=str, nargs="+", help="report files or folders")
    parser.commands["report"] = sub
    return parser


# Run context


class Session:
    """Run configuration, output files and report emission of one invocation."""

    def __init__(self, param: RunParam):
        self.param: RunParam = param
        self.output: Output = Output(param)
        self.written: List[str] = []
        """files written"""

    def file(self, suffix: str, ext: str) -> str:
        return self.output.file(suffix, ext)

    def emit(
        self,
        report: Report,
        table: Optional[pd.DataFrame] = None,
        plot: Optional[LinePlot] = None,
        inputs: Sequence[str] = (),
    ) -> int:
        """Write a report in the requested formats, print it; return the exit code."""
        report.inputs = [path.basename(name) for name in inputs]
        report.warnings = report.warnings + LOGGER.warned(tuple(report.warnings))
        if "json" in self.param.formats:
            self._record(self.file(report.name, "report.json"))
            report.tojson(self.written[-1])
        if "csv" in self.param.formats and table is not None:
            self._record(self.file(report.name, "csv"))
            atomic_write(self.written[-1], table.to_csv(index=False, float_format="%.6g"))
        if "svg" in self.param.formats and plot is not None:
            self._record(self.file(report.name, "svg"))
            plot.save(self.written[-1])
        print(report.text())
        return 2 if report.failed else 0

    def _record(self, filename: str) -> None:
        self.written.append(filename)
        LOGGER.info(f"Writing {filename}")


# Subcommands


def _spec_params(args: Namespace, seed: int) -> Dict[str, Any]:
    params: Dict[str, Any] = {"kind": args.kind}
    flags = {
        "night-sky": {"percent": "percent", "peak_code": "peak_code", "peak_nits": "peak_nits"},
        "window": {"area_percent": "area", "peak_code": "peak_code", "peak_nits": "peak_nits"},
        "ramp": {"levels": "levels", "window_percent": "window", "orientation": "orientation"},
        "flat": {"code": "code"},
        "noise": {"sigma": "sigma"},
    }[args.kind]
    for key, dest in flags.items():
        if getattr(args, dest) is not None:
            params[key] = getattr(args, dest)
    if args.kind == "flat" and args.hex is not None:
        params["colour"] = "#" + args.hex.lstrip("#")
    if args.kind in ("night-sky", "noise"):
        params["seed"] = seed
    if args.kind == "noise":
        base = Namespace(**{**vars(args), "kind": args.base})
        params["base"] = _spec_params(base, seed)
        params["base"].update(_format_options(args))
    if args.label is not None:
        params["label"] = args.label
    params.update(_format_options(args))
    return params


def cmd_pattern(args: Namespace, session: Session) -> int:
    """Write a pattern as Y4M with its sidecar manifest; print the manifest digest."""
    geom = _geometry(args)
    if args.kind == "pq-steps":
        levels = args.values if args.values else [100.0, 1000.0]
        window = args.window if args.window is not None else 10.0
        frames, manifest = gen_pq_steps(levels, geom, window, **_format_options(args))
        frames = [frame for frame in frames for _ in range(geom.frame_count)]
    else:
        spec = make_spec(_spec_params(args, session.param.seed))
        frames, manifest = generate(spec, geom)
    sidecar = SidecarManifest.from_pattern(manifest)
    video = session.file(args.kind, "y4m")
    write_y4m(frames, video, (geom.fps[0], geom.fps[1]))
    sidecar.add_file(video)
    if args.raw:
        first = frames[0]
        descriptor = RawDescriptor.readdict(
            {
                "width": first.width,
                "height": first.height,
                "bit_depth": first.bit_depth,
                "subsampling": first.subsampling,
                "signal_range": first.signal_range,
            }
        )
        raw = session.file(args.kind, "yuv")
        write_raw_planar(frames, raw, descriptor)
        descriptor.tojson(session.file(args.kind, "raw.json"))
        sidecar.add_file(raw)
    manifest_file = session.file(args.kind, "manifest.json")
    write_manifest(sidecar, manifest_file)
    print(f"{path.basename(manifest_file)} sha256 {sidecar.digest}")
    for entry in sidecar.entries:
        LOGGER.info(f"{entry.get('label', '')}: {entry}")
    return 0


def cmd_playlist(args: Namespace, session: Session) -> int:
    """Write a sweep playlist as json."""
    options = _format_options(args)
    if args.peak_nits is not None:
        options["peak_nits"] = args.peak_nits
    playlist, _ = build_playlist(
        args.sweep,
        _geometry(args),
        args.values,
        args.duration,
        args.gap,
        session.param.seed,
        options,
    )
    filename = session.file(args.sweep, "playlist.json")
    playlist.tojson(filename)
    print(f"{path.basename(filename)}: {len(playlist.entries)} entries, {playlist.duration:g} s")
    return 0


def _sidecar_for(media: str) -> str:
    base = media[: -len(".y4m")] if media.endswith(".y4m") else media
    return base + ".manifest.json"


def cmd_inspect(args: Namespace, session: Session) -> int:
    """Verify the signalling of a media file against a policy."""
    policy = SignallingPolicy.readfile(args.policy) if args.policy else SignallingPolicy()
    bit_depth = args.bit_depth if args.bit_depth is not None else invalidint
    extra: Dict[str, Any] = {}
    if args.media.endswith(".json"):
        manifest = read_manifest(args.media)
        verify_manifest(manifest, path.dirname(args.media))
        signalling, bit_depth = manifest.signalling, manifest.bit_depth
    elif args.media.endswith(".y4m"):
        sequence = read_y4m(args.media)
        bit_depth = sequence.header.bit_depth
        manifest_file = args.manifest if args.manifest else _sidecar_for(args.media)
        if path.isfile(manifest_file):
            manifest = read_manifest(manifest_file)
            verify_manifest(manifest, path.dirname(manifest_file))
            signalling = manifest.signalling
        else:
            LOGGER.warning(f"no sidecar manifest {manifest_file}, Y4M holds no colour signalling")
            signalling = sequence.frames[0].signalling
    else:
        scan = scan_isobmff(args.media)
        signalling = scan.signalling
        extra["boxes"] = scan.inventory()
    report = verify_signalling(signalling, bit_depth, policy).report()
    report.data.update(extra)
    report.data["signalling"] = signalling.asdict()
    return session.emit(report, inputs=[args.media])


def _load_frames(filename: str, descriptor: str = "") -> List[Frame]:
    if descriptor:
        return read_raw_planar(filename, RawDescriptor.readfile(descriptor))
    if filename.endswith(".y4m"):
        return list(read_y4m(filename))
    raise BadFile(f"{filename}: expected a .y4m file or a raw file with --descriptor")


def _frame(filename: str, args: Namespace) -> Frame:
    frames = _load_frames(filename, args.descriptor)
    if not 0 <= args.frame < len(frames):
        raise ParameterError(f"{filename} has {len(frames)} frames, no frame {args.frame}")
    return frames[args.frame]


def cmd_verify(args: Namespace, session: Session) -> int:
    """Pixel level verifications of media files."""
    if args.check == "bitdepth":
        report = estimate_effective_bitdepth(
            _frame(args.inputs[0], args), args.region, args.orientation
        ).report()
    elif args.check == "banding":
        frame = _frame(args.inputs[0], args)
        report = detect_banding(frame, args.region, args.orientation).report()
    elif args.check == "fidelity":
        if len(args.inputs) != 2:
            raise ParameterError("fidelity compares a reference and a reconstruction")
        report = roundtrip_fidelity(
            _frame(args.inputs[0], args), _frame(args.inputs[1], args), args.threshold
        ).report()
    elif args.check == "stats":
        frames = [frame for name in args.inputs for frame in _load_frames(name, args.descriptor)]
        report = signal_stats(frames).report()
    elif args.check == "gamut":
        frame = _frame(args.inputs[0], args)
        marked = gamut_marker(frame, get_primaries(args.target))
        report = Report.build(
            "gamut",
            "colour",
            "pass" if marked.count == 0 else "warn",
            f"{marked.count} pixels ({100 * marked.fraction:.2f}%) outside {marked.target}",
            {key: val for key, val in marked.asdict().items() if key != "mask"},
        )
    else:
        param = AnalysisParam.readfile(args.analysis_file)
        log = merge_logs([MeasurementLog.read_csv(name) for name in args.inputs])
        report = verify_capability(analyze_window_sweep(log, param).curve, param)
    return session.emit(report, inputs=args.inputs)


def _sustained_plot(result: Any, param: AnalysisParam) -> LinePlot:
    plot = LinePlot("Sustained brightness", "time (s)", "luminance (nits)")
    plot.add(result.curve["t_s"], result.curve["luminance_nits"], "white probe")
    for level in param.thresholds:
        plot.add_hline(level, f"{level:g} nits")
    return plot


def cmd_analyze(args: Namespace, session: Session) -> int:
    """Analyze photometer logs."""
    param = AnalysisParam.readfile(args.params)
    table: Optional[pd.DataFrame] = None
    plot: Optional[LinePlot] = None
    if args.analysis == "chromaticity":
        readings = pd.concat([read_xyz_csv(name) for name in args.logs], ignore_index=True)
        result = analyze_chromaticity(readings, get_primaries(args.target), args.tolerance)
        return session.emit(result.report(), inputs=args.logs)
    log = merge_logs([MeasurementLog.read_csv(name) for name in args.logs])
    if args.analysis == "sustained":
        result = analyze_sustained(log, param)
        table, plot = result.curve, _sustained_plot(result, param)
    elif args.analysis == "sweep":
        result = analyze_window_sweep(log, param)
        table = result.frame()
        plot = LinePlot("Window sweep", "window size (%)", "luminance (nits)").add(
            table["window_pct"], table["luminance_nits"], "steady luminance", markers=True
        )
        for level in param.levels:
            plot.add_hline(level, f"{level:g} nits")
    elif args.analysis == "eotf":
        result = analyze_eotf_tracking(log, args.peak_anchor, param, args.bit_depth, args.range)
        table = result.samples
        plot = LinePlot("EOTF tracking", "code level", "luminance (nits)")
        plot.add(table["code_level"], table["ideal_nits"], "PQ EOTF")
        plot.add(table["code_level"], table["luminance_nits"], "measured", markers=True)
    elif args.analysis == "dimming":
        result = analyze_local_dimming(log, param)
        table = pd.DataFrame(
            {"percent": result.percents, "black_nits": result.black, "white_nits": result.white}
        )
        plot = LinePlot("Local dimming", "white pixels (%)", "luminance (nits)")
        plot.add(result.percents, result.black, "black probe", markers=True)
        plot.add(result.percents, result.white, "white probe", markers=True)
    else:
        result = cooloff_recommendation(log.t, log.data["temp_c"].to_numpy(), param)
        plot = LinePlot("Panel temperature", "time (s)", "temperature (°C)")
        plot.add(log.t, log.data["temp_c"], "panel").add_hline(param.t_safe, "safe")
    return session.emit(result.report(), table, plot, args.logs)


def _sim_playlist(args: Namespace, seed: int) -> Playlist:
    if args.playlist:
        return Playlist.readfile(args.playlist)
    geom = Geometry.parse(args.size)
    sweep = {"sweep": "window"}.get(args.preset, args.preset)
    playlist, _ = build_playlist(sweep, geom, args.values, args.duration, args.gap, seed)
    return playlist


def cmd_sim(args: Namespace, session: Session) -> int:
    """Simulate a panel on a playlist, write the probe log as CSV."""
    profile = load_profile(args.profile)
    if args.eotf_mode is not None:
        profile.set_param(eotf=args.eotf_mode)
    elif args.preset == "eotf" and not args.playlist:
        profile.set_param(eotf="clip")
    playlist = _sim_playlist(args, session.param.seed)
    probes = read_probes(args.probes) if args.probes else default_probes(playlist.geometry)
    label = path.splitext(path.basename(args.playlist))[0] if args.playlist else args.preset
    simulator = PanelSimulator(profile, probes, args.dt, session.param.seed)
    writer: Optional[SimWriter] = None
    if args.hdf5:
        writer = SimWriter(session.output.h5file)
        writer.init_log(1000)
        writer.init_sim(
            profile, playlist, probes, args.dt, session.param.seed, session.param.comment
        )
        LOGGER.setsaver(writer)
    ending: Optional[HdrError] = None
    try:
        log = simulator.run(playlist, writer)
    except Interrupted as err:
        ending = err
        log = simulator.partial
    finally:
        filename = session.file(label, "csv")
        simulator.partial.write_csv(filename)
        if writer is not None:
            writer.add_samples(simulator.partial)
            writer.add_end(ending, LOGGER.runtime)
            LOGGER.setsaver(None)
            writer.close()
    if ending is not None:
        raise ending
    print(f"{path.basename(filename)}: {len(log)} samples, {profile.name}, {playlist.duration:g} s")
    return 0


def _report_files(names: Sequence[str]) -> List[str]:
    files = []
    for name in names:
        if path.isdir(name):
            files += sorted(glob(path.join(name, "*.report.json")))
        else:
            files.append(name)
    return files


def cmd_report(args: Namespace, session: Session) -> int:
    """Consolidate prior reports into a json summary and a markdown page."""
    files = _report_files(args.reports)
    summary = consolidate([Report.readfile(name) for name in files])
    summary.tojson(session.file("summary", "json"))
    markdown = summary.markdown()
    atomic_write(session.file("summary", "md"), markdown)
    print(markdown)
    return 2 if summary.overall == "fail" else 0


COMMANDS: Dict[str, Callable[[Namespace, Session], int]] = {
    "pattern": cmd_pattern,
    "playlist": cmd_playlist,
    "inspect": cmd_inspect,
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "sim": cmd_sim,
    "report": cmd_report,
}


# Entry point


def _config_argv(param: RunParam, argv: List[str], parser: HdrParser) -> List[str]:
    """Apply the subcommand and options of a configuration file.

    Options become subcommand defaults; the command and its positional arguments are appended
    when the command line names no subcommand.

    """
    if not param.command:
        return argv
    if param.command not in COMMANDS:
        raise ParameterError(f"unknown command '{param.command}' in configuration")
    options = {key.replace("-", "_"): val for key, val in param.options.items()}
    positionals = []
    for key in POSITIONALS[param.command]:
        val = options.pop(key, None)
        if val is not None:
            positionals += [str(item) for item in val] if isinstance(val, list) else [str(val)]
    parser.commands[param.command].set_defaults(**options)
    if any(token in COMMANDS for token in argv):
        return argv
    return argv + [param.command] + positionals


def run_param(args: Namespace, base: RunParam) -> RunParam:
    """Run configuration: command line flags over the configuration file (locked)."""
    changes: Dict[str, Any] = {}
    for key in ("name", "outdir", "seed", "loglevel", "logdir", "comment"):
        val = getattr(args, key)
        if val is not None:
            changes[key] = val
    if args.formats is not None:
        changes["formats"] = [fmt.strip() for fmt in args.formats.split(",") if fmt.strip()]
    changes["command"] = args.command
    base.set_param(**changes)
    base.lock()
    return base


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand.

    @param argv: command line arguments (Default value = None: sys.argv)
    @type argv: Optional[Sequence[str]]
    @return: exit code (0 pass, 1 error, 2 conformance failure)
    @rtype: int

    """
    args_list = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = get_parser()
        pre = ArgumentParser(add_help=False)
        pre.add_argument("--config", type=str, default="")
        known, _ = pre.parse_known_args(args_list)
        base = RunParam.readfile(known.config) if known.config else RunParam()
        args = parser.parse_args(_config_argv(base, args_list, parser))
        if args.command is None:
            raise ParameterError("no command given (see --help)")
        param = run_param(args, base)
        session = Session(param)
        LOGGER.configure(param.loglevel, param.timeformat, session.output.logfile)
        LOGGER.info(f"hdrconform {__version__}: {param.command} ({' '.join(args_list)})")
        code = COMMANDS[args.command](args, session)
        LOGGER.info(f"{param.command} done, exit code {code}")
        return code
    except HdrError as err:
        LOGGER.error(str(err))
        print(str(err), file=sys.stderr)
        return err.exitcode


if __name__ == "__main__":
    sys.exit(main())
