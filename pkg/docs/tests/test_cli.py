from json import dump, load
from os import path

import pytest

from hdrconform import launch
from hdrconform.cli import main
from hdrconform.ends import FileNotFound, ParameterError
from hdrconform.media_io import (
    HdrSignalling,
    MasteringDisplay,
    build_box,
    colr_nclx,
    mdcv_box,
    clli_box,
)
from hdrconform.photometry import MeasurementLog, MeasurementSample

HERE = path.dirname(__file__)


def _run(outdir, *args: str) -> int:
    return main(["--outdir", str(outdir), "--loglevel", "WARNING", *args])


def _movie(sig: HdrSignalling) -> bytes:
    children = [colr_nclx(sig)]
    if sig.mastering_display is not None:
        children.append(mdcv_box(sig.mastering_display))
    if sig.content_light is not None:
        children.append(clli_box(sig.content_light))
    tree = build_box(
        "stsd", bytes(4) + (1).to_bytes(4, "big"), [build_box("hvc1", bytes(78), children)]
    )
    for btype in ("stbl", "minf", "mdia", "trak", "moov"):
        tree = build_box(btype, b"", [tree])
    return build_box("ftyp", b"isom" + bytes(4) + b"isomhvc1") + tree


def _sweep_log(filename: str) -> None:
    samples = []
    for index, (size, level) in enumerate([(1, 1000), (5, 980), (10, 900), (25, 700)]):
        for step in range(4):
            samples.append(MeasurementSample(4.0 * index + step, level, window_percent=size))
    MeasurementLog.from_samples(samples).write_csv(filename)


def test_usage_errors(tmp_path, capsys) -> None:
    assert _run(tmp_path) == 1
    assert _run(tmp_path, "frobnicate") == 1
    assert _run(tmp_path, "analyze", "sustained", str(tmp_path / "missing.csv")) == 1
    assert "Error" in capsys.readouterr().err
    assert main(["--outdir", str(tmp_path / "nowhere"), "playlist", "ebu"]) == 1


def test_pattern_reproducible(tmp_path) -> None:
    first, second = tmp_path / "first", tmp_path / "second"
    first.mkdir()
    second.mkdir()
    args = ["--seed", "7", "pattern", "night-sky", "--size", "64x36", "--percent", "5"]
    assert _run(first, *args) == 0
    assert _run(second, *args) == 0
    for name in ("run-night-sky.y4m", "run-night-sky.manifest.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert _run(first, "inspect", str(first / "run-night-sky.manifest.json")) == 0
    assert _run(first, "inspect", str(first / "run-night-sky.y4m")) == 0
    with open(first / "run-night-sky.manifest.json") as infile:
        manifest = load(infile)
    assert manifest["entries"][0]["peak_pixels"] == 115
    assert _run(first, "--name", "raw", "pattern", "flat", "--size", "16x8", "--raw") == 0
    assert (first / "raw-flat.yuv").exists() and (first / "raw-flat.raw.json").exists()


def test_inspect_movie(tmp_path) -> None:
    good = tmp_path / "hdr10.mp4"
    good.write_bytes(_movie(HdrSignalling.hdr10(max_cll=1000, max_fall=400)))
    assert _run(tmp_path, "--name", "good", "inspect", str(good)) == 0
    with open(tmp_path / "good-signalling.report.json") as infile:
        report = load(infile)
    assert report["verdict"] == "pass"
    assert report["inputs"] == ["hdr10.mp4"]
    assert "boxes" in report["data"]
    sdr = tmp_path / "sdr.mp4"
    sdr.write_bytes(_movie(HdrSignalling(1, 1, 1, False, MasteringDisplay())))
    assert _run(tmp_path, "--name", "sdr", "inspect", str(sdr)) == 2
    bare = tmp_path / "bare.mp4"
    bare.write_bytes(_movie(HdrSignalling(9, 16, 9, False)))
    strict = path.join(HERE, "policy-strict.json")
    assert _run(tmp_path, "--name", "bare", "inspect", str(bare)) == 0
    assert _run(tmp_path, "--name", "bare", "inspect", str(bare), "--policy", strict) == 2
    broken = tmp_path / "broken.mp4"
    broken.write_bytes(good.read_bytes()[:-5])
    assert _run(tmp_path, "inspect", str(broken)) == 1


def test_verify(tmp_path) -> None:
    assert _run(tmp_path, "--name", "r", "pattern", "ramp", "--size", "2048x16") == 0
    ramp = str(tmp_path / "r-ramp.y4m")
    assert _run(tmp_path, "--name", "r", "verify", "bitdepth", ramp) == 0
    assert _run(tmp_path, "--name", "r", "verify", "banding", ramp) == 0
    assert _run(tmp_path, "--name", "r", "verify", "stats", ramp) == 0
    assert _run(tmp_path, "--name", "r", "verify", "fidelity", ramp, ramp) == 0
    assert _run(tmp_path, "--name", "r", "verify", "gamut", ramp) == 0
    assert _run(tmp_path, "--name", "r", "verify", "fidelity", ramp) == 1
    assert _run(tmp_path, "--name", "r", "verify", "bitdepth", ramp, "--frame", "3") == 1
    with open(tmp_path / "r-bitdepth.report.json") as infile:
        assert load(infile)["data"]["verdict"] == "clean chain"


def test_analyze(tmp_path) -> None:
    log = str(tmp_path / "sweep.csv")
    _sweep_log(log)
    assert _run(tmp_path, "--format", "json,csv,svg", "analyze", "sweep", log) == 0
    for ext in ("report.json", "csv", "svg"):
        assert (tmp_path / f"run-sweep.{ext}").exists()
    assert (tmp_path / "run-sweep.svg").read_text().startswith("<svg")
    with open(tmp_path / "run-sweep.report.json") as infile:
        report = load(infile)
    assert report["data"]["max_window_at"]["900"] == 10.0
    params = tmp_path / "analysis.json"
    with open(params, "w") as outfile:
        dump({"schema": "hdrconform.analysis", "version": 1, "capability_nits": 950}, outfile)
    assert _run(tmp_path, "verify", "capability", log, "--analysis", str(params)) == 0
    assert _run(tmp_path, "verify", "capability", log) == 2


def test_sim_and_report(tmp_path) -> None:
    args = ["sim", "--profile", "lcd", "--preset", "night-sky", "--size", "384x216"]
    assert _run(tmp_path, *args, "--duration", "2", "--hdf5") == 0
    log = tmp_path / "run-night-sky.csv"
    assert log.exists() and (tmp_path / "run-sim.hdf5").exists()
    assert _run(tmp_path, "--name", "lcd", "analyze", "dimming", str(log)) == 2
    assert _run(tmp_path, "--name", "lcd", "report", str(tmp_path)) == 2
    summary = (tmp_path / "lcd-summary.md").read_text()
    assert "| dimming | FAIL |" in summary
    with open(tmp_path / "lcd-summary.json") as infile:
        assert load(infile)["failing"] == ["dimming"]


def test_config(tmp_path) -> None:
    config = tmp_path / "config.json"
    with open(config, "w") as outfile:
        dump(
            {
                "name": "cfg",
                "outdir": str(tmp_path),
                "command": "playlist",
                "options": {"sweep": "ebu", "size": "64x36", "gap": 0.5},
            },
            outfile,
        )
    assert main(["--config", str(config)]) == 0
    with open(tmp_path / "cfg-ebu.playlist.json") as infile:
        playlist = load(infile)
    assert len(playlist["entries"]) == 7
    assert main(["--config", str(config), "playlist", "window", "--values", "5", "10"]) == 0
    with open(tmp_path / "cfg-window.playlist.json") as infile:
        assert len(load(infile)["entries"]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"command": "launch"}')
    assert main(["--config", str(bad)]) == 1


def test_launch(tmp_path) -> None:
    config = tmp_path / "sweep.json"
    with open(config, "w") as outfile:
        dump({"command": "playlist", "options": {"sweep": "night-sky", "size": "64x36"}}, outfile)
    assert launch(str(config), name="api", outdir=str(tmp_path), formats=["json"]) == 0
    with open(tmp_path / "api-night-sky.playlist.json") as infile:
        assert len(load(infile)["entries"]) == 7
    with pytest.raises(ParameterError):
        launch(str(config), colour="red")
    with pytest.raises(FileNotFound):
        launch(str(tmp_path / "missing.json"))
