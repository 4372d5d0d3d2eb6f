import numpy as np
import pytest

from hdrconform.ends import BadFile, FileNotFound, InternalError, Interrupted
from hdrconform.hdf5 import SimWriter, STATE_NAMES
from hdrconform.logger import LOGGER
from hdrconform.media_io import Geometry
from hdrconform.panelsim import PanelSimulator, load_profile, default_probes
from hdrconform.patterns import build_playlist
from hdrconform.result import SimReader

GEOM = Geometry.parse("192x108")


def _archive(filename: str):
    profile = load_profile("oled")
    playlist, _ = build_playlist("ebu", GEOM, duration=2.0)
    probes = default_probes(GEOM)
    simulator = PanelSimulator(profile, probes, dt=0.1, seed=5)
    writer = SimWriter(filename, lengrow=16)
    writer.init_log(4)
    writer.init_sim(profile, playlist, probes, 0.1, 5, "ebu sweep")
    LOGGER.setsaver(writer)
    try:
        log = simulator.run(playlist, writer)
        writer.add_samples(log)
        writer.add_end(None, 1.5)
    finally:
        LOGGER.setsaver(None)
        writer.close()
    return profile, playlist, log


def test_archive(tmp_path) -> None:
    filename = str(tmp_path / "sim.h5")
    profile, playlist, log = _archive(filename)
    with SimReader(filename) as reader:
        assert reader.datanames == STATE_NAMES
        assert len(reader.table()) == 80
        times, temps = reader.x_y()
        assert times[0] == 0.0 and times[-1] == pytest.approx(7.9)
        assert (np.diff(temps) >= 0).all()
        assert reader["apl"][0] == pytest.approx(0.04, rel=0.05)
        assert len(reader.get("temp_c", 10)) == 71
        entries = reader.entry_table()
        assert entries["start"].tolist() == [0.0, 2.0, 4.0, 6.0]
        assert entries["label"][0] == "window S=4%"
        assert reader.measurements.data.equals(log.data)
        assert reader.profile.asdict() == profile.asdict()
        assert reader.playlist.asdict() == playlist.asdict()
        assert [probe.kind for probe in reader.probes] == ["white", "black"]
        assert reader.ending() == (0, "completed", 1.5)
        assert reader.runinfo["comment"] == "ebu sweep"
        assert reader.runinfo["seed"] == "5"
        assert len(reader.log_table()) >= 2
        assert "profile sony-a80j, 4 entries, 80 steps" in reader.printinfo


def test_archive_ending(tmp_path) -> None:
    filename = str(tmp_path / "stopped.h5")
    writer = SimWriter(filename)
    with pytest.raises(InternalError):
        writer.add_end(None, 0.0)
    profile = load_profile("reference")
    playlist, _ = build_playlist("ebu", GEOM)
    writer.init_sim(profile, playlist, default_probes(GEOM), 0.1, 0)
    writer.add_end(Interrupted("by SIGINT"), 0.25)
    writer.close()
    with SimReader(filename) as reader:
        num, message, runtime = reader.ending()
        assert num == Interrupted.num
        assert "by SIGINT" in message
        assert len(reader.log_table()) == 0


def test_reader_errors(tmp_path) -> None:
    with pytest.raises(FileNotFound):
        SimReader(str(tmp_path / "missing.h5"))
    notsim = tmp_path / "text.h5"
    notsim.write_text("plain text")
    with pytest.raises(BadFile):
        SimReader(str(notsim))
    empty = str(tmp_path / "empty.h5")
    SimWriter(empty).close()
    with pytest.raises(BadFile):
        SimReader(empty)
