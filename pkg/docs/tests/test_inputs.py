from math import nan
from os import listdir
from typing import List, Optional, Tuple

import pytest

from hdrconform.caster import Caster
from hdrconform.ends import (
    BadJSON,
    FileNotFound,
    NotAFolder,
    ParameterError,
    SchemaError,
    ValidationError,
)
from hdrconform.inputs import AnalysisParam, LockedError, RunParam, SignallingPolicy
from hdrconform.inval import invalidfloat, invalidint, isvalid, jsonable
from hdrconform.logger import LOGGER
from hdrconform.outputs import Output, atomic_write


class Collect:
    def __init__(self) -> None:
        self.records: List[Tuple[int, str]] = []

    def write_log(self, level: int, time: str, runtime: float, msg: str) -> None:
        self.records.append((level, msg))


def test_caster() -> None:
    assert Caster(List[int])([1, "2", 4.0]) == [1, 2, 4]
    assert Caster(int)("0x3ac") == 940
    assert Caster(bool)("yes") is True
    assert Caster(Tuple[int, str])(["5", 6]) == (5, "6")
    assert Caster(Optional[float])(None) is None
    assert not isvalid(Caster(float)(nan))
    assert Caster(int)(None) is invalidint
    with pytest.raises(ValueError):
        Caster(int)(4.5)
    with pytest.raises(ValueError):
        Caster(bool)("perhaps")
    with pytest.raises(ValueError):
        Caster(List[int])(None)


def test_absent_values() -> None:
    assert not invalidint and isinstance(invalidint, int)
    assert not isvalid(invalidfloat) and not isvalid(nan) and not isvalid(None)
    assert isvalid(0) and isvalid("")
    assert jsonable(invalidfloat) is None and jsonable(3) == 3
    assert invalidint == invalidint and invalidint != 0


def test_run_param(monkeypatch) -> None:
    monkeypatch.setenv("HDRCONFORM_OUTDIR", "/srv/hdr")
    param = RunParam.readdict({"name": "lab", "formats": ["json", "svg"], "seed": "12"})
    assert param.outdir == "/srv/hdr" and param.seed == 12
    with pytest.raises(ValidationError) as err:
        param.set_param(formats=["pdf"])
    assert "RunParam.formats" in str(err.value)
    with pytest.raises(ValidationError):
        RunParam.readdict({"colour": "red"})
    with pytest.raises(ValidationError):
        RunParam.readdict({"loglevel": "LOUD"})
    param.lock()
    with pytest.raises(LockedError):
        param.set_param(name="other")
    param.unlock()
    param.set_param(name="other")
    assert param.name == "other"


def test_param_files(tmp_path) -> None:
    policy = SignallingPolicy.readdict({"min_bit_depth": 12, "clli": "require"})
    filename = str(tmp_path / "policy.json")
    policy.tojson(filename)
    assert SignallingPolicy.readfile(filename) == policy
    assert policy.dumps().startswith('{\n    "schema": "hdrconform.policy",\n    "version": 1,')
    assert AnalysisParam.readfile("") == AnalysisParam()
    with pytest.raises(FileNotFound):
        AnalysisParam.readfile(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text('{"hold": ')
    with pytest.raises(BadJSON):
        AnalysisParam.readfile(str(broken))
    broken.write_text("[1, 2]")
    with pytest.raises(BadJSON):
        AnalysisParam.readfile(str(broken))


def test_schema() -> None:
    with pytest.raises(SchemaError):
        SignallingPolicy.readdict({"schema": "hdrconform.analysis", "version": 1})
    with pytest.raises(SchemaError):
        SignallingPolicy.readdict({"schema": "hdrconform.policy", "version": 2})
    with pytest.raises(ValidationError) as err:
        SignallingPolicy.readdict({"mdcv": "maybe"})
    assert "SignallingPolicy.mdcv" in str(err.value)
    with pytest.raises(ValidationError):
        SignallingPolicy.readdict({"transfer": 42})
    with pytest.raises(ValidationError):
        AnalysisParam.readdict({"decay_fraction": 1.5})
    with pytest.raises(ValidationError):
        AnalysisParam.readdict({"thresholds": [900, -1]})


def test_error_messages() -> None:
    err = ParameterError("gap must be positive")
    assert str(err) == "Error (10): Invalid parameter -> gap must be positive"
    assert err.exitcode == 1
    assert isinstance(err, ValueError)


def test_logger_saver() -> None:
    saver = Collect()
    LOGGER.configure("INFO", "%H:%M:%S")
    LOGGER.setsaver(saver)
    try:
        LOGGER.debug("hidden")
        LOGGER.info("shown")
        LOGGER.warning("kept")
        LOGGER.warning("again")
    finally:
        LOGGER.setsaver(None)
    assert saver.records == [(20, "shown"), (30, "kept"), (30, "again")]
    assert LOGGER.warned() == ["kept", "again"]
    assert LOGGER.warned(("kept",)) == ["again"]
    LOGGER.reset_timer()
    assert LOGGER.warnings == []
    assert LOGGER.runtime >= 0


def test_output(tmp_path) -> None:
    output = Output(RunParam.readdict({"name": "lab", "outdir": str(tmp_path)}))
    assert output.file("sweep", "svg") == str(tmp_path / "lab-sweep.svg")
    assert output.h5file == str(tmp_path / "lab-sim.hdf5")
    assert output.logfile == ""
    atomic_write(output.file("notes", "txt"), "one\n")
    atomic_write(output.file("notes", "txt"), "two\n")
    assert listdir(tmp_path) == ["lab-notes.txt"]
    assert (tmp_path / "lab-notes.txt").read_text() == "two\n"
    with pytest.raises(NotAFolder):
        Output(RunParam.readdict({"outdir": str(tmp_path / "nowhere")}))
