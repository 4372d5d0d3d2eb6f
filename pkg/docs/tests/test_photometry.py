from math import log

import numpy as np
import pandas as pd
import pytest

from hdrconform.colorimetry import BT709, BT2020, P3D65, pq_eotf, dequantize
from hdrconform.ends import LogError, InsufficientSignal, DomainError, ParameterError
from hdrconform.inputs import AnalysisParam
from hdrconform.photometry import (
    COLUMNS,
    MeasurementSample,
    MeasurementLog,
    merge_logs,
    time_above,
    decay_onset,
    analyze_sustained,
    analyze_window_sweep,
    analyze_eotf_tracking,
    analyze_local_dimming,
    cooloff_recommendation,
    read_xyz_csv,
    analyze_chromaticity,
)

HEADER = ",".join(COLUMNS)


def _series(t, lum, **kwargs) -> MeasurementLog:
    return MeasurementLog.from_samples(
        [MeasurementSample(float(tval), float(lval), **kwargs) for tval, lval in zip(t, lum)]
    )


def _sweep(curve, repeat: int = 4) -> MeasurementLog:
    samples = []
    now = 0.0
    for size, level in curve:
        for index in range(repeat):
            # entry transient on the first sample of each plateau
            samples.append(MeasurementSample(now, level * (1.2 if index == 0 else 1.0),
                                             window_percent=size))
            now += 1.0
    return MeasurementLog.from_samples(samples)


def _decaying() -> MeasurementLog:
    t = np.arange(0, 601)
    lum = np.clip(1000 - 2 * np.maximum(t - 100, 0), 800, 1000)
    return _series(t, lum, window_percent=10.0)


def test_csv_text() -> None:
    text = "\n".join(
        [
            "# sustained run",
            HEADER,
            "0.0,1000.5,white,10,,31.5",
            "",
            "1.0, 999.25,white,10,,",
            "2.0,998,black,,,",
        ]
    )
    log = MeasurementLog.from_text(text, "run.csv")
    assert len(log) == 3
    assert log.t.tolist() == [0.0, 1.0, 2.0]
    assert log.luminance[1] == 999.25
    assert np.isnan(log.data["temp_c"][1])
    assert len(log.probe("black")) == 1
    assert len(log.main_probe()) == 2
    again = MeasurementLog.from_text(log.to_csv())
    assert again.to_csv() == log.to_csv()


def test_csv_file(tmp_path) -> None:
    log = _series([0, 1, 2], [5.0, 6.0, 7.0], code_level=512)
    filename = str(tmp_path / "log.csv")
    log.write_csv(filename)
    back = MeasurementLog.read_csv(filename)
    assert back.luminance.tolist() == [5.0, 6.0, 7.0]
    assert back.data["code_level"].tolist() == [512.0] * 3
    assert back.source == filename


@pytest.mark.parametrize(
    "lines, line",
    [
        (["# comment", "t,lum,probe", "0,1,white"], 2),
        ([HEADER, "0,1,white,,,", "1,abc,white,,,"], 3),
        ([HEADER, "0,1,white,,,", "1,,white,,,"], 3),
        ([HEADER, "0,-1,white,,,"], 2),
        ([HEADER, "0,1,white,,,", "2,1,white,,,", "1,1,white,,,"], 4),
        ([HEADER, "0,1,white,,,", "1,1,grey,,,"], 3),
        ([HEADER, "0,1,white,,"], 2),
    ],
)
def test_csv_errors(lines, line) -> None:
    with pytest.raises(LogError) as err:
        MeasurementLog.from_text("\n".join(lines))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_log_errors() -> None:
    with pytest.raises(LogError):
        MeasurementLog.from_text("# nothing\n\n")
    with pytest.raises(LogError):
        MeasurementLog(pd.DataFrame({"t_s": [0.0], "luminance_nits": [1.0]}))
    with pytest.raises(LogError):
        _series([1, 0], [1, 1])


def test_merge_logs() -> None:
    first = _series([0, 1, 2], [1, 2, 3])
    second = _series([10, 11], [4, 5])
    merged = merge_logs([first, second])
    assert merged.t.tolist() == [0.0, 1.0, 2.0, 2.0, 3.0]
    assert merged.luminance.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]
    with pytest.raises(InsufficientSignal):
        merge_logs([])


def test_time_above() -> None:
    t = np.array([0.0, 10.0, 20.0])
    lum = np.array([0.0, 100.0, 100.0])
    assert time_above(t, lum, 50.0) == pytest.approx(15.0)
    assert time_above(t, lum, 100.0) == pytest.approx(10.0)
    assert time_above(t, lum, 200.0) == 0.0
    rng = np.random.default_rng(7)
    for _ in range(20):
        times = np.cumsum(rng.uniform(0.1, 2.0, 50))
        values = rng.uniform(0, 2000, 50)
        above = [time_above(times, values, thr) for thr in np.linspace(0, 2100, 30)]
        assert all(high >= low for high, low in zip(above[:-1], above[1:]))


def test_decay_onset() -> None:
    t = np.arange(0.0, 40.0)
    flicker = np.where(t % 5 == 0, 800.0, 1000.0)
    assert decay_onset(t, flicker, 0.9, 10.0) is None
    drop = np.where(t < 20, 1000.0, 850.0)
    assert decay_onset(t, drop, 0.9, 10.0) == 20.0
    assert decay_onset(t, drop, 0.9, 30.0) is None
    assert decay_onset(t, drop, 0.8, 10.0) is None


def test_sustained_constant() -> None:
    t = np.arange(0, 601)
    report = analyze_sustained(_series(t, np.full(t.size, 1041.0), window_percent=1.0))
    assert report.peak == 1041.0
    assert report.decay_onset is None
    assert report.stabilized == 1041.0
    assert report.time_above[1000.0] == pytest.approx(600.0)
    assert report.time_above[1500.0] == 0.0
    assert report.duration == 600.0
    assert report.window_percent == 1.0
    assert report.temperature_at_peak is None
    assert report.report().verdict == "info"


def test_sustained_decay() -> None:
    report = analyze_sustained(_decaying())
    assert report.peak == 1000.0
    assert report.decay_onset == 151.0
    assert report.stabilized == 800.0
    assert report.time_above[900.0] == pytest.approx(150.0)
    assert report.decay_onset <= report.duration
    values = list(report.time_above.values())
    assert values == sorted(values, reverse=True)
    assert "decay onset 151.0 s" in report.report().summary


def test_sustained_temperature() -> None:
    t = np.arange(0.0, 300.0)
    lum = np.where(t < 100, 1050.0, 1050.0 - (t - 100))
    samples = [
        MeasurementSample(tval, lval, temperature=25.0 + tval / 10)
        for tval, lval in zip(t, lum)
    ]
    report = analyze_sustained(MeasurementLog.from_samples(samples))
    assert report.temperature_at_peak == pytest.approx(25.0 + 105 / 10)
    assert report.temperature_correlation < -0.8


def test_sustained_invariance() -> None:
    t = np.repeat(np.arange(0.0, 300.0), 2)
    lum = np.clip(1000 - np.maximum(t - 100, 0) + np.tile([0.0, 3.0], 300), 0, None)
    forward = _series(t, lum)
    swapped = _series(t, np.concatenate([lum[1::2, None], lum[::2, None]], axis=1).ravel())
    shifted = _series(t + 50.0, lum)
    reference = analyze_sustained(forward)
    for other in (analyze_sustained(swapped), analyze_sustained(shifted)):
        assert other.peak == reference.peak
        assert other.time_above == pytest.approx(reference.time_above)
        assert other.stabilized == reference.stabilized
    assert analyze_sustained(swapped).decay_onset == reference.decay_onset
    assert analyze_sustained(shifted).decay_onset == reference.decay_onset + 50.0


def test_sustained_errors() -> None:
    with pytest.raises(InsufficientSignal):
        analyze_sustained(_series([0], [1000.0]))
    samples = [
        MeasurementSample(0, 1000, window_percent=1),
        MeasurementSample(1, 900, window_percent=2),
    ]
    with pytest.raises(ParameterError):
        analyze_sustained(MeasurementLog.from_samples(samples))


CURVE = [(1, 1000.0), (2, 1000.0), (5, 900.0), (10, 800.0), (20, 600.0), (50, 400.0),
         (100, 300.0)]


def test_window_sweep() -> None:
    report = analyze_window_sweep(_sweep(CURVE))
    assert report.curve == dict(CURVE)
    assert report.peak == 1000.0
    assert report.max_window_at == {900.0: 5.0, 1000.0: 2.0, 1500.0: None}
    assert report.crossing_at[900.0] == 5.0
    assert report.knee == 2.0
    assert not report.warnings
    assert report.frame()["window_pct"].tolist() == [1, 2, 5, 10, 20, 50, 100]
    sizes = [size for size in report.max_window_at.values() if size is not None]
    assert sizes == sorted(sizes, reverse=True)
    assert report.knee <= max(report.curve)


def test_window_sweep_crossing() -> None:
    report = analyze_window_sweep(_sweep(CURVE), AnalysisParam(levels=[950.0]))
    assert report.max_window_at[950.0] == 2.0
    assert report.crossing_at[950.0] == pytest.approx(3.5)


def test_window_sweep_duplicates() -> None:
    curve = CURVE + [(10, 700.0)]
    report = analyze_window_sweep(_sweep(curve))
    assert report.curve[10.0] == pytest.approx(750.0)
    assert len(report.warnings) == 1
    assert "10%" in report.warnings[0]
    assert report.report().verdict == "warn"
    close = analyze_window_sweep(_sweep(CURVE + [(10, 810.0)]))
    assert not close.warnings


def test_window_sweep_invariance() -> None:
    log = _sweep(CURVE)
    shifted = MeasurementLog(log.data.assign(t_s=log.data["t_s"] + 1000.0))
    assert analyze_window_sweep(shifted).curve == analyze_window_sweep(log).curve


def test_window_sweep_errors() -> None:
    with pytest.raises(InsufficientSignal):
        analyze_window_sweep(_sweep(CURVE[:3]))


CODES = np.arange(64, 941, 4)


def _eotf_log(lum) -> MeasurementLog:
    return MeasurementLog.from_samples(
        [
            MeasurementSample(float(index), float(val), code_level=float(code))
            for index, (code, val) in enumerate(zip(CODES, lum))
        ]
    )


def test_eotf_exact() -> None:
    ideal = pq_eotf(dequantize(CODES))
    report = analyze_eotf_tracking(_eotf_log(ideal))
    assert report.max_deviation < 1e-9
    assert report.passed
    assert report.clip_code is None
    assert report.low["count"] + report.high["count"] == CODES.size - 1
    assert report.report().verdict == "pass"


def test_eotf_scaled() -> None:
    ideal = pq_eotf(dequantize(CODES))
    report = analyze_eotf_tracking(_eotf_log(1.1 * ideal))
    assert report.max_deviation == pytest.approx(0.1)
    assert report.mean_deviation == pytest.approx(0.1)
    assert np.nanmax(report.samples["deviation"]) == pytest.approx(0.1)
    assert not report.passed
    assert report.clip_code == 68


def test_eotf_clipped() -> None:
    ideal = pq_eotf(dequantize(CODES))
    report = analyze_eotf_tracking(_eotf_log(np.minimum(ideal, 1000.0)), peak_anchor=1000.0)
    assert report.passed
    assert report.max_deviation < 1e-9
    assert 715 <= report.clip_code <= 740
    assert report.clip_nits > 1000.0
    unanchored = analyze_eotf_tracking(_eotf_log(np.minimum(ideal, 1000.0)))
    assert not unanchored.passed
    assert unanchored.low["max"] < 1e-9 < unanchored.high["max"]


def test_eotf_errors() -> None:
    with pytest.raises(InsufficientSignal):
        analyze_eotf_tracking(_eotf_log([1.0, 2.0]))
    samples = [MeasurementSample(index, 1.0, code_level=code)
               for index, code in enumerate([20, 500, 600])]
    with pytest.raises(DomainError):
        analyze_eotf_tracking(MeasurementLog.from_samples(samples))


PERCENTS = [1.0, 5.0, 10.0, 20.0, 50.0]


def _dimming(black, white, scale: float = 1.0) -> MeasurementLog:
    samples = []
    now = 0.0
    for pval in PERCENTS:
        for kind, func in (("black", black), ("white", white)):
            for _ in range(3):
                samples.append(MeasurementSample(now, scale * func(pval), kind, pval))
                now += 1.0
    return MeasurementLog.from_samples(samples)


def test_dimming_good() -> None:
    report = analyze_local_dimming(_dimming(lambda p: 0.005, lambda p: 1000.0))
    assert report.black_slope == pytest.approx(0.0, abs=1e-12)
    assert report.classification == "good"
    assert report.percents == PERCENTS
    assert not report.notes
    assert report.report().verdict == "pass"


def test_dimming_poor() -> None:
    report = analyze_local_dimming(_dimming(lambda p: 0.1 + 2 * p, lambda p: 1000.0))
    assert report.black_slope == pytest.approx(2.0)
    assert report.black_r == pytest.approx(1.0)
    assert report.normalized_black_slope == pytest.approx(0.002)
    assert report.classification == "poor"
    assert report.report().verdict == "fail"
    for scale in (0.01, 3.0, 1000.0):
        scaled = analyze_local_dimming(_dimming(lambda p: 0.1 + 2 * p, lambda p: 1000.0, scale))
        assert scaled.black_slope == pytest.approx(2.0 * scale)
        assert scaled.classification == "poor"


def test_dimming_abl_note() -> None:
    report = analyze_local_dimming(_dimming(lambda p: 0.005, lambda p: 1000.0 - 5 * p))
    assert report.classification == "good"
    assert report.white_slope == pytest.approx(-5.0)
    assert report.notes and "brightness limiter" in report.notes[0]


def test_dimming_errors() -> None:
    log = _dimming(lambda p: 0.005, lambda p: 1000.0)
    extra = MeasurementLog.from_samples([MeasurementSample(100.0, 0.005, "black", 30.0)])
    with pytest.raises(InsufficientSignal) as err:
        analyze_local_dimming(merge_logs([log, extra]))
    assert "30" in str(err.value)
    short = MeasurementLog(log.data[log.data["window_pct"] < 10])
    with pytest.raises(InsufficientSignal):
        analyze_local_dimming(short)


def test_cooloff_exponential() -> None:
    heating = np.arange(0.0, 60.0, 2.0)
    cooling = np.arange(60.0, 121.0, 2.0)
    t = np.concatenate([heating, cooling])
    temp = np.concatenate([25 + heating / 2, 25 + 30 * np.exp(-(cooling - 60) / 120)])
    report = cooloff_recommendation(t, temp)
    assert report.cooling
    assert report.tau == pytest.approx(120.0, rel=0.1)
    assert report.ambient == pytest.approx(25.0, abs=2.0)
    # time from the 55 °C peak to 40 °C
    assert report.wait + 60.0 == pytest.approx(120 * log(30 / 15), rel=0.1)
    assert report.report().verdict == "info"


def test_cooloff_branches() -> None:
    assert cooloff_recommendation([0, 10], [50.0, 35.0]).wait == 0.0
    flat = cooloff_recommendation([0, 10, 20, 30, 40], [50.0, 55.0, 55.0, 55.0, 55.0])
    assert not flat.cooling
    assert flat.wait is None
    assert "not cooling" in flat.finding
    assert flat.report().verdict == "warn"
    rising = cooloff_recommendation([0, 10, 20], [45.0, 50.0, 55.0])
    assert not rising.cooling
    two = cooloff_recommendation([0, 10, 20], [60.0, 55.0, 52.0])
    assert two.cooling and two.ambient == 25.0 and two.wait > 0
    with pytest.raises(InsufficientSignal):
        cooloff_recommendation([0], [50.0])


def _xyz(prim, scale: float = 1.0) -> pd.DataFrame:
    rows = []
    for patch, (xval, yval) in (
        ("red", prim.red),
        ("green", prim.green),
        ("blue", prim.blue),
        ("white", prim.white),
    ):
        rows.append([patch, scale * xval / yval, scale, scale * (1 - xval - yval) / yval])
    return pd.DataFrame(rows, columns=["patch", "X", "Y", "Z"])


def test_chromaticity() -> None:
    report = analyze_chromaticity(_xyz(P3D65, 80.0))
    assert report.passed
    assert max(report.errors.values()) < 1e-9
    assert report.xy["red"] == pytest.approx(P3D65.red)
    assert report.coverage[P3D65.name] == pytest.approx(1.0)
    assert report.coverage[BT709.name] == pytest.approx(1.0)
    assert report.coverage[BT2020.name] < 0.8
    assert report.report().verdict == "pass"
    narrow = analyze_chromaticity(_xyz(BT709))
    assert not narrow.passed
    assert narrow.report().verdict == "fail"


def test_chromaticity_csv(tmp_path) -> None:
    filename = tmp_path / "xyz.csv"
    table = _xyz(BT2020)
    filename.write_text("# readings\n" + table.to_csv(index=False))
    readings = read_xyz_csv(str(filename))
    assert list(readings["patch"]) == ["red", "green", "blue", "white"]
    assert analyze_chromaticity(readings, BT2020).passed
    with pytest.raises(InsufficientSignal):
        analyze_chromaticity(readings[readings["patch"] != "blue"])
    bad = tmp_path / "bad.csv"
    bad.write_text("patch,X,Y\nred,1,2\n")
    with pytest.raises(LogError):
        read_xyz_csv(str(bad))
