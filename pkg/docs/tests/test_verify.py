from os import path
from random import Random

import numpy as np
import pytest

from hdrconform.colorimetry import BT2020, P3D65
from hdrconform.ends import InsufficientSignal, GeometryMismatch, ParameterError
from hdrconform.inputs import SignallingPolicy, AnalysisParam
from hdrconform.inval import invalidint
from hdrconform.logger import LOGGER
from hdrconform.media_io import Frame, Geometry, HdrSignalling
from hdrconform.patterns import make_spec, render, add_noise
from hdrconform.verify import (
    SignallingReport,
    IDENTICAL,
    verify_signalling,
    signal_stats,
    estimate_effective_bitdepth,
    detect_banding,
    roundtrip_fidelity,
    verify_capability,
    check_primaries,
)

HERE = path.dirname(__file__)


def _ramp(width: int = 2048, height: int = 8, factor: int = 1) -> Frame:
    frame, _ = render(make_spec({"kind": "ramp"}), Geometry.parse(f"{width}x{height}"))
    return frame.derive(planes=[(frame.luma // factor) * factor] + frame.planes[1:])


def test_signalling_hdr10() -> None:
    report = verify_signalling(HdrSignalling.hdr10(max_cll=1000, max_fall=400), 10)
    assert report.passed and not report.violations and not report.warnings
    assert report.report().verdict == "pass"


def test_signalling_failures() -> None:
    sdr = HdrSignalling.hdr10().copy(transfer_characteristics=1)
    report = verify_signalling(sdr, 10)
    assert not report.passed
    assert report.violations[0].reason.startswith("transfer characteristics not PQ")
    legacy = HdrSignalling(1, 1, 1)
    violations = verify_signalling(legacy, 10).violations
    assert [clause.name for clause in violations] == [
        "transfer characteristics",
        "colour primaries",
        "matrix coefficients",
    ]
    assert verify_signalling(legacy, 10).report().failed
    absent = verify_signalling(HdrSignalling(), 10)
    assert "transfer characteristics absent (expected PQ)" in absent.report().summary
    assert not verify_signalling(HdrSignalling.hdr10(), 8).passed


def test_signalling_metadata_policy() -> None:
    bare = HdrSignalling.hdr10().copy(mastering_display=None)
    report = verify_signalling(bare, 10)
    assert report.passed
    assert report.warnings == [
        "mastering display metadata absent",
        "content light level metadata absent",
    ]
    strict = SignallingPolicy.readfile(path.join(HERE, "policy-strict.json"))
    assert strict.min_bit_depth == 12
    report = verify_signalling(bare, 12, strict)
    assert [clause.name for clause in report.violations] == [
        "mastering display",
        "content light level",
    ]
    assert not verify_signalling(HdrSignalling.hdr10(max_cll=1), 10, strict).passed
    unknown = verify_signalling(HdrSignalling.hdr10(max_cll=1), invalidint)
    assert unknown.passed and "bit depth unknown" in unknown.warnings
    with pytest.raises(ParameterError):
        SignallingPolicy.readdict({"mdcv": "maybe"})


def test_signalling_pure() -> None:
    sig = HdrSignalling(9, 1, 9)
    first, second = verify_signalling(sig, 10), verify_signalling(sig, 10)
    assert first.report().asdict() == second.report().asdict()
    shuffler = Random(4)
    for _ in range(10):
        clauses = list(first.clauses)
        shuffler.shuffle(clauses)
        assert SignallingReport(clauses).passed == first.passed


def test_stats() -> None:
    geom = Geometry.parse("64x36")
    black, _ = render(make_spec({"kind": "flat", "code": 64, "signal_range": "narrow"}), geom)
    stats = signal_stats([black])
    assert (stats.planes[0].minimum, stats.planes[0].maximum) == (64, 64)
    assert stats.violations == 0
    window, entry = render(make_spec({"kind": "window", "area_percent": 50}), geom)
    assert entry["peak_pixels"] == geom.pixels // 2
    luma = signal_stats([window]).planes[0]
    assert luma.mean == (64 + 940) / 2
    assert luma.minimum <= luma.mean <= luma.maximum
    assert luma.histogram[940] == geom.pixels // 2
    faulty = black.derive(planes=[black.luma.copy()] + black.planes[1:])
    faulty.luma[3, 5] = 4
    stats = signal_stats([faulty])
    assert stats.violations == 1 and stats.planes[0].below == 1
    assert stats.report().verdict == "fail"
    assert stats.report().data["Y"]["below_range"] == 1
    with pytest.raises(InsufficientSignal):
        signal_stats([])


def test_stats_order_invariant() -> None:
    rng = np.random.default_rng(1)
    frames = [
        Frame([rng.integers(0, 1024, (6, 8))] + [rng.integers(0, 1024, (3, 4))] * 2)
        for _ in range(5)
    ]
    forward = signal_stats(frames).report().asdict()
    backward = signal_stats(frames[::-1]).report().asdict()
    assert forward == backward
    with pytest.raises(GeometryMismatch):
        signal_stats([frames[0], frames[1].derive(signal_range="full")])


def test_bitdepth_decimation() -> None:
    for factor in (1, 2, 4, 8, 16):
        report = estimate_effective_bitdepth(_ramp(factor=factor))
        assert report.step_gcd == factor
        assert report.effective_bits == 10 - np.log2(factor)
        assert report.distinct_levels == 1024 // factor
        assert report.confidence == "high"
    assert estimate_effective_bitdepth(_ramp()).verdict == "clean chain"
    eight = estimate_effective_bitdepth(_ramp(factor=4))
    assert eight.verdict == "8-bit decimation"
    assert eight.report().verdict == "fail"


def test_bitdepth_noise() -> None:
    noisy = add_noise(_ramp(factor=4), 2.0, seed=2)
    report = estimate_effective_bitdepth(noisy)
    assert report.confidence == "noise-masked"
    assert report.noise_sigma_estimate == pytest.approx(2.0, rel=0.25)
    assert report.report().verdict == "warn"
    assert report.report().warnings
    bands = noisy.luma[:, 1024:1032]
    assert np.unique(bands).size >= 5


def test_bitdepth_band_edges() -> None:
    # as many band edges as in-band positions once cropped
    for factor in (1, 4):
        report = estimate_effective_bitdepth(_ramp(factor=factor), (0, 0, 2047, 8))
        assert report.noise_sigma_estimate == 0.0
        assert report.confidence == "high"
        assert report.report().verdict == ("pass" if factor == 1 else "fail")
    report = estimate_effective_bitdepth(_ramp(width=1024), (0, 0, 1024, 8))
    assert report.noise_sigma_estimate == 0.0 and report.verdict == "clean chain"


def test_bitdepth_noise_monotone() -> None:
    for seed in range(4):
        seen_degraded = False
        for sigma in (0.0, 1.0, 2.0, 3.0, 4.0):
            confidence = estimate_effective_bitdepth(
                add_noise(_ramp(factor=4), sigma, seed)
            ).confidence
            if seen_degraded:
                assert confidence != "high"
            seen_degraded = seen_degraded or confidence != "high"


def test_bitdepth_region() -> None:
    spec = make_spec({"kind": "ramp", "window_percent": 50})
    frame, entry = render(spec, Geometry.parse("3000x20"))
    report = estimate_effective_bitdepth(frame, tuple(entry["region"]))
    assert report.step_gcd == 1 and report.distinct_levels == 1024
    with pytest.raises(ParameterError):
        estimate_effective_bitdepth(frame, (2990, 0, 20, 4))
    flat, _ = render(make_spec({"kind": "flat"}), Geometry.parse("8x8"))
    with pytest.raises(InsufficientSignal):
        estimate_effective_bitdepth(flat)
    spec = make_spec({"kind": "ramp", "levels": 32, "orientation": "vertical"})
    vertical, _ = render(spec, Geometry.parse("4x64"))
    assert estimate_effective_bitdepth(vertical, orientation="vertical").step_gcd == 33


def test_banding() -> None:
    frame, _ = render(make_spec({"kind": "ramp"}), Geometry.parse("4096x4"))
    bands = detect_banding(frame)
    assert bands.band_count == 1024 and bands.mean_width == 4.0 and bands.width_spread == 0
    assert bands.edges[:3] == [4, 8, 12]
    decimated = detect_banding(_ramp(4096, 4, 4))
    assert decimated.band_count == 256 and decimated.mean_width == 16.0
    flat, _ = render(make_spec({"kind": "flat", "colour": "#555555"}), Geometry.parse("16x4"))
    assert detect_banding(flat).band_count == 1
    assert detect_banding(flat).report().verdict == "info"


def test_banding_not_monotone() -> None:
    LOGGER.reset_timer()
    codes = np.concatenate([np.arange(0, 400, 4), np.arange(400, 0, -4)]).astype(np.uint16)
    planes = [np.tile(codes, (4, 1)), np.full((4, 200), 512), np.full((4, 200), 512)]
    frame = Frame(planes, 10, "444", "full")
    bands = detect_banding(frame)
    assert not bands.monotone
    assert bands.report().warnings == ["region is not a monotone gradient"]
    assert any("non monotone" in msg for _, msg in LOGGER.warnings)


def test_fidelity() -> None:
    rng = np.random.default_rng(5)
    reference = Frame.from_rgb(rng.uniform(0.1, 0.9, (16, 16, 3)), 10, "full")
    same = roundtrip_fidelity(reference, reference)
    assert same.identical and same.psnr == [IDENTICAL] * 3
    assert same.report().summary == IDENTICAL and same.report().verdict == "pass"
    planes = [plane.copy() for plane in reference.planes]
    planes[1][4, 7] += 1
    off = roundtrip_fidelity(reference, reference.derive(planes=planes))
    assert off.psnr[0] == IDENTICAL and off.psnr[2] == IDENTICAL
    assert off.max_abs_error[1] == pytest.approx(1 / 1023)
    assert off.psnr[1] == pytest.approx(10 * np.log10(256 * 1023 ** 2))
    assert off.passed
    with pytest.raises(GeometryMismatch):
        roundtrip_fidelity(reference, Frame.from_rgb(np.zeros((8, 8, 3))))


def test_capability() -> None:
    curve = {1.0: 1200.0, 10.0: 900.0, 100.0: 400.0}
    report = verify_capability(curve)
    assert report.verdict == "pass"
    assert report.data["luminance"] == pytest.approx(1200 - 300 * 4 / 9)
    param = AnalysisParam.readdict({"capability_window": 10.0})
    assert verify_capability(curve, param).failed
    with pytest.raises(InsufficientSignal):
        verify_capability({})


def test_primaries_check() -> None:
    same = check_primaries(BT2020, BT2020)
    assert same.passed and same.coverage == pytest.approx(1.0)
    p3 = check_primaries(P3D65, BT2020)
    assert not p3.passed
    assert p3.errors["white"] == 0.0
    assert p3.coverage < 0.8
    assert p3.report().verdict == "fail"
