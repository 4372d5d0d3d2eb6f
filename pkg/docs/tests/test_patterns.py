import numpy as np
import pytest
from scipy.stats import chisquare

from hdrconform.ends import ParameterError
from hdrconform.media_io import Geometry
from hdrconform.patterns import (
    WINDOW_SIZES,
    EBU_WINDOW_SIZES,
    NIGHT_SKY_PERCENTS,
    make_spec,
    render,
    recount,
    generate,
    window_region,
    add_noise,
    build_playlist,
    gen_pq_steps,
)

UHD = Geometry.parse("3840x2160")


def _geom(width: int, height: int) -> Geometry:
    return Geometry.readdict({"width": width, "height": height})


def test_night_sky_uhd() -> None:
    frames, manifest = generate(make_spec({"kind": "night-sky", "percent": 1, "seed": 5}), UHD)
    entry = manifest.entries[0]
    assert entry["peak_pixels"] == 82944
    assert recount(frames[0], entry) == 82944
    assert entry["peak_code"] == 940
    assert entry["nominal_peak_nits"] == 10000.0
    luma = frames[0].luma
    assert int(luma.min()) == 64 and int(luma.max()) == 940
    assert np.count_nonzero(luma == 64) == UHD.pixels - 82944


def test_night_sky_full() -> None:
    frame, entry = render(make_spec({"kind": "night-sky", "percent": 100}), _geom(16, 8))
    assert entry["peak_pixels"] == 128
    assert np.all(frame.luma == 940)
    with pytest.raises(ParameterError):
        make_spec({"kind": "night-sky", "percent": 0})
    with pytest.raises(ParameterError):
        make_spec({"kind": "night-sky", "percent": 100.5})


def test_night_sky_determinism() -> None:
    geom = _geom(64, 32)
    first, _ = render(make_spec({"kind": "night-sky", "percent": 10, "seed": 9}), geom)
    again, _ = render(make_spec({"kind": "night-sky", "percent": 10, "seed": 9}), geom)
    other, _ = render(make_spec({"kind": "night-sky", "percent": 10, "seed": 10}), geom)
    assert first.same_samples(again)
    assert not first.same_samples(other)


def test_night_sky_uniformity() -> None:
    geom = _geom(256, 256)
    for percent in (1, 5, 20, 50):
        frame, entry = render(make_spec({"kind": "night-sky", "percent": percent, "seed": 1}), geom)
        cells = (frame.luma == entry["peak_code"]).reshape(16, 16, 16, 16).sum(axis=(1, 3))
        assert chisquare(cells.ravel()).pvalue > 0.001


def test_night_sky_playlist() -> None:
    playlist, manifest = build_playlist("night-sky", _geom(40, 20), seed=4)
    assert [entry.spec.percent for entry in playlist.entries] == list(NIGHT_SKY_PERCENTS)
    counts = [info["peak_pixels"] for _, _, info in playlist.frames()]
    assert counts == [8, 16, 40, 80, 160, 400, 640]
    assert manifest.kind == "playlist:night-sky"


def test_window_sizes() -> None:
    assert len(WINDOW_SIZES) == 19
    for size in WINDOW_SIZES:
        xpos, ypos, width, height = window_region(UHD, size)
        target = size / 100 * UHD.pixels
        assert abs(width * height - target) <= 0.001 * target
        assert xpos == (UHD.width - width) // 2 and ypos == (UHD.height - height) // 2
        assert width / height == pytest.approx(16 / 9, rel=0.02)
    assert window_region(UHD, 1) == (1728, 972, 384, 216)
    assert window_region(UHD, 100) == (0, 0, 3840, 2160)


def test_white_window() -> None:
    frame, entry = render(make_spec({"kind": "window", "area_percent": 1}), UHD)
    assert entry["peak_pixels"] == 82944 == recount(frame, entry)
    assert entry["region"] == [1728, 972, 384, 216]
    assert np.all(frame.luma[972:1188, 1728:2112] == 940)
    assert frame.luma[971, 1728] == 64
    assert frame.signalling.content_light.max_cll == 10000.0
    full, _ = render(make_spec({"kind": "window", "area_percent": 100}), _geom(32, 18))
    assert np.all(full.luma == 940)
    _, entry = render(make_spec({"kind": "window", "peak_nits": 1000}), _geom(32, 18))
    assert entry["peak_code"] == 723
    with pytest.raises(ParameterError):
        make_spec({"kind": "window", "area_percent": -1})


def test_grey_ramp_full() -> None:
    frame, entry = render(make_spec({"kind": "ramp"}), _geom(2048, 16))
    codes = frame.luma[0]
    assert sorted(set(codes.tolist())) == list(range(1024))
    assert np.all(np.diff(codes.astype(int)) >= 0)
    assert (entry["low_code"], entry["high_code"], entry["levels"]) == (0, 1023, 1024)
    assert np.all(frame.luma == codes[np.newaxis, :])


def test_grey_ramp_narrow() -> None:
    spec = make_spec({"kind": "ramp", "signal_range": "narrow", "levels": 877})
    frame, _ = render(spec, _geom(1754, 4))
    bands = np.unique(frame.luma[0])
    assert bands.tolist() == list(range(64, 941))
    with pytest.raises(ParameterError):
        make_spec({"kind": "ramp", "signal_range": "narrow", "levels": 1024})
    with pytest.raises(ParameterError):
        render(make_spec({"kind": "ramp"}), _geom(512, 4))


def test_grey_ramp_steps() -> None:
    spec = make_spec({"kind": "ramp", "levels": 100, "orientation": "vertical"})
    frame, entry = render(spec, _geom(8, 400))
    bands = np.unique(frame.luma[:, 0])
    steps = np.diff(bands.astype(int))
    assert steps.max() - steps.min() <= 1
    assert np.all(frame.luma == frame.luma[:, :1])


def test_grey_ramp_window() -> None:
    spec = make_spec({"kind": "ramp", "levels": 256, "window_percent": 10})
    _, entry = render(spec, UHD)
    _, _, width, height = entry["region"]
    assert width * height == pytest.approx(0.1 * UHD.pixels, rel=0.001)


def test_flat() -> None:
    geom = _geom(8, 4)
    frame8, _ = render(make_spec({"kind": "flat", "colour": "#555555", "bit_depth": 8}), geom)
    assert np.all(frame8.luma == 85)
    frame, entry = render(make_spec({"kind": "flat", "colour": "#555555"}), geom)
    assert np.all(frame.luma == 340)
    assert np.all(frame.planes[1] == 512)
    assert entry["nominal_nits"] == pytest.approx(15.1, abs=0.1)
    black, _ = render(make_spec({"kind": "flat"}), geom)
    assert np.all(black.luma == 0)
    coded, _ = render(make_spec({"kind": "flat", "code": 600}), geom)
    assert np.all(coded.luma == 600)
    malformed = ("#55", "#zzzzzz", "#-55555", "#+55555", "#0x5555", "#55_555", "# 5555 ")
    for bad in malformed + ("##555555",):
        with pytest.raises(ParameterError):
            make_spec({"kind": "flat", "colour": bad})
    assert make_spec({"kind": "flat", "colour": "aBcDeF"}).rgb8() == (171, 205, 239)
    with pytest.raises(ParameterError):
        make_spec({"kind": "checkerboard"})


def test_noise() -> None:
    flat, _ = render(make_spec({"kind": "flat", "colour": "#808080"}), _geom(64, 64))
    assert add_noise(flat, 0.0).same_samples(flat)
    spec = make_spec({"kind": "noise", "sigma": 2, "seed": 3})
    noisy, entry = render(spec, _geom(1024, 1024))
    assert entry["noise_sigma"] == 2
    assert noisy.luma.astype(float).std() == pytest.approx(2.0, rel=0.1)
    again, _ = render(spec, _geom(1024, 1024))
    assert noisy.same_samples(again)
    with pytest.raises(ParameterError):
        add_noise(flat, -1.0)


def test_noise_stays_legal() -> None:
    spec = make_spec(
        {
            "kind": "noise",
            "base": {"kind": "window", "area_percent": 50},
            "sigma": 8,
        }
    )
    frame, _ = render(spec, _geom(64, 36))
    assert int(frame.luma.min()) >= 64 and int(frame.luma.max()) <= 940
    assert int(frame.planes[1].min()) >= 64 and int(frame.planes[1].max()) <= 960


def test_playlists() -> None:
    geom = _geom(64, 36)
    sustained, _ = build_playlist("sustained", geom)
    assert len(sustained.entries) == 1
    assert sustained.duration == 600.0
    assert sustained.entries[0].spec.area_percent == 1.0
    window, manifest = build_playlist("window", geom)
    assert [entry.spec.area_percent for entry in window.entries] == list(WINDOW_SIZES)
    assert window.duration == 19.0
    assert len(manifest.entries) == 19
    ebu, _ = build_playlist("ebu", geom)
    assert [entry.spec.area_percent for entry in ebu.entries] == list(EBU_WINDOW_SIZES)
    gapped, _ = build_playlist("window", geom, values=[1, 10, 50], gap=0.5)
    kinds = [entry.spec.kind for entry in gapped.entries]
    assert kinds == ["window", "flat", "window", "flat", "window"]
    assert gapped.duration == 4.0
    with pytest.raises(ParameterError):
        build_playlist("window", geom, values=[])
    with pytest.raises(ParameterError):
        build_playlist("checkerboard", geom)


def test_pq_steps() -> None:
    frames, manifest = gen_pq_steps([100, 1000], _geom(32, 18))
    assert len(frames) == 2
    assert manifest.kind == "pq-steps"
    assert [entry["peak_code"] for entry in manifest.entries] == [
        int(frames[0].luma.max()),
        723,
    ]
    assert manifest.entries[1]["target_nits"] == 1000
    with pytest.raises(ParameterError):
        gen_pq_steps([], _geom(32, 18))


def test_generate_frames() -> None:
    geom = Geometry.parse("32x18", frame_count=3)
    frames, manifest = generate(make_spec({"kind": "window", "area_percent": 25}), geom)
    assert len(frames) == 3
    assert manifest.geometry.frame_count == 3
    assert manifest.spec["kind"] == "window"
    assert manifest.signalling.transfer_characteristics == 16
