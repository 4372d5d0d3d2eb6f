from decimal import Decimal, getcontext

import numpy as np
import pytest

from hdrconform.colorimetry import (
    BT709,
    BT2020,
    P3D65,
    PrimariesSet,
    TransferCode,
    Luminance,
    CodeValue,
    pq_eotf,
    pq_inv_eotf,
    quantize,
    dequantize,
    luma_limits,
    rgb_to_ycbcr,
    ycbcr_to_rgb,
    rgb_space_convert,
    rgb_to_xyz,
    xyz_to_rgb,
    xy_chromaticity,
    point_in_gamut,
    gamut_area,
    gamut_coverage,
    get_primaries,
    gamut_marker,
    convert_rgb444_to_ycbcr420,
    ycbcr420_to_rgb444,
)
from hdrconform.ends import DomainError, DegenerateInput, ParameterError, UnsupportedSignal
from hdrconform.media_io import Frame


def _oracle_inv(nits: int) -> Decimal:
    getcontext().prec = 50
    m1 = Decimal(2610) / Decimal(16384)
    m2 = Decimal(2523) / Decimal(4096) * 128
    c1 = Decimal(3424) / Decimal(4096)
    c2 = Decimal(2413) / Decimal(4096) * 32
    c3 = Decimal(2392) / Decimal(4096) * 32
    ypow = (Decimal(nits) / Decimal(10000)) ** m1
    return ((c1 + c2 * ypow) / (1 + c3 * ypow)) ** m2


def test_pq_anchors() -> None:
    assert pq_eotf(1.0) == 10000.0
    assert pq_eotf(0.0) == 0.0
    assert pq_inv_eotf(10000.0) == pytest.approx(1.0, abs=1e-15)
    assert isinstance(pq_eotf(0.5), float)
    assert pq_eotf(1 / 3) == pytest.approx(15.1, abs=0.1)


def test_pq_inverse_against_oracle() -> None:
    for nits in (1, 100, 1000, 4000):
        assert pq_inv_eotf(float(nits)) == pytest.approx(float(_oracle_inv(nits)), abs=1e-12)
    assert pq_inv_eotf(100.0) == pytest.approx(0.50808, abs=1e-5)
    assert pq_inv_eotf(1000.0) == pytest.approx(0.7518, abs=1e-3)
    assert quantize(pq_inv_eotf(1000.0)) == 723


def test_pq_round_trip() -> None:
    rng = np.random.default_rng(2084)
    grid = np.concatenate([np.linspace(0.0, 1.0, 500001), rng.random(500000)])
    back = pq_inv_eotf(pq_eotf(grid))
    assert np.abs(back - grid).max() < 1e-6


def test_pq_monotone() -> None:
    rng = np.random.default_rng(12)
    signal = np.unique(rng.uniform(1e-4, 1.0, 100000))
    assert (np.diff(pq_eotf(signal)) > 0).all()


def test_pq_domain() -> None:
    with pytest.raises(DomainError):
        pq_eotf(1.5)
    with pytest.raises(DomainError):
        pq_eotf(np.array([0.2, -0.1]))
    with pytest.raises(ValueError):
        pq_inv_eotf(10000.5)
    assert pq_eotf(1.5, clamp=True) == 10000.0
    assert pq_inv_eotf(-3.0, clamp=True) == pytest.approx(float(_oracle_inv(0)), abs=1e-15)


def test_value_types() -> None:
    assert TransferCode(1.2, clamp=True) == 1.0
    with pytest.raises(DomainError):
        TransferCode(1.2)
    with pytest.raises(DomainError):
        Luminance(-1.0)
    assert not Luminance(20000.0).pq_representable
    assert CodeValue(940).legal
    assert not CodeValue(1000).legal
    assert CodeValue(1000).nits == 10000.0
    assert CodeValue(64).signal == 0.0
    with pytest.raises(DomainError):
        CodeValue(1024, 10)
    with pytest.raises(ParameterError):
        CodeValue(12, 9)


def test_quantize_examples() -> None:
    assert quantize(1.0, 10, "narrow") == 940
    assert quantize(0.0, 10, "narrow") == 64
    assert quantize(0.0, 10, "narrow", "chroma") == 512
    assert quantize(1 / 3, 8, "full") == 0x55
    assert quantize(0.5, 10, "narrow", "chroma") == 960
    assert luma_limits(10, "narrow") == (64, 940)
    assert luma_limits(12, "full") == (0, 4095)
    # half codes round away from zero
    assert quantize(0.5 / 1023, 10, "full") == 1
    assert quantize(-0.5 / 1023, 10, "full") == 0


def test_quantize_round_trip() -> None:
    for depth in (8, 10, 12):
        for signal_range in ("narrow", "full"):
            low, high = luma_limits(depth, signal_range)
            codes = np.arange(low, high + 1)
            values = dequantize(codes, depth, signal_range)
            assert np.array_equal(quantize(values, depth, signal_range), codes)
            if signal_range == "narrow":
                step = 1 / (219 * 2 ** (depth - 8))
            else:
                step = 1 / (2 ** depth - 1)
            grid = np.linspace(0.0, 1.0, 20001)
            back = dequantize(quantize(grid, depth, signal_range), depth, signal_range)
            error = np.abs(back - grid)
            assert error.max() <= step / 2 + 1e-12


def test_narrow_excursions_kept() -> None:
    assert quantize(1.05, 10, "narrow") > 940
    assert quantize(-0.05, 10, "narrow") < 64
    assert quantize(2.0, 10, "narrow") == 1023


def test_ycbcr() -> None:
    white = rgb_to_ycbcr(np.array([1.0, 1.0, 1.0]))
    assert white == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)
    assert rgb_to_ycbcr(np.zeros(3)) == pytest.approx([0.0, 0.0, 0.0], abs=1e-15)
    red = rgb_to_ycbcr(np.array([1.0, 0.0, 0.0]), "bt2020")
    assert red[0] == pytest.approx(0.2627, abs=1e-12)
    assert red[2] == pytest.approx(0.5, abs=1e-12)
    assert rgb_to_ycbcr(np.array([0.0, 0.0, 1.0]), 1)[1] == pytest.approx(0.5, abs=1e-12)
    rng = np.random.default_rng(709)
    triples = rng.random((100000, 3))
    for matrix in ("bt709", "bt2020"):
        back = ycbcr_to_rgb(rgb_to_ycbcr(triples, matrix), matrix)
        assert np.abs(back - triples).max() < 1e-12
    with pytest.raises(UnsupportedSignal):
        rgb_to_ycbcr(triples, 5)


def test_primaries_conversion() -> None:
    rgb = np.array([[0.2, 0.5, 0.9], [1.0, 0.0, 0.0]])
    assert rgb_space_convert(rgb, BT2020, BT2020) == pytest.approx(rgb, abs=1e-12)
    assert rgb_space_convert(np.ones(3), BT2020, BT709) == pytest.approx(np.ones(3), abs=1e-9)
    red709 = rgb_space_convert(np.array([1.0, 0.0, 0.0]), BT2020, BT709)
    assert ((red709 < 0) | (red709 > 1)).any()
    xyz = rgb_to_xyz(np.array([0.3, 0.6, 0.1]), P3D65)
    assert xyz_to_rgb(xyz, P3D65) == pytest.approx([0.3, 0.6, 0.1], abs=1e-12)


def test_gamut_nesting() -> None:
    rng = np.random.default_rng(2020)
    colours = rng.random((10000, 3))
    inside = rgb_space_convert(colours, BT709, BT2020)
    assert inside.min() >= -1e-12 and inside.max() <= 1 + 1e-12
    for primary in np.eye(3):
        out = rgb_space_convert(primary, BT2020, BT709)
        assert ((out < -1e-4) | (out > 1 + 1e-4)).any()


def test_chromaticity() -> None:
    assert xy_chromaticity(np.ones(3)) == pytest.approx((1 / 3, 1 / 3))
    for scale in (0.01, 1.0, 250.0):
        white = rgb_to_xyz(np.full(3, scale), BT2020)
        assert xy_chromaticity(white) == pytest.approx((0.3127, 0.3290), abs=1e-4)
    red = rgb_to_xyz(np.array([1.0, 0.0, 0.0]), BT2020)
    assert xy_chromaticity(red) == pytest.approx((0.708, 0.292), abs=1e-4)
    xval, yval = xy_chromaticity(np.array([[1.0, 1.0, 1.0], [2.0, 1.0, 1.0]]))
    assert xval == pytest.approx([1 / 3, 0.5])
    with pytest.raises(DegenerateInput):
        xy_chromaticity(np.zeros(3))


def test_gamut_geometry() -> None:
    with pytest.raises(DegenerateInput):
        PrimariesSet("flat", (0.1, 0.1), (0.2, 0.2), (0.3, 0.3))
    assert gamut_area(BT2020) > gamut_area(P3D65) > gamut_area(BT709)
    assert gamut_coverage(BT709, BT2020) == pytest.approx(gamut_area(BT709) / gamut_area(BT2020))
    assert gamut_coverage(BT2020, BT709) == pytest.approx(1.0)
    assert gamut_coverage(P3D65, P3D65) == pytest.approx(1.0)
    points = np.array([[0.3127, 0.3290], [0.708, 0.292], [0.9, 0.9]])
    assert point_in_gamut(points, BT2020, 1e-9).tolist() == [True, True, False]
    assert point_in_gamut(points, BT709).tolist() == [True, False, False]
    assert get_primaries("BT.2020") is BT2020
    assert get_primaries(12) is P3D65
    with pytest.raises(UnsupportedSignal):
        get_primaries("adobe")


def _frame_2020(linear: np.ndarray) -> Frame:
    return Frame.from_rgb(pq_inv_eotf(linear * 10000), 12, "full")


def _bt709_gradient(width: int = 64, height: int = 32) -> np.ndarray:
    xval = np.linspace(0.05, 0.9, width)
    yval = np.linspace(0.05, 0.9, height)
    lin709 = np.stack(np.broadcast_arrays(xval[None, :], yval[:, None], 0.5), axis=-1)
    return rgb_space_convert(lin709, BT709, BT2020)


def test_gamut_marker() -> None:
    safe = _frame_2020(_bt709_gradient())
    assert gamut_marker(safe, BT709).count == 0
    green = _frame_2020(np.broadcast_to([0.0, 1.0, 0.0], (16, 16, 3)))
    marked = gamut_marker(green, BT709)
    assert marked.fraction == 1.0
    assert marked.asdict() == {"target": "BT.709", "count": 256, "fraction": 1.0}
    half = np.concatenate(
        [np.full((16, 8, 3), 0.5), np.broadcast_to([0.0, 1.0, 0.0], (16, 8, 3))], axis=1
    )
    assert gamut_marker(_frame_2020(half), BT709).fraction == 0.5
    with pytest.raises(UnsupportedSignal):
        gamut_marker(safe.derive(transfer_characteristics=1), BT709)


def test_gamut_marker_nesting() -> None:
    rng = np.random.default_rng(3)
    for _ in range(5):
        frame = _frame_2020(rng.random((24, 24, 3)))
        p3 = gamut_marker(frame, P3D65).mask
        bt709 = gamut_marker(frame, BT709).mask
        assert not (p3 & ~bt709).any()


def _psnr(ref: np.ndarray, rec: np.ndarray) -> float:
    return float(10 * np.log10(1.0 / np.mean((ref - rec) ** 2)))


def test_conversion_fidelity() -> None:
    xval = np.linspace(0.2, 0.8, 256)
    yval = np.linspace(0.3, 0.7, 256)
    rgb = np.stack(np.broadcast_arrays(xval[None, :], yval[:, None], 0.45), axis=-1)
    source = Frame.from_rgb(rgb, 12, "full")
    (converted,) = convert_rgb444_to_ycbcr420([source])
    assert (converted.colour, converted.subsampling, converted.bit_depth) == ("ycbcr", "420", 10)
    assert converted.signalling.matrix_coefficients == 9
    (back,) = ycbcr420_to_rgb444([converted])
    ref, rec = source.to_rgb(), back.to_rgb()
    for channel in range(3):
        assert _psnr(ref[..., channel], rec[..., channel]) >= 60.0


def test_conversion_deterministic() -> None:
    rng = np.random.default_rng(4)
    source = Frame.from_rgb(rng.random((32, 48, 3)), 12, "full")
    first = convert_rgb444_to_ycbcr420([source])[0]
    second = convert_rgb444_to_ycbcr420([source])[0]
    assert first.same_samples(second)


def test_conversion_constant_frames() -> None:
    grey = Frame.from_rgb(np.full((8, 8, 3), 0.4), 12, "full")
    (converted,) = convert_rgb444_to_ycbcr420([grey])
    assert np.all(converted.planes[1] == 512) and np.all(converted.planes[2] == 512)
    assert np.unique(converted.planes[0]).size == 1
    red = Frame.from_rgb(np.broadcast_to([1.0, 0.0, 0.0], (8, 8, 3)), 12, "full")
    (converted,) = convert_rgb444_to_ycbcr420([red])
    assert np.all(converted.planes[0] == quantize(0.2627))
    assert np.all(converted.planes[2] == 960)
    colour = np.array([0.3, 0.5, 0.7])
    ycc = rgb_to_ycbcr(dequantize(quantize(colour, 12, "full"), 12, "full"))
    (converted,) = convert_rgb444_to_ycbcr420(
        [Frame.from_rgb(np.broadcast_to(colour, (6, 10, 3)), 12, "full")]
    )
    for plane, value, kind in zip(converted.planes, ycc, ("luma", "chroma", "chroma")):
        assert np.all(plane == quantize(value, 10, "narrow", kind))


def test_conversion_errors() -> None:
    odd = Frame.from_rgb(np.full((3, 4, 3), 0.5), 12, "full")
    with pytest.raises(ParameterError):
        convert_rgb444_to_ycbcr420([odd])
    (ycc,) = convert_rgb444_to_ycbcr420([Frame.from_rgb(np.full((4, 4, 3), 0.5), 12, "full")])
    with pytest.raises(UnsupportedSignal):
        convert_rgb444_to_ycbcr420([ycc])
