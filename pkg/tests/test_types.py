import numpy as np
import pytest
from hypothesis import given, strategies as st

from tonguecurve.errors import BoundsError, InvalidContourError, InvalidMetaError, ShapeError
from tonguecurve.preprocess import CropRect, crop
from tonguecurve.types import (
    BinaryMask,
    Contour,
    GrayImage,
    ImageMeta,
    ProbMap,
    WeightMap,
    get_pixel,
    pixel_spacing,
    set_pixel,
)


def test_get_pixel_row_major():
    img = GrayImage.from_buffer(2, 2, [10, 20, 30, 40])
    assert get_pixel(img, (0, 0)) == 10
    assert get_pixel(img, (1, 0)) == 20
    assert get_pixel(img, (1, 1)) == 40


def test_get_pixel_out_of_bounds():
    img = GrayImage.from_buffer(2, 2, [10, 20, 30, 40])
    with pytest.raises(BoundsError):
        get_pixel(img, (2, 0))
    with pytest.raises(BoundsError):
        get_pixel(img, (0, -1))


@pytest.mark.parametrize("cls", [GrayImage, ProbMap, BinaryMask, WeightMap])
def test_mismatched_buffer_rejected(cls):
    with pytest.raises(ShapeError):
        cls.from_buffer(3, 2, [0] * 5)


def test_value_ranges_enforced():
    with pytest.raises(ShapeError):
        ProbMap([[0.5, 1.5]])
    with pytest.raises(ShapeError):
        BinaryMask([[0, 2]])
    with pytest.raises(ShapeError):
        GrayImage([[0, 256]])
    with pytest.raises(ShapeError):
        WeightMap([[-0.1]])


def test_grids_are_read_only():
    img = GrayImage([[1, 2]])
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 9


@given(
    w=st.integers(1, 6), h=st.integers(1, 6), data=st.data()
)
def test_set_then_get_round_trip(w, h, data):
    img = ProbMap(np.zeros((h, w)))
    x = data.draw(st.integers(0, w - 1))
    y = data.draw(st.integers(0, h - 1))
    v = data.draw(st.floats(0, 1))
    assert get_pixel(set_pixel(img, (x, y), v), (x, y)) == v
    assert get_pixel(img, (x, y)) == 0.0


def test_pixel_spacing_from_acquisition_geometry():
    assert pixel_spacing(ImageMeta(192.0, 136)) == pytest.approx(192.0 / 136, abs=1e-12)
    assert pixel_spacing(ImageMeta(192.0, 136)) == pytest.approx(1.4117647058823530, abs=1e-12)
    assert pixel_spacing(ImageMeta(100.0, 100)) == 1.0
    with pytest.raises(InvalidMetaError):
        pixel_spacing(ImageMeta(192.0, 0))


def test_spacing_unchanged_by_crop():
    meta = ImageMeta()
    before = meta.pixel_spacing_mm
    crop(GrayImage(np.zeros((136, 136))), CropRect(4, 4, 128, 128))
    assert meta.pixel_spacing_mm == before


def test_contour_invariants():
    c = Contour([(0, 0), (1, 0), (2, 1)])
    assert len(c) == 3
    assert c[2] == (2, 1)
    assert c.to_list() == [(0, 0), (1, 0), (2, 1)]
    with pytest.raises(InvalidContourError):
        Contour([(0, 0)])
    with pytest.raises(InvalidContourError):
        Contour([(0, 0), (0, 0), (1, 0)])
    with pytest.raises(InvalidContourError):
        Contour([(0, 0), (1, 0), (0, 0)])
    with pytest.raises(InvalidContourError):
        Contour([])
