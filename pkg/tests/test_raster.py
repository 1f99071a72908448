import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image

from mfebin.errors import DimensionError, FormatError, IoError
from mfebin.raster import (PatchGrid, RasterImage, load_image, load_mask, save_image, save_mask,
                           split_channels, stitch_patches, tile_patches, to_grayscale)


def test_load_white_gray(tmp_path):
    Image.fromarray(np.full((2, 2), 255, np.uint8)).save(tmp_path / "w.png")
    img = load_image(tmp_path / "w.png")
    assert (img.width, img.height, img.channels) == (2, 2, 1)
    assert img.pixels.ravel().tolist() == [255] * 4


def test_load_rgb_order(tmp_path):
    px = np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255]]], np.uint8)
    Image.fromarray(px).save(tmp_path / "c.png")
    img = load_image(tmp_path / "c.png")
    assert img.channels == 3 and img.width == 3 and img.height == 1
    assert img.pixels.ravel().tolist() == [255, 0, 0, 0, 255, 0, 0, 0, 255]


def test_gray_alpha_drops_alpha(tmp_path):
    la = np.stack([np.full((3, 4), 77, np.uint8), np.full((3, 4), 9, np.uint8)], -1)
    Image.fromarray(la, "LA").save(tmp_path / "la.png")
    img = load_image(tmp_path / "la.png")
    assert img.channels == 1 and np.all(img.pixels == 77)


def test_truncated_and_missing(tmp_path):
    Image.fromarray(np.zeros((20, 20), np.uint8)).save(tmp_path / "ok.png")
    data = (tmp_path / "ok.png").read_bytes()
    (tmp_path / "bad.png").write_bytes(data[:30])
    with pytest.raises(IoError):
        load_image(tmp_path / "bad.png")
    with pytest.raises(IoError):
        load_image(tmp_path / "nope.png")


def test_sixteen_bit_rejected(tmp_path):
    Image.fromarray(np.full((4, 4), 40000, np.uint16)).save(tmp_path / "d.png")
    with pytest.raises(FormatError):
        load_image(tmp_path / "d.png")


def test_raster_validation():
    with pytest.raises(Exception):
        RasterImage(np.zeros((2, 2), np.float32))
    with pytest.raises(Exception):
        RasterImage(np.zeros((2, 2, 4), np.uint8))


def test_grayscale_values():
    white = RasterImage(np.full((1, 1, 3), 255, np.uint8))
    red = RasterImage(np.array([[[255, 0, 0]]], np.uint8))
    assert to_grayscale(white)[0, 0] == pytest.approx(255.0)
    assert to_grayscale(red)[0, 0] == pytest.approx(76.245)
    mono = RasterImage(np.array([[3, 250]], np.uint8))
    assert to_grayscale(mono).tolist() == [[3.0, 250.0]]


def test_split_channels():
    red = RasterImage(np.tile(np.array([255, 0, 0], np.uint8), (2, 2, 1)))
    cs = split_channels(red)
    assert np.all(cs.red == 255) and np.all(cs.green == 0) and np.all(cs.blue == 0)
    assert np.allclose(cs.gray, 76.245)
    one = split_channels(RasterImage(np.array([[[10, 20, 30]]], np.uint8)))
    assert one.gray[0, 0] == pytest.approx(18.15)
    g = split_channels(RasterImage(np.arange(6, dtype=np.uint8).reshape(2, 3)))
    for plane in g.planes():
        assert np.array_equal(plane, np.arange(6).reshape(2, 3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_split_preserves_planes(seed):
    px = np.random.default_rng(seed).integers(0, 256, (5, 7, 3), dtype=np.uint8)
    img = RasterImage(px)
    cs = split_channels(img)
    assert np.array_equal(cs.red, px[..., 0])
    assert np.array_equal(cs.green, px[..., 1])
    assert np.array_equal(cs.blue, px[..., 2])
    assert np.array_equal(cs.gray, to_grayscale(img))


def test_tile_shapes():
    g = tile_patches(np.zeros((256, 512)), 256)
    assert (g.rows, g.cols, g.pad_right, g.pad_bottom) == (1, 2, 0, 0)
    g = tile_patches(np.zeros((300, 300)), 256)
    assert (g.rows, g.cols, g.pad_right, g.pad_bottom) == (2, 2, 212, 212)
    assert len(g.patches) == 4 and all(p.shape == (256, 256) for _, _, p in g.patches)
    assert g.cols * 256 - g.pad_right == 300
    const = np.full((256, 256), 9.0)
    g = tile_patches(const, 256)
    assert len(g.patches) == 1 and np.array_equal(g.patches[0][2], const)


def test_tile_reflect_padding():
    x = np.arange(12, dtype=float).reshape(3, 4)
    g = tile_patches(x, 4)
    p = g.patches[0][2]
    assert np.array_equal(p[3], x[1])  # row 3 reflects row 1


def test_tile_errors():
    with pytest.raises(DimensionError):
        tile_patches(np.zeros((1, 5)), 4)
    with pytest.raises(DimensionError):
        tile_patches(np.zeros((8, 8)), 3)


def test_stitch_single_and_bad():
    x = np.random.default_rng(0).random((300, 300))
    assert np.array_equal(stitch_patches(tile_patches(x, 256)), x)
    g = tile_patches(np.ones((10, 10)), 16)
    assert stitch_patches(g).shape == (10, 10)
    bad = PatchGrid(256, 1, 1, 0, 0, [(0, 0, np.zeros((255, 256)))])
    with pytest.raises(DimensionError):
        stitch_patches(bad)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 1024), st.integers(2, 1024), st.sampled_from([2, 4, 16, 64, 256]),
       st.integers(0, 2**31))
def test_stitch_tile_identity(h, w, size, seed):
    x = np.random.default_rng(seed).random((h, w))
    assert np.array_equal(stitch_patches(tile_patches(x, size)), x)


def test_mask_files(tmp_path):
    save_mask(np.ones((3, 3), bool), tmp_path / "t.png")
    assert np.all(np.asarray(Image.open(tmp_path / "t.png")) == 0)
    save_mask(np.zeros((3, 3), bool), tmp_path / "b.png")
    assert np.all(np.asarray(Image.open(tmp_path / "b.png")) == 255)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 2**31))
def test_mask_roundtrip(tmp_path_factory, h, w, seed):
    m = np.random.default_rng(seed).random((h, w)) < 0.4
    path = tmp_path_factory.mktemp("m") / "m.png"
    save_mask(m, path)
    assert np.array_equal(load_mask(path), m)


def test_save_image_roundtrip(tmp_path):
    x = np.random.default_rng(1).integers(0, 256, (6, 5, 3), dtype=np.uint8)
    save_image(x, tmp_path / "x.png")
    assert np.array_equal(load_image(tmp_path / "x.png").pixels, x)
