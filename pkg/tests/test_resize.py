import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mfebin.errors import ConfigError, DimensionError
from mfebin.resize import METHODS, ResizeMethod, axis_weights, resize, resize_mask
from oracles import naive_resize

TARGETS = [(7, 5), (8, 8), (31, 9)]


@pytest.mark.parametrize("kind", METHODS)
@pytest.mark.parametrize("size", TARGETS)
def test_matches_naive_oracle(kind, size):
    rng = np.random.default_rng(hash((kind, size)) % 2**32)
    for _ in range(3):
        src = rng.random((16, 16)) * 255
        got = resize(src, kind, *size)
        assert got.shape == (size[1], size[0])
        assert np.max(np.abs(got - naive_resize(src, kind, *size))) <= 1e-6


@pytest.mark.parametrize("kind", METHODS)
def test_random_8x8_halving(kind, rng):
    src = rng.random((8, 8))
    assert np.allclose(resize(src, kind, 4, 4), naive_resize(src, kind, 4, 4), atol=1e-9)


def test_nearest_exact_halving_picks_odd_pixels(rng):
    src = rng.random((8, 8))
    assert np.array_equal(resize(src, "nearest", 4, 4), src[1::2, 1::2])


@pytest.mark.parametrize("kind", METHODS)
def test_constancy_64(kind):
    out = resize(np.full((64, 64), 128.0), kind, 32, 32)
    assert np.all(out == 128.0)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(METHODS), st.integers(1, 40), st.integers(1, 40), st.integers(1, 40),
       st.integers(1, 40), st.floats(-500, 500))
def test_constancy_property(kind, h, w, oh, ow, c):
    out = resize(np.full((h, w), c), kind, ow, oh)
    assert out.shape == (oh, ow)
    assert np.all(out == c)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["nearest", "bilinear", "area"]), st.integers(2, 30), st.integers(2, 30),
       st.integers(1, 40), st.integers(1, 40), st.integers(0, 2**31))
def test_range_preserving_methods(kind, h, w, oh, ow, seed):
    x = np.random.default_rng(seed).random((h, w))
    out = resize(x, kind, ow, oh)
    assert out.min() >= x.min() - 1e-12 and out.max() <= x.max() + 1e-12


def test_overshoot_and_clamp():
    step = np.zeros((4, 16))
    step[:, 8:] = 255
    out = resize(step, "lanczos", 37, 4)
    assert out.max() > 255 or out.min() < 0
    clamped = resize(step, "lanczos", 37, 4, clamp=True)
    assert clamped.min() >= 0 and clamped.max() <= 255


def test_area_box_mean():
    assert resize(np.array([[0.0, 0.0], [255.0, 255.0]]), "area", 1, 1)[0, 0] == 127.5


def test_weight_rows_sum_to_one():
    for kind in METHODS:
        W = axis_weights(13, 5, ResizeMethod(kind))
        assert np.allclose(W.sum(axis=1), 1.0)


def test_against_opencv(rng):
    cv2 = pytest.importorskip("cv2")
    flags = {"bilinear": (cv2.INTER_LINEAR, 1e-9), "bicubic": (cv2.INTER_CUBIC, 1e-3),
             "area": (cv2.INTER_AREA, 1e-6), "lanczos": (cv2.INTER_LANCZOS4, 1e-3)}
    src = rng.random((40, 36)) * 255
    for kind, (flag, tol) in flags.items():
        ref = cv2.resize(src, (17, 13), interpolation=flag)
        assert np.max(np.abs(resize(src, kind, 17, 13) - ref)) <= tol * 255, kind


def test_errors():
    with pytest.raises(DimensionError):
        resize(np.ones((4, 4)), "bilinear", 0, 3)
    with pytest.raises(ConfigError):
        ResizeMethod("spline")
    with pytest.raises(ConfigError):
        ResizeMethod("bicubic", bicubic_a=0.5)
    with pytest.raises(ConfigError):
        ResizeMethod("lanczos", lanczos_taps=1)
    with pytest.raises(DimensionError):
        resize_mask(np.ones((3, 3), bool), 3, 0)


def test_resize_mask_examples(rng):
    m = rng.random((5, 7)) < 0.5
    assert np.array_equal(resize_mask(m, 7, 5), m)
    assert np.all(resize_mask(np.ones((5, 7), bool), 13, 2))
    diag = np.eye(2, dtype=bool)
    assert np.array_equal(resize_mask(diag, 4, 4), np.kron(diag, np.ones((2, 2), bool)))
