import colorsys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eyefresh import colorspace
from eyefresh.errors import ConfigError

import oracles


def px(b, g, r):
    return np.array([[[b, g, r]]], dtype=np.uint8)


def test_pure_red_hsv():
    h, s, v = colorspace.to_hsv(px(0, 0, 255))
    assert (h[0, 0], s[0, 0], v[0, 0]) == (0, 255, 255)


@pytest.mark.parametrize("bgr,hue", [((0, 255, 0), 60), ((255, 0, 0), 120), ((255, 0, 255), 150)])
def test_primary_hues(bgr, hue):
    assert colorspace.to_hsv(px(*bgr))[0][0, 0] == hue


def test_gray_hsv_has_zero_saturation():
    h, s, v = colorspace.to_hsv(px(128, 128, 128))
    assert (h[0, 0], s[0, 0], v[0, 0]) == (0, 0, 128)


def test_hsv_matches_scalar_oracle(rng):
    img = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
    planes = colorspace.to_hsv(img)
    for r in range(8):
        for c in range(8):
            assert tuple(p[r, c] for p in planes) == oracles.hsv_pixel(*img[r, c])


def test_hsv_agrees_with_colorsys_within_one_level(rng):
    img = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
    h, s, v = colorspace.to_hsv(img)
    for r in range(16):
        for c in range(16):
            b, g, rr = img[r, c] / 255.0
            ch, cs, cv = colorsys.rgb_to_hsv(rr, g, b)
            dh = abs(h[r, c] - ch * 180.0)
            assert min(dh, 180 - dh) <= 1
            assert abs(s[r, c] - cs * 255) <= 1
            assert v[r, c] == round(cv * 255)


def test_lab_white_and_black():
    L, a, b = colorspace.to_lab(px(255, 255, 255))
    assert L[0, 0] == 255 and abs(a[0, 0] - 128) <= 1 and abs(b[0, 0] - 128) <= 1
    L, a, b = colorspace.to_lab(px(0, 0, 0))
    assert L[0, 0] == 0 and abs(a[0, 0] - 128) <= 1 and abs(b[0, 0] - 128) <= 1


def test_lab_matches_scalar_oracle_within_one_level(rng):
    img = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
    planes = colorspace.to_lab(img)
    for r in range(8):
        for c in range(8):
            ref = oracles.lab_pixel(*img[r, c])
            assert max(abs(p[r, c] - q) for p, q in zip(planes, ref)) <= 1


images = arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3)))


@settings(max_examples=100, deadline=None)
@given(images)
def test_planes_stay_in_declared_ranges(img):
    for space, (_, convert, ranges) in colorspace.SPACES.items():
        for plane, (lo, hi) in zip(convert(img), ranges):
            assert plane.shape == img.shape[:2]
            assert plane.min() >= lo and plane.max() <= hi
            assert np.array_equal(plane, np.round(plane))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 255))
def test_achromatic_axis(level):
    img = px(level, level, level)
    _, s, _ = colorspace.to_hsv(img)
    _, a, b = colorspace.to_lab(img)
    assert s[0, 0] == 0
    assert abs(a[0, 0] - 128) <= 1 and abs(b[0, 0] - 128) <= 1


def test_conversion_is_deterministic(rng):
    img = rng.integers(0, 256, (10, 10, 3), dtype=np.uint8)
    for space in ("hsv", "lab"):
        first, second = colorspace.convert(img, space), colorspace.convert(img.copy(), space)
        assert all(np.array_equal(p, q) for p, q in zip(first, second))


def test_round_half_away_from_zero():
    assert colorspace.round_half_away(np.array([0.5, 1.5, 2.5, -0.5, -1.5])).tolist() == [1, 2, 3, -1, -2]


def test_bad_input_rejected():
    with pytest.raises(ConfigError):
        colorspace.to_hsv(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ConfigError):
        colorspace.convert(np.zeros((4, 4, 3), dtype=np.uint8), "yuv")
