"""BGR -> HSV and BGR -> CIELAB conversion on the 8-bit scaled convention.

All outputs are float64 planes holding integer levels:

* HSV: ``H`` in [0, 180] (degrees halved), ``S`` and ``V`` in [0, 255].
* Lab: ``L* * 255 / 100``, ``a* + 128`` and ``b* + 128``, each clipped to [0, 255].

Levels are rounded half away from zero at the conversion boundary so that
results are bit-reproducible.
"""

from __future__ import annotations

import numpy as np

from eyefresh.errors import ConfigError
from eyefresh.raster import as_raster

HSV_RANGES = ((0.0, 180.0), (0.0, 255.0), (0.0, 255.0))
LAB_RANGES = ((0.0, 255.0), (0.0, 255.0), (0.0, 255.0))
BGR_RANGES = ((0.0, 255.0), (0.0, 255.0), (0.0, 255.0))

# linear sRGB -> XYZ, D65
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# reference white taken as the image of RGB=(1,1,1) so white maps to a*=b*=0
D65_WHITE = _RGB_TO_XYZ.sum(axis=1)

_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0


def round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def bgr_planes(img) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    img = as_raster(img)
    return tuple(img[..., c].astype(np.float64) for c in range(3))


def to_hsv(img) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    b, g, r = bgr_planes(img)
    v = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = v - mn

    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(v > 0, delta * 255.0 / v, 0.0)
        safe = np.where(delta > 0, delta, 1.0)
        h = np.where(
            v == r,
            60.0 * (g - b) / safe,
            np.where(v == g, 120.0 + 60.0 * (b - r) / safe, 240.0 + 60.0 * (r - g) / safe),
        )
    h = np.where(delta > 0, h, 0.0)
    h = np.where(h < 0, h + 360.0, h)

    h = np.clip(round_half_away(h / 2.0), 0.0, 180.0)
    s = np.clip(round_half_away(s), 0.0, 255.0)
    return h, s, v


def srgb_to_linear(c: np.ndarray) -> np.ndarray:
    """Piecewise sRGB EOTF on values in [0, 1]."""
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _LAB_EPS, np.cbrt(t), (_LAB_KAPPA * t + 16.0) / 116.0)


def to_lab(img) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    b, g, r = bgr_planes(img)
    rgb = np.stack([r, g, b], axis=-1) / 255.0
    xyz = srgb_to_linear(rgb) @ _RGB_TO_XYZ.T
    fx, fy, fz = (_lab_f(xyz[..., i] / D65_WHITE[i]) for i in range(3))

    L = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    bb = 200.0 * (fy - fz)

    L = np.clip(round_half_away(L * 255.0 / 100.0), 0.0, 255.0)
    a = np.clip(round_half_away(a + 128.0), 0.0, 255.0)
    bb = np.clip(round_half_away(bb + 128.0), 0.0, 255.0)
    return L, a, bb


def grayscale(img) -> np.ndarray:
    """Luma ``0.299 R + 0.587 G + 0.114 B`` as an unrounded float plane."""
    b, g, r = bgr_planes(img)
    return 0.299 * r + 0.587 * g + 0.114 * b


SPACES = {
    "bgr": (("b", "g", "r"), bgr_planes, BGR_RANGES),
    "hsv": (("h", "s", "v"), to_hsv, HSV_RANGES),
    "lab": (("l", "a", "b"), to_lab, LAB_RANGES),
}


def convert(img, space: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Planes of ``img`` in ``space`` (one of ``bgr``, ``hsv``, ``lab``)."""
    try:
        return SPACES[space][1](img)
    except KeyError:
        raise ConfigError(f"unknown color space {space!r}") from None
