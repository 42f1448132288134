"""Color statistics, variance ratios, percentiles and histograms.

Every extractor accepts an optional mask; when given, only pixels inside it
are described (the black background left by segmentation is never counted).
"""

from __future__ import annotations

import numpy as np

from eyefresh import colorspace
from eyefresh.errors import ConfigError, ExtractionError
from eyefresh.raster import as_raster, mask_bitmap

STAT_NAMES = ("mean", "std", "skewness", "kurtosis", "entropy", "wavelet", "moment5", "moment6")
PERCENTILES = (5, 25, 50, 75, 95)
HIST_BINS = 16
CVR_PAIRS = (
    ("bgr", "r", "g"),
    ("bgr", "r", "b"),
    ("bgr", "g", "b"),
    ("hsv", "h", "s"),
    ("hsv", "h", "v"),
    ("hsv", "s", "v"),
    ("lab", "l", "a"),
    ("lab", "l", "b"),
    ("lab", "a", "b"),
)
CVR_EPS = 1e-12


def _in_scope(plane: np.ndarray, bitmap: np.ndarray | None) -> np.ndarray:
    values = plane.ravel() if bitmap is None else plane[bitmap]
    if values.size == 0:
        raise ExtractionError("mask selects no pixels")
    return values.astype(np.float64, copy=False)


def central_moments(values: np.ndarray) -> dict[str, float]:
    """Mean, population std and standardized moments 3 to 6 (kurtosis is not excess).

    A constant input has every standardized moment defined as 0.
    """
    mean = float(values.mean())
    d = values - mean
    d2 = d * d
    var = float(d2.mean())
    out = {"mean": mean, "std": float(np.sqrt(var))}
    if var == 0.0 or values.min() == values.max():
        out.update(std=0.0, skewness=0.0, kurtosis=0.0, moment5=0.0, moment6=0.0)
        return out
    sd = out["std"]
    d3 = d2 * d
    out["skewness"] = float(d3.mean()) / sd**3
    out["kurtosis"] = float((d2 * d2).mean()) / var**2
    out["moment5"] = float((d3 * d2).mean()) / sd**5
    out["moment6"] = float((d3 * d3).mean()) / var**3
    return out


def shannon_entropy(values: np.ndarray) -> float:
    """Entropy in bits of the 256-level histogram of integer-valued ``values``."""
    levels = np.clip(np.floor(values), 0, 255).astype(np.int64)
    counts = np.bincount(levels, minlength=256)
    p = counts[counts > 0] / values.size
    return float(-(p * np.log2(p)).sum()) + 0.0


def haar_detail_moment(plane: np.ndarray, bitmap: np.ndarray | None = None) -> float:
    """Mean absolute coefficient of the three detail subbands of a one-level Haar DWT.

    Odd dimensions are padded by duplicating the trailing row/column. With a
    mask, only 2x2 blocks lying entirely inside it contribute; 0.0 if none do.
    """
    x = plane.astype(np.float64, copy=False)
    m = np.ones(x.shape, dtype=bool) if bitmap is None else bitmap
    if x.shape[0] % 2:
        x = np.vstack([x, x[-1:]])
        m = np.vstack([m, m[-1:]])
    if x.shape[1] % 2:
        x = np.hstack([x, x[:, -1:]])
        m = np.hstack([m, m[:, -1:]])

    a, b = x[0::2, 0::2], x[0::2, 1::2]
    c, d = x[1::2, 0::2], x[1::2, 1::2]
    keep = m[0::2, 0::2] & m[0::2, 1::2] & m[1::2, 0::2] & m[1::2, 1::2]
    if not keep.any():
        return 0.0
    horiz = np.abs(a + b - c - d)[keep]
    vert = np.abs(a - b + c - d)[keep]
    diag = np.abs(a - b - c + d)[keep]
    return float((horiz.sum() + vert.sum() + diag.sum()) / (6.0 * keep.sum()))


def channel_statistics(plane: np.ndarray, mask=None) -> np.ndarray:
    """The 8 statistics of one channel, in ``STAT_NAMES`` order."""
    bitmap = mask_bitmap(mask, plane.shape)
    values = _in_scope(plane, bitmap)
    mom = central_moments(values)
    mom["entropy"] = shannon_entropy(values)
    mom["wavelet"] = haar_detail_moment(plane, bitmap)
    return np.array([mom[k] for k in STAT_NAMES])


def color_statistics(planes, mask=None) -> np.ndarray:
    """24 values: 8 statistics for each of the three planes, channel-major."""
    return np.concatenate([channel_statistics(p, mask) for p in planes])


def color_variance_ratios(img, mask=None, planes: dict | None = None) -> np.ndarray:
    """9 within-space variance ratios ``var(num) / (var(den) + 1e-12)``.

    Order: R/G, R/B, G/B, H/S, H/V, S/V, L/a, L/b, a/b. ``planes`` may carry
    already converted planes keyed by space name.
    """
    img = as_raster(img)
    bitmap = mask_bitmap(mask, img.shape[:2])
    planes = planes or {}
    variances = {}
    for space, (names, convert, _) in colorspace.SPACES.items():
        converted = planes[space] if space in planes else convert(img)
        for name, plane in zip(names, converted):
            v = _in_scope(plane, bitmap)
            variances[space, name] = float(((v - v.mean()) ** 2).mean())
    return np.array(
        [variances[s, num] / (variances[s, den] + CVR_EPS) for s, num, den in CVR_PAIRS]
    )


def percentiles(values: np.ndarray, qs=PERCENTILES) -> np.ndarray:
    """Percentiles by linear interpolation between closest ranks (``C = 1``)."""
    v = np.sort(values, kind="stable")
    n = v.size
    out = np.empty(len(qs))
    for i, q in enumerate(qs):
        pos = (n - 1) * q / 100.0
        lo = int(np.floor(pos))
        hi = min(lo + 1, n - 1)
        frac = pos - lo
        out[i] = v[lo] + (v[hi] - v[lo]) * frac
    return out


def color_percentiles(planes, mask=None) -> np.ndarray:
    """15 values: p5, p25, p50, p75, p95 of each plane, channel-major."""
    out = []
    for plane in planes:
        bitmap = mask_bitmap(mask, plane.shape)
        out.append(percentiles(_in_scope(plane, bitmap)))
    return np.concatenate(out)


def histogram_counts(values: np.ndarray, bins: int = HIST_BINS) -> np.ndarray:
    """Counts over ``bins`` equal-width bins spanning [0, 256)."""
    idx = np.clip(np.floor(values * bins / 256.0), 0, bins - 1).astype(np.int64)
    return np.bincount(idx, minlength=bins).astype(np.float64)


def color_histogram(planes, mask=None, normalize: str = "per_channel") -> np.ndarray:
    """48 values: three 16-bin histograms.

    ``normalize="per_channel"`` scales each 16-bin histogram to unit L2 norm
    before concatenation; ``"concatenated"`` scales the joined 48-vector once.
    """
    counts = []
    for plane in planes:
        bitmap = mask_bitmap(mask, plane.shape)
        counts.append(histogram_counts(_in_scope(plane, bitmap)))
    if normalize == "per_channel":
        return np.concatenate([c / np.linalg.norm(c) for c in counts])
    if normalize == "concatenated":
        joined = np.concatenate(counts)
        return joined / np.linalg.norm(joined)
    raise ConfigError(f"unknown histogram normalization {normalize!r}")
