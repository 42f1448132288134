"""Slow, scalar reference implementations used only by the tests."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


def rha(x: float) -> float:
    return math.copysign(math.floor(abs(x) + 0.5), x)


def hsv_pixel(b: int, g: int, r: int) -> tuple[float, float, float]:
    b, g, r = float(b), float(g), float(r)
    v = max(r, g, b)
    mn = min(r, g, b)
    delta = v - mn
    s = delta * 255.0 / v if v > 0 else 0.0
    if delta == 0:
        h = 0.0
    elif v == r:
        h = 60.0 * (g - b) / delta
    elif v == g:
        h = 120.0 + 60.0 * (b - r) / delta
    else:
        h = 240.0 + 60.0 * (r - g) / delta
    if h < 0:
        h += 360.0
    return min(max(rha(h / 2.0), 0.0), 180.0), min(max(rha(s), 0.0), 255.0), v


def lab_pixel(b: int, g: int, r: int) -> tuple[float, float, float]:
    def lin(c):
        c /= 255.0
        return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4

    R, G, B = lin(float(r)), lin(float(g)), lin(float(b))
    X = 0.4124564 * R + 0.3575761 * G + 0.1804375 * B
    Y = 0.2126729 * R + 0.7151522 * G + 0.0721750 * B
    Z = 0.0193339 * R + 0.1191920 * G + 0.9503041 * B
    Xn, Yn, Zn = 0.95047, 1.0, 1.08883

    def f(t):
        return t ** (1.0 / 3.0) if t > (6 / 29) ** 3 else t / (3 * (6 / 29) ** 2) + 4 / 29

    L = 116 * f(Y / Yn) - 16
    a = 500 * (f(X / Xn) - f(Y / Yn))
    bb = 200 * (f(Y / Yn) - f(Z / Zn))
    clip = lambda v: min(max(v, 0.0), 255.0)  # noqa: E731
    return clip(rha(L * 255 / 100)), clip(rha(a + 128)), clip(rha(bb + 128))


def moments(values) -> dict[str, float]:
    xs = [float(v) for v in values]
    n = len(xs)
    mean = math.fsum(xs) / n
    m = {k: math.fsum((x - mean) ** k for x in xs) / n for k in (2, 3, 4, 5, 6)}
    sd = math.sqrt(m[2])
    if sd == 0:
        return {"mean": mean, "std": 0.0, "skewness": 0.0, "kurtosis": 0.0, "moment5": 0.0, "moment6": 0.0}
    return {
        "mean": mean,
        "std": sd,
        "skewness": m[3] / sd**3,
        "kurtosis": m[4] / sd**4,
        "moment5": m[5] / sd**5,
        "moment6": m[6] / sd**6,
    }


def entropy_bits(values) -> float:
    counts = Counter(int(v) for v in values)
    n = sum(counts.values())
    return -math.fsum((c / n) * math.log2(c / n) for c in counts.values())


def percentile(values, q: float) -> float:
    v = sorted(float(x) for x in values)
    pos = (len(v) - 1) * q / 100.0
    lo = math.floor(pos)
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (v[hi] - v[lo]) * (pos - lo)


def bin_counts(values, bins: int = 16) -> list[int]:
    counts = [0] * bins
    for v in values:
        counts[min(int(v // (256 / bins)), bins - 1)] += 1
    return counts


def variance(values) -> float:
    xs = [float(v) for v in values]
    mean = math.fsum(xs) / len(xs)
    return math.fsum((x - mean) ** 2 for x in xs) / len(xs)


# ---------------------------------------------------------------- LBP

_S = math.sqrt(2.0) / 2.0


def lbp_code_at(plane, r: int, c: int) -> int:
    """riu2 code of pixel (r, c), sampling 8 points on the unit circle."""
    center = float(plane[r][c])
    bits = []
    for p in range(8):
        theta = 2 * math.pi * p / 8
        dr, dc = -math.sin(theta), math.cos(theta)
        ir, ic = round(dr), round(dc)
        if abs(dr) < 1e-9 or abs(dc) < 1e-9:
            diff = float(plane[r + ir][c + ic]) - center
        else:
            # diagonal: bilinear stencil of centre, two axis neighbours and the corner
            a = float(plane[r + ir][c]) - center
            b = float(plane[r][c + ic]) - center
            corner = float(plane[r + ir][c + ic]) - center
            diff = _S * (1 - _S) * (a + b) + _S * _S * corner
        bits.append(1 if diff >= 0 else 0)
    transitions = sum(bits[i] != bits[(i + 1) % 8] for i in range(8))
    return sum(bits) if transitions <= 2 else 9


def lbp_histogram(plane, mask=None) -> list[float]:
    h, w = len(plane), len(plane[0])
    counts = [0] * 10
    for r in range(1, h - 1):
        for c in range(1, w - 1):
            if mask is not None and not all(
                mask[r + dr][c + dc] for dr in (-1, 0, 1) for dc in (-1, 0, 1)
            ):
                continue
            counts[lbp_code_at(plane, r, c)] += 1
    total = sum(counts)
    return [k / total for k in counts]


# ---------------------------------------------------------------- GLCM

_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}


def glcm_pairs(plane, distance: int, angle: int, mask=None) -> Counter:
    """Symmetric co-occurrence counts by direct pair enumeration."""
    dr, dc = (distance * k for k in _OFFSETS[angle])
    h, w = len(plane), len(plane[0])
    pairs = Counter()
    for r in range(h):
        for c in range(w):
            r2, c2 = r + dr, c + dc
            if not (0 <= r2 < h and 0 <= c2 < w):
                continue
            if mask is not None and not (mask[r][c] and mask[r2][c2]):
                continue
            i, j = int(rha(plane[r][c])), int(rha(plane[r2][c2]))
            pairs[i, j] += 1
            pairs[j, i] += 1
    return pairs


def haralick_from_pairs(pairs: Counter) -> list[float]:
    total = sum(pairs.values())
    p = {k: v / total for k, v in pairs.items()}
    contrast = math.fsum(v * (i - j) ** 2 for (i, j), v in p.items())
    homog = math.fsum(v / (1 + (i - j) ** 2) for (i, j), v in p.items())
    energy = math.fsum(v * v for v in p.values())
    mu_i = math.fsum(i * v for (i, _), v in p.items())
    mu_j = math.fsum(j * v for (_, j), v in p.items())
    var_i = math.fsum((i - mu_i) ** 2 * v for (i, _), v in p.items())
    var_j = math.fsum((j - mu_j) ** 2 * v for (_, j), v in p.items())
    if var_i <= 0 or var_j <= 0:
        corr = 1.0
    else:
        corr = math.fsum((i - mu_i) * (j - mu_j) * v for (i, j), v in p.items()) / math.sqrt(var_i * var_j)
    return [contrast, homog, energy, corr]


def glcm_features(plane, distance: int, mask=None) -> list[float]:
    per_angle = [haralick_from_pairs(glcm_pairs(plane, distance, a, mask)) for a in (0, 45, 90, 135)]
    return [per_angle[a][f] for f in range(4) for a in range(4)]


# ---------------------------------------------------------------- blur

def gaussian_blur_direct(plane: np.ndarray, ksize: int = 7) -> np.ndarray:
    """Direct 2-D correlation with a full ksize x ksize kernel, symmetric (edge-repeating) padding."""
    sigma = 0.3 * ((ksize - 1) / 2 - 1) + 0.8
    half = ksize // 2
    g = [math.exp(-((i - half) ** 2) / (2 * sigma * sigma)) for i in range(ksize)]
    s = math.fsum(g)
    g = [x / s for x in g]
    padded = np.pad(plane, half, mode="symmetric")
    out = np.zeros_like(plane, dtype=np.float64)
    h, w = plane.shape
    for dy in range(ksize):
        for dx in range(ksize):
            out += g[dy] * g[dx] * padded[dy : dy + h, dx : dx + w]
    return out


# ---------------------------------------------------------------- gradients

def central_difference(fun, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(x)
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += eps
        xm[i] -= eps
        grad[i] = (fun(xp) - fun(xm)) / (2 * eps)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / denom)
