"""LBP (riu2, P=8, R=1) and GLCM Haralick descriptors of a single plane.

Both are applied to the b* plane of CIELAB by the fusion layer, but work on
any plane of 8-bit levels.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from eyefresh.colorspace import round_half_away
from eyefresh.errors import ConfigError, ExtractionError
from eyefresh.raster import mask_bitmap

LBP_BINS = 10
GLCM_LEVELS = 256
GLCM_ANGLES = (0, 45, 90, 135)
GLCM_FEATURES = ("contrast", "homogeneity", "energy", "correlation")

# diagonal sample at exact radius 1: weights of the bilinear stencil
_S = np.sqrt(2.0) / 2.0
W_EDGE = _S * (1.0 - _S)
W_CORNER = _S * _S

# (row, col) offsets of the 8 neighbours, counter-clockwise from "right"
_AXIS = {0: (0, 1), 2: (-1, 0), 4: (0, -1), 6: (1, 0)}
# diagonal p -> (corner offset, the two axis neighbours it lies between)
_DIAG = {
    1: ((-1, 1), (-1, 0), (0, 1)),
    3: ((-1, -1), (-1, 0), (0, -1)),
    5: ((1, -1), (1, 0), (0, -1)),
    7: ((1, 1), (1, 0), (0, 1)),
}


def riu2_code(bits) -> int:
    """Rotation-invariant uniform code of 8 circular bits: popcount if at most 2 transitions, else 9."""
    bits = [int(b) for b in bits]
    transitions = sum(bits[i] != bits[(i + 1) % len(bits)] for i in range(len(bits)))
    return sum(bits) if transitions <= 2 else len(bits) + 1


def _lbp_bits(x: np.ndarray) -> np.ndarray:
    """Bit planes (8, H-2, W-2) for every interior pixel; bit = neighbour >= centre."""
    h, w = x.shape
    center = x[1:-1, 1:-1]

    def shifted(dr, dc):
        return x[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc]

    bits = np.empty((8, h - 2, w - 2), dtype=bool)
    for p, (dr, dc) in _AXIS.items():
        bits[p] = shifted(dr, dc) - center >= 0
    for p, (corner, a, b) in _DIAG.items():
        # interpolated neighbour minus centre; the centre weight cancels exactly
        diff = W_EDGE * ((shifted(*a) - center) + (shifted(*b) - center)) + W_CORNER * (
            shifted(*corner) - center
        )
        bits[p] = diff >= 0
    return bits


def lbp_codes(plane: np.ndarray) -> np.ndarray:
    """riu2 code image of the interior ``(H-2, W-2)`` pixels."""
    x = np.asarray(plane, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3 or x.shape[1] < 3:
        raise ExtractionError(f"LBP needs a plane of at least 3x3, got {x.shape}")
    bits = _lbp_bits(x).astype(np.int8)
    ones = bits.sum(axis=0)
    transitions = np.abs(bits - np.roll(bits, -1, axis=0)).sum(axis=0)
    return np.where(transitions <= 2, ones, 9).astype(np.int64)


def lbp_riu2(plane: np.ndarray, mask=None) -> np.ndarray:
    """L1-normalized 10-bin riu2 histogram.

    With a mask, a pixel contributes only when its whole 3x3 neighbourhood is
    inside the mask.
    """
    codes = lbp_codes(plane)
    bitmap = mask_bitmap(mask, np.shape(plane))
    if bitmap is not None:
        h, w = bitmap.shape
        inside = np.ones((h - 2, w - 2), dtype=bool)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                inside &= bitmap[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc]
        codes = codes[inside]
    if codes.size == 0:
        raise ExtractionError("no pixel has a full LBP neighbourhood inside the mask")
    hist = np.bincount(codes.ravel(), minlength=LBP_BINS).astype(np.float64)
    return hist / hist.sum()


def glcm_offset(distance: int, angle: int) -> tuple[int, int]:
    """(row, col) displacement for an orientation; rows grow downwards."""
    offsets = {0: (0, distance), 45: (-distance, distance), 90: (-distance, 0), 135: (-distance, -distance)}
    try:
        return offsets[angle]
    except KeyError:
        raise ConfigError(f"GLCM angle must be one of {GLCM_ANGLES}, got {angle}") from None


def quantize(plane: np.ndarray, levels: int = GLCM_LEVELS) -> np.ndarray:
    return np.clip(round_half_away(np.asarray(plane, dtype=np.float64)), 0, levels - 1).astype(np.int64)


def glcm(plane: np.ndarray, distance: int, angle: int, mask=None, levels: int = GLCM_LEVELS) -> np.ndarray:
    """Symmetric, normalized co-occurrence matrix of shape ``(levels, levels)``.

    A pair contributes only if both of its pixels lie inside the mask.
    """
    q = quantize(plane, levels)
    h, w = q.shape
    dr, dc = glcm_offset(distance, angle)
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r1 <= r0 or c1 <= c0:
        raise ExtractionError(f"plane {q.shape} too small for distance {distance} at {angle} deg")
    ref = q[r0:r1, c0:c1]
    nbr = q[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
    bitmap = mask_bitmap(mask, q.shape)
    if bitmap is not None:
        keep = bitmap[r0:r1, c0:c1] & bitmap[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
        ref, nbr = ref[keep], nbr[keep]
    if ref.size == 0:
        raise ExtractionError(f"no valid pixel pair at distance {distance}, {angle} deg")
    counts = np.bincount((ref * levels + nbr).ravel(), minlength=levels * levels)
    m = counts.reshape(levels, levels).astype(np.float64)
    m = m + m.T
    return m / m.sum()


@lru_cache(maxsize=4)
def _diff2(n: int) -> np.ndarray:
    i, j = np.indices((n, n))
    return ((i - j) ** 2).astype(np.float64)


def haralick(p: np.ndarray) -> np.ndarray:
    """Contrast, homogeneity, energy (sum of squares) and correlation of a normalized GLCM.

    Correlation of a zero-variance matrix is defined as 1.
    """
    n = p.shape[0]
    diff2 = _diff2(n)
    contrast = float((p * diff2).sum())
    homogeneity = float((p / (1.0 + diff2)).sum())
    energy = float((p * p).sum())
    levels = np.arange(n, dtype=np.float64)
    pi, pj = p.sum(axis=1), p.sum(axis=0)
    mu_i, mu_j = float(levels @ pi), float(levels @ pj)
    var_i = float(((levels - mu_i) ** 2) @ pi)
    var_j = float(((levels - mu_j) ** 2) @ pj)
    if var_i <= 0.0 or var_j <= 0.0:
        correlation = 1.0
    else:
        cov = float((levels - mu_i) @ p @ (levels - mu_j))
        correlation = cov / np.sqrt(var_i * var_j)
    return np.array([contrast, homogeneity, energy, correlation])


def glcm_features(plane: np.ndarray, distance: int = 3, mask=None, aggregate: str = "per_orientation") -> np.ndarray:
    """Haralick features at 0, 45, 90 and 135 degrees.

    ``aggregate="per_orientation"`` gives 16 values ordered feature-major
    (contrast at each angle, then homogeneity, ...). ``"mean_range"`` gives 8
    values: mean and range across angles for each feature.
    """
    table = np.stack([haralick(glcm(plane, distance, a, mask)) for a in GLCM_ANGLES], axis=1)
    if aggregate == "per_orientation":
        return table.ravel()
    if aggregate == "mean_range":
        return np.stack([table.mean(axis=1), table.max(axis=1) - table.min(axis=1)], axis=1).ravel()
    raise ConfigError(f"unknown GLCM aggregate {aggregate!r}")
