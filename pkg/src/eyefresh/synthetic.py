"""Synthetic eye images for tests and demos.

Each image is a dark disc centred on a brighter, mildly noisy surround. The
three freshness classes differ in the disc's hue and in how cloudy (blotchy,
low-frequency textured) the disc is.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from eyefresh.dataset import FreshnessLabel
from eyefresh.raster import save_image

# BGR base colour of the disc and cloudiness amplitude per class
CLASS_STYLE = {
    FreshnessLabel.HIGHLY_FRESH: ((70, 30, 20), 4.0),
    FreshnessLabel.FRESH: ((40, 55, 40), 18.0),
    FreshnessLabel.NOT_FRESH: ((45, 60, 95), 40.0),
}
CLASS_DIRS = {
    FreshnessLabel.HIGHLY_FRESH: "highly_fresh",
    FreshnessLabel.FRESH: "fresh",
    FreshnessLabel.NOT_FRESH: "not_fresh",
}


def disc_image(size=224, radius=50, disc_bgr=(40, 40, 40), background_bgr=(200, 200, 200)) -> np.ndarray:
    """Flat disc of ``radius`` centred in a ``size`` x ``size`` frame."""
    ys, xs = np.mgrid[0:size, 0:size]
    c = (size - 1) / 2.0
    img = np.empty((size, size, 3), dtype=np.uint8)
    img[:] = background_bgr
    img[(xs - c) ** 2 + (ys - c) ** 2 <= radius**2] = disc_bgr
    return img


def add_specular_blobs(img: np.ndarray, radius: float, n_blobs: int = 5, rng=None) -> np.ndarray:
    """Paint ``n_blobs`` small white reflections inside a centred disc of ``radius``."""
    rng = np.random.default_rng(0) if rng is None else rng
    out = img.copy()
    h, w = img.shape[:2]
    c = ((w - 1) / 2.0, (h - 1) / 2.0)
    blob_r = max(2.0, 0.1 * radius)
    for k in range(n_blobs):
        ang = 2 * np.pi * (k + rng.uniform(0, 0.5)) / n_blobs
        dist = rng.uniform(0.3, 0.6) * radius
        center = (int(round(c[0] + dist * np.cos(ang))), int(round(c[1] + dist * np.sin(ang))))
        cv2.circle(out, center, int(round(blob_r)), (255, 255, 255), -1)
    return out


def eye_image(label: FreshnessLabel, rng: np.random.Generator, size: int = 96) -> np.ndarray:
    base, cloud = CLASS_STYLE[FreshnessLabel(label)]
    ys, xs = np.mgrid[0:size, 0:size]
    c = (size - 1) / 2.0
    radius = rng.uniform(0.28, 0.36) * size
    inside = (xs - c) ** 2 + (ys - c) ** 2 <= radius**2

    background = np.array([150, 170, 190], dtype=np.float64) + rng.normal(0, 6, 3)
    img = np.broadcast_to(background, (size, size, 3)).copy()
    img += rng.normal(0, 4, (size, size, 1))

    # cloudiness: upsampled coarse noise, a blotchy low-frequency pattern
    coarse = rng.normal(0, 1, (size // 8, size // 8))
    blotch = cv2.resize(coarse, (size, size), interpolation=cv2.INTER_CUBIC)[..., None]
    disc = np.asarray(base, dtype=np.float64) + rng.normal(0, 4, 3) + cloud * np.abs(blotch)
    disc = disc + rng.normal(0, 2, (size, size, 3))
    img[inside] = disc[inside]
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def write_dataset(root: str | Path, n_per_class: int = 100, size: int = 96, seed: int = 0) -> Path:
    """Write ``3 * n_per_class`` PNGs under ``root/<class dir>/``."""
    root = Path(root)
    for label in FreshnessLabel:
        rng = np.random.default_rng([seed, int(label)])
        for i in range(n_per_class):
            save_image(root / CLASS_DIRS[label] / f"eye_{i:04d}.png", eye_image(label, rng, size))
    return root
