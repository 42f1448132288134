"""Decoding, validation and resizing of 8-bit BGR rasters.

A raster is an ``(H, W, 3)`` ``uint8`` array in B, G, R channel order, the
layout OpenCV decodes to.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from eyefresh.errors import ConfigError, DatasetError

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp", ".tif", ".tiff")


def as_raster(img) -> np.ndarray:
    """Validate ``img`` as a BGR raster and return it as a contiguous uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ConfigError(f"expected an (H, W, 3) image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ConfigError("image must be at least 1x1")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.floating) and not np.all(np.isfinite(arr)):
            raise ConfigError("image contains non-finite values")
        if arr.min() < 0 or arr.max() > 255:
            raise ConfigError("image values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def load_image(path: str | Path) -> np.ndarray:
    """Decode an image file to a BGR raster.

    Uses ``imdecode`` on the raw bytes so non-ASCII paths work everywhere.
    Raises :class:`DatasetError` when the file is missing or undecodable.
    """
    path = Path(path)
    try:
        buf = np.fromfile(str(path), dtype=np.uint8)
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    img = cv2.imdecode(buf, cv2.IMREAD_COLOR) if buf.size else None
    if img is None:
        raise DatasetError(f"cannot decode image {path}")
    return img


def save_image(path: str | Path, img: np.ndarray) -> None:
    path = Path(path)
    ok, buf = cv2.imencode(path.suffix or ".png", as_raster(img))
    if not ok:
        raise DatasetError(f"cannot encode image {path}")
    path.parent.mkdir(parents=True, exist_ok=True)
    buf.tofile(str(path))


def resize(img: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Resize to ``(width, height)`` with area interpolation."""
    w, h = size
    if w < 32 or h < 32:
        raise ConfigError(f"resize dimensions must be >= 32, got {w}x{h}")
    return cv2.resize(as_raster(img), (w, h), interpolation=cv2.INTER_AREA)


def parse_size(text: str) -> tuple[int, int]:
    """Parse ``"224x224"`` into ``(224, 224)``."""
    try:
        w, h = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"size must look like WxH, got {text!r}") from None
    if w < 32 or h < 32:
        raise ConfigError(f"resize dimensions must be >= 32, got {text}")
    return w, h


def mask_bitmap(mask, shape: tuple[int, int]) -> np.ndarray | None:
    """Boolean bitmap for ``mask`` (an EyeMask, a boolean array, or None)."""
    if mask is None:
        return None
    bitmap = np.asarray(getattr(mask, "bitmap", mask), dtype=bool)
    if bitmap.shape != tuple(shape):
        raise ConfigError(f"mask shape {bitmap.shape} does not match image shape {tuple(shape)}")
    return bitmap
