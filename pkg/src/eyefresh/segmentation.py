"""Eye localization by radial intensity scanning.

The eye is assumed centred in the frame. Rays are cast from the image centre,
each ray's boundary candidate is the steepest dark-to-bright step, candidates
are filtered with a median/MAD rule and the surviving median (slightly
enlarged) gives the disc radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from eyefresh.colorspace import grayscale
from eyefresh.errors import ConfigError, SegmentationError
from eyefresh.raster import as_raster

KERNEL_SIZE = 7
N_RAYS = 360
R_MIN_FRAC = 0.05
R_MAX_FRAC = 0.48
ADJUSTMENT = 1.05
MAD_FACTOR = 3.0
MIN_CANDIDATES = 8
# steps shallower than this are interpolation round-off, not edges
FLAT_TOL = 1e-9


@dataclass
class RadialProfile:
    angle: float
    radii: np.ndarray
    samples: np.ndarray
    candidate_radius: float | None = None


@dataclass
class EyeMask:
    width: int
    height: int
    center: tuple[float, float]
    radius: float
    bitmap: np.ndarray = field(repr=False)
    raw_radius: float | None = None
    n_candidates_kept: int | None = None

    @classmethod
    def disc(cls, width: int, height: int, center: tuple[float, float], radius: float, **meta) -> "EyeMask":
        if radius <= 0:
            raise SegmentationError(f"disc radius must be positive, got {radius}")
        ys, xs = np.mgrid[0:height, 0:width]
        cx, cy = center
        bitmap = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius**2
        return cls(width, height, (float(cx), float(cy)), float(radius), bitmap, **meta)

    def apply(self, img: np.ndarray) -> np.ndarray:
        """Copy of ``img`` with every pixel outside the disc set to black."""
        img = as_raster(img)
        if img.shape[:2] != self.bitmap.shape:
            raise ConfigError(f"mask {self.bitmap.shape} does not fit image {img.shape[:2]}")
        return np.where(self.bitmap[..., None], img, 0).astype(np.uint8)

    def to_json(self) -> dict:
        return {
            "center": [self.center[0], self.center[1]],
            "radius": self.radius,
            "raw_radius": self.raw_radius,
            "n_candidates_kept": self.n_candidates_kept,
            "width": self.width,
            "height": self.height,
        }


def gaussian_sigma(ksize: int) -> float:
    """Size-to-sigma rule used when only a kernel size is given."""
    return 0.3 * ((ksize - 1) * 0.5 - 1) + 0.8


def gaussian_kernel(ksize: int = KERNEL_SIZE) -> np.ndarray:
    sigma = gaussian_sigma(ksize)
    x = np.arange(ksize) - (ksize - 1) / 2.0
    k = np.exp(-(x**2) / (2.0 * sigma**2))
    return k / k.sum()


def preprocess(img: np.ndarray, ksize: int = KERNEL_SIZE) -> np.ndarray:
    """Grayscale then separable 7x7 Gaussian blur with reflected borders."""
    gray = grayscale(img)
    k = gaussian_kernel(ksize)
    out = ndimage.correlate1d(gray, k, axis=0, mode="reflect")
    return ndimage.correlate1d(out, k, axis=1, mode="reflect")


def scan_range(shape: tuple[int, int]) -> tuple[float, float]:
    side = min(shape)
    return R_MIN_FRAC * side, R_MAX_FRAC * side


def scan_boundary(plane: np.ndarray, n_rays: int = N_RAYS) -> list[RadialProfile]:
    """Sample ``n_rays`` radial profiles from the image centre.

    Samples are one pixel apart, bilinearly interpolated. The radial gradient
    is taken inward (``s[i] - s[i+1]``) so that a dark interior meeting a
    brighter surround is a negative step; the candidate radius is the midpoint
    of the most negative step, or None when no step is negative (beyond
    round-off).
    """
    plane = np.asarray(plane, dtype=np.float64)
    h, w = plane.shape
    if h < 32 or w < 32:
        raise SegmentationError(f"plane must be at least 32x32, got {w}x{h}")
    if n_rays < 1:
        raise ConfigError("n_rays must be positive")
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    r_min, r_max = scan_range((h, w))
    radii = r_min + np.arange(int(np.floor(r_max - r_min)) + 1)
    angles = 2.0 * np.pi * np.arange(n_rays) / n_rays

    xs = cx + np.cos(angles)[:, None] * radii[None, :]
    ys = cy + np.sin(angles)[:, None] * radii[None, :]
    samples = ndimage.map_coordinates(plane, [ys.ravel(), xs.ravel()], order=1, mode="nearest")
    samples = samples.reshape(n_rays, radii.size)

    grad = samples[:, :-1] - samples[:, 1:]
    best = np.argmin(grad, axis=1)
    steepest = grad[np.arange(n_rays), best]

    profiles = []
    for k in range(n_rays):
        cand = float(radii[best[k]] + 0.5) if steepest[k] < -FLAT_TOL else None
        profiles.append(RadialProfile(float(np.degrees(angles[k])), radii, samples[k], cand))
    return profiles


def filter_candidates(candidates) -> np.ndarray:
    """Drop candidates further than 3 MAD from the median."""
    c = np.asarray(candidates, dtype=np.float64)
    med = np.median(c)
    mad = np.median(np.abs(c - med))
    return c[np.abs(c - med) <= MAD_FACTOR * mad]


def estimate_radius(profiles, adjustment: float = ADJUSTMENT) -> tuple[float, float, int]:
    """Return ``(radius, raw_radius, n_kept)`` where ``radius = raw_radius * adjustment``."""
    candidates = [
        p.candidate_radius if isinstance(p, RadialProfile) else p for p in profiles
    ]
    candidates = [c for c in candidates if c is not None]
    if len(candidates) < MIN_CANDIDATES:
        raise SegmentationError(
            f"only {len(candidates)} rays found a boundary candidate, need {MIN_CANDIDATES}"
        )
    kept = filter_candidates(candidates)
    raw = float(np.median(kept))
    return raw * adjustment, raw, int(kept.size)


def segment(img: np.ndarray, n_rays: int = N_RAYS, adjustment: float = ADJUSTMENT) -> tuple[EyeMask, np.ndarray]:
    """Locate the eye disc and black out everything around it."""
    img = as_raster(img)
    h, w = img.shape[:2]
    profiles = scan_boundary(preprocess(img), n_rays)
    radius, raw, kept = estimate_radius(profiles, adjustment)
    mask = EyeMask.disc(w, h, ((w - 1) / 2.0, (h - 1) / 2.0), radius, raw_radius=raw, n_candidates_kept=kept)
    return mask, mask.apply(img)
