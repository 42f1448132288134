"""Feature-set registry (FS1 to FS17) and fused extraction.

Components inside a set are always laid out in the order the descriptor
families were introduced: color statistics, variance ratios, GLCM, LBP,
percentiles, histograms. A smaller set's columns therefore appear verbatim
inside every set built on top of it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from eyefresh import colorspace
from eyefresh.color_features import (
    CVR_PAIRS,
    PERCENTILES,
    STAT_NAMES,
    HIST_BINS,
    color_histogram,
    color_percentiles,
    color_statistics,
    color_variance_ratios,
)
from eyefresh.errors import ConfigError
from eyefresh.raster import as_raster
from eyefresh.texture_features import GLCM_ANGLES, GLCM_FEATURES, LBP_BINS, glcm_features, lbp_riu2

FAMILY_ORDER = ("CS", "CVR", "GLCM", "LBP", "CP", "CH")
SPACE_ORDER = ("bgr", "lab", "hsv")
SPACE_LABEL = {"bgr": "BGR", "lab": "Lab", "hsv": "HSV", None: "n/a"}


@dataclass(frozen=True)
class ExtractOptions:
    """Switches for the two places where alternative readings are supported."""

    glcm_distance: int = 3
    glcm_aggregate: str = "per_orientation"
    histogram_norm: str = "per_channel"

    def __post_init__(self):
        if self.glcm_aggregate not in ("per_orientation", "mean_range"):
            raise ConfigError(f"unknown glcm_aggregate {self.glcm_aggregate!r}")
        if self.histogram_norm not in ("per_channel", "concatenated"):
            raise ConfigError(f"unknown histogram_norm {self.histogram_norm!r}")
        if self.glcm_distance < 1:
            raise ConfigError("glcm_distance must be >= 1")


DEFAULT_OPTIONS = ExtractOptions()


def component_columns(family: str, space: str | None, options: ExtractOptions = DEFAULT_OPTIONS) -> list[str]:
    if family == "CS":
        channels = colorspace.SPACES[space][0]
        return [f"cs_{space}_{ch}_{stat}" for ch in channels for stat in STAT_NAMES]
    if family == "CP":
        channels = colorspace.SPACES[space][0]
        return [f"cp_{space}_{ch}_p{q}" for ch in channels for q in PERCENTILES]
    if family == "CH":
        channels = colorspace.SPACES[space][0]
        return [f"ch_{space}_{ch}_bin{i}" for ch in channels for i in range(HIST_BINS)]
    if family == "CVR":
        return [f"cvr_{num}_{den}" for _, num, den in CVR_PAIRS]
    if family == "LBP":
        return [f"lbp_riu2_bin{i}" for i in range(LBP_BINS)]
    if family == "GLCM":
        if options.glcm_aggregate == "mean_range":
            return [f"glcm_{f}_{agg}" for f in GLCM_FEATURES for agg in ("mean", "range")]
        return [f"glcm_{f}_{a}" for f in GLCM_FEATURES for a in GLCM_ANGLES]
    raise ConfigError(f"unknown feature family {family!r}")


@dataclass(frozen=True)
class FeatureSetSpec:
    id: str
    components: tuple[tuple[str, str | None], ...]
    dimensionality: int

    def columns(self, options: ExtractOptions = DEFAULT_OPTIONS) -> list[str]:
        cols = []
        for family, space in self.components:
            cols.extend(component_columns(family, space, options))
        return cols

    def describe(self) -> dict:
        cols = self.columns()
        return {
            "id": self.id,
            "dimensionality": self.dimensionality,
            "components": [{"family": f, "color_space": SPACE_LABEL[s]} for f, s in self.components],
            "columns": cols,
        }


_CS = {
    "FS1": ("bgr", "hsv"),
    "FS2": ("bgr", "lab"),
    "FS3": ("lab", "hsv"),
    "FS4": ("bgr", "lab", "hsv"),
}
_CP = {
    "FS8": ("bgr",),
    "FS9": ("lab",),
    "FS10": ("hsv",),
    "FS11": ("bgr", "hsv"),
    "FS12": ("bgr", "lab"),
    "FS13": ("lab", "hsv"),
    "FS14": ("bgr", "lab", "hsv"),
}
_CH = {"FS15": "bgr", "FS16": "lab", "FS17": "hsv"}

DIMENSIONS = {
    "FS1": 48, "FS2": 48, "FS3": 48, "FS4": 72, "FS5": 57, "FS6": 73, "FS7": 83,
    "FS8": 98, "FS9": 98, "FS10": 98, "FS11": 113, "FS12": 113, "FS13": 113,
    "FS14": 128, "FS15": 161, "FS16": 161, "FS17": 161,
}  # fmt: skip


def _size(family: str, space: str | None) -> int:
    return len(component_columns(family, space))


def _spec(fs_id: str, components) -> FeatureSetSpec:
    components = tuple(components)
    dim = sum(_size(f, s) for f, s in components)
    return FeatureSetSpec(fs_id, components, dim)


@lru_cache(maxsize=None)
def _build(fusion_base: str) -> MappingProxyType:
    specs = {}
    for fs, spaces in _CS.items():
        specs[fs] = _spec(fs, [("CS", s) for s in spaces])
    specs["FS5"] = _spec("FS5", specs["FS2"].components + (("CVR", None),))
    specs["FS6"] = _spec("FS6", specs["FS5"].components + (("GLCM", None),))
    specs["FS7"] = _spec("FS7", specs["FS6"].components + (("LBP", None),))
    for fs, spaces in _CP.items():
        specs[fs] = _spec(fs, specs["FS7"].components + tuple(("CP", s) for s in spaces))
    for fs, space in _CH.items():
        specs[fs] = _spec(fs, specs[fusion_base].components + (("CH", space),))
    return MappingProxyType({k: specs[k] for k in sorted(specs, key=lambda s: int(s[2:]))})


def registry(fusion_base: str = "FS11") -> MappingProxyType:
    """All 17 feature-set specs keyed by id.

    ``fusion_base`` selects the set that FS15 to FS17 extend with a histogram
    (``"FS11"`` by default, ``"FS12"`` as the alternative).
    """
    if fusion_base not in ("FS11", "FS12"):
        raise ConfigError(f"fusion_base must be FS11 or FS12, got {fusion_base!r}")
    return _build(fusion_base)


def get_spec(fs_id: str, fusion_base: str = "FS11") -> FeatureSetSpec:
    key = fs_id.upper()
    if not key.startswith("FS"):
        key = f"FS{key}"
    try:
        return registry(fusion_base)[key]
    except KeyError:
        raise ConfigError(f"unknown feature set {fs_id!r}; expected FS1..FS17") from None


@dataclass
class _ImageCache:
    img: np.ndarray
    planes: dict = field(default_factory=dict)

    def space(self, name: str):
        if name not in self.planes:
            self.planes[name] = colorspace.convert(self.img, name)
        return self.planes[name]


def component_label(family: str, space: str | None) -> str:
    return family if space is None else f"{family}({SPACE_LABEL[space]})"


def _compute(cache: _ImageCache, family: str, space: str | None, mask, options: ExtractOptions) -> np.ndarray:
    if family == "CS":
        return color_statistics(cache.space(space), mask)
    if family == "CP":
        return color_percentiles(cache.space(space), mask)
    if family == "CH":
        return color_histogram(cache.space(space), mask, normalize=options.histogram_norm)
    if family == "CVR":
        return color_variance_ratios(cache.img, mask, planes={sp: cache.space(sp) for sp in SPACE_ORDER})
    b_star = cache.space("lab")[2]
    if family == "GLCM":
        return glcm_features(b_star, options.glcm_distance, mask, aggregate=options.glcm_aggregate)
    if family == "LBP":
        return lbp_riu2(b_star, mask)
    raise ConfigError(f"unknown feature family {family!r}")


@dataclass
class FeatureVector:
    set_id: str
    names: list[str]
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))


def extract(
    img,
    spec: FeatureSetSpec | str,
    mask=None,
    options: ExtractOptions = DEFAULT_OPTIONS,
    timings: dict | None = None,
) -> FeatureVector:
    """Fused feature vector of ``img`` for ``spec``.

    When ``timings`` is a dict, wall-clock seconds per component (e.g.
    ``"CS(Lab)"``, ``"GLCM"``) are accumulated into it. Color conversion time
    is charged to the first component that needs the space.
    """
    if isinstance(spec, str):
        spec = get_spec(spec)
    cache = _ImageCache(as_raster(img))
    parts = []
    for family, space in spec.components:
        t0 = time.perf_counter()
        parts.append(_compute(cache, family, space, mask, options))
        if timings is not None:
            label = component_label(family, space)
            timings[label] = timings.get(label, 0.0) + time.perf_counter() - t0
    values = np.concatenate(parts)
    names = spec.columns(options)
    assert len(values) == len(names), f"{spec.id}: {len(values)} values for {len(names)} columns"
    if options == DEFAULT_OPTIONS:
        assert len(values) == spec.dimensionality
    return FeatureVector(spec.id, names, values)
