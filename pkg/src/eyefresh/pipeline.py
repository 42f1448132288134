"""Dataset-level extraction: load, optionally resize and segment, then fuse features."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from eyefresh.dataset import Dataset, LabeledSample
from eyefresh.errors import EyefreshError
from eyefresh.fusion import DEFAULT_OPTIONS, ExtractOptions, FeatureSetSpec, FeatureVector, extract
from eyefresh.raster import load_image, resize
from eyefresh import segmentation

log = logging.getLogger(__name__)


@dataclass
class ExtractionResult:
    rows: list[tuple[str, FeatureVector, int]] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def n_attempted(self) -> int:
        return len(self.rows) + len(self.failures)

    @property
    def failure_rate(self) -> float:
        return len(self.failures) / self.n_attempted if self.n_attempted else 0.0


def extract_image(img, spec: FeatureSetSpec, segmented: bool = False, resize_to=None,
                  options: ExtractOptions = DEFAULT_OPTIONS, timings: dict | None = None):
    """Feature vector of one decoded image, with its mask when ``segmented``."""
    if resize_to is not None:
        img = resize(img, resize_to)
    mask = None
    if segmented:
        mask, _ = segmentation.segment(img)
    return extract(img, spec, mask=mask, options=options, timings=timings), mask


def _work(args):
    sample, spec, segmented, resize_to, options = args
    timings: dict[str, float] = {}
    try:
        img = load_image(sample.image_path)
        vec, _ = extract_image(img, spec, segmented, resize_to, options, timings)
    except EyefreshError as exc:
        return sample.sample_id, None, f"{type(exc).__name__}: {exc}", timings
    return sample.sample_id, vec, None, timings


def extract_samples(samples: list[LabeledSample], spec: FeatureSetSpec, segmented: bool = False,
                    resize_to=None, options: ExtractOptions = DEFAULT_OPTIONS, jobs: int = 1) -> ExtractionResult:
    """Extract features for ``samples``; rows keep the input order whatever ``jobs`` is."""
    tasks = [(s, spec, segmented, resize_to, options) for s in samples]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_work, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        outputs = [_work(t) for t in tasks]

    result = ExtractionResult()
    by_id = {s.sample_id: s for s in samples}
    for sid, vec, error, timings in outputs:
        for k, v in timings.items():
            result.timings[k] = result.timings.get(k, 0.0) + v
        if vec is None:
            log.warning("feature extraction failed for %s: %s", sid, error)
            result.failures.append({"sample_id": sid, "error": error})
        else:
            result.rows.append((sid, vec, int(by_id[sid].label)))
    return result


def extract_dataset(ds: Dataset, spec: FeatureSetSpec, **kwargs) -> dict[str, ExtractionResult]:
    """Per-split extraction for an already split dataset (``train``, ``val``, ``test``)."""
    return {split: extract_samples(ds.subset(split), spec, **kwargs) for split in ("train", "val", "test")}


def matrix(result: ExtractionResult) -> tuple[np.ndarray, np.ndarray]:
    if not result.rows:
        return np.empty((0, 0)), np.empty(0, dtype=np.int64)
    X = np.stack([vec.values for _, vec, _ in result.rows])
    y = np.array([label for _, _, label in result.rows], dtype=np.int64)
    return X, y
