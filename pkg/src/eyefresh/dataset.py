"""Labeled image collections, stratified splitting and feature-matrix CSVs.

Expected layout::

    <root>/<class dir>/[<species dir>/...]/<image>.{jpg,png,...}

Class directories are matched to :class:`FreshnessLabel` by a name map;
anything nested below a class directory (e.g. per-species folders) is
flattened into that class.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from pathlib import Path

import numpy as np

from eyefresh.errors import ConfigError, DatasetError, SchemaError
from eyefresh.raster import IMAGE_SUFFIXES, load_image

log = logging.getLogger(__name__)

DEFAULT_SEED = 42


class FreshnessLabel(IntEnum):
    HIGHLY_FRESH = 0
    FRESH = 1
    NOT_FRESH = 2

    @property
    def display(self) -> str:
        return {0: "HighlyFresh", 1: "Fresh", 2: "NotFresh"}[self.value]

    @classmethod
    def parse(cls, value) -> "FreshnessLabel":
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, np.integer)) or str(value).strip().isdigit():
            return cls(int(value))
        key = _norm(str(value))
        for member in cls:
            if key in (_norm(member.name), _norm(member.display)):
                return member
        raise ConfigError(f"unknown freshness label {value!r}")


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"
    UNASSIGNED = "unassigned"


def _norm(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


# normalized directory name -> label; "Highly fresh", "highly_fresh", "HighlyFresh" all match
DEFAULT_NAME_MAP = {
    "HighlyFresh": ["highlyfresh", "highly fresh", "highly_fresh", "sangat segar"],
    "Fresh": ["fresh", "segar"],
    "NotFresh": ["notfresh", "not fresh", "not_fresh", "tidak segar"],
}


@dataclass(frozen=True)
class LabeledSample:
    sample_id: str
    image_path: Path
    label: FreshnessLabel
    split: Split = Split.UNASSIGNED


@dataclass
class Dataset:
    samples: list[LabeledSample]
    seed: int = DEFAULT_SEED
    rejected: list[tuple[str, str]] = field(default_factory=list)

    @property
    def class_counts(self) -> dict[FreshnessLabel, int]:
        counts = {label: 0 for label in FreshnessLabel}
        for s in self.samples:
            counts[s.label] += 1
        return counts

    def __len__(self) -> int:
        return len(self.samples)

    def subset(self, split: Split | str) -> list[LabeledSample]:
        split = Split(split)
        return [s for s in self.samples if s.split is split]

    def split_manifest(self) -> dict[str, str]:
        return {s.sample_id: s.split.value for s in self.samples}

    def with_manifest(self, manifest: dict[str, str]) -> "Dataset":
        missing = [s.sample_id for s in self.samples if s.sample_id not in manifest]
        if missing:
            raise DatasetError(f"{len(missing)} samples missing from split manifest, e.g. {missing[0]}")
        samples = [replace(s, split=Split(manifest[s.sample_id])) for s in self.samples]
        return Dataset(samples, self.seed, list(self.rejected))


def load_name_map(path: str | Path | None) -> dict[str, list[str]]:
    """Read a JSON name map ``{label: dir name or [dir names]}``."""
    if path is None:
        return DEFAULT_NAME_MAP
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read name map {path}: {exc}") from exc
    out = {}
    for label, names in raw.items():
        FreshnessLabel.parse(label)
        out[label] = [names] if isinstance(names, str) else list(names)
    return out


def _class_dirs(root: Path, name_map: dict[str, list[str]]) -> dict[FreshnessLabel, Path]:
    subdirs = {_norm(p.name): p for p in sorted(root.iterdir()) if p.is_dir()}
    found = {}
    for label_name, names in name_map.items():
        label = FreshnessLabel.parse(label_name)
        for name in names:
            if _norm(name) in subdirs:
                found[label] = subdirs[_norm(name)]
                break
    missing = [label.display for label in FreshnessLabel if label not in found]
    if missing:
        raise ConfigError(
            f"{root}: no directory for class(es) {', '.join(missing)}; found {sorted(p.name for p in subdirs.values())}"
        )
    return found


def _probe(path: Path) -> str | None:
    try:
        load_image(path)
    except DatasetError as exc:
        return str(exc)
    return None


def ingest(root: str | Path, name_map: dict | None = None, seed: int = DEFAULT_SEED, jobs: int = 1, verify: bool = True) -> Dataset:
    """Register every decodable image under ``root`` with its freshness label.

    Samples are ordered by their path relative to ``root``. Files that fail to
    decode are collected in ``Dataset.rejected`` and logged.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a readable directory")
    dirs = _class_dirs(root, name_map or DEFAULT_NAME_MAP)

    candidates = []
    for label, d in dirs.items():
        for path in d.rglob("*"):
            if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES:
                candidates.append((path.relative_to(root).as_posix(), path, label))
    candidates.sort(key=lambda c: c[0])

    if verify:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            problems = list(pool.map(_probe, [c[1] for c in candidates]))
    else:
        problems = [None] * len(candidates)

    samples, rejected = [], []
    for (sid, path, label), problem in zip(candidates, problems):
        if problem is None:
            samples.append(LabeledSample(sid, path, label))
        else:
            log.warning("skipping undecodable image: %s", problem)
            rejected.append((sid, problem))

    ds = Dataset(samples, seed, rejected)
    empty = [label.display for label, n in ds.class_counts.items() if n == 0]
    if empty:
        raise DatasetError(f"no images found for class(es): {', '.join(empty)}")
    return ds


def _take(n: int, frac: float) -> int:
    # guards against 0.29 * 100 = 28.999...
    return int(math.floor(n * frac + 1e-9))


def stratified_split(ds: Dataset, test_frac: float = 0.2, val_frac: float = 0.2, seed: int | None = None) -> Dataset:
    """Assign train/val/test per class.

    Per class, ``floor(n * test_frac)`` samples go to test; of the rest,
    ``floor(rest * val_frac)`` go to val and the remainder to train. Shuffling
    is keyed by ``(seed, class index)``, so the result depends only on the
    sample order and the seed.
    """
    if not 0.0 < test_frac < 1.0:
        raise ConfigError(f"test_frac must be in (0, 1), got {test_frac}")
    if not 0.0 <= val_frac < 1.0:
        raise ConfigError(f"val_frac must be in [0, 1), got {val_frac}")
    seed = ds.seed if seed is None else seed

    if not ds.samples:
        raise DatasetError("cannot split an empty dataset")
    splits = [Split.TRAIN] * len(ds.samples)
    for label in FreshnessLabel:
        members = [i for i, s in enumerate(ds.samples) if s.label is label]
        if not members:
            continue
        order = np.random.default_rng([seed, int(label)]).permutation(len(members))
        shuffled = [members[k] for k in order]
        n_test = _take(len(shuffled), test_frac)
        n_val = _take(len(shuffled) - n_test, val_frac)
        for i in shuffled[:n_test]:
            splits[i] = Split.TEST
        for i in shuffled[n_test : n_test + n_val]:
            splits[i] = Split.VAL

    samples = [replace(s, split=sp) for s, sp in zip(ds.samples, splits)]
    return Dataset(samples, seed, list(ds.rejected))


def write_split_manifest(ds: Dataset, path: str | Path) -> None:
    Path(path).write_text(json.dumps(ds.split_manifest(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_split_manifest(path: str | Path) -> dict[str, str]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError(f"cannot read split manifest {path}: {exc}") from exc


def write_feature_matrix(rows, out: str | Path) -> list[str]:
    """Write ``(sample_id, FeatureVector, label)`` rows as CSV.

    The header is the feature names followed by ``label`` (encoded 0, 1, 2).
    Values use the shortest repr that round-trips exactly. Returns the
    sample ids in row order; an empty ``rows`` writes a bare ``label`` header.
    """
    rows = list(rows)
    names = list(rows[0][1].names) if rows else []
    set_id = rows[0][1].set_id if rows else None
    for sid, vec, _ in rows:
        if vec.set_id != set_id or list(vec.names) != names:
            raise SchemaError(f"row {sid} uses feature set {vec.set_id}, expected {set_id}")

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names + ["label"])
        for _, vec, label in rows:
            writer.writerow([repr(float(v)) for v in vec.values] + [int(FreshnessLabel.parse(label))])
    return [sid for sid, _, _ in rows]


def read_feature_matrix(path: str | Path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Inverse of :func:`write_feature_matrix`: ``(feature names, X, y)``."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            body = [row for row in reader if row]
    except (OSError, StopIteration) as exc:
        raise DatasetError(f"cannot read feature matrix {path}: {exc}") from exc
    if not header or header[-1] != "label":
        raise SchemaError(f"{path}: last column must be 'label'")
    names = header[:-1]
    X = np.array([[float(v) for v in row[:-1]] for row in body], dtype=np.float64).reshape(len(body), len(names))
    y = np.array([int(row[-1]) for row in body], dtype=np.int64)
    return names, X, y
