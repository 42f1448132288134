"""Batch command line front-end.

Option precedence: command-line flag, then ``EYEFRESH_<OPTION>`` environment
variable, then the ``--config`` JSON file, then built-in defaults.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 segmentation
failure rate above ``--max-seg-failure``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from eyefresh import __version__, dataset, fusion, pipeline, segmentation
from eyefresh.classify import evaluate, load_model, predict, save_model, train
from eyefresh.errors import ConfigError, DatasetError, SchemaError, SegmentationError, TrainingError
from eyefresh.raster import IMAGE_SUFFIXES, load_image, parse_size, resize, save_image

log = logging.getLogger("eyefresh")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_SEGMENTATION = 0, 2, 3, 4
ENV_PREFIX = "EYEFRESH_"

DEFAULTS = {
    "feature_set": "FS17",
    "segmented": False,
    "resize": None,
    "seed": dataset.DEFAULT_SEED,
    "jobs": 1,
    "timing": False,
    "test_frac": 0.2,
    "val_frac": 0.2,
    "name_map": None,
    "max_seg_failure": 0.2,
    "glcm_aggregate": "per_orientation",
    "histogram_norm": "per_channel",
    "fusion_base": "FS11",
    "model": "RF",
    "params": {},
}
_CASTS = {
    "seed": int,
    "jobs": int,
    "test_frac": float,
    "val_frac": float,
    "max_seg_failure": float,
    "segmented": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
    "timing": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
    "params": lambda v: json.loads(v) if isinstance(v, str) else dict(v),
}
# options that change no output byte and stay out of the config hash
_VOLATILE = {"jobs", "timing"}


class _DataError(Exception):
    pass


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        cfg.update(loaded)
    for key in DEFAULTS:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            cfg[key] = env
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    try:
        for key, cast in _CASTS.items():
            if cfg[key] is not None:
                cfg[key] = cast(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad option value: {exc}") from exc
    if isinstance(cfg["resize"], str):
        cfg["resize"] = list(parse_size(cfg["resize"]))
    if cfg["jobs"] < 1:
        raise ConfigError("--jobs must be >= 1")
    fusion.get_spec(cfg["feature_set"], cfg["fusion_base"])
    return cfg


def config_hash(cfg: dict) -> str:
    stable = {k: v for k, v in cfg.items() if k not in _VOLATILE}
    return hashlib.sha256(json.dumps(stable, sort_keys=True, default=str).encode()).hexdigest()


def _options(cfg) -> fusion.ExtractOptions:
    return fusion.ExtractOptions(glcm_aggregate=cfg["glcm_aggregate"], histogram_norm=cfg["histogram_norm"])


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load_dataset(root, cfg) -> dataset.Dataset:
    names = dataset.load_name_map(cfg["name_map"])
    return dataset.ingest(root, names, seed=cfg["seed"], jobs=cfg["jobs"])


def timing_table(timings: dict[str, float]) -> str:
    width = max([len(k) for k in timings] + [9])
    lines = [f"{'component'.ljust(width)}  seconds"]
    for name, secs in sorted(timings.items(), key=lambda kv: -kv[1]):
        lines.append(f"{name.ljust(width)}  {secs:8.3f}")
    lines.append(f"{'total'.ljust(width)}  {sum(timings.values()):8.3f}")
    return "\n".join(lines)


def cmd_split(args) -> int:
    cfg = resolve_config(args)
    ds = _load_dataset(args.root, cfg)
    ds = dataset.stratified_split(ds, cfg["test_frac"], cfg["val_frac"], cfg["seed"])
    dataset.write_split_manifest(ds, args.out)
    counts = {sp: len(ds.subset(sp)) for sp in ("train", "val", "test")}
    print(json.dumps({"manifest": str(args.out), "counts": counts, "rejected": len(ds.rejected)}))
    return EXIT_OK


def _collect_images(inputs) -> list[Path]:
    paths = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(q for q in p.rglob("*") if q.suffix.lower() in IMAGE_SUFFIXES))
        elif p.is_file():
            paths.append(p)
        else:
            raise _DataError(f"input {p} does not exist")
    return paths


def cmd_segment(args) -> int:
    cfg = resolve_config(args)
    out_dir = Path(args.out_dir)
    paths = _collect_images(args.inputs)
    if not paths:
        raise _DataError("no images to segment")
    failures = []
    for path in paths:
        try:
            img = load_image(path)
            if cfg["resize"]:
                img = resize(img, tuple(cfg["resize"]))
            mask, masked = segmentation.segment(img)
        except (SegmentationError, DatasetError) as exc:
            log.warning("%s: %s", path, exc)
            failures.append({"path": str(path), "error": str(exc)})
            continue
        save_image(out_dir / f"{path.stem}_segmented.png", masked)
        info = mask.to_json()
        _write_json(out_dir / f"{path.stem}_segmented.json",
                    {"center": info["center"], "radius": info["radius"],
                     "n_candidates_kept": info["n_candidates_kept"], "raw_radius": info["raw_radius"]})
    rate = len(failures) / len(paths)
    print(json.dumps({"segmented": len(paths) - len(failures), "failed": failures}))
    return EXIT_SEGMENTATION if rate > cfg["max_seg_failure"] else EXIT_OK


def run_extract(root, out_dir: Path, cfg: dict, split_manifest=None) -> int:
    ds = _load_dataset(root, cfg)
    if split_manifest:
        ds = ds.with_manifest(dataset.read_split_manifest(split_manifest))
    else:
        ds = dataset.stratified_split(ds, cfg["test_frac"], cfg["val_frac"], cfg["seed"])
    spec = fusion.get_spec(cfg["feature_set"], cfg["fusion_base"])
    resize_to = tuple(cfg["resize"]) if cfg["resize"] else None
    results = pipeline.extract_dataset(ds, spec, segmented=cfg["segmented"], resize_to=resize_to,
                                       options=_options(cfg), jobs=cfg["jobs"])

    out_dir.mkdir(parents=True, exist_ok=True)
    rows, failures, timings = {}, [], {}
    for split, res in results.items():
        if res.rows:
            rows[split] = dataset.write_feature_matrix(res.rows, out_dir / f"{split}.csv")
        else:
            names = spec.columns(_options(cfg))
            (out_dir / f"{split}.csv").write_text(",".join(names + ["label"]) + "\n", encoding="utf-8")
            rows[split] = []
        failures.extend(res.failures)
        for k, v in res.timings.items():
            timings[k] = timings.get(k, 0.0) + v
    dataset.write_split_manifest(ds, out_dir / "split.json")
    manifest = {
        "tool": "eyefresh",
        "version": __version__,
        "config": {k: v for k, v in cfg.items() if k not in _VOLATILE},
        "config_hash": config_hash(cfg),
        "seed": cfg["seed"],
        "feature_set": spec.id,
        "dimensionality": len(spec.columns(_options(cfg))),
        "root": str(root),
        "rows": rows,
        "failed": failures,
        "rejected": [{"sample_id": s, "error": e} for s, e in ds.rejected],
    }
    _write_json(out_dir / "manifest.json", manifest)
    if cfg["timing"]:
        _write_json(out_dir / "timing.json", timings)
        print(timing_table(timings))
    n_total = sum(len(r) for r in rows.values()) + len(failures)
    print(json.dumps({"out_dir": str(out_dir), "rows": {k: len(v) for k, v in rows.items()},
                      "failed": len(failures)}))
    if cfg["segmented"] and n_total and len(failures) / n_total > cfg["max_seg_failure"]:
        log.error("segmentation failed for %d of %d images", len(failures), n_total)
        return EXIT_SEGMENTATION
    return EXIT_OK


def cmd_extract(args) -> int:
    cfg = resolve_config(args)
    return run_extract(args.root, Path(args.out_dir), cfg, args.split_manifest)


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--param expects name=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def _read_matrix(path: Path):
    if not path.is_file():
        raise _DataError(f"feature matrix {path} not found")
    return dataset.read_feature_matrix(path)


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    features = Path(args.features)
    if not (features / "train.csv").is_file():
        if not args.root:
            raise _DataError(f"{features / 'train.csv'} not found and no --root given to extract from")
        code = run_extract(args.root, features, cfg)
        if code != EXIT_OK:
            return code
    names, X, y = _read_matrix(features / "train.csv")
    manifest = features / "manifest.json"
    if manifest.is_file():
        cfg["feature_set"] = json.loads(manifest.read_text(encoding="utf-8")).get("feature_set", cfg["feature_set"])
    params = {**cfg["params"], **_parse_params(args.param)}
    model = train(cfg["model"], params, X, y, seed=cfg["seed"], feature_set_id=cfg["feature_set"],
                  feature_names=names)
    if args.out:
        save_model(model, args.out)
    test_csv = features / "test.csv"
    if test_csv.is_file():
        test_names, Xt, yt = _read_matrix(test_csv)
        if test_names != names:
            raise SchemaError("train.csv and test.csv have different columns")
        report = evaluate(yt, predict(model, Xt)) if len(yt) else None
        if report is not None:
            doc = {"model": model.kind, "feature_set": cfg["feature_set"], "n_test": int(len(yt)),
                   **report.to_json()}
            if args.report:
                _write_json(Path(args.report), doc)
            print(report.confusion_text())
            print(json.dumps(doc))
    return EXIT_OK


def cmd_eval(args) -> int:
    model = load_model(args.model)
    names, X, y = _read_matrix(Path(args.csv))
    if model.feature_names and names != model.feature_names:
        raise SchemaError("CSV columns do not match the model's feature set")
    if len(y) == 0:
        raise _DataError(f"{args.csv} has no rows")
    report = evaluate(y, predict(model, X))
    doc = {"model": model.kind, "feature_set": model.feature_set_id, "n": int(len(y)), **report.to_json()}
    if args.out:
        _write_json(Path(args.out), doc)
    print(report.confusion_text())
    print(json.dumps(doc))
    return EXIT_OK


def cmd_fuse_info(args) -> int:
    base = args.fusion_base or os.environ.get(ENV_PREFIX + "FUSION_BASE", "FS11")
    if args.feature_set:
        doc = fusion.get_spec(args.feature_set, base).describe()
    else:
        doc = {k: {"dimensionality": s.dimensionality,
                   "components": s.describe()["components"]} for k, s in fusion.registry(base).items()}
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eyefresh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"eyefresh {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, extraction=False):
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int, help="parallel worker processes")
        p.add_argument("--name-map", dest="name_map", help="JSON map of label -> class directory name(s)")
        p.add_argument("--test-frac", dest="test_frac", type=float)
        p.add_argument("--val-frac", dest="val_frac", type=float)
        if extraction:
            p.add_argument("--feature-set", dest="feature_set", help="FS1..FS17 (default FS17)")
            p.add_argument("--segmented", action="store_const", const=True,
                           help="extract from the segmented eye region only")
            p.add_argument("--resize", help="resize images to WxH before anything else, e.g. 224x224")
            p.add_argument("--timing", action="store_const", const=True, help="report seconds per feature family")
            p.add_argument("--max-seg-failure", dest="max_seg_failure", type=float)
            p.add_argument("--glcm-aggregate", dest="glcm_aggregate", choices=["per_orientation", "mean_range"])
            p.add_argument("--histogram-norm", dest="histogram_norm", choices=["per_channel", "concatenated"])
            p.add_argument("--fusion-base", dest="fusion_base", choices=["FS11", "FS12"])

    p = sub.add_parser("split", help="write a stratified train/val/test manifest")
    p.add_argument("root")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("segment", help="segment eye regions, writing masked PNGs and JSON sidecars")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--config")
    p.add_argument("--resize")
    p.add_argument("--max-seg-failure", dest="max_seg_failure", type=float)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("extract", help="extract a feature set into per-split CSVs")
    p.add_argument("root")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--split-manifest", dest="split_manifest")
    common(p, extraction=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="fit a model on train.csv and report on test.csv")
    p.add_argument("--features", required=True, help="directory holding train.csv / test.csv")
    p.add_argument("--root", help="dataset root to extract from when the CSVs are missing")
    p.add_argument("--model", help="KNN, LR, MLP (ANN), RF or ET")
    p.add_argument("--param", action="append", help="hyperparameter override name=value (repeatable)")
    p.add_argument("--out", help="where to save the model JSON")
    p.add_argument("--report", help="where to save the evaluation report JSON")
    common(p, extraction=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fuse-info", help="print a feature set's columns and dimensionality as JSON")
    p.add_argument("feature_set", nargs="?")
    p.add_argument("--fusion-base", dest="fusion_base", choices=["FS11", "FS12"])
    p.set_defaults(func=cmd_fuse_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, SchemaError) as exc:
        print(f"eyefresh: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetError, TrainingError, _DataError, OSError) as exc:
        print(f"eyefresh: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SegmentationError as exc:
        print(f"eyefresh: segmentation error: {exc}", file=sys.stderr)
        return EXIT_SEGMENTATION


if __name__ == "__main__":
    sys.exit(main())
