"""Handcrafted feature extraction and classical classification for fish-eye freshness grading."""

__version__ = "0.1.0"

from eyefresh.errors import (
    ConfigError,
    DatasetError,
    EyefreshError,
    ExtractionError,
    SchemaError,
    SegmentationError,
    TrainingError,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DatasetError",
    "EyefreshError",
    "ExtractionError",
    "SchemaError",
    "SegmentationError",
    "TrainingError",
]
