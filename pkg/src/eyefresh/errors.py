"""Exception hierarchy shared by all modules."""


class EyefreshError(Exception):
    """Base class for all package errors."""


class ConfigError(EyefreshError, ValueError):
    """Bad arguments, unknown options or an invalid configuration."""


class DatasetError(EyefreshError):
    """The image collection on disk cannot form a usable dataset."""


class SchemaError(EyefreshError, ValueError):
    """Feature rows or CSV columns do not agree on one feature set."""


class ExtractionError(EyefreshError, ValueError):
    """A feature extractor received an input it cannot describe (e.g. an empty mask)."""


class SegmentationError(EyefreshError):
    """The eye boundary could not be located."""


class TrainingError(EyefreshError, ValueError):
    """A model cannot be fitted on the given data."""
