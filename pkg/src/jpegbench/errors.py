"""Exception hierarchy shared across the benchmark pipeline.

Every failure the package raises deliberately derives from BenchmarkError.
ConfigurationError marks bad user input (unknown adapter names, unreadable
paths, invalid policies) and maps to the CLI usage exit code; everything
else maps to the runtime-failure exit code.
"""

from __future__ import annotations


class BenchmarkError(Exception):
    """Base class for all deliberate failures in this package."""


class ConfigurationError(BenchmarkError):
    """Invalid user input or setup: unknown names, bad paths, bad policy values."""


class EmptyCorpusError(ConfigurationError):
    """Corpus scan matched zero files."""


class IngestionError(BenchmarkError):
    """A corpus file could not be read or is not a JPEG stream."""


class ProtocolError(BenchmarkError):
    """A timed cell could not produce a valid measurement."""


class WorkerFailureError(ProtocolError):
    """A loader worker process died before reporting completion."""

    def __init__(self, message: str, worker_id: int | None = None):
        super().__init__(message)
        self.worker_id = worker_id


class IntegrityError(BenchmarkError):
    """Measurements disagree where determinism is required (e.g. skip sets)."""


class ResultFormatError(BenchmarkError):
    """A raw result file is malformed."""


class ResultVersionError(ResultFormatError):
    """A raw result file declares an unsupported schema version."""


class MergeError(BenchmarkError):
    """Result files cannot be combined (conflicting cells or corpora)."""


class AnalysisError(BenchmarkError):
    """Derived-statistics inputs violate a precondition."""
