"""Image decoder throughput benchmark.

Measures named JPEG decode paths under two protocols (isolated
single-thread decode and a worker-parallel loader harness), records raw
results in a versioned file format, and derives rank, robustness, and
recommendation statistics from them.
"""

from .adapters import (
    AdapterDescriptor,
    AdapterEntry,
    AdapterRegistry,
    DecodedImage,
    Skip,
    decode_one,
    normalize_to_rgb8,
)
from .analysis import (
    AnalysisSummary,
    StatisticalPolicy,
    TierPolicy,
    read_summary,
    summarize,
    write_summary,
)
from .backends import build_default_registry
from .corpus import Corpus, CorpusItem, load_corpus, load_memory_corpus, scan_corpus
from .errors import (
    AnalysisError,
    BenchmarkError,
    ConfigurationError,
    EmptyCorpusError,
    IngestionError,
    IntegrityError,
    MergeError,
    ProtocolError,
    ResultFormatError,
    ResultVersionError,
    WorkerFailureError,
)
from .loader import LoaderRunConfig, run_loader_sweep
from .results import (
    BenchmarkResult,
    merge_platform_results,
    read_result,
    read_results,
    write_result,
)
from .single_thread import ProtocolResult, RunConfig, run_single_thread

__version__ = "0.1.0"

__all__ = [
    "AdapterDescriptor",
    "AdapterEntry",
    "AdapterRegistry",
    "AnalysisError",
    "AnalysisSummary",
    "BenchmarkError",
    "BenchmarkResult",
    "ConfigurationError",
    "Corpus",
    "CorpusItem",
    "DecodedImage",
    "EmptyCorpusError",
    "IngestionError",
    "IntegrityError",
    "LoaderRunConfig",
    "MergeError",
    "ProtocolError",
    "ProtocolResult",
    "ResultFormatError",
    "ResultVersionError",
    "RunConfig",
    "Skip",
    "StatisticalPolicy",
    "TierPolicy",
    "WorkerFailureError",
    "build_default_registry",
    "decode_one",
    "load_corpus",
    "load_memory_corpus",
    "merge_platform_results",
    "normalize_to_rgb8",
    "read_result",
    "read_results",
    "read_summary",
    "run_loader_sweep",
    "run_single_thread",
    "scan_corpus",
    "summarize",
    "write_result",
    "write_summary",
]
