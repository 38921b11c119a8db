"""Per-token entropy and logprob dumps from causal transformer LMs."""

from .analyze import AdapterConfig, AnalysisError, Analyzer, DEFAULT_CHECKPOINT
from .records import AnalysisRecord, RecordError, write_dump
from .server import AnalysisServer, serve

__version__ = "0.1.0"
