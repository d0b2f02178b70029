"""Generate TypeScript declaration files from run-time traces of
JavaScript packages, parse existing declaration files, and compare the
two structurally."""

from .compare import ComparisonReport, Difference, compare
from .declaration import (
    DeclarationModule,
    FEATURE_TAGS,
    IMPLEMENTED_TAGS,
    TemplateKind,
    camelize,
    compute_feature_tags,
    normalize,
    unimplemented_tags,
)
from .emitter import emit
from .harvester import CodeExample, extract_code_examples
from .inference import InferenceConfig, InsufficientTraceError, infer_module, merge_signatures
from .parser import AliasCycleError, DtsSyntaxError, expand_aliases, parse_declaration
from .trace_model import Trace, TraceFormatError, load_trace, merge_traces, save_trace

__version__ = "0.1.0"

__all__ = [
    "AliasCycleError",
    "CodeExample",
    "ComparisonReport",
    "DeclarationModule",
    "Difference",
    "DtsSyntaxError",
    "FEATURE_TAGS",
    "IMPLEMENTED_TAGS",
    "InferenceConfig",
    "InsufficientTraceError",
    "TemplateKind",
    "Trace",
    "TraceFormatError",
    "camelize",
    "compare",
    "compute_feature_tags",
    "emit",
    "expand_aliases",
    "extract_code_examples",
    "infer_module",
    "load_trace",
    "merge_signatures",
    "merge_traces",
    "normalize",
    "parse_declaration",
    "save_trace",
    "unimplemented_tags",
]
