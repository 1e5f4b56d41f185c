"""Haskelite: a tracing interpreter for a small Haskell subset.

Programs are translated into a pattern-matching core language and run on
a small-step abstract machine; traces show each step justified by a
source equation or a primitive reduction, the way textbooks present
evaluation.
"""

from .heap import Heap
from .program import CheckedProgram, Diagnostic, LoadError, load_program, prepare_entry
from .tracer import TraceEntry, TraceOptions, Tracer, make_trace

__all__ = [
    "CheckedProgram",
    "Diagnostic",
    "Heap",
    "LoadError",
    "TraceEntry",
    "TraceOptions",
    "Tracer",
    "load_program",
    "make_trace",
    "prepare_entry",
]

__version__ = "0.1.0"
