"""Persistent heap and the runtime error family shared by both evaluators."""

from __future__ import annotations

from typing import Dict, Iterator, Optional, Tuple

from .syntax import Expr


class Heap:
    """Finite map from locations to expressions with functional updates.

    ``set`` and ``remove`` return new heaps; existing references keep
    seeing the old contents, which is what lets configurations be passed
    around by value.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Optional[Dict[str, Expr]] = None):
        self._entries = entries if entries is not None else {}

    def get(self, loc: str) -> Optional[Expr]:
        return self._entries.get(loc)

    def __contains__(self, loc: str) -> bool:
        return loc in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def set(self, loc: str, e: Expr) -> "Heap":
        entries = dict(self._entries)
        entries[loc] = e
        return Heap(entries)

    def set_many(self, pairs) -> "Heap":
        entries = dict(self._entries)
        entries.update(pairs)
        return Heap(entries)

    def remove(self, loc: str) -> "Heap":
        entries = dict(self._entries)
        del entries[loc]
        return Heap(entries)

    def items(self) -> Iterator[Tuple[str, Expr]]:
        return iter(self._entries.items())

    def keys(self):
        return self._entries.keys()


class EvalError(Exception):
    """Base class for runtime evaluation errors."""


class BlackHole(EvalError):
    """A location was demanded while already under evaluation."""

    def __init__(self, loc: str):
        super().__init__(f"blackhole: {loc} depends on itself")
        self.loc = loc


class UnboundVariable(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable: {name}")
        self.name = name


class MatchFailure(EvalError):
    """A saturated matching evaluated to failure; there is no rule for it."""

    def __init__(self, fn_name: Optional[str] = None):
        name = fn_name or "<anonymous>"
        super().__init__(f"pattern match failure in {name}")
        self.fn_name = fn_name


class PrimError(EvalError):
    """Invalid primitive application (division by zero and friends)."""


class IllFormed(EvalError):
    """Malformed term reached an evaluator; signals a translation bug."""


class FuelExhausted(EvalError):
    def __init__(self, detail: str = "evaluation fuel exhausted"):
        super().__init__(detail)
