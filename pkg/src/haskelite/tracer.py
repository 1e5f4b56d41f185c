"""Turning machine runs into textbook-style equational traces.

Only two kinds of transitions produce a visible step: primitive
reductions over literal operands, and matching returns that carry a
source equation.  Everything in between is machinery the student never
sees.  When evaluation reaches weak head normal form the tracer keeps
driving the machine one redex at a time until the result is in full
normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .heap import Heap
from .machine import (
    Error,
    FinalWhnf,
    PrimK,
    StuckFail,
    Stepped,
    find_redex,
    force,
    initial_config,
    step,
)
from .prims import is_literal_equation
from .pretty import render_config, render_value
from .syntax import Con, Expr, LitChar, LitInt, NameSupply, Return

RULE_RETURN1B = "Return1B"
RULE_PRIM2 = "Prim2"

STATUS_RUNNING = "running"
STATUS_DONE = "done"
STATUS_FAILED = "failed"
STATUS_FUEL = "fuel-exhausted"


@dataclass(frozen=True)
class TraceEntry:
    rendered: str
    justification: str
    depth: int
    span: Tuple[int, int]

    def to_json(self) -> dict:
        return {
            "rendered": self.rendered,
            "justification": self.justification,
            "depth": self.depth,
            "span": [self.span[0], self.span[1]],
        }


@dataclass
class TraceOptions:
    max_entries: int = 10_000
    show_machine_steps: bool = False
    force_result: bool = True
    dots_per_level: int = 4
    fuel: int = 100_000

    def __post_init__(self):
        if self.max_entries <= 0:
            raise ValueError("max_entries must be positive")


def _atom_text(e: Expr) -> str:
    if isinstance(e, LitInt):
        return str(e.value)
    if isinstance(e, LitChar):
        return f"'{e.value}'"
    if isinstance(e, Con):
        return e.tag
    return "?"


class Tracer:
    """Incremental trace producer over a single machine timeline."""

    def __init__(
        self,
        globals_heap: Heap,
        global_names,
        entry: Expr,
        opts: TraceOptions,
        supply: Optional[NameSupply] = None,
    ):
        self.opts = opts
        self.global_names = set(global_names)
        if supply is None:
            supply = NameSupply(reserved=set(global_names))
        self.config = initial_config(globals_heap, entry, supply)
        self.status = STATUS_RUNNING
        self.force_root: Optional[Expr] = None
        self.fuel_left = opts.fuel
        self._last_span_end = 0
        self._emitted_final = False
        self.initial_entry = self._snapshot_entry("initial expression")

    # -- internals ---------------------------------------------------------

    def _dots(self, depth: int) -> str:
        return "." * (depth * self.opts.dots_per_level)

    def _snapshot_entry(self, justification: str) -> TraceEntry:
        text, depth = render_config(self.config, self.global_names, self.force_root)
        if depth > 0:
            text = f"{self._dots(depth)} {text}"
        entry = TraceEntry(
            rendered=text,
            justification=justification,
            depth=depth,
            span=(self._last_span_end, self.config.steps),
        )
        self._last_span_end = self.config.steps
        return entry

    def _final_entry(self) -> TraceEntry:
        assert self.force_root is not None
        text = render_value(self.force_root, self.config.heap, self.global_names)
        entry = TraceEntry(
            rendered=text,
            justification="final result",
            depth=0,
            span=(self._last_span_end, self.config.steps),
        )
        self._last_span_end = self.config.steps
        return entry

    def enable_force(self) -> None:
        """Turn on result forcing for the rest of the run (session op)."""
        if not self.opts.force_result:
            self.opts.force_result = True
            if self.status == STATUS_DONE and not self._emitted_final:
                self.status = STATUS_RUNNING

    # -- the driving loop --------------------------------------------------

    def next_entry(self) -> Optional[TraceEntry]:
        """Advance the machine until the next displayed entry, handling
        whnf results and forcing along the way.  None when finished."""
        if self.status != STATUS_RUNNING:
            return None

        while True:
            if self.fuel_left <= 0:
                self.status = STATUS_FUEL
                return None
            before = self.config
            outcome = step(before)

            if isinstance(outcome, Stepped):
                self.fuel_left -= 1
                self.config = outcome.config
                if self.opts.show_machine_steps:
                    return self._snapshot_entry(outcome.rule)
                if outcome.rule == RULE_RETURN1B:
                    matching = before.control.matching
                    assert isinstance(matching, Return)
                    if matching.annotation is not None:
                        return self._snapshot_entry(matching.annotation)
                elif outcome.rule == RULE_PRIM2:
                    prim = before.stack[0]
                    assert isinstance(prim, PrimK)
                    operands = prim.done + (before.control.expr,)
                    result = self.config.control.expr
                    if is_literal_equation(prim.op, operands, result):
                        lhs = f" {prim.op} ".join(_atom_text(v) for v in operands)
                        return self._snapshot_entry(f"{lhs} = {_atom_text(result)}")
                continue

            if isinstance(outcome, FinalWhnf):
                if self.force_root is None:
                    self.force_root = outcome.config.control.expr
                if not self.opts.force_result:
                    self.status = STATUS_DONE
                    return None
                redex = find_redex(self.config.heap, self.force_root)
                if redex is None:
                    self.status = STATUS_DONE
                    self._emitted_final = True
                    return self._final_entry()
                self.config = force(redex, self.config)
                continue

            if isinstance(outcome, StuckFail):
                self.status = STATUS_FAILED
                name = outcome.fn_name or "<anonymous>"
                text, depth = render_config(self.config, self.global_names, self.force_root)
                entry = TraceEntry(
                    rendered="<no matching equation>",
                    justification=f"pattern match failure in {name}",
                    depth=depth,
                    span=(self._last_span_end, self.config.steps),
                )
                self._last_span_end = self.config.steps
                return entry

            assert isinstance(outcome, Error)
            self.status = STATUS_FAILED
            entry = TraceEntry(
                rendered="<runtime error>",
                justification=f"runtime error: {outcome.detail}",
                depth=0,
                span=(self._last_span_end, self.config.steps),
            )
            self._last_span_end = self.config.steps
            return entry

    def entries_iter(self) -> Iterator[TraceEntry]:
        yield self.initial_entry
        count = 1
        while count < self.opts.max_entries:
            entry = self.next_entry()
            if entry is None:
                return
            count += 1
            yield entry


def make_trace(
    globals_heap: Heap,
    global_names,
    entry: Expr,
    opts: Optional[TraceOptions] = None,
    supply: Optional[NameSupply] = None,
) -> Tuple[List[TraceEntry], str]:
    """Run a full trace; returns the entries and the final status."""
    tracer = Tracer(globals_heap, global_names, entry, opts or TraceOptions(), supply)
    entries = list(tracer.entries_iter())
    return entries, tracer.status
