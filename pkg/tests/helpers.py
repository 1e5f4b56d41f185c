"""Shared helpers for the test suite."""

from __future__ import annotations

from typing import List, Optional, Tuple

from haskelite.bigstep import EvalState, MFail, eval_expr
from haskelite.equiv import values_equivalent
from haskelite.heap import (
    BlackHole,
    EvalError,
    FuelExhausted,
    Heap,
    MatchFailure,
    PrimError,
)
from haskelite.machine import (
    Config,
    Error,
    FinalWhnf,
    StuckFail,
    Stepped,
    UpdateK,
    applicable_rules,
    initial_config,
    step,
    upd,
)
from haskelite.program import load_program, prepare_entry
from haskelite.syntax import Expr, NameSupply, is_whnf
from haskelite.tracer import TraceOptions, Tracer


def run_trace(source: str, expr: str, **opts_kwargs):
    """Load, trace, and return (entries, status)."""
    program = load_program(source)
    entry, _scheme = prepare_entry(program, expr)
    opts = TraceOptions(**opts_kwargs)
    tracer = Tracer(program.heap, program.global_names, entry, opts, program.supply)
    return list(tracer.entries_iter()), tracer.status


def justifications(entries) -> List[str]:
    return [e.justification for e in entries]


def renderings(entries) -> List[str]:
    return [e.rendered for e in entries]


def norm_ws(s: str) -> str:
    return " ".join(s.split())


# -- differential execution ---------------------------------------------------


def run_bigstep(heap: Heap, entry: Expr, supply: NameSupply, fuel: int = 50_000):
    """Returns ('value', heap, whnf) or ('fail'|'blackhole'|'prim'|'fuel', ...)."""
    state = EvalState(heap, frozenset(), supply)
    try:
        st, w = eval_expr(state, entry, fuel=fuel)
        return ("value", st.heap, w)
    except MatchFailure:
        return ("fail", None, None)
    except BlackHole:
        return ("blackhole", None, None)
    except PrimError:
        return ("prim", None, None)
    except FuelExhausted:
        return ("fuel", None, None)


def run_machine(
    heap: Heap,
    entry: Expr,
    supply: NameSupply,
    fuel: int = 400_000,
    collect=None,
):
    """Returns ('value', heap, whnf, trace) or a verdict tag like run_bigstep."""
    config = initial_config(heap, entry, supply)
    trace: List[str] = []
    for _ in range(fuel):
        outcome = step(config)
        if isinstance(outcome, Stepped):
            if collect is not None:
                collect(config, outcome.rule, outcome.config)
            trace.append(outcome.rule)
            config = outcome.config
            continue
        if isinstance(outcome, FinalWhnf):
            return ("value", config.heap, config.control.expr, trace)
        if isinstance(outcome, StuckFail):
            return ("fail", None, None, trace)
        assert isinstance(outcome, Error)
        kind = {
            "BlackHole": "blackhole",
            "PrimError": "prim",
        }.get(outcome.kind, outcome.kind)
        return (kind, None, None, trace)
    return ("fuel", None, None, trace)


# Which grammar bracket each opener rule introduces, and the evaluation
# mode of the sub-trace it encloses.
_BRACKET_MODES = {
    "App1": "expr",   # argument frame; inner evaluates the function
    "Var": "expr",    # update frame; inner evaluates the thunk
    "Sat": "match",   # end-matching mark; inner evaluates the matching
    "Alt1": "match",  # alternative frame
    "Cons1": "expr",  # pattern frame; inner evaluates the scrutinee
}

_OPENER_RULES = set(_BRACKET_MODES)
_CLOSER_RULES = {"App2", "Update", "Return1B", "Alt2", "Return2", "Cons2", "Fail"}


def extract_balanced_segments(trace: List[str]):
    """Balanced sub-evaluations of a rule trace, found by stack-height
    bookkeeping: each opener's matching closer delimits one segment."""
    out = []
    stack: List[Tuple[str, int]] = []
    for i, rule in enumerate(trace):
        if rule in _OPENER_RULES:
            stack.append((rule, i))
        elif rule in _CLOSER_RULES:
            opener, start = stack.pop()
            out.append((_BRACKET_MODES[opener], trace[start + 1 : i]))
    return out


def compare_semantics(entry: Expr, supply: Optional[NameSupply] = None):
    """Run both evaluators on a closed normalized expression and check the
    results agree (same verdict; alpha/heap-equivalent values).  Returns (ok, detail).

    Each evaluator gets its own continuation of the supply the expression
    was normalized with, so machine-minted names never collide with
    binders already embedded in the term.
    """
    supply = supply or NameSupply()
    big = run_bigstep(Heap({}), entry, supply.clone())
    small = run_machine(Heap({}), entry, supply.clone())
    verdict_big, verdict_small = big[0], small[0]
    if verdict_big == "fuel" or verdict_small == "fuel":
        # With generous budgets either both diverge or neither does; treat
        # a lone fuel-out as disagreement so it surfaces.
        ok = verdict_big == verdict_small
        return ok, f"fuel verdicts: bigstep={verdict_big} machine={verdict_small}"
    if verdict_big != verdict_small:
        return False, f"verdicts differ: bigstep={verdict_big} machine={verdict_small}"
    if verdict_big == "value":
        _, h1, w1 = big
        _, h2, w2, _trace = small
        assert is_whnf(w1) and is_whnf(w2)
        if not values_equivalent(w1, h1, w2, h2):
            return False, "results are not alpha/heap equivalent"
    return True, ""
