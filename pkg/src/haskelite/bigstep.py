"""Reference big-step evaluator.

A direct transcription of the natural-semantics rules; it exists to
cross-check the abstract machine, not to produce traces.  Mutually
recursive judgments for expressions and matchings share a heap, a set of
locations under evaluation (for blackhole detection) and a name supply.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import FrozenSet, Tuple, Union

from .heap import (
    BlackHole,
    FuelExhausted,
    Heap,
    IllFormed,
    MatchFailure,
    UnboundVariable,
)
from .prims import PRIM_OPS, apply_prim
from .syntax import (
    Alt,
    App,
    ArgSupply,
    BangPat,
    Con,
    ConPat,
    Expr,
    Fail,
    LitInt,
    LitIntPat,
    MatchAbs,
    Matching,
    NameSupply,
    PatMatch,
    PrimApp,
    Return,
    Var,
    VarPat,
    Where,
    WildPat,
    apply_args,
    arity,
    is_whnf,
    rename_expr,
    rename_matching,
    supply_chain,
)


@dataclass(frozen=True)
class MReturn:
    """Successful matching result carrying the returned expression."""
    expr: Expr


@dataclass(frozen=True)
class MFail:
    """Matching result: failure."""


MatchResult = Union[MReturn, MFail]


@dataclass(frozen=True)
class EvalState:
    heap: Heap
    lset: FrozenSet[str] = frozenset()
    supply: NameSupply = field(default_factory=NameSupply, compare=False)


class _Fuel:
    __slots__ = ("left",)

    def __init__(self, amount: int):
        self.left = amount

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted()


def eval_expr(state: EvalState, e: Expr, fuel: int = 100_000) -> Tuple[EvalState, Expr]:
    """Evaluate a normalized expression to weak head normal form."""
    gas = _Fuel(fuel)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 100_000))
    try:
        return _eval(state, e, gas)
    finally:
        sys.setrecursionlimit(old_limit)


def eval_match(
    state: EvalState, args: Tuple[str, ...], m: Matching, fuel: int = 100_000
) -> Tuple[EvalState, MatchResult]:
    gas = _Fuel(fuel)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 100_000))
    try:
        return _match(state, args, m, gas)
    finally:
        sys.setrecursionlimit(old_limit)


def _eval(state: EvalState, e: Expr, gas: _Fuel) -> Tuple[EvalState, Expr]:
    gas.tick()

    # Whnf
    if is_whnf(e):
        return state, e

    # Var: blackhole while under evaluation, memoize the result after
    if isinstance(e, Var):
        loc = e.name
        if loc in state.lset:
            raise BlackHole(loc)
        content = state.heap.get(loc)
        if content is None:
            raise UnboundVariable(loc)
        inner = EvalState(state.heap.remove(loc), state.lset | {loc}, state.supply)
        after, w = _eval(inner, content, gas)
        return EvalState(after.heap.set(loc, w), state.lset, state.supply), w

    # App: evaluate the function, then the argument application
    if isinstance(e, App):
        if not isinstance(e.arg, Var):
            raise IllFormed("application argument is not a variable")
        state2, fw = _eval(state, e.fun, gas)
        if not isinstance(fw, MatchAbs):
            raise IllFormed("argument applied to a non-function")
        return _eval(
            state2, MatchAbs(ArgSupply(e.arg, fw.matching), fw.fn_name), gas
        )

    # Sat: saturated matchings evaluate their matching, then the result
    if isinstance(e, MatchAbs):
        a = arity(e.matching)
        if a is None:
            raise IllFormed("alternative branches of unequal arity")
        assert a == 0
        state2, r = _match(state, (), e.matching, gas)
        if isinstance(r, MFail):
            raise MatchFailure(e.fn_name)
        return _eval(state2, r.expr, gas)

    if isinstance(e, PrimApp):
        if e.op not in PRIM_OPS or len(e.args) != PRIM_OPS[e.op]:
            raise IllFormed(f"bad primitive application: {e.op}")
        vals = []
        for a in e.args:
            state, w = _eval(state, a, gas)
            vals.append(w)
        result, heap2 = apply_prim(e.op, tuple(vals), state.heap, state.supply)
        return _eval(replace(state, heap=heap2), result, gas)

    raise IllFormed(f"no rule for expression {type(e).__name__}")


def _match(
    state: EvalState, args: Tuple[str, ...], m: Matching, gas: _Fuel
) -> Tuple[EvalState, MatchResult]:
    gas.tick()

    # Return: wrap leftover arguments around the returned expression
    if isinstance(m, Return):
        return state, MReturn(apply_args(m.expr, args))

    if isinstance(m, Fail):
        return state, MFail()

    # Arg: push the supplied location onto the argument stack
    if isinstance(m, ArgSupply):
        if not isinstance(m.arg, Var):
            raise IllFormed("argument supply with non-variable argument")
        return _match(state, (m.arg.name,) + args, m.rest, gas)

    if isinstance(m, PatMatch):
        if not args:
            raise IllFormed("pattern match with empty argument stack")
        y, rest_args = args[0], args[1:]
        p = m.pattern

        # Bind: rename the pattern variable to the stack location
        if isinstance(p, VarPat):
            return _match(state, rest_args, rename_matching(m.rest, {p.name: y}), gas)
        if isinstance(p, WildPat):
            return _match(state, rest_args, m.rest, gas)

        # Cons1 / Cons2: force the scrutinee, then decompose or fail
        if isinstance(p, ConPat):
            state2, w = _eval(state, Var(y), gas)
            if not isinstance(w, Con):
                raise IllFormed("scrutinee shape does not fit pattern")
            if w.tag != p.tag or len(w.args) != len(p.subpatterns):
                return state2, MFail()
            locs = [a.name for a in w.args if isinstance(a, Var)]
            if len(locs) != len(w.args):
                raise IllFormed("constructor with non-variable fields")
            return _match(
                state2, rest_args, supply_chain(zip(locs, p.subpatterns), m.rest), gas
            )

        if isinstance(p, LitIntPat):
            state2, w = _eval(state, Var(y), gas)
            if not isinstance(w, LitInt):
                raise IllFormed("scrutinee shape does not fit pattern")
            if w.value != p.value:
                return state2, MFail()
            return _match(state2, rest_args, m.rest, gas)

        # Bang: force the argument to whnf (memoized), then bind
        if isinstance(p, BangPat):
            state2, _w = _eval(state, Var(y), gas)
            return _match(
                state2, rest_args, rename_matching(m.rest, {p.name: y}), gas
            )

        raise IllFormed(f"unknown pattern {type(p).__name__}")

    # Alt1 / Alt2: heap effects of a failed branch are kept
    if isinstance(m, Alt):
        state2, r = _match(state, args, m.left, gas)
        if isinstance(r, MReturn):
            return state2, r
        return _match(state2, args, m.right, gas)

    # Where: allocate fresh locations, renaming binders simultaneously
    if isinstance(m, Where):
        supply = state.supply
        subst = {x: supply.fresh(x) for x, _ in m.bindings}
        heap2 = state.heap.set_many(
            (subst[x], rename_expr(rhs, subst)) for x, rhs in m.bindings
        )
        return _match(
            replace(state, heap=heap2), args, rename_matching(m.body, subst), gas
        )

    raise IllFormed(f"no rule for matching {type(m).__name__}")
