"""Semantics of the built-in integer/character operations.

Both evaluators funnel primitive reductions through :func:`apply_prim`
so they cannot drift apart.  Equality is structural: on constructors it
expands into equality of the components, expressed again in the core
language so the machine can keep stepping through it.
"""

from __future__ import annotations

from typing import Tuple

from .heap import Heap, PrimError
from .syntax import (
    Alt,
    ArgSupply,
    Con,
    ConPat,
    Expr,
    LitChar,
    LitInt,
    MatchAbs,
    Matching,
    NameSupply,
    PatMatch,
    PrimApp,
    Return,
    Var,
    VarPat,
)

TRUE = Con("True")
FALSE = Con("False")

ARITH_OPS = {"+", "-", "*", "div", "mod"}
COMPARE_OPS = {"<", "<=", ">", ">="}
EQUALITY_OPS = {"==", "/="}

PRIM_OPS = {op: 2 for op in ARITH_OPS | COMPARE_OPS | EQUALITY_OPS}

_COMPARE = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _bool(b: bool) -> Con:
    return TRUE if b else FALSE


def _int(e: Expr, op: str) -> int:
    if isinstance(e, LitInt):
        return e.value
    raise PrimError(f"{op} expects integer operands")


def _if_true(scrutinee: str, then: Expr, otherwise: Expr) -> Expr:
    """Strict boolean dispatch on a location, as a saturated abstraction."""
    m: Matching = Alt(
        PatMatch(ConPat("True"), Return(then)),
        PatMatch(VarPat("$b"), Return(otherwise)),
    )
    return MatchAbs(ArgSupply(Var(scrutinee), m))


def apply_prim(op: str, vals: Tuple[Expr, ...], heap: Heap, ns: NameSupply):
    """Reduce a primitive whose operands are in whnf.

    Returns ``(result, heap)``; the result may be a further reducible
    expression (structural equality on constructors).
    """
    if op in ARITH_OPS:
        a, b = (_int(v, op) for v in vals)
        if op == "+":
            return LitInt(a + b), heap
        if op == "-":
            return LitInt(a - b), heap
        if op == "*":
            return LitInt(a * b), heap
        if b == 0:
            raise PrimError("division by zero")
        return LitInt(a // b if op == "div" else a % b), heap

    if op in COMPARE_OPS:
        a, b = (_int(v, op) for v in vals)
        return _bool(_COMPARE[op](a, b)), heap

    if op in EQUALITY_OPS:
        result, heap = _structural_eq(vals[0], vals[1], heap, ns)
        if op == "/=":
            if result == TRUE:
                return FALSE, heap
            if result == FALSE:
                return TRUE, heap
            loc = ns.fresh("e")
            heap = heap.set(loc, result)
            return _if_true(loc, FALSE, TRUE), heap
        return result, heap

    raise PrimError(f"unknown primitive: {op}")


def _structural_eq(v1: Expr, v2: Expr, heap: Heap, ns: NameSupply):
    if isinstance(v1, LitInt) and isinstance(v2, LitInt):
        return _bool(v1.value == v2.value), heap
    if isinstance(v1, LitChar) and isinstance(v2, LitChar):
        return _bool(v1.value == v2.value), heap
    if isinstance(v1, Con) and isinstance(v2, Con):
        if v1.tag != v2.tag or len(v1.args) != len(v2.args):
            return FALSE, heap
        if not v1.args:
            return TRUE, heap
        # Components are locations in normalized form; compare pairwise
        # and chain the results with a strict boolean conjunction.
        comparisons = [PrimApp("==", (a, b)) for a, b in zip(v1.args, v2.args)]
        result: Expr = comparisons[-1]
        for cmp in reversed(comparisons[:-1]):
            rest_loc = ns.fresh("e")
            heap = heap.set(rest_loc, result)
            this_loc = ns.fresh("e")
            heap = heap.set(this_loc, cmp)
            result = _if_true(this_loc, Var(rest_loc), FALSE)
        return result, heap
    raise PrimError("cannot compare these values for equality")


def is_literal_equation(op: str, vals: Tuple[Expr, ...], result: Expr) -> bool:
    """True when the reduction reads as a textbook primitive equation,
    i.e. every operand and the result print as an atomic value."""

    def atomic(e: Expr) -> bool:
        return isinstance(e, (LitInt, LitChar)) or (isinstance(e, Con) and not e.args)

    return all(atomic(v) for v in vals) and atomic(result)
