"""Equivalence of evaluation results across heaps.

Two results agree when their value structure matches up to a bijection
between heap locations (and renaming of bound variables), comparing the
reachable parts of both heaps coinductively so cyclic structures
terminate.
"""

from __future__ import annotations

from itertools import count
from typing import Dict, Set, Tuple

from .heap import Heap
from .syntax import (
    Alt,
    App,
    ArgSupply,
    Con,
    Expr,
    Fail,
    LitChar,
    LitInt,
    MatchAbs,
    Matching,
    PatMatch,
    PrimApp,
    Return,
    Var,
    Where,
    pattern_vars,
)


class _Equiv:
    def __init__(self, h1: Heap, h2: Heap):
        self.h1 = h1
        self.h2 = h2
        self.pairs: Set[Tuple[str, str]] = set()
        self.fwd: Dict[str, str] = {}
        self.bwd: Dict[str, str] = {}
        self.markers = count(1)

    def locs(self, l1: str, l2: str) -> bool:
        if (l1, l2) in self.pairs:
            return True
        if self.fwd.get(l1, l2) != l2 or self.bwd.get(l2, l1) != l1:
            return False  # not a bijection
        self.pairs.add((l1, l2))
        self.fwd[l1] = l2
        self.bwd[l2] = l1
        c1, c2 = self.h1.get(l1), self.h2.get(l2)
        if c1 is None or c2 is None:
            return c1 is None and c2 is None
        return self.exprs(c1, c2, {}, {})

    def exprs(self, e1: Expr, e2: Expr, b1: Dict[str, str], b2: Dict[str, str]) -> bool:
        if type(e1) is not type(e2):
            return False
        if isinstance(e1, Var):
            m1, m2 = b1.get(e1.name), b2.get(e2.name)
            if m1 is not None or m2 is not None:
                return m1 == m2
            return self.locs(e1.name, e2.name)
        if isinstance(e1, App):
            return self.exprs(e1.fun, e2.fun, b1, b2) and self.exprs(
                e1.arg, e2.arg, b1, b2
            )
        if isinstance(e1, MatchAbs):
            return self.matchings(e1.matching, e2.matching, b1, b2)
        if isinstance(e1, (Con, PrimApp)):
            tag1 = e1.tag if isinstance(e1, Con) else e1.op
            tag2 = e2.tag if isinstance(e2, Con) else e2.op
            return (
                tag1 == tag2
                and len(e1.args) == len(e2.args)
                and all(
                    self.exprs(a, b, b1, b2) for a, b in zip(e1.args, e2.args)
                )
            )
        if isinstance(e1, (LitInt, LitChar)):
            return e1 == e2
        return False

    def matchings(
        self, m1: Matching, m2: Matching, b1: Dict[str, str], b2: Dict[str, str]
    ) -> bool:
        if type(m1) is not type(m2):
            return False
        if isinstance(m1, Return):
            return self.exprs(m1.expr, m2.expr, b1, b2)
        if isinstance(m1, Fail):
            return True
        if isinstance(m1, PatMatch):
            if type(m1.pattern) is not type(m2.pattern):
                return False
            v1, v2 = pattern_vars(m1.pattern), pattern_vars(m2.pattern)
            if len(v1) != len(v2):
                return False
            shape1 = _pattern_shape(m1.pattern)
            shape2 = _pattern_shape(m2.pattern)
            if shape1 != shape2:
                return False
            b1, b2 = dict(b1), dict(b2)
            for x1, x2 in zip(v1, v2):
                marker = f"#m{next(self.markers)}"
                b1[x1] = marker
                b2[x2] = marker
            return self.matchings(m1.rest, m2.rest, b1, b2)
        if isinstance(m1, ArgSupply):
            return self.exprs(m1.arg, m2.arg, b1, b2) and self.matchings(
                m1.rest, m2.rest, b1, b2
            )
        if isinstance(m1, Alt):
            return self.matchings(m1.left, m2.left, b1, b2) and self.matchings(
                m1.right, m2.right, b1, b2
            )
        if isinstance(m1, Where):
            if len(m1.bindings) != len(m2.bindings):
                return False
            b1, b2 = dict(b1), dict(b2)
            for (x1, _), (x2, _) in zip(m1.bindings, m2.bindings):
                marker = f"#m{next(self.markers)}"
                b1[x1] = marker
                b2[x2] = marker
            for (_, r1), (_, r2) in zip(m1.bindings, m2.bindings):
                if not self.exprs(r1, r2, b1, b2):
                    return False
            return self.matchings(m1.body, m2.body, b1, b2)
        return False


def _pattern_shape(p) -> str:
    """Structural fingerprint of a pattern, ignoring variable names."""
    from .syntax import BangPat, ConPat, LitIntPat, VarPat, WildPat

    if isinstance(p, VarPat):
        return "v"
    if isinstance(p, WildPat):
        return "_"
    if isinstance(p, BangPat):
        return "!"
    if isinstance(p, LitIntPat):
        return f"i{p.value}"
    if isinstance(p, ConPat):
        subs = ",".join(_pattern_shape(s) for s in p.subpatterns)
        return f"c{p.tag}({subs})"
    return "?"


def values_equivalent(w1: Expr, h1: Heap, w2: Expr, h2: Heap) -> bool:
    """Alpha equivalence of result values together with extensional
    equality of the heap portions reachable from them."""
    return _Equiv(h1, h2).exprs(w1, w2, {}, {})
