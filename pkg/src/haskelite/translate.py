"""Lowering the surface program into matching abstractions.

Each equation becomes one alternative per guarded right-hand side, in
source order, so overlapping equations are tried top to bottom.  A
clause with local bindings keeps its guards nested under the bindings;
without local bindings the pattern chain is repeated per guard.
Return expressions carry the equation text for the tracer.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .prims import PRIM_OPS
from .surface import (
    Clause,
    EquationGroup,
    GuardedRhs,
    PAs,
    PBang,
    PCon,
    PInt,
    PVar,
    PWild,
    SApp,
    SCase,
    SCon,
    SExpr,
    SIf,
    SLam,
    SLet,
    SList,
    SLitChar,
    SLitInt,
    SPat,
    SString,
    STuple,
    SVar,
)
from .syntax import (
    Alt,
    App,
    ArgSupply,
    BangPat,
    Con,
    ConPat,
    Expr,
    LitChar,
    LitInt,
    LitIntPat,
    MatchAbs,
    Matching,
    NameSupply,
    PatMatch,
    Pattern,
    PrimApp,
    Return,
    Var,
    VarPat,
    Where,
    alts,
    curried_constructor,
)
from .typecheck import ConTable


class TranslateError(Exception):
    pass


class Translator:
    def __init__(self, con_table: ConTable, supply: NameSupply, user_prims: frozenset = frozenset()):
        self.con_table = con_table
        self.supply = supply
        # names of primitive operators shadowed by program definitions
        self.user_prims = user_prims

    # -- patterns ----------------------------------------------------------

    def pattern(self, p: SPat) -> Tuple[Pattern, List[Tuple[str, Pattern]]]:
        """Translate a surface pattern into a core pattern plus re-matches
        to apply right after it binds (as-patterns and nested bangs)."""
        if isinstance(p, PVar):
            return VarPat(p.name), []
        if isinstance(p, PWild):
            return VarPat(self.supply.fresh("w")), []
        if isinstance(p, PInt):
            return LitIntPat(p.value), []
        if isinstance(p, PBang):
            return BangPat(p.name), []
        if isinstance(p, PAs):
            sub, rematches = self.pattern(p.pat)
            return VarPat(p.name), [(p.name, sub)] + rematches
        if isinstance(p, PCon):
            subs: List[Pattern] = []
            rematches: List[Tuple[str, Pattern]] = []
            for s in p.subpats:
                if isinstance(s, PBang):
                    v = self.supply.fresh("b")
                    subs.append(VarPat(v))
                    rematches.append((v, BangPat(s.name)))
                    continue
                sub, more = self.pattern(s)
                subs.append(sub)
                rematches.extend(more)
            return ConPat(p.tag, tuple(subs)), rematches
        raise TranslateError(f"unknown pattern {p!r}")

    def _with_rematches(
        self, rematches: List[Tuple[str, Pattern]], rest: Matching
    ) -> Matching:
        for v, p in reversed(rematches):
            rest = ArgSupply(Var(v), PatMatch(p, rest))
        return rest

    def pattern_chain(self, pats, rest: Matching) -> Matching:
        """p1 |> (rematches...) p2 |> ... rest"""
        pieces = [self.pattern(p) for p in pats]
        m = rest
        for core, rematches in reversed(pieces):
            m = PatMatch(core, self._with_rematches(rematches, m))
        return m

    # -- expressions -------------------------------------------------------

    def expr(self, e: SExpr) -> Expr:
        if isinstance(e, SVar):
            return Var(e.name)
        if isinstance(e, SCon):
            return self._con_reference(e.name)
        if isinstance(e, SLitInt):
            return LitInt(e.value)
        if isinstance(e, SLitChar):
            return LitChar(e.value)
        if isinstance(e, SString):
            out: Expr = Con("[]")
            for ch in reversed(e.value):
                out = Con(":", (LitChar(ch), out))
            return out
        if isinstance(e, SList):
            out = Con("[]")
            for item in reversed(e.items):
                out = Con(":", (self.expr(item), out))
            return out
        if isinstance(e, STuple):
            tag = "(" + "," * (len(e.items) - 1) + ")"
            return Con(tag, tuple(self.expr(x) for x in e.items))
        if isinstance(e, SApp):
            return self._application(e)
        if isinstance(e, SLam):
            body: Matching = Return(self.expr(e.body))
            return MatchAbs(self.pattern_chain(e.params, body))
        if isinstance(e, SLet):
            binds = tuple((g.name, self.local_bind(g)) for g in e.binds)
            return MatchAbs(Where(Return(self.expr(e.body)), binds))
        if isinstance(e, SIf):
            m = Alt(
                PatMatch(ConPat("True"), Return(self.expr(e.then))),
                PatMatch(ConPat("False"), Return(self.expr(e.els))),
            )
            return MatchAbs(ArgSupply(self.expr(e.cond), m))
        if isinstance(e, SCase):
            branches = []
            for pat, body in e.alts:
                core, rematches = self.pattern(pat)
                branches.append(
                    PatMatch(core, self._with_rematches(rematches, Return(self.expr(body))))
                )
            return MatchAbs(ArgSupply(self.expr(e.scrutinee), alts(*branches)))
        raise TranslateError(f"unknown expression {e!r}")

    def _con_reference(self, tag: str) -> Expr:
        n = self.con_table.con_arity(tag)
        if n == 0:
            return Con(tag)
        return curried_constructor(tag, n)

    def _application(self, e: SApp) -> Expr:
        spine: List[SExpr] = []
        f: SExpr = e
        while isinstance(f, SApp):
            spine.append(f.arg)
            f = f.fun
        spine.reverse()
        args = [self.expr(a) for a in spine]

        if isinstance(f, SCon):
            n = self.con_table.con_arity(f.name)
            if len(args) >= n:
                out: Expr = Con(f.name, tuple(args[:n]))
                for a in args[n:]:
                    out = App(out, a)
                return out
            out = curried_constructor(f.name, n)
            for a in args:
                out = App(out, a)
            return out

        if (
            isinstance(f, SVar)
            and f.name in PRIM_OPS
            and f.name not in self.user_prims
            and len(args) == PRIM_OPS[f.name]
        ):
            return PrimApp(f.name, tuple(args))

        out = self.expr(f)
        for a in args:
            out = App(out, a)
        return out

    # -- equations ---------------------------------------------------------

    def _grhs_matching(self, rhs: GuardedRhs) -> Matching:
        body = Return(self.expr(rhs.body), annotation=rhs.annotation)
        if rhs.guard is None or _is_otherwise(rhs.guard):
            return body
        return ArgSupply(self.expr(rhs.guard), PatMatch(ConPat("True"), body))

    def local_bind(self, g: EquationGroup) -> Expr:
        """Local bindings: a simple value binding stays a plain expression
        (no wrapper, no equation step); local functions and guarded
        bindings get the full translation."""
        c = g.clauses[0]
        if (
            len(g.clauses) == 1
            and not c.patterns
            and len(c.rhss) == 1
            and c.rhss[0].guard is None
            and not c.where
        ):
            return self.expr(c.rhss[0].body)
        return self.group(g)

    def clause_alternatives(self, clause: Clause) -> List[Matching]:
        """The top-level alternatives contributed by one clause."""
        if clause.where:
            binds = tuple((g.name, self.local_bind(g)) for g in clause.where)
            inner = alts(*[self._grhs_matching(r) for r in clause.rhss])
            return [self.pattern_chain(clause.patterns, Where(inner, binds))]
        return [
            self.pattern_chain(clause.patterns, self._grhs_matching(r))
            for r in clause.rhss
        ]

    def group(self, group: EquationGroup) -> Expr:
        branches: List[Matching] = []
        for clause in group.clauses:
            branches.extend(self.clause_alternatives(clause))
        return MatchAbs(alts(*branches), fn_name=group.name)


def _is_otherwise(e: SExpr) -> bool:
    return isinstance(e, SVar) and e.name == "otherwise"


def translate_group(
    group: EquationGroup, con_table: ConTable, supply: Optional[NameSupply] = None
) -> Expr:
    """Translate one equation group into its matching abstraction."""
    return Translator(con_table, supply or NameSupply()).group(group)


def prim_wrappers() -> Dict[str, Expr]:
    """Curried bindings for the primitive operators, so they can be passed
    as values like any function."""
    out: Dict[str, Expr] = {}
    for op, n in PRIM_OPS.items():
        names = [f"$p{i}" for i in range(1, n + 1)]
        m: Matching = Return(PrimApp(op, tuple(Var(x) for x in names)))
        for x in reversed(names):
            m = PatMatch(VarPat(x), m)
        out[op] = MatchAbs(m, fn_name=op)
    return out
