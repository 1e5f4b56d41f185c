"""Abstract syntax for the pattern-matching core language.

Expressions, matchings and patterns, together with the syntactic
measures (arity, weak head normal forms), capture-avoiding renaming,
normalization into the restricted argument form, and the fresh-name
supply used by every later stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple, Union


# ---------------------------------------------------------------------------
# Expressions

class Expr:
    """Base class for expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    """Variable or heap location: x"""
    name: str


@dataclass(frozen=True)
class App(Expr):
    """Function application: e1 e2 (normalized form requires e2 to be a Var)"""
    fun: Expr
    arg: Expr


@dataclass(frozen=True)
class MatchAbs(Expr):
    """Matching abstraction: lambda m.

    ``fn_name`` is a debug label (the source binding the abstraction came
    from); it is ignored by structural comparison helpers and rendering of
    values, and used only for match-failure diagnostics.
    """
    matching: "Matching"
    fn_name: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class Con(Expr):
    """Saturated constructor application: c(e1, ..., en)"""
    tag: str
    args: Tuple[Expr, ...] = ()


@dataclass(frozen=True)
class LitInt(Expr):
    """Integer literal (arbitrary precision)."""
    value: int


@dataclass(frozen=True)
class LitChar(Expr):
    """Character literal."""
    value: str


@dataclass(frozen=True)
class PrimApp(Expr):
    """Built-in operation applied to atomic operands: e1 op e2"""
    op: str
    args: Tuple[Expr, ...]


# ---------------------------------------------------------------------------
# Matchings

class Matching:
    """Base class for matchings."""

    __slots__ = ()


Bindings = Tuple[Tuple[str, Expr], ...]


@dataclass(frozen=True)
class Return(Matching):
    """Successful match returning an expression.

    ``annotation`` carries the source equation this return belongs to;
    the tracer shows it as the justification of the reduction step.
    """
    expr: Expr
    annotation: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class Fail(Matching):
    """Matching failure."""


@dataclass(frozen=True)
class PatMatch(Matching):
    """Match one argument against a pattern: p |> m"""
    pattern: "Pattern"
    rest: Matching


@dataclass(frozen=True)
class ArgSupply(Matching):
    """Supply an argument to a matching: e <| m (normalized: e is a Var)"""
    arg: Expr
    rest: Matching


@dataclass(frozen=True)
class Alt(Matching):
    """Alternative between two matchings, tried left to right: m1 | m2"""
    left: Matching
    right: Matching


@dataclass(frozen=True)
class Where(Matching):
    """Local (possibly recursive) bindings scoping over a matching."""
    body: Matching
    bindings: Bindings


# ---------------------------------------------------------------------------
# Patterns

class Pattern:
    """Base class for patterns."""

    __slots__ = ()


@dataclass(frozen=True)
class VarPat(Pattern):
    """Variable pattern: x"""
    name: str


@dataclass(frozen=True)
class WildPat(Pattern):
    """Wildcard pattern: _ (translation replaces it with a fresh VarPat)"""


@dataclass(frozen=True)
class ConPat(Pattern):
    """Constructor pattern, possibly nested: c(p1, ..., pn)"""
    tag: str
    subpatterns: Tuple[Pattern, ...] = ()


@dataclass(frozen=True)
class LitIntPat(Pattern):
    """Integer literal pattern; forces the argument and compares."""
    value: int


@dataclass(frozen=True)
class BangPat(Pattern):
    """Bang pattern !x: binds x but forces the argument to whnf first."""
    name: str


Atom = Union[Var, LitInt, LitChar]


# ---------------------------------------------------------------------------
# Name supply

FRESH_PREFIX = "$"


class NameSupply:
    """Source of fresh names.

    Fresh names start with ``$`` which is illegal in source identifiers,
    so freshness against user programs is syntactic; a monotone counter
    keeps distinct calls distinct, and ``reserved`` guards against names
    already present in heaps or judgments.
    """

    def __init__(self, reserved: Iterable[str] = ()):
        self.counter = 0
        self.reserved = set(reserved)

    def fresh(self, hint: str = "x") -> str:
        hint = hint.lstrip(FRESH_PREFIX).rstrip("0123456789") or "x"
        while True:
            self.counter += 1
            name = f"{FRESH_PREFIX}{hint}{self.counter}"
            if name not in self.reserved:
                self.reserved.add(name)
                return name

    def reserve(self, names: Iterable[str]) -> None:
        self.reserved.update(names)

    def clone(self) -> "NameSupply":
        """Independent supply continuing from the same state; names minted
        by the clone stay fresh for terms built with the original."""
        out = NameSupply(reserved=set(self.reserved))
        out.counter = self.counter
        return out


# ---------------------------------------------------------------------------
# Arity and weak head normal forms

def arity(m: Matching) -> Optional[int]:
    """Number of arguments a matching still expects, or None if undefined.

    Alternatives must have branches of equal (defined) arity; a where
    wrapper is transparent.
    """
    if isinstance(m, (Return, Fail)):
        return 0
    if isinstance(m, PatMatch):
        a = arity(m.rest)
        return None if a is None else 1 + a
    if isinstance(m, ArgSupply):
        a = arity(m.rest)
        return None if a is None else max(0, a - 1)
    if isinstance(m, Alt):
        a1, a2 = arity(m.left), arity(m.right)
        if a1 is None or a1 != a2:
            return None
        return a1
    if isinstance(m, Where):
        return arity(m.body)
    raise TypeError(f"not a matching: {m!r}")


def is_whnf(e: Expr) -> bool:
    """Weak head normal form: a constructor, a literal, or a matching
    abstraction that still expects at least one argument."""
    if isinstance(e, (Con, LitInt, LitChar)):
        return True
    if isinstance(e, MatchAbs):
        a = arity(e.matching)
        return a is not None and a > 0
    return False


def is_atom(e: Expr) -> bool:
    return isinstance(e, (Var, LitInt, LitChar))


def is_normalized(e: Expr) -> bool:
    """Check the restricted argument form: applications, constructors and
    argument supplies only mention variables (literals allowed for
    primitive operands)."""
    if isinstance(e, Var) or isinstance(e, (LitInt, LitChar)):
        return True
    if isinstance(e, App):
        return isinstance(e.arg, Var) and is_normalized(e.fun)
    if isinstance(e, Con):
        return all(isinstance(a, Var) for a in e.args)
    if isinstance(e, PrimApp):
        return all(is_atom(a) for a in e.args)
    if isinstance(e, MatchAbs):
        return is_normalized_matching(e.matching)
    raise TypeError(f"not an expression: {e!r}")


def is_normalized_matching(m: Matching) -> bool:
    if isinstance(m, Return):
        return is_normalized(m.expr)
    if isinstance(m, Fail):
        return True
    if isinstance(m, PatMatch):
        return is_normalized_matching(m.rest)
    if isinstance(m, ArgSupply):
        return isinstance(m.arg, Var) and is_normalized_matching(m.rest)
    if isinstance(m, Alt):
        return is_normalized_matching(m.left) and is_normalized_matching(m.right)
    if isinstance(m, Where):
        return is_normalized_matching(m.body) and all(
            is_normalized(rhs) for _, rhs in m.bindings
        )
    raise TypeError(f"not a matching: {m!r}")


# ---------------------------------------------------------------------------
# Free variables and renaming

def pattern_vars(p: Pattern) -> Tuple[str, ...]:
    if isinstance(p, (VarPat, BangPat)):
        return (p.name,)
    if isinstance(p, ConPat):
        out: Tuple[str, ...] = ()
        for sub in p.subpatterns:
            out += pattern_vars(sub)
        return out
    return ()


def free_vars(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, App):
        return free_vars(e.fun) | free_vars(e.arg)
    if isinstance(e, MatchAbs):
        return free_vars_matching(e.matching)
    if isinstance(e, (Con, PrimApp)):
        out: set = set()
        for a in e.args:
            out |= free_vars(a)
        return out
    return set()


def free_vars_matching(m: Matching) -> set:
    if isinstance(m, Return):
        return free_vars(m.expr)
    if isinstance(m, Fail):
        return set()
    if isinstance(m, PatMatch):
        return free_vars_matching(m.rest) - set(pattern_vars(m.pattern))
    if isinstance(m, ArgSupply):
        return free_vars(m.arg) | free_vars_matching(m.rest)
    if isinstance(m, Alt):
        return free_vars_matching(m.left) | free_vars_matching(m.right)
    if isinstance(m, Where):
        bound = {x for x, _ in m.bindings}
        out = free_vars_matching(m.body)
        for _, rhs in m.bindings:
            out |= free_vars(rhs)
        return out - bound
    raise TypeError(f"not a matching: {m!r}")


Subst = dict


def rename_expr(e: Expr, subst: Subst) -> Expr:
    """Simultaneous renaming of free variable occurrences.

    Callers supply fresh targets, so no binder ever captures a name from
    the range of ``subst``; binders simply shadow.
    """
    if not subst:
        return e
    if isinstance(e, Var):
        new = subst.get(e.name)
        return e if new is None else Var(new)
    if isinstance(e, App):
        return App(rename_expr(e.fun, subst), rename_expr(e.arg, subst))
    if isinstance(e, MatchAbs):
        return MatchAbs(rename_matching(e.matching, subst), e.fn_name)
    if isinstance(e, Con):
        return Con(e.tag, tuple(rename_expr(a, subst) for a in e.args))
    if isinstance(e, PrimApp):
        return PrimApp(e.op, tuple(rename_expr(a, subst) for a in e.args))
    return e


def rename_matching(m: Matching, subst: Subst) -> Matching:
    if not subst:
        return m
    if isinstance(m, Return):
        return Return(rename_expr(m.expr, subst), m.annotation)
    if isinstance(m, Fail):
        return m
    if isinstance(m, PatMatch):
        bound = pattern_vars(m.pattern)
        inner = {k: v for k, v in subst.items() if k not in bound}
        return PatMatch(m.pattern, rename_matching(m.rest, inner))
    if isinstance(m, ArgSupply):
        return ArgSupply(rename_expr(m.arg, subst), rename_matching(m.rest, subst))
    if isinstance(m, Alt):
        return Alt(rename_matching(m.left, subst), rename_matching(m.right, subst))
    if isinstance(m, Where):
        bound = {x for x, _ in m.bindings}
        inner = {k: v for k, v in subst.items() if k not in bound}
        return Where(
            rename_matching(m.body, inner),
            tuple((x, rename_expr(rhs, inner)) for x, rhs in m.bindings),
        )
    raise TypeError(f"not a matching: {m!r}")


# ---------------------------------------------------------------------------
# Normalization into the restricted argument form

def normalize(e: Expr, ns: NameSupply) -> Expr:
    """Restrict application/constructor arguments to variables by hoisting
    compound arguments into indirection bindings.

    At the top level the bindings are attached by wrapping the expression
    into a saturated matching abstraction (the let encoding); inside
    matchings they attach to the nearest enclosing matching position.
    """
    e2, binds = _hoist(e, ns)
    if not binds:
        return e2
    return MatchAbs(Where(Return(e2), tuple(binds)))


def normalize_matching(m: Matching, ns: NameSupply) -> Matching:
    if isinstance(m, Return):
        e2, binds = _hoist(m.expr, ns)
        out: Matching = Return(e2, m.annotation)
        if binds:
            out = Where(out, tuple(binds))
        return out
    if isinstance(m, Fail):
        return m
    if isinstance(m, PatMatch):
        return PatMatch(m.pattern, normalize_matching(m.rest, ns))
    if isinstance(m, ArgSupply):
        rest = normalize_matching(m.rest, ns)
        if isinstance(m.arg, Var):
            return ArgSupply(m.arg, rest)
        arg2, binds = _hoist(m.arg, ns)
        if not isinstance(arg2, Var):
            y = ns.fresh("a")
            binds = list(binds) + [(y, arg2)]
            arg2 = Var(y)
        return Where(ArgSupply(arg2, rest), tuple(binds))
    if isinstance(m, Alt):
        return Alt(normalize_matching(m.left, ns), normalize_matching(m.right, ns))
    if isinstance(m, Where):
        return Where(
            normalize_matching(m.body, ns),
            tuple((x, _normalize_rhs(rhs, ns)) for x, rhs in m.bindings),
        )
    raise TypeError(f"not a matching: {m!r}")


def _normalize_rhs(e: Expr, ns: NameSupply) -> Expr:
    # Binding right-hand sides live in the heap, so they obey the same
    # restricted form as top-level expressions.
    return normalize(e, ns)


def _hoist(e: Expr, ns: NameSupply):
    """Return an equivalent expression whose arguments are variables plus
    the indirection bindings floated out along the way."""
    if isinstance(e, Var) or isinstance(e, (LitInt, LitChar)):
        return e, []
    if isinstance(e, App):
        fun2, binds = _hoist(e.fun, ns)
        if isinstance(e.arg, Var):
            return App(fun2, e.arg), binds
        arg2, more = _hoist(e.arg, ns)
        binds.extend(more)
        if isinstance(arg2, Var):
            return App(fun2, arg2), binds
        y = ns.fresh("a")
        binds.append((y, arg2))
        return App(fun2, Var(y)), binds
    if isinstance(e, Con):
        binds = []
        args = []
        for a in e.args:
            if isinstance(a, Var):
                args.append(a)
                continue
            a2, more = _hoist(a, ns)
            binds.extend(more)
            if isinstance(a2, Var):
                args.append(a2)
            else:
                y = ns.fresh("a")
                binds.append((y, a2))
                args.append(Var(y))
        return Con(e.tag, tuple(args)), binds
    if isinstance(e, PrimApp):
        binds = []
        args = []
        for a in e.args:
            if is_atom(a):
                args.append(a)
                continue
            a2, more = _hoist(a, ns)
            binds.extend(more)
            if is_atom(a2):
                args.append(a2)
            else:
                y = ns.fresh("a")
                binds.append((y, a2))
                args.append(Var(y))
        return PrimApp(e.op, tuple(args)), binds
    if isinstance(e, MatchAbs):
        # Bindings inside the abstraction may mention its binders and so
        # cannot float past it.
        return MatchAbs(normalize_matching(e.matching, ns), e.fn_name), []
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# let / case encodings

def translate_let(bindings: Bindings, body: Expr, ns: NameSupply) -> Expr:
    """Encode let bindings as a saturated matching abstraction."""
    return normalize(MatchAbs(Where(Return(body), tuple(bindings))), ns)


def translate_case(scrutinee: Expr, alts, ns: NameSupply) -> Expr:
    """Encode a case expression as argument supply into alternatives.

    ``alts`` is a sequence of (pattern, expression) pairs tried in order.
    """
    if not alts:
        raise ValueError("case expression with no alternatives")
    branches = [PatMatch(p, Return(body)) for p, body in alts]
    m: Matching = branches[-1]
    for b in reversed(branches[:-1]):
        m = Alt(b, m)
    return normalize(MatchAbs(ArgSupply(scrutinee, m)), ns)


def curried_constructor(tag: str, con_arity: int) -> Expr:
    """Partial application of constructors via a matching abstraction."""
    names = [f"{FRESH_PREFIX}c{i}" for i in range(1, con_arity + 1)]
    m: Matching = Return(Con(tag, tuple(Var(n) for n in names)))
    for n in reversed(names):
        m = PatMatch(VarPat(n), m)
    return MatchAbs(m, fn_name=tag)


# ---------------------------------------------------------------------------
# Alpha equivalence

def alpha_eq_expr(e1: Expr, e2: Expr, env1=None, env2=None) -> bool:
    """Structural equality up to renaming of bound variables.

    Free variables must match by the correspondence accumulated in
    ``env1``/``env2`` (or literally when absent from both).
    """
    env1 = env1 or {}
    env2 = env2 or {}
    if type(e1) is not type(e2):
        return False
    if isinstance(e1, Var):
        n1 = env1.get(e1.name, e1.name)
        n2 = env2.get(e2.name, e2.name)
        return n1 == n2
    if isinstance(e1, App):
        return alpha_eq_expr(e1.fun, e2.fun, env1, env2) and alpha_eq_expr(
            e1.arg, e2.arg, env1, env2
        )
    if isinstance(e1, MatchAbs):
        return alpha_eq_matching(e1.matching, e2.matching, env1, env2)
    if isinstance(e1, Con):
        return (
            e1.tag == e2.tag
            and len(e1.args) == len(e2.args)
            and all(alpha_eq_expr(a, b, env1, env2) for a, b in zip(e1.args, e2.args))
        )
    if isinstance(e1, PrimApp):
        return (
            e1.op == e2.op
            and len(e1.args) == len(e2.args)
            and all(alpha_eq_expr(a, b, env1, env2) for a, b in zip(e1.args, e2.args))
        )
    return e1 == e2


def _alpha_bind(p1: Pattern, p2: Pattern, env1, env2, counter) -> bool:
    if type(p1) is not type(p2):
        return False
    if isinstance(p1, (VarPat, BangPat)):
        marker = f"#b{next(counter)}"
        env1[p1.name] = marker
        env2[p2.name] = marker
        return True
    if isinstance(p1, ConPat):
        if p1.tag != p2.tag or len(p1.subpatterns) != len(p2.subpatterns):
            return False
        return all(
            _alpha_bind(s1, s2, env1, env2, counter)
            for s1, s2 in zip(p1.subpatterns, p2.subpatterns)
        )
    return p1 == p2


def alpha_eq_matching(m1: Matching, m2: Matching, env1=None, env2=None, _counter=None) -> bool:
    env1 = dict(env1 or {})
    env2 = dict(env2 or {})
    if _counter is None:
        _counter = iter(range(1, 1 << 30))
    if type(m1) is not type(m2):
        return False
    if isinstance(m1, Return):
        return alpha_eq_expr(m1.expr, m2.expr, env1, env2)
    if isinstance(m1, Fail):
        return True
    if isinstance(m1, PatMatch):
        env1, env2 = dict(env1), dict(env2)
        if not _alpha_bind(m1.pattern, m2.pattern, env1, env2, _counter):
            return False
        return alpha_eq_matching(m1.rest, m2.rest, env1, env2, _counter)
    if isinstance(m1, ArgSupply):
        return alpha_eq_expr(m1.arg, m2.arg, env1, env2) and alpha_eq_matching(
            m1.rest, m2.rest, env1, env2, _counter
        )
    if isinstance(m1, Alt):
        return alpha_eq_matching(m1.left, m2.left, env1, env2, _counter) and alpha_eq_matching(
            m1.right, m2.right, env1, env2, _counter
        )
    if isinstance(m1, Where):
        if len(m1.bindings) != len(m2.bindings):
            return False
        env1, env2 = dict(env1), dict(env2)
        for (x1, _), (x2, _) in zip(m1.bindings, m2.bindings):
            marker = f"#b{next(_counter)}"
            env1[x1] = marker
            env2[x2] = marker
        for (_, r1), (_, r2) in zip(m1.bindings, m2.bindings):
            if not alpha_eq_expr(r1, r2, env1, env2):
                return False
        return alpha_eq_matching(m1.body, m2.body, env1, env2, _counter)
    raise TypeError(f"not a matching: {m1!r}")


# ---------------------------------------------------------------------------
# Convenience constructors used by tests and the translator

def apply_args(e: Expr, args: Iterable[str]) -> Expr:
    """Nested application of leftover stack arguments: A <| e."""
    for y in args:
        e = App(e, Var(y))
    return e


def supply_chain(pairs, rest: Matching) -> Matching:
    """Build y1 <| p1 |> ... yn <| pn |> m from (y, p) pairs."""
    m = rest
    for y, p in reversed(list(pairs)):
        m = ArgSupply(Var(y), PatMatch(p, m))
    return m


def alts(*branches: Matching) -> Matching:
    """Right-nested alternative chain."""
    if not branches:
        raise ValueError("empty alternative chain")
    m = branches[-1]
    for b in reversed(branches[:-1]):
        m = Alt(b, m)
    return m
