"""Hindley-Milner type inference over the surface program.

Algorithm-W style with unification by substitution; top-level bindings
are split into strongly connected groups, inferred monomorphically
within a group and generalized afterwards.  There are no type classes:
arithmetic is monomorphic at Int and equality is polymorphic with
structural runtime behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .surface import (
    Clause,
    DataDecl,
    EquationGroup,
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
    SourceProgram,
)


# -- types -------------------------------------------------------------------

class Type:
    __slots__ = ()


@dataclass(frozen=True)
class TVar(Type):
    name: str


@dataclass(frozen=True)
class TCon(Type):
    name: str
    args: Tuple[Type, ...] = ()


@dataclass(frozen=True)
class TFun(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class Scheme:
    vars: Tuple[str, ...]
    ty: Type


T_INT = TCon("Int")
T_CHAR = TCon("Char")
T_BOOL = TCon("Bool")
T_ORDERING = TCon("Ordering")


def t_list(t: Type) -> Type:
    return TCon("[]", (t,))


def t_fun(*ts: Type) -> Type:
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = TFun(t, out)
    return out


def scheme(ty: Type) -> Scheme:
    return Scheme(tuple(sorted(free_type_vars(ty))), ty)


def free_type_vars(t: Type) -> Set[str]:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, TCon):
        out: Set[str] = set()
        for a in t.args:
            out |= free_type_vars(a)
        return out
    if isinstance(t, TFun):
        return free_type_vars(t.dom) | free_type_vars(t.cod)
    raise TypeError(f"not a type: {t!r}")


# -- errors ------------------------------------------------------------------

class TypeError_(Exception):
    """Base type-checking error (named to avoid the builtin)."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.message = message
        self.line = line


class UnificationFailure(TypeError_):
    def __init__(self, expected: Type, actual: Type, context: str = "", line=None):
        where = f" {context}" if context else ""
        super().__init__(
            f"cannot match {render_type(expected)} with {render_type(actual)}{where}",
            line,
        )
        self.expected = expected
        self.actual = actual


class OccursCheck(TypeError_):
    def __init__(self, var: str, ty: Type, line=None):
        super().__init__(f"occurs check: infinite type {var} ~ {render_type(ty)}", line)


class UnboundIdentifier(TypeError_):
    def __init__(self, name: str, line=None):
        super().__init__(f"unbound identifier: {name}", line)
        self.name = name


class AmbiguousNumeric(TypeError_):
    """Reserved for numeric defaulting conflicts; literals default to Int."""


# -- builtin constructor and operator signatures -------------------------------

BUILTIN_TYCONS: Dict[str, int] = {
    "Int": 0,
    "Char": 0,
    "Bool": 0,
    "Ordering": 0,
    "Maybe": 1,
    "[]": 1,
    "(,)": 2,
    "(,,)": 3,
    "(,,,)": 4,
}

_A, _B = TVar("a"), TVar("b")

BUILTIN_CONSTRUCTORS: Dict[str, Scheme] = {
    "True": Scheme((), T_BOOL),
    "False": Scheme((), T_BOOL),
    "LT": Scheme((), T_ORDERING),
    "EQ": Scheme((), T_ORDERING),
    "GT": Scheme((), T_ORDERING),
    "Nothing": Scheme(("a",), TCon("Maybe", (_A,))),
    "Just": Scheme(("a",), t_fun(_A, TCon("Maybe", (_A,)))),
    "[]": Scheme(("a",), t_list(_A)),
    ":": Scheme(("a",), t_fun(_A, t_list(_A), t_list(_A))),
    "(,)": Scheme(("a", "b"), t_fun(_A, _B, TCon("(,)", (_A, _B)))),
    "(,,)": Scheme(
        ("a", "b", "c"),
        t_fun(_A, _B, TVar("c"), TCon("(,,)", (_A, _B, TVar("c")))),
    ),
    "(,,,)": Scheme(
        ("a", "b", "c", "d"),
        t_fun(_A, _B, TVar("c"), TVar("d"), TCon("(,,,)", (_A, _B, TVar("c"), TVar("d")))),
    ),
}

_INT_BINOP = Scheme((), t_fun(T_INT, T_INT, T_INT))
_INT_CMP = Scheme((), t_fun(T_INT, T_INT, T_BOOL))

PRIM_ENV: Dict[str, Scheme] = {
    "+": _INT_BINOP,
    "-": _INT_BINOP,
    "*": _INT_BINOP,
    "div": _INT_BINOP,
    "mod": _INT_BINOP,
    "<": _INT_CMP,
    "<=": _INT_CMP,
    ">": _INT_CMP,
    ">=": _INT_CMP,
    "==": Scheme(("a",), t_fun(_A, _A, T_BOOL)),
    "/=": Scheme(("a",), t_fun(_A, _A, T_BOOL)),
    "force": Scheme(("a",), t_fun(_A, _A)),
}


@dataclass
class ConTable:
    """Constructor signatures plus type-constructor arities."""
    constructors: Dict[str, Scheme]
    tycon_arity: Dict[str, int]

    def con_arity(self, tag: str) -> int:
        sch = self.constructors.get(tag)
        if sch is None:
            raise UnboundIdentifier(tag)
        n = 0
        t = sch.ty
        while isinstance(t, TFun):
            n += 1
            t = t.cod
        return n


def builtin_con_table() -> ConTable:
    return ConTable(dict(BUILTIN_CONSTRUCTORS), dict(BUILTIN_TYCONS))


def extend_con_table(table: ConTable, decls: Iterable[DataDecl]) -> ConTable:
    constructors = dict(table.constructors)
    tycons = dict(table.tycon_arity)
    for d in decls:
        if d.name in tycons:
            raise TypeError_(f"type {d.name!r} is already defined", d.line)
        tycons[d.name] = len(d.params)
    for d in decls:
        result = TCon(d.name, tuple(TVar(p) for p in d.params))
        for tag, fields in d.constructors:
            if tag in constructors:
                raise TypeError_(f"constructor {tag!r} is already defined", d.line)
            for f in fields:
                _check_type_wellformed(f, tycons, set(d.params), d.line)
            constructors[tag] = Scheme(tuple(d.params), t_fun(*fields, result))
    return ConTable(constructors, tycons)


def _check_type_wellformed(t: Type, tycons: Dict[str, int], params: Set[str], line):
    if isinstance(t, TVar):
        if t.name not in params:
            raise TypeError_(f"unknown type variable {t.name!r}", line)
        return
    if isinstance(t, TCon):
        if t.name not in tycons:
            raise TypeError_(f"unknown type constructor {t.name!r}", line)
        if tycons[t.name] != len(t.args):
            raise TypeError_(
                f"type constructor {t.name!r} expects {tycons[t.name]} arguments",
                line,
            )
        for a in t.args:
            _check_type_wellformed(a, tycons, params, line)
        return
    if isinstance(t, TFun):
        _check_type_wellformed(t.dom, tycons, params, line)
        _check_type_wellformed(t.cod, tycons, params, line)
        return
    raise TypeError_(f"malformed type: {t!r}", line)


# -- the inference engine -------------------------------------------------------

class Infer:
    def __init__(self, con_table: ConTable):
        self.subst: Dict[str, Type] = {}
        self.counter = 0
        self.con_table = con_table
        self.line: Optional[int] = None

    def fresh(self) -> TVar:
        self.counter += 1
        return TVar(f"%t{self.counter}")

    def resolve(self, t: Type) -> Type:
        while isinstance(t, TVar) and t.name in self.subst:
            t = self.subst[t.name]
        return t

    def zonk(self, t: Type) -> Type:
        t = self.resolve(t)
        if isinstance(t, TCon):
            return TCon(t.name, tuple(self.zonk(a) for a in t.args))
        if isinstance(t, TFun):
            return TFun(self.zonk(t.dom), self.zonk(t.cod))
        return t

    def unify(self, t1: Type, t2: Type, context: str = ""):
        t1, t2 = self.resolve(t1), self.resolve(t2)
        if isinstance(t1, TVar):
            if isinstance(t2, TVar) and t1.name == t2.name:
                return
            if t1.name in free_type_vars(self.zonk(t2)):
                raise OccursCheck(t1.name, self.zonk(t2), self.line)
            self.subst[t1.name] = t2
            return
        if isinstance(t2, TVar):
            self.unify(t2, t1, context)
            return
        if isinstance(t1, TFun) and isinstance(t2, TFun):
            self.unify(t1.dom, t2.dom, context)
            self.unify(t1.cod, t2.cod, context)
            return
        if isinstance(t1, TCon) and isinstance(t2, TCon):
            if t1.name != t2.name or len(t1.args) != len(t2.args):
                raise UnificationFailure(self.zonk(t1), self.zonk(t2), context, self.line)
            for a, b in zip(t1.args, t2.args):
                self.unify(a, b, context)
            return
        raise UnificationFailure(self.zonk(t1), self.zonk(t2), context, self.line)

    def instantiate(self, sch: Scheme) -> Type:
        mapping = {v: self.fresh() for v in sch.vars}

        def go(t: Type) -> Type:
            if isinstance(t, TVar):
                return mapping.get(t.name, t)
            if isinstance(t, TCon):
                return TCon(t.name, tuple(go(a) for a in t.args))
            if isinstance(t, TFun):
                return TFun(go(t.dom), go(t.cod))
            raise TypeError(f"not a type: {t!r}")

        return go(sch.ty)

    def generalize(self, env: Dict[str, Scheme], t: Type) -> Scheme:
        t = self.zonk(t)
        env_ftv: Set[str] = set()
        for sch in env.values():
            env_ftv |= free_type_vars(self.zonk(sch.ty)) - set(sch.vars)
        qs = tuple(sorted(free_type_vars(t) - env_ftv))
        return Scheme(qs, t)

    # -- expressions ------------------------------------------------------------

    def infer_expr(self, e: SExpr, env: Dict[str, Scheme]) -> Type:
        if isinstance(e, SVar):
            sch = env.get(e.name)
            if sch is None:
                raise UnboundIdentifier(e.name, self.line)
            return self.instantiate(sch)
        if isinstance(e, SCon):
            sch = self.con_table.constructors.get(e.name)
            if sch is None:
                raise UnboundIdentifier(e.name, self.line)
            return self.instantiate(sch)
        if isinstance(e, SLitInt):
            return T_INT
        if isinstance(e, SLitChar):
            return T_CHAR
        if isinstance(e, SString):
            return t_list(T_CHAR)
        if isinstance(e, SApp):
            tf = self.infer_expr(e.fun, env)
            ta = self.infer_expr(e.arg, env)
            r = self.fresh()
            self.unify(tf, TFun(ta, r), "in a function application")
            return r
        if isinstance(e, SLam):
            env2 = dict(env)
            doms = [self.infer_pat(p, env2) for p in e.params]
            body = self.infer_expr(e.body, env2)
            return t_fun(*doms, body)
        if isinstance(e, SLet):
            env2 = self.infer_binding_groups(list(e.binds), env)
            return self.infer_expr(e.body, env2)
        if isinstance(e, SIf):
            self.unify(self.infer_expr(e.cond, env), T_BOOL, "in an if condition")
            t_then = self.infer_expr(e.then, env)
            t_else = self.infer_expr(e.els, env)
            self.unify(t_then, t_else, "in the branches of an if")
            return t_then
        if isinstance(e, SCase):
            t_scrut = self.infer_expr(e.scrutinee, env)
            result = self.fresh()
            for pat, body in e.alts:
                env2 = dict(env)
                t_pat = self.infer_pat(pat, env2)
                self.unify(t_pat, t_scrut, "in a case pattern")
                self.unify(self.infer_expr(body, env2), result, "in a case alternative")
            return result
        if isinstance(e, SList):
            elem = self.fresh()
            for item in e.items:
                self.unify(self.infer_expr(item, env), elem, "in a list literal")
            return t_list(elem)
        if isinstance(e, STuple):
            tag = "(" + "," * (len(e.items) - 1) + ")"
            return TCon(tag, tuple(self.infer_expr(x, env) for x in e.items))
        raise TypeError(f"not an expression: {e!r}")

    # -- patterns ----------------------------------------------------------------

    def infer_pat(self, p: SPat, env_out: Dict[str, Scheme]) -> Type:
        if isinstance(p, PVar):
            t = self.fresh()
            self._bind_pat_var(p.name, t, env_out)
            return t
        if isinstance(p, PWild):
            return self.fresh()
        if isinstance(p, PInt):
            return T_INT
        if isinstance(p, PBang):
            t = self.fresh()
            self._bind_pat_var(p.name, t, env_out)
            return t
        if isinstance(p, PAs):
            t = self.infer_pat(p.pat, env_out)
            self._bind_pat_var(p.name, t, env_out)
            return t
        if isinstance(p, PCon):
            sch = self.con_table.constructors.get(p.tag)
            if sch is None:
                raise UnboundIdentifier(p.tag, self.line)
            con_ty = self.instantiate(sch)
            doms: List[Type] = []
            while isinstance(con_ty, TFun):
                doms.append(con_ty.dom)
                con_ty = con_ty.cod
            if len(doms) != len(p.subpats):
                raise TypeError_(
                    f"constructor {p.tag!r} expects {len(doms)} arguments, "
                    f"got {len(p.subpats)}",
                    self.line,
                )
            for dom, sub in zip(doms, p.subpats):
                self.unify(self.infer_pat(sub, env_out), dom, "in a pattern")
            return con_ty
        raise TypeError(f"not a pattern: {p!r}")

    def _bind_pat_var(self, name: str, t: Type, env_out: Dict[str, Scheme]):
        env_out[name] = Scheme((), t)

    # -- clauses and binding groups ------------------------------------------------

    def infer_clause(self, clause: Clause, env: Dict[str, Scheme]) -> Type:
        self.line = clause.line or self.line
        env2 = dict(env)
        seen: Set[str] = set()
        for p in clause.patterns:
            for v in _pat_names(p):
                if v in seen:
                    raise TypeError_(f"duplicate variable {v!r} in patterns", clause.line)
                seen.add(v)
        doms = [self.infer_pat(p, env2) for p in clause.patterns]
        env3 = self.infer_binding_groups(list(clause.where), env2)
        result = self.fresh()
        for rhs in clause.rhss:
            if rhs.guard is not None and not _is_otherwise(rhs.guard):
                self.unify(
                    self.infer_expr(rhs.guard, env3), T_BOOL, "in a guard"
                )
            self.unify(
                self.infer_expr(rhs.body, env3), result, "in an equation body"
            )
        return t_fun(*doms, result)

    def infer_group_mono(self, group: EquationGroup, env: Dict[str, Scheme]) -> Type:
        self.line = group.line or self.line
        result = self.fresh()
        for clause in group.clauses:
            try:
                self.unify(
                    self.infer_clause(clause, env),
                    result,
                    f"in an equation for {group.name!r}",
                )
            except TypeError_ as err:
                if err.line is None:
                    err.line = clause.line
                raise
        return result

    def infer_binding_groups(
        self, groups: List[EquationGroup], env: Dict[str, Scheme]
    ) -> Dict[str, Scheme]:
        """Infer a set of possibly mutually recursive bindings and return
        the environment extended with generalized schemes."""
        if not groups:
            return env
        names = {g.name for g in groups}
        deps = {
            g.name: sorted(_group_free_names(g) & names - {g.name}) for g in groups
        }
        by_name = {g.name: g for g in groups}
        env = dict(env)
        for component in _scc_order(sorted(names), deps):
            mono = {n: self.fresh() for n in component}
            inner = dict(env)
            for n in component:
                inner[n] = Scheme((), mono[n])
            for n in component:
                t = self.infer_group_mono(by_name[n], inner)
                self.unify(t, mono[n], f"in the definition of {n!r}")
            for n in component:
                env[n] = self.generalize(env, mono[n])
        return env


def _is_otherwise(e: SExpr) -> bool:
    return isinstance(e, SVar) and e.name == "otherwise"


def _pat_names(p: SPat) -> List[str]:
    if isinstance(p, (PVar, PBang)):
        return [p.name]
    if isinstance(p, PAs):
        return [p.name] + _pat_names(p.pat)
    if isinstance(p, PCon):
        out: List[str] = []
        for s in p.subpats:
            out.extend(_pat_names(s))
        return out
    return []


def _expr_free_names(e: SExpr, bound: Set[str]) -> Set[str]:
    if isinstance(e, SVar):
        return set() if e.name in bound else {e.name}
    if isinstance(e, SApp):
        return _expr_free_names(e.fun, bound) | _expr_free_names(e.arg, bound)
    if isinstance(e, SLam):
        inner = bound | {v for p in e.params for v in _pat_names(p)}
        return _expr_free_names(e.body, inner)
    if isinstance(e, SLet):
        inner = bound | {g.name for g in e.binds}
        out = _expr_free_names(e.body, inner)
        for g in e.binds:
            out |= _group_free_names(g, inner)
        return out
    if isinstance(e, SIf):
        return (
            _expr_free_names(e.cond, bound)
            | _expr_free_names(e.then, bound)
            | _expr_free_names(e.els, bound)
        )
    if isinstance(e, SCase):
        out = _expr_free_names(e.scrutinee, bound)
        for pat, body in e.alts:
            out |= _expr_free_names(body, bound | set(_pat_names(pat)))
        return out
    if isinstance(e, (SList, STuple)):
        out = set()
        for item in e.items:
            out |= _expr_free_names(item, bound)
        return out
    return set()


def _group_free_names(g: EquationGroup, bound: Optional[Set[str]] = None) -> Set[str]:
    bound = bound or set()
    out: Set[str] = set()
    for clause in g.clauses:
        inner = bound | {v for p in clause.patterns for v in _pat_names(p)}
        inner |= {w.name for w in clause.where}
        for w in clause.where:
            out |= _group_free_names(w, inner)
        for rhs in clause.rhss:
            if rhs.guard is not None:
                out |= _expr_free_names(rhs.guard, inner)
            out |= _expr_free_names(rhs.body, inner)
    return out


def _scc_order(nodes: List[str], deps: Dict[str, List[str]]) -> List[List[str]]:
    """Tarjan's strongly connected components, in dependency order."""
    index: Dict[str, int] = {}
    lowlink: Dict[str, int] = {}
    on_stack: Set[str] = set()
    stack: List[str] = []
    out: List[List[str]] = []
    counter = [0]

    def strongconnect(v: str):
        index[v] = lowlink[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in deps.get(v, ()):
            if w not in index:
                strongconnect(w)
                lowlink[v] = min(lowlink[v], lowlink[w])
            elif w in on_stack:
                lowlink[v] = min(lowlink[v], index[w])
        if lowlink[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp))

    for v in nodes:
        if v not in index:
            strongconnect(v)
    return out


# -- program-level API ----------------------------------------------------------

def infer_program(
    program: SourceProgram,
    con_table: Optional[ConTable] = None,
    base_env: Optional[Dict[str, Scheme]] = None,
) -> Tuple[Dict[str, Scheme], ConTable]:
    """Infer principal schemes for every top-level binding."""
    table = con_table or builtin_con_table()
    table = extend_con_table(table, program.data_decls)
    env: Dict[str, Scheme] = dict(PRIM_ENV)
    if base_env:
        env.update(base_env)

    inf = Infer(table)
    env = inf.infer_binding_groups(list(program.groups), env)

    for sig in program.signatures:
        if not any(g.name == sig.name for g in program.groups):
            raise TypeError_(f"signature for undefined binding {sig.name!r}", sig.line)
        _check_signature(inf, env[sig.name], sig, table)

    result = {g.name: env[g.name] for g in program.groups}
    return result, table


def _check_signature(inf: Infer, inferred: Scheme, sig, table: ConTable):
    _check_type_wellformed(
        sig.ty, table.tycon_arity, free_type_vars(sig.ty), sig.line
    )
    # Skolemize the declared type, instantiate the inferred one, and check
    # that the declaration is an instance-equal of the inference result.
    skolems = {v: TCon(f"%skolem.{v}") for v in free_type_vars(sig.ty)}

    def sk(t: Type) -> Type:
        if isinstance(t, TVar):
            return skolems.get(t.name, t)
        if isinstance(t, TCon):
            return TCon(t.name, tuple(sk(a) for a in t.args))
        if isinstance(t, TFun):
            return TFun(sk(t.dom), sk(t.cod))
        raise TypeError(f"not a type: {t!r}")

    try:
        inf.line = sig.line
        inf.unify(inf.instantiate(inferred), sk(sig.ty), f"against the signature for {sig.name!r}")
    except TypeError_ as err:
        raise TypeError_(
            f"signature for {sig.name!r} does not match the inferred type "
            f"{render_scheme(inferred)}",
            sig.line,
        ) from err


def infer_expression(
    e: SExpr, env: Dict[str, Scheme], con_table: ConTable
) -> Scheme:
    inf = Infer(con_table)
    full_env = dict(PRIM_ENV)
    full_env.update(env)
    t = inf.infer_expr(e, full_env)
    return inf.generalize({}, t)


# -- rendering ---------------------------------------------------------------

def _canonical(sch: Scheme) -> Type:
    letters = "abcdefghijklmnopqrstuvwxyz"
    mapping: Dict[str, Type] = {}

    def assign(name: str) -> Type:
        if name not in mapping:
            i = len(mapping)
            label = letters[i] if i < 26 else f"t{i}"
            mapping[name] = TVar(label)
        return mapping[name]

    def go(t: Type) -> Type:
        if isinstance(t, TVar):
            return assign(t.name)
        if isinstance(t, TCon):
            return TCon(t.name, tuple(go(a) for a in t.args))
        if isinstance(t, TFun):
            return TFun(go(t.dom), go(t.cod))
        raise TypeError(f"not a type: {t!r}")

    return go(sch.ty)


def render_type(t: Type, prec: int = 0) -> str:
    if isinstance(t, TVar):
        return t.name.lstrip("%")
    if isinstance(t, TFun):
        text = f"{render_type(t.dom, 1)} -> {render_type(t.cod, 0)}"
        return f"({text})" if prec > 0 else text
    if isinstance(t, TCon):
        if t.name == "[]":
            return f"[{render_type(t.args[0], 0)}]"
        if t.name.startswith("(,"):
            inner = ", ".join(render_type(a, 0) for a in t.args)
            return f"({inner})"
        if not t.args:
            return t.name
        args = " ".join(render_type(a, 2) for a in t.args)
        text = f"{t.name} {args}"
        return f"({text})" if prec > 1 else text
    raise TypeError(f"not a type: {t!r}")


def render_scheme(sch: Scheme) -> str:
    return render_type(_canonical(sch))
