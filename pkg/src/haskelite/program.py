"""Loading pipeline: parse, type check, translate, normalize, link.

A loaded program is a heap of normalized global bindings (prelude plus
user definitions plus operator wrappers) together with the inferred type
environment; entry expressions are checked and normalized against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import typecheck as ty
from .heap import Heap
from .parser import ParseError, parse_expression, parse_program
from .prelude import PRELUDE_SOURCE
from .prims import PRIM_OPS
from .surface import SourceProgram
from .syntax import (
    BangPat,
    Expr,
    MatchAbs,
    NameSupply,
    PatMatch,
    Return,
    Var,
    normalize,
)
from .translate import Translator, prim_wrappers


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # "syntax" | "type"
    message: str
    line: Optional[int] = None
    column: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "line": self.line,
            "column": self.column,
        }


class LoadError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _syntax_error(err: ParseError) -> LoadError:
    return LoadError(Diagnostic("syntax", err.message, err.line, err.col))


def _type_error(err: ty.TypeError_) -> LoadError:
    return LoadError(Diagnostic("type", err.message, err.line, None))


@dataclass
class CheckedProgram:
    heap: Heap
    global_names: frozenset
    con_table: ty.ConTable
    type_env: Dict[str, ty.Scheme]
    supply: NameSupply
    user_prims: frozenset = frozenset()
    warnings: List[str] = field(default_factory=list)

    def tracer_args(self) -> Tuple[Heap, frozenset]:
        return self.heap, self.global_names


_PRELUDE_CACHE: Optional[SourceProgram] = None


def parsed_prelude() -> SourceProgram:
    global _PRELUDE_CACHE
    if _PRELUDE_CACHE is None:
        _PRELUDE_CACHE = parse_program(PRELUDE_SOURCE)
    return _PRELUDE_CACHE


def _force_builtin() -> Expr:
    # force drives its argument to whnf; full normalization of structures
    # is scheduled by the tracer, one redex at a time.
    return MatchAbs(PatMatch(BangPat("$fx"), Return(Var("$fx"))), fn_name="force")


def load_program(user_source: str = "", include_prelude: bool = True) -> CheckedProgram:
    try:
        user = parse_program(user_source)
    except ParseError as err:
        raise _syntax_error(err) from err

    warnings: List[str] = []
    if include_prelude:
        prelude = parsed_prelude()
        user_names = {g.name for g in user.groups}
        kept = []
        for g in prelude.groups:
            if g.name in user_names:
                warnings.append(f"user definition of {g.name!r} shadows the prelude")
            else:
                kept.append(g)
        merged = SourceProgram(
            data_decls=prelude.data_decls + user.data_decls,
            groups=tuple(kept) + user.groups,
            signatures=user.signatures,
        )
    else:
        merged = user

    try:
        type_env, con_table = ty.infer_program(merged)
    except ty.TypeError_ as err:
        raise _type_error(err) from err

    group_names = {g.name for g in merged.groups}
    user_prims = frozenset(group_names & set(PRIM_OPS))
    supply = NameSupply(reserved=group_names | set(PRIM_OPS) | {"force"})
    translator = Translator(con_table, supply, user_prims)

    bindings: Dict[str, Expr] = {}
    for op, wrapper in prim_wrappers().items():
        if op not in user_prims:
            bindings[op] = wrapper
    bindings["force"] = _force_builtin()
    for g in merged.groups:
        bindings[g.name] = translator.group(g)

    heap_entries = {name: normalize(e, supply) for name, e in bindings.items()}
    global_names = frozenset(heap_entries)

    full_env = dict(ty.PRIM_ENV)
    full_env.update(type_env)

    return CheckedProgram(
        heap=Heap(heap_entries),
        global_names=global_names,
        con_table=con_table,
        type_env=full_env,
        supply=supply,
        user_prims=user_prims,
        warnings=warnings,
    )


def prepare_entry(program: CheckedProgram, expr_text: str) -> Tuple[Expr, ty.Scheme]:
    """Parse, check and normalize an entry expression against a program."""
    try:
        sexpr = parse_expression(expr_text)
    except ParseError as err:
        raise _syntax_error(err) from err
    try:
        scheme = ty.infer_expression(sexpr, program.type_env, program.con_table)
    except ty.TypeError_ as err:
        raise _type_error(err) from err
    translator = Translator(program.con_table, program.supply, program.user_prims)
    core = translator.expr(sexpr)
    return normalize(core, program.supply), scheme
