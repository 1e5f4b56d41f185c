"""Surface abstract syntax produced by the parser.

Kept separate from the core language: type inference runs over this
representation (where clause and guard structure is still visible) and
the translator lowers it into matchings afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple


# -- expressions -------------------------------------------------------------

class SExpr:
    __slots__ = ()


@dataclass(frozen=True)
class SVar(SExpr):
    """Variable or operator reference."""
    name: str


@dataclass(frozen=True)
class SCon(SExpr):
    """Constructor reference (possibly partially applied)."""
    name: str


@dataclass(frozen=True)
class SLitInt(SExpr):
    value: int


@dataclass(frozen=True)
class SLitChar(SExpr):
    value: str


@dataclass(frozen=True)
class SString(SExpr):
    value: str


@dataclass(frozen=True)
class SApp(SExpr):
    fun: SExpr
    arg: SExpr


@dataclass(frozen=True)
class SLam(SExpr):
    params: Tuple["SPat", ...]
    body: SExpr


@dataclass(frozen=True)
class SLet(SExpr):
    binds: Tuple["EquationGroup", ...]
    body: SExpr


@dataclass(frozen=True)
class SIf(SExpr):
    cond: SExpr
    then: SExpr
    els: SExpr


@dataclass(frozen=True)
class SCase(SExpr):
    scrutinee: SExpr
    alts: Tuple[Tuple["SPat", SExpr], ...]


@dataclass(frozen=True)
class SList(SExpr):
    items: Tuple[SExpr, ...]


@dataclass(frozen=True)
class STuple(SExpr):
    items: Tuple[SExpr, ...]


def sapp(fun: SExpr, *args: SExpr) -> SExpr:
    for a in args:
        fun = SApp(fun, a)
    return fun


# -- patterns ----------------------------------------------------------------

class SPat:
    __slots__ = ()


@dataclass(frozen=True)
class PVar(SPat):
    name: str


@dataclass(frozen=True)
class PWild(SPat):
    pass


@dataclass(frozen=True)
class PInt(SPat):
    value: int


@dataclass(frozen=True)
class PCon(SPat):
    tag: str
    subpats: Tuple[SPat, ...] = ()


@dataclass(frozen=True)
class PAs(SPat):
    name: str
    pat: SPat


@dataclass(frozen=True)
class PBang(SPat):
    name: str


# -- declarations ------------------------------------------------------------

@dataclass(frozen=True)
class GuardedRhs:
    """One right-hand side of a clause: optional Boolean guard, a body,
    and the normalized source text used as the trace justification."""
    guard: Optional[SExpr]
    body: SExpr
    annotation: str


@dataclass(frozen=True)
class Clause:
    patterns: Tuple[SPat, ...]
    rhss: Tuple[GuardedRhs, ...]
    where: Tuple["EquationGroup", ...] = ()
    line: int = 0


@dataclass(frozen=True)
class EquationGroup:
    """All adjacent clauses defining one name."""
    name: str
    clauses: Tuple[Clause, ...]
    line: int = 0


@dataclass(frozen=True)
class DataDecl:
    name: str
    params: Tuple[str, ...]
    constructors: Tuple[Tuple[str, Tuple["object", ...]], ...]  # (tag, field types)
    line: int = 0


@dataclass(frozen=True)
class TypeSig:
    name: str
    ty: "object"  # a typecheck.Type
    line: int = 0


@dataclass(frozen=True)
class SourceProgram:
    data_decls: Tuple[DataDecl, ...] = ()
    groups: Tuple[EquationGroup, ...] = ()
    signatures: Tuple[TypeSig, ...] = ()
