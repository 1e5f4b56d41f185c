"""Lexer, offside-rule layout and recursive-descent parser for the
accepted Haskell subset.

Layout is simplified: a block opened by ``where``/``let``/``of`` is
delimited by indentation relative to its first token, and a declaration
continues while lines are indented past its head.  Equation source text
is captured verbatim (whitespace collapsed) to serve as trace
justifications.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from . import typecheck as ty
from .surface import (
    Clause,
    DataDecl,
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
    SourceProgram,
    TypeSig,
    sapp,
)

KEYWORDS = {"data", "where", "let", "in", "case", "of", "if", "then", "else"}
RESERVED_OPS = {"=", "|", "->", "::", "@", "\\", "<-", "=>", "~"}
SYMBOL_CHARS = set("!#$%&*+./<>=?@\\^|-~:")

# Standard fixities for the supported operators.
FIXITIES = {
    "*": (7, "left"),
    "+": (6, "left"),
    "-": (6, "left"),
    ":": (5, "right"),
    "++": (5, "right"),
    "==": (4, "none"),
    "/=": (4, "none"),
    "<": (4, "none"),
    "<=": (4, "none"),
    ">": (4, "none"),
    ">=": (4, "none"),
    "&&": (3, "right"),
    "||": (2, "right"),
}


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # varid conid int char string sym punct keyword vsemi vrbrace eof
    text: str
    line: int
    col: int
    start: int
    end: int


def _char_escape(ch: str, line: int, col: int) -> str:
    escapes = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"', "0": "\0"}
    if ch not in escapes:
        raise ParseError(f"unknown escape: \\{ch}", line, col)
    return escapes[ch]


def lex(src: str) -> List[Token]:
    tokens: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)

    def bump(k: int = 1):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and src[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = src[i]
        if c in " \t\r\n":
            bump()
            continue
        # line comments: a run of dashes not forming a longer operator
        if c == "-" and src.startswith("--", i):
            j = i
            while j < n and src[j] == "-":
                j += 1
            if j >= n or src[j] not in SYMBOL_CHARS:
                while i < n and src[i] != "\n":
                    bump()
                continue
        if src.startswith("{-", i):
            depth, start_line, start_col = 1, line, col
            bump(2)
            while i < n and depth:
                if src.startswith("{-", i):
                    depth += 1
                    bump(2)
                elif src.startswith("-}", i):
                    depth -= 1
                    bump(2)
                else:
                    bump()
            if depth:
                raise ParseError("unterminated block comment", start_line, start_col)
            continue

        start, tline, tcol = i, line, col
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            text = src[i:j]
            bump(j - i)
            tokens.append(Token("int", text, tline, tcol, start, i))
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            text = src[i:j]
            bump(j - i)
            if text in KEYWORDS:
                kind = "keyword"
            elif text[0].isupper():
                kind = "conid"
            else:
                kind = "varid"
            tokens.append(Token(kind, text, tline, tcol, start, i))
            continue
        if c == "'":
            bump()
            if i >= n:
                raise ParseError("unterminated character literal", tline, tcol)
            if src[i] == "\\":
                bump()
                if i >= n:
                    raise ParseError("unterminated character literal", tline, tcol)
                ch = _char_escape(src[i], line, col)
                bump()
            else:
                ch = src[i]
                bump()
            if i >= n or src[i] != "'":
                raise ParseError("unterminated character literal", tline, tcol)
            bump()
            tokens.append(Token("char", ch, tline, tcol, start, i))
            continue
        if c == '"':
            bump()
            chars = []
            while i < n and src[i] != '"':
                if src[i] == "\\":
                    bump()
                    if i >= n:
                        break
                    chars.append(_char_escape(src[i], line, col))
                    bump()
                elif src[i] == "\n":
                    raise ParseError("newline in string literal", line, col)
                else:
                    chars.append(src[i])
                    bump()
            if i >= n:
                raise ParseError("unterminated string literal", tline, tcol)
            bump()
            tokens.append(Token("string", "".join(chars), tline, tcol, start, i))
            continue
        if c in "()[],;{}":
            bump()
            tokens.append(Token("punct", c, tline, tcol, start, i))
            continue
        if c in SYMBOL_CHARS:
            j = i
            while j < n and src[j] in SYMBOL_CHARS:
                j += 1
            text = src[i:j]
            bump(j - i)
            tokens.append(Token("sym", text, tline, tcol, start, i))
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)

    tokens.append(Token("eof", "", line, col, n, n))
    return tokens


def apply_layout(tokens: List[Token]) -> List[Token]:
    """Insert virtual separators/closers for indentation-based blocks."""
    out: List[Token] = []
    ctx: List[Tuple[int, str]] = []  # (column, kind)
    expect_block: Optional[str] = None  # a block keyword was just seen
    prev_line = -1

    def virtual(kind: str, tok: Token) -> Token:
        return Token(kind, "", tok.line, tok.col, tok.start, tok.start)

    for tok in tokens:
        if tok.kind == "eof":
            while ctx:
                out.append(virtual("vrbrace", tok))
                ctx.pop()
            out.append(tok)
            break

        if expect_block is not None:
            kind = expect_block
            expect_block = None
            out.append(virtual("vlbrace", tok))
            if ctx and tok.col <= ctx[-1][0]:
                out.append(virtual("vrbrace", tok))  # empty block
            else:
                ctx.append((tok.col, kind))
                prev_line = tok.line
        elif not ctx:
            ctx.append((tok.col, "top"))
            prev_line = tok.line
        elif tok.line != prev_line:
            is_in = tok.kind == "keyword" and tok.text == "in"
            while ctx and (
                tok.col < ctx[-1][0] or (is_in and ctx[-1][1] == "let" and tok.col <= ctx[-1][0])
            ):
                out.append(virtual("vrbrace", tok))
                ctx.pop()
            if ctx and tok.col == ctx[-1][0] and not is_in:
                out.append(virtual("vsemi", tok))
            if not ctx:
                ctx.append((tok.col, "top"))
            prev_line = tok.line

        if tok.kind == "keyword" and tok.text == "in":
            if ctx and ctx[-1][1] == "let":
                out.append(virtual("vrbrace", tok))
                ctx.pop()

        out.append(tok)
        if tok.kind == "keyword" and tok.text in ("where", "let", "of"):
            expect_block = tok.text

    return out


def collapse_ws(s: str) -> str:
    return " ".join(s.split())


class Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = apply_layout(lex(src))
        self.pos = 0

    # -- token helpers -------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            want = text or kind
            self.error(f"expected {want!r}, found {self.peek().text or self.peek().kind!r}")
        return self.next()

    def skip_virtual(self):
        while self.peek().kind in ("vsemi", "vrbrace"):
            self.next()

    def text_span(self, first_index: int, last_index: int) -> str:
        toks = [t for t in self.tokens[first_index : last_index + 1] if t.end > t.start]
        if not toks:
            return ""
        return self.src[toks[0].start : toks[-1].end]

    # -- program -------------------------------------------------------------

    def parse_program(self) -> SourceProgram:
        data_decls: List[DataDecl] = []
        signatures: List[TypeSig] = []
        equations: List[Tuple[str, Clause]] = []

        while True:
            self.skip_virtual()
            if self.at("eof"):
                break
            if self.at("keyword", "data"):
                data_decls.append(self.parse_data())
            else:
                item = self.parse_signature_or_equation()
                if isinstance(item, TypeSig):
                    signatures.append(item)
                else:
                    equations.append(item)

        groups = self._group(equations)
        return SourceProgram(tuple(data_decls), tuple(groups), tuple(signatures))

    def _group(self, equations: List[Tuple[str, Clause]]) -> List[EquationGroup]:
        groups: List[EquationGroup] = []
        seen = {}
        for name, clause in equations:
            if groups and groups[-1].name == name:
                last = groups[-1]
                groups[-1] = EquationGroup(name, last.clauses + (clause,), last.line)
                continue
            if name in seen:
                raise ParseError(
                    f"equations for {name!r} are not adjacent", clause.line, 1
                )
            seen[name] = True
            groups.append(EquationGroup(name, (clause,), clause.line))
        for g in groups:
            counts = {len(c.patterns) for c in g.clauses}
            if len(counts) > 1:
                raise ParseError(
                    f"equations for {g.name!r} have different numbers of arguments",
                    g.line,
                    1,
                )
            if counts == {0} and len(g.clauses) > 1:
                raise ParseError(
                    f"multiple equations for constant {g.name!r}", g.line, 1
                )
        return groups

    # -- declarations ----------------------------------------------------------

    def parse_data(self) -> DataDecl:
        kw = self.expect("keyword", "data")
        name = self.expect("conid").text
        params = []
        while self.at("varid"):
            params.append(self.next().text)
        self.expect("sym", "=")
        constructors = []
        while True:
            tag = self.expect("conid").text
            fields = []
            while self._at_atype_start():
                fields.append(self.parse_atype())
            constructors.append((tag, tuple(fields)))
            if self.at("sym", "|"):
                self.next()
                continue
            break
        return DataDecl(name, tuple(params), tuple(constructors), kw.line)

    def parse_defining_name(self) -> str:
        if self.at("varid"):
            return self.next().text
        if self.at("punct", "(") and self.peek(1).kind == "sym":
            self.next()
            op = self.next().text
            self.expect("punct", ")")
            if op in RESERVED_OPS:
                self.error(f"cannot define reserved operator {op!r}")
            return op
        self.error("expected a binding name")

    def parse_signature_or_equation(self):
        head_index = self.pos
        name = self.parse_defining_name()
        if self.at("sym", "::"):
            line = self.peek().line
            self.next()
            sig_ty = self.parse_type()
            return TypeSig(name, sig_ty, line)
        return name, self.parse_clause(head_index, name)

    def parse_clause(self, head_index: int, name: str) -> Clause:
        line = self.tokens[head_index].line
        patterns: List[SPat] = []
        while not (self.at("sym", "=") or self.at("sym", "|")):
            if self.at("eof") or self.peek().kind in ("vsemi", "vrbrace"):
                self.error("expected '=' or '|' in equation")
            patterns.append(self.parse_apat())
        head_text = collapse_ws(self.text_span(head_index, self.pos - 1))

        rhss: List[GuardedRhs] = []
        if self.at("sym", "="):
            self.next()
            body, body_text = self._parse_exp_with_text()
            rhss.append(GuardedRhs(None, body, f"{head_text} = {body_text}"))
        else:
            while self.at("sym", "|"):
                self.next()
                guard, guard_text = self._parse_exp_with_text()
                self.expect("sym", "=")
                body, body_text = self._parse_exp_with_text()
                rhss.append(
                    GuardedRhs(
                        guard, body, f"{head_text} | {guard_text} = {body_text}"
                    )
                )

        where_groups: Tuple[EquationGroup, ...] = ()
        if self.at("keyword", "where"):
            self.next()
            where_groups = tuple(self.parse_bind_block())
        return Clause(tuple(patterns), tuple(rhss), where_groups, line)

    def parse_bind_block(self) -> List[EquationGroup]:
        self.expect("vlbrace")
        equations: List[Tuple[str, Clause]] = []
        while True:
            self.skip_vsemis()
            if self.at("vrbrace"):
                self.next()
                break
            if self.at("eof"):
                break
            head_index = self.pos
            name = self.parse_defining_name()
            equations.append((name, self.parse_clause(head_index, name)))
        return self._group(equations)

    def skip_vsemis(self):
        while self.at("vsemi"):
            self.next()

    # -- types -----------------------------------------------------------------

    def _at_atype_start(self) -> bool:
        tok = self.peek()
        return (
            tok.kind in ("conid", "varid")
            or (tok.kind == "punct" and tok.text in ("(", "["))
        )

    def parse_type(self):
        lhs = self.parse_btype()
        if self.at("sym", "->"):
            self.next()
            return ty.TFun(lhs, self.parse_type())
        return lhs

    def parse_btype(self):
        head_tok = self.peek()
        parts = [self.parse_atype()]
        while self._at_atype_start():
            parts.append(self.parse_atype())
        if len(parts) == 1:
            return parts[0]
        head = parts[0]
        if not isinstance(head, ty.TCon) or head.args:
            self.error("unsupported type application", head_tok)
        return ty.TCon(head.name, tuple(parts[1:]))

    def parse_atype(self):
        tok = self.peek()
        if tok.kind == "conid":
            self.next()
            return ty.TCon(tok.text, ())
        if tok.kind == "varid":
            self.next()
            return ty.TVar(tok.text)
        if tok.kind == "punct" and tok.text == "[":
            self.next()
            inner = self.parse_type()
            self.expect("punct", "]")
            return ty.TCon("[]", (inner,))
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            items = [self.parse_type()]
            while self.at("punct", ","):
                self.next()
                items.append(self.parse_type())
            self.expect("punct", ")")
            if len(items) == 1:
                return items[0]
            if len(items) > 4:
                self.error("tuples only up to 4 components", tok)
            return ty.TCon("(" + "," * (len(items) - 1) + ")", tuple(items))
        self.error("expected a type")

    # -- patterns ----------------------------------------------------------------

    def parse_pat(self) -> SPat:
        lhs = self.parse_pat10()
        if self.at("sym", ":"):
            self.next()
            return PCon(":", (lhs, self.parse_pat()))
        return lhs

    def parse_pat10(self) -> SPat:
        if self.at("conid") and self._at_apat_start(1):
            tag = self.next().text
            subs = []
            while self._at_apat_start(0):
                subs.append(self.parse_apat())
            return PCon(tag, tuple(subs))
        return self.parse_apat()

    def _at_apat_start(self, k: int) -> bool:
        tok = self.peek(k)
        if tok.kind in ("varid", "conid", "int", "char"):
            return True
        if tok.kind == "punct" and tok.text in ("(", "["):
            return True
        if tok.kind == "sym" and tok.text == "!":
            return True
        return False

    def parse_apat(self) -> SPat:
        tok = self.peek()
        if tok.kind == "varid":
            self.next()
            if tok.text == "_":
                return PWild()
            if self.at("sym", "@"):
                self.next()
                return PAs(tok.text, self.parse_apat())
            return PVar(tok.text)
        if tok.kind == "conid":
            self.next()
            return PCon(tok.text, ())
        if tok.kind == "int":
            self.next()
            return PInt(int(tok.text))
        if tok.kind == "char":
            self.error("character patterns are not supported")
        if tok.kind == "sym" and tok.text == "!":
            self.next()
            name = self.expect("varid").text
            if name == "_":
                self.error("bang patterns require a variable")
            return PBang(name)
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            items = [self.parse_pat()]
            while self.at("punct", ","):
                self.next()
                items.append(self.parse_pat())
            self.expect("punct", ")")
            if len(items) == 1:
                return items[0]
            if len(items) > 4:
                self.error("tuples only up to 4 components", tok)
            return PCon("(" + "," * (len(items) - 1) + ")", tuple(items))
        if tok.kind == "punct" and tok.text == "[":
            self.next()
            items = []
            if not self.at("punct", "]"):
                items.append(self.parse_pat())
                while self.at("punct", ","):
                    self.next()
                    items.append(self.parse_pat())
            self.expect("punct", "]")
            pat: SPat = PCon("[]", ())
            for p in reversed(items):
                pat = PCon(":", (p, pat))
            return pat
        self.error("expected a pattern")

    # -- expressions ---------------------------------------------------------------

    def _parse_exp_with_text(self) -> Tuple[SExpr, str]:
        first = self.pos
        e = self.parse_exp()
        return e, collapse_ws(self.text_span(first, self.pos - 1))

    def parse_exp(self, min_prec: int = 0) -> SExpr:
        lhs = self.parse_bexp()
        prev_nonassoc: Optional[int] = None
        while True:
            tok = self.peek()
            op = None
            if tok.kind == "sym" and tok.text not in RESERVED_OPS:
                op = tok.text
            if op is None:
                return lhs
            if op not in FIXITIES:
                self.error(f"unknown operator {op!r}")
            prec, assoc = FIXITIES[op]
            if prec < min_prec:
                return lhs
            if assoc == "none" and prev_nonassoc == prec:
                self.error(f"non-associative operator {op!r} used in a chain")
            self.next()
            if assoc == "right":
                rhs = self.parse_exp(prec)
            else:
                rhs = self.parse_exp(prec + 1)
            head: SExpr = SCon(":") if op == ":" else SVar(op)
            lhs = sapp(head, lhs, rhs)
            prev_nonassoc = prec if assoc == "none" else None

    def parse_bexp(self) -> SExpr:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "\\":
            self.next()
            params = [self.parse_apat()]
            while self._at_apat_start(0):
                params.append(self.parse_apat())
            self.expect("sym", "->")
            return SLam(tuple(params), self.parse_exp())
        if tok.kind == "keyword" and tok.text == "let":
            self.next()
            binds = self.parse_bind_block()
            self.expect("keyword", "in")
            return SLet(tuple(binds), self.parse_exp())
        if tok.kind == "keyword" and tok.text == "if":
            self.next()
            cond = self.parse_exp()
            self.expect("keyword", "then")
            then = self.parse_exp()
            self.expect("keyword", "else")
            return SIf(cond, then, self.parse_exp())
        if tok.kind == "keyword" and tok.text == "case":
            self.next()
            scrutinee = self.parse_exp()
            self.expect("keyword", "of")
            alts = self.parse_alt_block()
            return SCase(scrutinee, tuple(alts))
        return self.parse_fexp()

    def parse_alt_block(self):
        self.expect("vlbrace")
        alts = []
        while True:
            self.skip_vsemis()
            if self.at("vrbrace"):
                self.next()
                break
            if self.at("eof"):
                break
            pat = self.parse_pat()
            self.expect("sym", "->")
            alts.append((pat, self.parse_exp()))
        if not alts:
            self.error("case expression with no alternatives")
        return alts

    def parse_fexp(self) -> SExpr:
        e = self.parse_aexp()
        while self._at_aexp_start():
            e = SApp(e, self.parse_aexp())
        return e

    def _at_aexp_start(self) -> bool:
        tok = self.peek()
        if tok.kind in ("varid", "conid", "int", "char", "string"):
            return True
        if tok.kind == "punct" and tok.text in ("(", "["):
            return True
        return False

    def parse_aexp(self) -> SExpr:
        tok = self.peek()
        if tok.kind == "varid":
            self.next()
            if tok.text == "_":
                self.error("wildcard outside a pattern")
            return SVar(tok.text)
        if tok.kind == "conid":
            self.next()
            return SCon(tok.text)
        if tok.kind == "int":
            self.next()
            return SLitInt(int(tok.text))
        if tok.kind == "char":
            self.next()
            return SLitChar(tok.text)
        if tok.kind == "string":
            self.next()
            return SString(tok.text)
        if tok.kind == "sym" and tok.text == "-" and self.peek(1).kind == "int":
            self.next()
            lit = self.next()
            return SLitInt(-int(lit.text))
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            # operator section reference: (+), (:), ...
            if self.peek().kind == "sym" and self.peek(1).kind == "punct" and self.peek(1).text == ")":
                op = self.next().text
                self.next()
                if op in RESERVED_OPS:
                    self.error(f"reserved operator {op!r} is not a value")
                if op == ":":
                    return SCon(":")
                return SVar(op)
            items = [self.parse_exp()]
            while self.at("punct", ","):
                self.next()
                items.append(self.parse_exp())
            self.expect("punct", ")")
            if len(items) == 1:
                return items[0]
            if len(items) > 4:
                self.error("tuples only up to 4 components", tok)
            return STuple(tuple(items))
        if tok.kind == "punct" and tok.text == "[":
            self.next()
            items = []
            if not self.at("punct", "]"):
                items.append(self.parse_exp())
                while self.at("punct", ","):
                    self.next()
                    items.append(self.parse_exp())
            self.expect("punct", "]")
            return SList(tuple(items))
        self.error(f"unexpected {tok.text or tok.kind!r} in expression")


def parse_program(src: str) -> SourceProgram:
    return Parser(src).parse_program()


def parse_expression(src: str) -> SExpr:
    p = Parser(src)
    p.skip_virtual()
    if p.at("eof"):
        raise ParseError("empty expression", 1, 1)
    e = p.parse_exp()
    p.skip_virtual()
    if not p.at("eof"):
        p.error("unexpected input after expression")
    return e
