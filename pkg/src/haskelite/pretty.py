"""Rendering expressions and machine configurations back into source
notation.

Indirection bindings introduced by normalization are chased so students
see expressions, not heap graphs; global bindings always print by name;
list spines print with bracket sugar only when fully evaluated and not
currently being rewritten, matching the way partially computed lists are
displayed as cons chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .heap import Heap
from .machine import (
    Config,
    EndMatch,
    MatchC,
    PrimK,
    PushArg,
    UpdateK,
    upd,
)
from .syntax import (
    Alt,
    App,
    ArgSupply,
    BangPat,
    Con,
    ConPat,
    Expr,
    Fail,
    LitChar,
    LitInt,
    LitIntPat,
    MatchAbs,
    Matching,
    PatMatch,
    Pattern,
    PrimApp,
    Return,
    Var,
    VarPat,
    Where,
    WildPat,
    arity,
)

LIST_CONS, LIST_NIL = ":", "[]"
TUPLE_TAGS = {"(,)": 2, "(,,)": 3, "(,,,)": 4}

OPERATOR_CHARS = set(":!#%&*+./<=>?@\\^|-~$")

# Rendering contexts, loosest to tightest.
CTX_TOP, CTX_OP, CTX_FUN, CTX_ARG = 0, 1, 2, 3


def is_operator_name(name: str) -> bool:
    return bool(name) and name[0] in OPERATOR_CHARS


@dataclass
class RenderEnv:
    heap: Heap
    globals: Set[str] = field(default_factory=set)
    overlay: Dict[str, Expr] = field(default_factory=dict)
    splice: Dict[str, Expr] = field(default_factory=dict)
    under_eval: Set[str] = field(default_factory=set)

    def lookup(self, name: str) -> Optional[Expr]:
        e = self.overlay.get(name)
        if e is None:
            e = self.heap.get(name)
        return e


def _display_name(name: str) -> str:
    if is_operator_name(name):
        return f"({name})"
    return name


def _char_text(ch: str) -> str:
    escapes = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", "'": "\\'"}
    return f"'{escapes.get(ch, ch)}'"


def _wrap(text: str, atomic: bool, ctx: int) -> str:
    if atomic or ctx == CTX_TOP:
        return text
    return f"({text})"


def render_expr(
    e: Expr,
    heap: Heap,
    globals: Optional[Set[str]] = None,
    overlay: Optional[Dict[str, Expr]] = None,
) -> str:
    env = RenderEnv(heap, globals or set(), overlay or {})
    return _render(e, env, CTX_TOP, frozenset())


def _render(e: Expr, env: RenderEnv, ctx: int, seen: frozenset) -> str:
    text, atomic = _render_parts(e, env, ctx, seen)
    return _wrap(text, atomic, ctx)


def _render_parts(e: Expr, env: RenderEnv, ctx: int, seen: frozenset) -> Tuple[str, bool]:
    """Returns (text, is-atomic)."""
    if isinstance(e, Var):
        return _render_var(e.name, env, ctx, seen)

    if isinstance(e, LitInt):
        return str(e.value), e.value >= 0
    if isinstance(e, LitChar):
        return _char_text(e.value), True

    if isinstance(e, Con):
        if e.tag == LIST_CONS:
            return _render_list(e, env, seen)
        if e.tag == LIST_NIL:
            return "[]", True
        if e.tag in TUPLE_TAGS:
            inner = ", ".join(_render(a, env, CTX_TOP, seen) for a in e.args)
            return f"({inner})", True
        if not e.args:
            return e.tag, True
        parts = [e.tag] + [_render(a, env, CTX_ARG, seen) for a in e.args]
        return " ".join(parts), False

    if isinstance(e, PrimApp):
        if len(e.args) == 2:
            lhs = _render(e.args[0], env, CTX_OP, seen)
            rhs = _render(e.args[1], env, CTX_OP, seen)
            return f"{lhs} {e.op} {rhs}", False
        parts = [_display_name(e.op)] + [_render(a, env, CTX_ARG, seen) for a in e.args]
        return " ".join(parts), False

    if isinstance(e, App):
        return _render_app(e, env, seen)

    if isinstance(e, MatchAbs):
        return _render_abs(e, env, seen)

    return repr(e), False


def _render_var(name: str, env: RenderEnv, ctx: int, seen: frozenset) -> Tuple[str, bool]:
    if name in env.splice:
        filler = env.splice[name]
        sub = RenderEnv(env.heap, env.globals, env.overlay, {}, env.under_eval)
        sub.splice = {k: v for k, v in env.splice.items() if k != name}
        return _render_parts(filler, sub, ctx, seen | {name})
    if name in env.globals:
        return _display_name(name), True
    if name in seen:
        return _display_name(name), True
    content = env.lookup(name)
    if content is None:
        return _display_name(name), True
    return _render_parts(content, env, ctx, seen | {name})


def _spine_root(e: Expr, env: RenderEnv, seen: frozenset) -> Optional[str]:
    """Resolve the head of an application through indirections; returns a
    global name when the head is a named binding."""
    while True:
        if isinstance(e, Var):
            if e.name in env.globals:
                return e.name
            if e.name in seen:
                return None
            seen = seen | {e.name}
            content = env.lookup(e.name)
            if content is None:
                return None
            e = content
            continue
        return None


def _render_app(e: Expr, env: RenderEnv, seen: frozenset) -> Tuple[str, bool]:
    spine: List[Expr] = []
    f: Expr = e
    while isinstance(f, App):
        spine.append(f.arg)
        f = f.fun
    spine.reverse()

    head = _spine_root(f, env, seen)
    if head is not None and is_operator_name(head) and len(spine) >= 2:
        lhs = _render(spine[0], env, CTX_OP, seen)
        rhs = _render(spine[1], env, CTX_OP, seen)
        text = f"{lhs} {head} {rhs}"
        if len(spine) > 2:
            rest = " ".join(_render(a, env, CTX_ARG, seen) for a in spine[2:])
            text = f"({text}) {rest}"
        return text, False

    fun_text = _render(f, env, CTX_FUN, seen)
    args_text = " ".join(_render(a, env, CTX_ARG, seen) for a in spine)
    return f"{fun_text} {args_text}", False


def _render_abs(e: MatchAbs, env: RenderEnv, seen: frozenset) -> Tuple[str, bool]:
    m = e.matching
    a = arity(m)

    # A saturated where-wrapper is the encoding of a let; render its body
    # with the bindings as transparent indirections.
    if a == 0 and isinstance(m, Where) and isinstance(m.body, Return):
        sub = RenderEnv(
            env.heap,
            env.globals,
            dict(env.overlay),
            env.splice,
            env.under_eval,
        )
        for x, rhs in m.bindings:
            sub.overlay[x] = rhs
        return _render_parts(m.body.expr, sub, CTX_TOP, seen)
    if a == 0 and isinstance(m, Return):
        return _render_parts(m.expr, env, CTX_TOP, seen)

    # Partial application of a named function: show it applied.
    if e.fn_name is not None:
        supplied: List[Expr] = []
        inner = m
        while isinstance(inner, ArgSupply):
            supplied.append(inner.arg)
            inner = inner.rest
        if supplied:
            parts = [_display_name(e.fn_name)] + [
                _render(x, env, CTX_ARG, seen) for x in supplied
            ]
            return " ".join(parts), False
        return _display_name(e.fn_name), True

    # A plain curried abstraction renders as a lambda.
    pats: List[Pattern] = []
    inner = m
    while isinstance(inner, PatMatch):
        pats.append(inner.pattern)
        inner = inner.rest
    if pats and isinstance(inner, (Return, Where)):
        body = inner.expr if isinstance(inner, Return) else None
        if body is None and isinstance(inner, Where) and isinstance(inner.body, Return):
            sub = RenderEnv(env.heap, env.globals, dict(env.overlay), env.splice, env.under_eval)
            for x, rhs in inner.bindings:
                sub.overlay[x] = rhs
            body_text = _render(inner.body.expr, sub, CTX_TOP, seen)
        elif body is not None:
            body_text = _render(body, env, CTX_TOP, seen)
        else:
            return "<function>", True
        pat_text = " ".join(render_pattern(p) for p in pats)
        return f"\\{pat_text} -> {body_text}", False

    return "<function>", True


def _render_list(e: Con, env: RenderEnv, seen: frozenset) -> Tuple[str, bool]:
    """List spines: bracket sugar when the whole spine is evaluated data,
    otherwise an explicit cons chain with the tail parenthesized."""
    elems: List[Tuple[Expr, frozenset]] = []
    cur: Expr = e
    cur_seen = seen
    poisoned = False
    dangling: Optional[Tuple[Expr, frozenset]] = None

    while True:
        if isinstance(cur, Con) and cur.tag == LIST_CONS and len(cur.args) == 2:
            elems.append((cur.args[0], cur_seen))
            cur = cur.args[1]
            continue
        if isinstance(cur, Con) and cur.tag == LIST_NIL:
            break
        if isinstance(cur, Var):
            name = cur.name
            if name in env.splice:
                poisoned = True
                filler = env.splice[name]
                env = RenderEnv(env.heap, env.globals, env.overlay,
                                {k: v for k, v in env.splice.items() if k != name},
                                env.under_eval)
                cur_seen = cur_seen | {name}
                cur = filler
                continue
            if name in cur_seen or name in env.globals:
                dangling = (cur, cur_seen)
                break
            content = env.lookup(name)
            if content is None:
                poisoned = True
                dangling = (cur, cur_seen)
                break
            if name in env.under_eval:
                poisoned = True
            cur_seen = cur_seen | {name}
            cur = content
            continue
        dangling = (cur, cur_seen)
        break

    if dangling is None and not poisoned:
        if elems and all(
            isinstance(_chase_value(x, env, s), LitChar) for x, s in elems
        ):
            chars = [_chase_value(x, env, s).value for x, s in elems]
            escaped = "".join(c.replace("\\", "\\\\").replace('"', '\\"') for c in chars)
            return f'"{escaped}"', True
        inner = ", ".join(_render(x, env, CTX_TOP, s) for x, s in elems)
        return f"[{inner}]", True

    # Cons chain, right-nested with parenthesized tails.
    if dangling is None:
        tail_text, tail_atomic = "[]", True
    else:
        tail_text, tail_atomic = _render_parts(dangling[0], env, CTX_OP, dangling[1])
    for x, s in reversed(elems):
        head_text = _render(x, env, CTX_OP, s)
        tail_wrapped = tail_text if tail_atomic else f"({tail_text})"
        tail_text, tail_atomic = f"{head_text} : {tail_wrapped}", False
    return tail_text, False


def _chase_value(e: Expr, env: RenderEnv, seen: frozenset) -> Expr:
    while isinstance(e, Var) and e.name not in seen and e.name not in env.globals:
        seen = seen | {e.name}
        nxt = env.lookup(e.name)
        if nxt is None:
            return e
        e = nxt
    return e


def render_pattern(p: Pattern) -> str:
    if isinstance(p, VarPat):
        return p.name
    if isinstance(p, WildPat):
        return "_"
    if isinstance(p, LitIntPat):
        return str(p.value)
    if isinstance(p, BangPat):
        return f"!{p.name}"
    if isinstance(p, ConPat):
        if p.tag == LIST_CONS and len(p.subpatterns) == 2:
            return f"({render_pattern(p.subpatterns[0])}:{render_pattern(p.subpatterns[1])})"
        if p.tag == LIST_NIL:
            return "[]"
        if p.tag in TUPLE_TAGS:
            return "(" + ", ".join(render_pattern(s) for s in p.subpatterns) + ")"
        if not p.subpatterns:
            return p.tag
        return "(" + " ".join([p.tag] + [render_pattern(s) for s in p.subpatterns]) + ")"
    return "?"


# ---------------------------------------------------------------------------
# Configurations


def render_config(
    config: Config,
    globals: Set[str],
    force_root: Optional[Expr] = None,
) -> Tuple[str, int]:
    """Fold the return stack into an evaluation context around the control
    and return the rendered text plus the count of hidden pending
    matchings (the dot depth)."""
    control = config.control
    if isinstance(control, MatchC):
        # Matchings are never shown to users; this path serves debug mode.
        depth = sum(1 for k in config.stack if isinstance(k, EndMatch))
        return f"<matching {render_matching_brief(control.matching)}>", depth

    expr = control.expr
    last_update: Optional[str] = None
    stack = config.stack
    for i, frame in enumerate(stack):
        if isinstance(frame, PushArg):
            expr = App(expr, Var(frame.loc))
            continue
        if isinstance(frame, UpdateK):
            last_update = frame.loc
            continue
        if isinstance(frame, PrimK):
            expr = PrimApp(frame.op, frame.done + (expr,) + frame.pending)
            continue
        # Matching continuation: hide the rest of the stack.
        depth = sum(1 for k in stack[i:] if isinstance(k, EndMatch))
        env = RenderEnv(config.heap, globals, {}, {}, upd(stack))
        return _render(expr, env, CTX_TOP, frozenset()), depth

    env = RenderEnv(config.heap, globals, {}, {}, upd(stack))
    if force_root is not None and last_update is not None:
        env.splice = {last_update: expr}
        return _render(force_root, env, CTX_TOP, frozenset()), 0
    return _render(expr, env, CTX_TOP, frozenset()), 0


def render_matching_brief(m: Matching) -> str:
    if isinstance(m, Return):
        return "<return>"
    if isinstance(m, Fail):
        return "<fail>"
    if isinstance(m, PatMatch):
        return f"{render_pattern(m.pattern)} |> ..."
    if isinstance(m, ArgSupply):
        return "... <| ..."
    if isinstance(m, Alt):
        return "... | ..."
    if isinstance(m, Where):
        return "... where ..."
    return "?"


def render_value(e: Expr, heap: Heap, globals: Set[str]) -> str:
    """Render a fully evaluated structure (used for final results)."""
    return render_expr(e, heap, globals)
