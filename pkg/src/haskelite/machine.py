"""Small-step abstract machine over (heap, control, return stack).

Each transition does a bounded amount of work and reports the rule it
used, so the tracer can filter interesting steps and the test suite can
check rule traces against the balanced-evaluation grammars.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Set, Tuple, Union

from .heap import Heap, PrimError
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
    Pattern,
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

# ---------------------------------------------------------------------------
# Controls and continuations


@dataclass(frozen=True)
class EvalC:
    """Evaluate an expression."""
    expr: Expr


@dataclass(frozen=True)
class MatchC:
    """Evaluate a matching against a stack of argument locations."""
    args: Tuple[str, ...]
    matching: Matching


Control = Union[EvalC, MatchC]


@dataclass(frozen=True)
class PushArg:
    """Pending application argument."""
    loc: str


@dataclass(frozen=True)
class UpdateK:
    """Pending heap update for a location under evaluation."""
    loc: str


@dataclass(frozen=True)
class EndMatch:
    """Mark ($) delimiting a saturated matching evaluation.

    ``fn_name`` remembers which binding the matching came from so that a
    match failure can be attributed to a function.
    """
    fn_name: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class AltK:
    """Saved alternative ?(A, m) to try on failure."""
    args: Tuple[str, ...]
    matching: Matching


@dataclass(frozen=True)
class PatK:
    """Pending pattern match @(A, p |> m) while the scrutinee evaluates."""
    args: Tuple[str, ...]
    pattern: Pattern
    rest: Matching


@dataclass(frozen=True)
class BangK:
    """Continuation of a bang pattern: resume matching after forcing."""
    args: Tuple[str, ...]
    rest: Matching


@dataclass(frozen=True)
class PrimK:
    """Primitive application with evaluated prefix and pending operands."""
    op: str
    done: Tuple[Expr, ...]
    pending: Tuple[Expr, ...]


Continuation = Union[PushArg, UpdateK, EndMatch, AltK, PatK, BangK, PrimK]

MATCH_FRAMES = (EndMatch, AltK, PatK, BangK)


@dataclass(frozen=True)
class Config:
    heap: Heap
    control: Control
    stack: Tuple[Continuation, ...]
    supply: NameSupply = field(compare=False)
    steps: int = 0


def initial_config(heap: Heap, entry: Expr, supply: NameSupply) -> Config:
    return Config(heap=heap, control=EvalC(entry), stack=(), supply=supply)


# ---------------------------------------------------------------------------
# Step outcomes


@dataclass(frozen=True)
class Stepped:
    rule: str
    config: Config


@dataclass(frozen=True)
class FinalWhnf:
    config: Config


@dataclass(frozen=True)
class StuckFail:
    """Pattern-match failure: saturated matching failed with no alternative."""
    config: Config
    fn_name: Optional[str] = None


@dataclass(frozen=True)
class Error:
    kind: str
    detail: str
    config: Config


StepOutcome = Union[Stepped, FinalWhnf, StuckFail, Error]


# Rule names, as reported in traces.
APP1, APP2, SAT, VAR, UPDATE = "App1", "App2", "Sat", "Var", "Update"
RETURN1A, RETURN1B, RETURN1C, RETURN2 = "Return1A", "Return1B", "Return1C", "Return2"
BIND, CONS1, CONS2, FAIL, ARG = "Bind", "Cons1", "Cons2", "Fail", "Arg"
ALT1, ALT2, WHERE = "Alt1", "Alt2", "Where"
BANG1, BANG2 = "Bang1", "Bang2"
PRIM1, PRIMARG, PRIM2 = "Prim1", "PrimArg", "Prim2"

PURE_RULES = (
    APP1, APP2, SAT, VAR, UPDATE,
    RETURN1A, RETURN1B, RETURN1C, RETURN2,
    BIND, CONS1, CONS2, FAIL, ARG, ALT1, ALT2, WHERE,
)


def upd(stack: Sequence[Continuation]) -> Set[str]:
    """Locations marked for update in a return stack."""
    return {k.loc for k in stack if isinstance(k, UpdateK)}


# ---------------------------------------------------------------------------
# The transition function


def _pattern_whnf_match(pattern: Pattern, w: Expr) -> Optional[bool]:
    """Does the whnf match the constructor/literal pattern?  None when the
    shapes are incomparable (an ill-typed program)."""
    if isinstance(pattern, ConPat) and isinstance(w, Con):
        return w.tag == pattern.tag and len(w.args) == len(pattern.subpatterns)
    if isinstance(pattern, LitIntPat) and isinstance(w, LitInt):
        return w.value == pattern.value
    return None


def step(c: Config) -> StepOutcome:
    """Fire the single applicable rule, or report why none does."""
    heap, control, stack = c.heap, c.control, c.stack

    def stepped(rule: str, **changes) -> Stepped:
        changes.setdefault("steps", c.steps + 1)
        return Stepped(rule, replace(c, **changes))

    if isinstance(control, EvalC):
        e = control.expr

        if isinstance(e, App):
            if not isinstance(e.arg, Var):
                return Error("IllFormed", "application argument is not a variable", c)
            return stepped(APP1, control=EvalC(e.fun), stack=(PushArg(e.arg.name),) + stack)

        if isinstance(e, Var):
            content = heap.get(e.name)
            if content is None:
                if e.name in upd(stack):
                    return Error("BlackHole", f"blackhole: {e.name} depends on itself", c)
                return Error("UnboundVariable", f"unbound variable: {e.name}", c)
            return stepped(
                VAR,
                heap=heap.remove(e.name),
                control=EvalC(content),
                stack=(UpdateK(e.name),) + stack,
            )

        if isinstance(e, PrimApp):
            if e.op not in PRIM_OPS or len(e.args) != PRIM_OPS[e.op]:
                return Error("IllFormed", f"bad primitive application: {e.op}", c)
            return stepped(
                PRIM1,
                control=EvalC(e.args[0]),
                stack=(PrimK(e.op, (), tuple(e.args[1:])),) + stack,
            )

        if isinstance(e, MatchAbs):
            a = arity(e.matching)
            if a is None:
                return Error("IllFormed", "alternative branches of unequal arity", c)
            if a == 0:
                return stepped(
                    SAT,
                    control=MatchC((), e.matching),
                    stack=(EndMatch(e.fn_name),) + stack,
                )
            # fall through: an abstraction of positive arity is a whnf

        if is_whnf(e):
            if not stack:
                return FinalWhnf(c)
            top, rest = stack[0], stack[1:]
            if isinstance(top, PushArg):
                if isinstance(e, MatchAbs):
                    return stepped(
                        APP2,
                        control=EvalC(
                            MatchAbs(ArgSupply(Var(top.loc), e.matching), e.fn_name)
                        ),
                        stack=rest,
                    )
                return Error("NoRuleApplies", "argument applied to a non-function", c)
            if isinstance(top, UpdateK):
                return stepped(UPDATE, heap=heap.set(top.loc, e), stack=rest)
            if isinstance(top, PatK):
                ok = _pattern_whnf_match(top.pattern, e)
                if ok is None:
                    return Error("NoRuleApplies", "scrutinee shape does not fit pattern", c)
                if not ok:
                    return stepped(FAIL, control=MatchC((), Fail()), stack=rest)
                if isinstance(top.pattern, ConPat) and top.pattern.subpatterns:
                    assert isinstance(e, Con)
                    locs = [a.name for a in e.args if isinstance(a, Var)]
                    if len(locs) != len(e.args):
                        return Error("IllFormed", "constructor with non-variable fields", c)
                    m = supply_chain(zip(locs, top.pattern.subpatterns), top.rest)
                else:
                    m = top.rest
                return stepped(CONS2, control=MatchC(top.args, m), stack=rest)
            if isinstance(top, BangK):
                return stepped(BANG2, control=MatchC(top.args, top.rest), stack=rest)
            if isinstance(top, PrimK):
                done = top.done + (e,)
                if top.pending:
                    return stepped(
                        PRIMARG,
                        control=EvalC(top.pending[0]),
                        stack=(PrimK(top.op, done, top.pending[1:]),) + rest,
                    )
                try:
                    result, heap2 = apply_prim(top.op, done, heap, c.supply)
                except PrimError as err:
                    return Error("PrimError", str(err), c)
                return stepped(PRIM2, heap=heap2, control=EvalC(result), stack=rest)
            return Error("NoRuleApplies", f"value meets {type(top).__name__}", c)

        return Error("NoRuleApplies", f"no rule for expression {type(e).__name__}", c)

    # Matching mode
    args, m = control.args, control.matching

    if isinstance(m, Return):
        if args:
            wrapped = Return(apply_args(m.expr, args), m.annotation)
            return stepped(RETURN1A, control=MatchC((), wrapped))
        if stack and isinstance(stack[0], EndMatch):
            return stepped(RETURN1B, control=EvalC(m.expr), stack=stack[1:])
        if stack and isinstance(stack[0], AltK):
            return stepped(RETURN2, stack=stack[1:])
        return Error("NoRuleApplies", "return with no matching continuation", c)

    if isinstance(m, Fail):
        if args:
            return stepped(RETURN1C, control=MatchC((), m))
        if stack and isinstance(stack[0], AltK):
            top = stack[0]
            return stepped(ALT2, control=MatchC(top.args, top.matching), stack=stack[1:])
        if stack and isinstance(stack[0], EndMatch):
            return StuckFail(c, fn_name=stack[0].fn_name)
        return Error("NoRuleApplies", "failure with no matching continuation", c)

    if isinstance(m, PatMatch):
        if not args:
            return Error("IllFormed", "pattern match with empty argument stack", c)
        y, rest_args = args[0], args[1:]
        p = m.pattern
        if isinstance(p, VarPat):
            return stepped(BIND, control=MatchC(rest_args, rename_matching(m.rest, {p.name: y})))
        if isinstance(p, WildPat):
            return stepped(BIND, control=MatchC(rest_args, m.rest))
        if isinstance(p, (ConPat, LitIntPat)):
            return stepped(
                CONS1,
                control=EvalC(Var(y)),
                stack=(PatK(rest_args, p, m.rest),) + stack,
            )
        if isinstance(p, BangPat):
            return stepped(
                BANG1,
                control=EvalC(Var(y)),
                stack=(BangK(rest_args, rename_matching(m.rest, {p.name: y})),) + stack,
            )
        return Error("IllFormed", f"unknown pattern {type(p).__name__}", c)

    if isinstance(m, ArgSupply):
        if not isinstance(m.arg, Var):
            return Error("IllFormed", "argument supply with non-variable argument", c)
        return stepped(ARG, control=MatchC((m.arg.name,) + args, m.rest))

    if isinstance(m, Alt):
        return stepped(
            ALT1,
            control=MatchC(args, m.left),
            stack=(AltK(args, m.right),) + stack,
        )

    if isinstance(m, Where):
        supply = c.supply
        subst = {x: supply.fresh(x) for x, _ in m.bindings}
        heap2 = heap.set_many(
            (subst[x], rename_expr(rhs, subst)) for x, rhs in m.bindings
        )
        return stepped(
            WHERE,
            heap=heap2,
            control=MatchC(args, rename_matching(m.body, subst)),
        )

    return Error("NoRuleApplies", f"no rule for matching {type(m).__name__}", c)


# ---------------------------------------------------------------------------
# Independent rule applicability (used by the determinism property tests)


def applicable_rules(c: Config) -> List[str]:
    """Names of every rule whose left-hand side and side conditions match
    the configuration, checked independently of :func:`step`."""
    heap, control, stack = c.heap, c.control, c.stack
    out: List[str] = []
    top = stack[0] if stack else None

    if isinstance(control, EvalC):
        e = control.expr
        if isinstance(e, App):
            out.append(APP1)
        if isinstance(e, Var) and e.name in heap:
            out.append(VAR)
        if isinstance(e, PrimApp):
            out.append(PRIM1)
        if isinstance(e, MatchAbs):
            a = arity(e.matching)
            if a == 0:
                out.append(SAT)
            if a is not None and a > 0 and isinstance(top, PushArg):
                out.append(APP2)
        if is_whnf(e):
            if isinstance(top, UpdateK):
                out.append(UPDATE)
            if isinstance(top, PatK):
                ok = _pattern_whnf_match(top.pattern, e)
                if ok is True:
                    out.append(CONS2)
                elif ok is False:
                    out.append(FAIL)
            if isinstance(top, BangK):
                out.append(BANG2)
            if isinstance(top, PrimK):
                out.append(PRIM2 if not top.pending else PRIMARG)
    else:
        args, m = control.args, control.matching
        if isinstance(m, Return):
            if args:
                out.append(RETURN1A)
            else:
                if isinstance(top, EndMatch):
                    out.append(RETURN1B)
                if isinstance(top, AltK):
                    out.append(RETURN2)
        if isinstance(m, Fail):
            if args:
                out.append(RETURN1C)
            elif isinstance(top, AltK):
                out.append(ALT2)
        if isinstance(m, PatMatch) and args:
            p = m.pattern
            if isinstance(p, (VarPat, WildPat)):
                out.append(BIND)
            if isinstance(p, (ConPat, LitIntPat)):
                out.append(CONS1)
            if isinstance(p, BangPat):
                out.append(BANG1)
        if isinstance(m, ArgSupply):
            out.append(ARG)
        if isinstance(m, Alt):
            out.append(ALT1)
        if isinstance(m, Where):
            out.append(WHERE)
    return out


# ---------------------------------------------------------------------------
# Driving the machine


def run(
    c: Config,
    fuel: int = 100_000,
    on_step: Optional[Callable[[Config, str, Config], None]] = None,
):
    """Iterate :func:`step` until a terminal outcome or fuel runs out.

    Returns the final outcome together with the rule trace.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    trace: List[str] = []
    for _ in range(fuel):
        outcome = step(c)
        if isinstance(outcome, Stepped):
            if on_step is not None:
                on_step(c, outcome.rule, outcome.config)
            trace.append(outcome.rule)
            c = outcome.config
            continue
        return outcome, trace
    return Error("FuelExhausted", f"no result after {len(trace)} steps", c), trace


# ---------------------------------------------------------------------------
# Forcing structures to normal form, one redex at a time


def find_redex(heap: Heap, e: Expr, _seen: Optional[Set[str]] = None) -> Optional[str]:
    """Leftmost-outermost location under constructors that still holds an
    unevaluated expression, or None when the structure is fully evaluated.
    Cycles count as evaluated."""
    seen = _seen if _seen is not None else set()
    if isinstance(e, Var):
        if e.name in seen:
            return None
        seen.add(e.name)
        content = heap.get(e.name)
        if content is None:
            return None
        if isinstance(content, Var):
            return find_redex(heap, content, seen)
        if not is_whnf(content):
            return e.name
        return find_redex(heap, content, seen)
    if isinstance(e, Con):
        for a in e.args:
            found = find_redex(heap, a, seen)
            if found is not None:
                return found
        return None
    return None


def force(loc: str, c: Config) -> Config:
    """Schedule evaluation of the next redex; the caller found ``loc`` via
    :func:`find_redex` on a finished configuration."""
    if c.stack:
        raise ValueError("force expects a finished configuration")
    return replace(c, control=EvalC(Var(loc)))


# ---------------------------------------------------------------------------
# Balanced-evaluation trace grammars

EXPR_MODE, MATCH_MODE = "expr", "match"

# (firing mode, frame pushed, mode after) for rules that open a bracket.
_OPENERS = {
    APP1: (EXPR_MODE, "arg", EXPR_MODE),
    VAR: (EXPR_MODE, "upd", EXPR_MODE),
    SAT: (EXPR_MODE, "$", MATCH_MODE),
    ALT1: (MATCH_MODE, "?", MATCH_MODE),
    CONS1: (MATCH_MODE, "@", EXPR_MODE),
}

# (firing mode, frame popped, mode after, whether more rules may follow
# at the same level) for rules that close a bracket.
_CLOSERS = {
    APP2: (EXPR_MODE, "arg", EXPR_MODE, True),
    UPDATE: (EXPR_MODE, "upd", EXPR_MODE, False),
    RETURN1B: (MATCH_MODE, "$", EXPR_MODE, True),
    ALT2: (MATCH_MODE, "?", MATCH_MODE, True),
    RETURN2: (MATCH_MODE, "?", MATCH_MODE, False),
    CONS2: (EXPR_MODE, "@", MATCH_MODE, True),
    FAIL: (EXPR_MODE, "@", MATCH_MODE, False),
}

# (firing mode, whether more rules may follow) for stack-neutral rules.
_NEUTRAL = {
    ARG: (MATCH_MODE, True),
    BIND: (MATCH_MODE, True),
    WHERE: (MATCH_MODE, True),
    RETURN1A: (MATCH_MODE, True),
    RETURN1C: (MATCH_MODE, True),
}


def check_balanced_trace(rules: Sequence[str], mode: str) -> bool:
    """Parse a rule trace against the balanced-evaluation grammar for
    expressions (``mode='expr'``) or matchings (``mode='match'``)."""
    if mode not in (EXPR_MODE, MATCH_MODE):
        raise ValueError(f"unknown mode: {mode}")
    state = _GrammarState(mode)
    for r in rules:
        if not state.consume(r):
            return False
    return state.accepting()


class _GrammarState:
    """Deterministic bracket automaton equivalent to the trace grammars."""

    __slots__ = ("mode", "brackets", "open")

    def __init__(self, mode: str):
        self.mode = mode
        self.brackets: List[Tuple[str, str]] = []  # (frame, mode-to-restore)
        self.open = True

    def consume(self, r: str) -> bool:
        if r in _OPENERS:
            fire_mode, frame, after = _OPENERS[r]
            if not self.open or self.mode != fire_mode:
                return False
            self.brackets.append((frame, self.mode))
            self.mode = after
            return True
        if r in _CLOSERS:
            fire_mode, frame, after, more = _CLOSERS[r]
            if self.mode != fire_mode or not self.brackets:
                return False
            top, _restore = self.brackets[-1]
            if top != frame:
                return False
            self.brackets.pop()
            self.mode = after
            self.open = more
            return True
        if r in _NEUTRAL:
            fire_mode, more = _NEUTRAL[r]
            if not self.open or self.mode != fire_mode:
                return False
            self.open = more
            return True
        return False

    def accepting(self) -> bool:
        return not self.brackets

    def snapshot(self):
        return (tuple(self.brackets), self.mode, self.open)

    def restore(self, snap) -> None:
        brackets, mode, open_ = snap
        self.brackets = list(brackets)
        self.mode = mode
        self.open = open_


GRAMMAR_TERMINALS = tuple(PURE_RULES)

_GRAMMAR_PRODUCTIONS = {
    "B": (
        (APP1, "B", APP2, "B"),
        (SAT, "B'", RETURN1B, "B"),
        (VAR, "B", UPDATE),
        (),
    ),
    "B'": (
        (ALT1, "B'", ALT2, "B'"),
        (ALT1, "B'", RETURN2),
        (CONS1, "B", CONS2, "B'"),
        (CONS1, "B", FAIL),
        (ARG, "B'"),
        (BIND, "B'"),
        (RETURN1A, "B'"),
        (RETURN1C, "B'"),
        (WHERE, "B'"),
        (),
    ),
}


def enumerate_grammar(mode: str, max_len: int) -> Set[Tuple[str, ...]]:
    """All terminal strings of length <= max_len derivable from the trace
    grammar, by brute-force expansion of sentential forms."""
    start = "B" if mode == EXPR_MODE else "B'"
    seen = set()
    results: Set[Tuple[str, ...]] = set()
    work = [(start,)]
    while work:
        form = work.pop()
        if form in seen:
            continue
        seen.add(form)
        terminals = sum(1 for s in form if s not in _GRAMMAR_PRODUCTIONS)
        if terminals > max_len:
            continue
        idx = next((i for i, s in enumerate(form) if s in _GRAMMAR_PRODUCTIONS), None)
        if idx is None:
            results.add(form)
            continue
        for prod in _GRAMMAR_PRODUCTIONS[form[idx]]:
            work.append(form[:idx] + prod + form[idx + 1 :])
    return results


def enumerate_accepted(mode: str, max_len: int) -> Set[Tuple[str, ...]]:
    """All strings of length <= max_len accepted by the checker, found by
    depth-first search over valid automaton prefixes."""
    results: Set[Tuple[str, ...]] = set()
    state = _GrammarState(mode)

    def go(prefix: Tuple[str, ...]):
        if state.accepting():
            results.add(prefix)
        if len(prefix) == max_len:
            return
        for r in GRAMMAR_TERMINALS:
            snap = state.snapshot()
            if state.consume(r):
                go(prefix + (r,))
            state.restore(snap)

    go(())
    return results
