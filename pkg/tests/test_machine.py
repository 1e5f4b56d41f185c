"""Abstract machine: single steps, full runs, stack discipline, forcing."""

import pytest

from haskelite.heap import Heap
from haskelite.machine import (
    AltK,
    Config,
    EndMatch,
    Error,
    EvalC,
    FinalWhnf,
    MatchC,
    PatK,
    PushArg,
    Stepped,
    StuckFail,
    UpdateK,
    applicable_rules,
    check_balanced_trace,
    find_redex,
    force,
    initial_config,
    run,
    step,
    upd,
)
from haskelite.syntax import (
    App,
    ArgSupply,
    Con,
    ConPat,
    Fail,
    LitInt,
    MatchAbs,
    NameSupply,
    PatMatch,
    PrimApp,
    Return,
    Var,
    VarPat,
    Where,
)

from helpers import run_machine


def config(control, stack=(), entries=None):
    return Config(Heap(dict(entries or {})), control, tuple(stack), NameSupply())


class TestStep:
    def test_sat_then_return1b_reaches_whnf(self):
        c = config(EvalC(MatchAbs(Return(Con("C")))))
        out1 = step(c)
        assert isinstance(out1, Stepped) and out1.rule == "Sat"
        assert out1.config.control == MatchC((), Return(Con("C")))
        assert isinstance(out1.config.stack[0], EndMatch)
        out2 = step(out1.config)
        assert out2.rule == "Return1B"
        assert out2.config.control == EvalC(Con("C"))
        out3 = step(out2.config)
        assert isinstance(out3, FinalWhnf)

    def test_bind_renames_pattern_variable(self):
        m = PatMatch(VarPat("x"), Return(Var("x")))
        c = config(MatchC(("y",), m))
        out = step(c)
        assert out.rule == "Bind"
        assert out.config.control == MatchC((), Return(Var("y")))

    def test_constructor_mismatch_fails(self):
        frame = PatK((), ConPat(":", (VarPat("x"), VarPat("xs"))), Return(Var("e")))
        c = config(EvalC(Con("[]")), stack=[frame])
        out = step(c)
        assert out.rule == "Fail"
        assert out.config.control == MatchC((), Fail())

    def test_update_restores_binding(self):
        c = config(EvalC(Con("True")), stack=[UpdateK("l")])
        out = step(c)
        assert out.rule == "Update"
        assert out.config.heap.get("l") == Con("True")

    def test_blackhole_reported(self):
        c = config(EvalC(Var("l")), stack=[UpdateK("l")])
        out = step(c)
        assert isinstance(out, Error) and out.kind == "BlackHole"

    def test_unbound_variable_reported(self):
        out = step(config(EvalC(Var("nope"))))
        assert isinstance(out, Error) and out.kind == "UnboundVariable"


class TestRun:
    def test_stuck_failure(self):
        # a saturated matching that fails with no alternatives
        c = config(EvalC(MatchAbs(Fail())))
        out, trace = run(c, 100)
        assert isinstance(out, StuckFail)

    def test_leftover_arguments_on_failure_use_return1c(self):
        fn = MatchAbs(PatMatch(VarPat("x"), ArgSupply(Var("x"), Fail())))
        c = config(EvalC(App(fn, Var("a"))), entries={"a": LitInt(1)})
        out, trace = run(c, 100)
        assert isinstance(out, StuckFail)
        assert "Return1C" in trace

    def test_sharing_work_once(self):
        # let x = 1 + 1 in x + x
        entry = MatchAbs(
            Where(
                Return(PrimApp("+", (Var("x"), Var("x")))),
                (("x", PrimApp("+", (LitInt(1), LitInt(1)))),),
            )
        )
        thunk_entries = {}

        def collect(before, rule, after):
            if rule == "Var":
                loc = before.control.expr.name
                from haskelite.syntax import is_whnf

                content = before.heap.get(loc)
                if content is not None and not is_whnf(content):
                    thunk_entries[loc] = thunk_entries.get(loc, 0) + 1

        verdict = run_machine(Heap({}), entry, NameSupply(), collect=collect)
        assert verdict[0] == "value"
        assert verdict[2] == LitInt(4)
        assert all(count == 1 for count in thunk_entries.values())


class TestUpd:
    def test_empty(self):
        assert upd(()) == set()

    def test_collects_update_frames(self):
        stack = (UpdateK("a"), PushArg("y"), EndMatch(), UpdateK("b"))
        assert upd(stack) == {"a", "b"}

    def test_ignores_alternatives(self):
        assert upd((AltK((), Fail()),)) == set()


class TestForce:
    def test_fully_evaluated_structure_has_no_redex(self):
        entries = {
            "l1": Con(":", (Var("a"), Var("l2"))),
            "l2": Con("[]"),
            "a": LitInt(1),
        }
        assert find_redex(Heap(entries), Var("l1")) is None

    def test_first_unevaluated_component_found(self):
        entries = {
            "a": LitInt(1),
            "t": App(Var("f"), Var("a")),
            "spine": Con(":", (Var("a"), Var("t"))),
        }
        assert find_redex(Heap(entries), Var("spine")) == "t"

    def test_cyclic_structure_counts_as_evaluated(self):
        entries = {"ones": Con(":", (Var("one"), Var("ones"))), "one": LitInt(1)}
        assert find_redex(Heap(entries), Var("ones")) is None

    def test_force_schedules_evaluation(self):
        c = config(EvalC(Con("[]")))
        c2 = force("l", c)
        assert c2.control == EvalC(Var("l"))

    def test_depth_first_left_to_right(self):
        entries = {
            "p": Con("(,)", (Var("x"), Var("y"))),
            "x": PrimApp("+", (LitInt(1), LitInt(0))),
            "y": PrimApp("+", (LitInt(2), LitInt(0))),
        }
        assert find_redex(Heap(entries), Var("p")) == "x"


class TestDeterminism:
    def test_exactly_one_rule_on_generated_corpus(self):
        from gen import ProgramGen

        for seed in range(120):
            g = ProgramGen(seed * 31 + 1)
            entry, ns = g.program(depth=3)

            def check(before, rule, after):
                rules = applicable_rules(before)
                assert rules == [rule], (seed, rule, rules)

            run_machine(Heap({}), entry, ns.clone(), collect=check)

    def test_update_frames_popped_only_by_update(self):
        from gen import ProgramGen
        from haskelite.syntax import is_whnf

        for seed in range(120):
            g = ProgramGen(seed * 17 + 5)
            entry, ns = g.program(depth=3)

            def check(before, rule, after):
                if len(after.stack) < len(before.stack) and isinstance(
                    before.stack[0], UpdateK
                ):
                    assert rule == "Update"
                    assert is_whnf(after.heap.get(before.stack[0].loc))

            run_machine(Heap({}), entry, ns.clone(), collect=check)


class TestForceToCompletion:
    def test_pair_components_forced_to_values(self):
        from haskelite.pretty import render_value
        from helpers import run_machine
        from haskelite.heap import Heap

        entries = {
            "p": Con("(,)", (Var("x"), Var("y"))),
            "x": PrimApp("+", (LitInt(1), LitInt(0))),
            "y": PrimApp("+", (LitInt(1), LitInt(0))),
        }
        heap = Heap(entries)
        ns = NameSupply()
        c = Config(heap, EvalC(Var("p")), (), ns)
        out, _ = run(c, 1000)
        assert isinstance(out, FinalWhnf)
        cfg = out.config
        root = cfg.control.expr
        while True:
            loc = find_redex(cfg.heap, root)
            if loc is None:
                break
            out, _ = run(force(loc, cfg), 1000)
            assert isinstance(out, FinalWhnf)
            cfg = out.config
        assert render_value(root, cfg.heap, set()) == "(1, 1)"


class TestDynamicSoundness:
    PROGRAMS = [
        ("", "length (map (\\x -> x + 1) [1,2,3])", "3"),
        ("", "zipWith (\\a b -> (a, b)) [1] [2]", "[(1, 2)]"),
        ("", "filter (\\x -> x /= 2) [1,2,3]", "[1, 3]"),
        ("", "foldr (\\x acc -> x : acc) [] [1,2]", "[1, 2]"),
        ("", "(\\f x -> f (f x)) (\\n -> n * n) 2", "16"),
        ("", "[1,2] == [1,2]", "True"),
        ("", "[1,2] == [1,3]", "False"),
        ("", "(1, (2, 3)) == (1, (2, 3))", "True"),
        ("", "'a' == 'a'", "True"),
        ("", "\"abc\" == \"abd\"", "False"),
        ("", "if 1 < 2 then 'y' else 'n'", "'y'"),
        ("", "let xs = 1 : xs in take 3 xs", "[1, 1, 1]"),
        ("", "case [1,2] of\n  [] -> 0\n  (x:_) -> x", "1"),
        ("", "div 7 2", "3"),
        ("", "mod 7 2", "1"),
        ("", "div (-7) 2", "-4"),
        (
            "nodups (x:xs@(y:ys)) | x==y = nodups xs\n"
            "nodups (x:xs) = x:nodups xs\n"
            "nodups [] = []\n",
            "nodups [1,1,2,2,2,3]",
            "[1, 2, 3]",
        ),
        (
            "count (Just 0) = 100\ncount (Just n) = n\ncount Nothing = 0\n",
            "count (Just 0) + count (Just 7) + count Nothing",
            "107",
        ),
        ("", "'a' == 'b'", "False"),
        (
            "isEven 0 = True\nisEven n = isOdd (n - 1)\n"
            "isOdd 0 = False\nisOdd n = isEven (n - 1)\n",
            "isEven 9",
            "False",
        ),
        (
            "qsort [] = []\n"
            "qsort (p:xs) = qsort (filter (\\a -> a < p) xs)"
            " ++ (p : qsort (filter (\\a -> a >= p) xs))\n",
            "qsort [3,1,4,1,5,9,2,6]",
            "[1, 1, 2, 3, 4, 5, 6, 9]",
        ),
        (
            "fib 0 = 0\nfib 1 = 1\nfib n = fib (n-1) + fib (n-2)\n",
            "fib 13",
            "233",
        ),
        (
            "sumTo n = go 0 n\n"
            "  where go acc k | k <= 0 = acc\n"
            "                 | otherwise = go (acc + k) (k - 1)\n",
            "sumTo 10",
            "55",
        ),
        (
            "parity n = isEven n\n"
            "  where isEven k = if k == 0 then True else isOdd (k - 1)\n"
            "        isOdd k = if k == 0 then False else isEven (k - 1)\n",
            "parity 8",
            "True",
        ),
        ("-- only comments here\n", "force ([1+1], (2+2, [3+3]))", "([2], (4, [6]))"),
    ]

    def test_accepted_programs_never_hit_shape_errors(self):
        from helpers import run_trace

        for src, expr, expected in self.PROGRAMS:
            entries, status = run_trace(src, expr)
            assert status == "done", (expr, status, entries[-1].justification)
            assert entries[-1].rendered == expected, expr
