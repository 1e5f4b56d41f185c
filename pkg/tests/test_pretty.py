"""Rendering: list sugar, cons chains, operators, cycles, round trips."""

import pytest

from haskelite.heap import Heap
from haskelite.parser import parse_expression
from haskelite.pretty import render_expr, render_value
from haskelite.program import load_program, prepare_entry
from haskelite.syntax import (
    App,
    Con,
    LitChar,
    LitInt,
    PrimApp,
    Var,
)

from helpers import renderings, run_trace


def heap(**entries):
    return Heap(entries)


class TestValues:
    def test_full_list_uses_brackets(self):
        h = heap(a=LitInt(1), b=LitInt(2), t=Con(":", (Var("b"), Var("n"))), n=Con("[]"))
        assert render_expr(Con(":", (Var("a"), Var("t"))), h) == "[1, 2]"

    def test_thunk_tail_uses_cons(self):
        h = heap(
            a=LitInt(1),
            t=App(App(Var("insert"), Var("x")), Var("ys")),
            x=LitInt(3),
            ys=Con("[]"),
        )
        out = render_expr(Con(":", (Var("a"), Var("t"))), h, globals={"insert"})
        assert out == "1 : (insert 3 [])"

    def test_tuple(self):
        h = heap(a=LitInt(3), b=LitInt(6))
        assert render_expr(Con("(,)", (Var("a"), Var("b"))), h) == "(3, 6)"

    def test_nested_operator_parenthesization(self):
        e = PrimApp("*", (PrimApp("*", (LitInt(1), LitInt(2))), LitInt(3)))
        assert render_expr(e, heap()) == "(1 * 2) * 3"
        e2 = PrimApp("+", (LitInt(1), PrimApp("+", (LitInt(1), LitInt(0)))))
        assert render_expr(e2, heap()) == "1 + (1 + 0)"

    def test_operator_section_renders_in_parens(self):
        h = heap()
        assert render_expr(Var("*"), h, globals={"*"}) == "(*)"

    def test_applied_operator_renders_infix(self):
        h = heap(f=Var("*"), a=LitInt(1), b=LitInt(2))
        e = App(App(Var("f"), Var("a")), Var("b"))
        assert render_expr(e, h, globals={"*"}) == "1 * 2"

    def test_string_sugar(self):
        h = heap(
            a=LitChar("h"),
            b=LitChar("i"),
            t=Con(":", (Var("b"), Var("n"))),
            n=Con("[]"),
        )
        assert render_expr(Con(":", (Var("a"), Var("t"))), h) == '"hi"'

    def test_char(self):
        assert render_expr(LitChar("\n"), heap()) == "'\\n'"

    def test_cyclic_list_cut_after_first_traversal(self):
        h = heap(ones=Con(":", (Var("one"), Var("ones"))), one=LitInt(1))
        out = render_expr(Var("ones"), h, globals={"ones"})
        assert out == "ones"
        out2 = render_expr(Con(":", (Var("one"), Var("ones"))), h, globals={"ones"})
        assert out2 == "1 : ones"

    def test_local_cycle_cut(self):
        h = heap(xs=Con(":", (Var("one"), Var("xs"))), one=LitInt(1))
        assert render_expr(Var("xs"), h) == "1 : xs"


class TestRoundTrip:
    @pytest.mark.parametrize(
        "text",
        [
            "[1, 2, 3, 4]",
            "(3, 6)",
            "True",
            "[]",
            "[[1], [2, 3]]",
            "'x'",
            '"hi"',
            "[(1, 2), (3, 4)]",
            "Just 3",
            "-7",
        ],
    )
    def test_forced_values_reparse(self, text):
        program = load_program("")
        entry, _ = prepare_entry(program, text)
        entries, status = run_trace("", text)
        assert status == "done"
        rendered = entries[-1].rendered
        # the rendering of a value parses back to the same value
        reparsed = parse_expression(rendered)
        entries2, _ = run_trace("", rendered)
        assert entries2[-1].rendered == rendered


class TestTraceRenderings:
    def test_guard_context_is_dots(self):
        entries, _ = run_trace(
            "insert x [] = [x]\n"
            "insert x (y:ys) | x<=y = x:y:ys\n"
            "                | otherwise = y:insert x ys\n",
            "insert 3 [1,2,4]",
        )
        assert entries[1].rendered == ".... False"
        assert entries[1].depth == 1

    def test_configurable_dots(self):
        entries, _ = run_trace(
            "insert x [] = [x]\n"
            "insert x (y:ys) | x<=y = x:y:ys\n"
            "                | otherwise = y:insert x ys\n",
            "insert 3 [1,2,4]",
            dots_per_level=2,
        )
        assert entries[1].rendered == ".. False"

    def test_partial_application_renders_by_name(self):
        entries, _ = run_trace(
            "add3 x y z = x+y+z\napply f = f 1\n",
            "apply (add3 1 2)",
        )
        assert entries[0].rendered == "apply (add3 1 2)"
