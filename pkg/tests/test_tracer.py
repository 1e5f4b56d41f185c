"""Tracing: filtering, spans, justifications, forcing, failure modes."""

import pytest

from haskelite.program import load_program, prepare_entry
from haskelite.tracer import TraceOptions, Tracer

from helpers import justifications, renderings, run_trace

INSERT = (
    "insert x [] = [x]\n"
    "insert x (y:ys) | x<=y = x:y:ys\n"
    "                | otherwise = y:insert x ys\n"
)


class TestFiltering:
    def test_spans_cover_the_run_without_overlap(self):
        entries, _ = run_trace(INSERT, "insert 3 [1,2,4]")
        assert entries[0].span == (0, 0)
        for prev, cur in zip(entries, entries[1:]):
            assert cur.span[0] == prev.span[1]
            assert cur.span[1] >= cur.span[0]

    def test_equation_justifications_are_source_equations(self):
        entries, _ = run_trace(INSERT, "insert 3 [1,2,4]")
        source_equations = {
            "insert x [] = [x]",
            "insert x (y:ys) | x<=y = x:y:ys",
            "insert x (y:ys) | otherwise = y:insert x ys",
        }
        equation_entries = [
            e.justification for e in entries if e.justification.startswith("insert")
        ]
        assert equation_entries and set(equation_entries) <= source_equations

    def test_machine_steps_mode_shows_every_rule(self):
        program = load_program(INSERT)
        entry, _ = prepare_entry(program, "insert 3 [1,2,4]")
        opts = TraceOptions(show_machine_steps=True)
        tracer = Tracer(program.heap, program.global_names, entry, opts, program.supply)
        entries = list(tracer.entries_iter())
        rules = {e.justification for e in entries[1:]}
        assert {"Sat", "Return1B", "Var", "Update", "Where"} <= rules
        # every machine transition is one entry (the final-result entry
        # and force scheduling add no machine steps)
        rule_names = {"Sat", "Return1B", "Var", "Update", "Where", "App1", "App2",
                      "Arg", "Bind", "Alt1", "Alt2", "Cons1", "Cons2", "Fail",
                      "Return1A", "Return1C", "Return2", "Prim1", "PrimArg", "Prim2"}
        for e in entries[1:]:
            if e.justification in rule_names:
                assert e.span[1] - e.span[0] == 1


class TestForcing:
    def test_no_force_stops_at_whnf(self):
        entries, status = run_trace(INSERT, "insert 3 [1,2,4]", force_result=False)
        assert status == "done"
        assert entries[-1].justification != "final result"
        assert entries[-1].rendered == "1 : (insert 3 [2, 4])"

    def test_force_resume_matches_full_trace(self):
        program = load_program(INSERT)
        entry, _ = prepare_entry(program, "insert 3 [1,2,4]")
        opts = TraceOptions(force_result=False)
        tracer = Tracer(program.heap, program.global_names, entry, opts, program.supply)
        first = list(tracer.entries_iter())
        assert tracer.status == "done"
        tracer.enable_force()
        assert tracer.status == "running"
        rest = []
        while True:
            e = tracer.next_entry()
            if e is None:
                break
            rest.append(e)
        resumed = [e.justification for e in first + rest]

        full, _ = run_trace(INSERT, "insert 3 [1,2,4]")
        assert resumed == justifications(full)
        assert (first + rest)[-1].rendered == full[-1].rendered

    def test_infinite_structure_streams_a_prefix(self):
        entries, status = run_trace(
            "nats n = n : nats (n+1)\n",
            "nats 0",
            fuel=3_000,
            max_entries=50,
        )
        assert status in ("running", "fuel-exhausted")
        assert any(e.rendered.startswith("0 : ") for e in entries[1:])


class TestFailures:
    def test_match_failure_names_the_function(self):
        entries, status = run_trace("f 0 = 1\n", "f 2")
        assert status == "failed"
        assert entries[-1].justification == "pattern match failure in f"

    def test_head_of_empty_list(self):
        entries, status = run_trace("", "head []")
        assert status == "failed"
        assert entries[-1].justification == "pattern match failure in head"

    def test_blackhole_reported(self):
        entries, status = run_trace("loop = loop\n", "loop")
        assert status == "failed"
        assert "blackhole" in entries[-1].justification

    def test_fuel_exhaustion_status(self):
        entries, status = run_trace("spin n = spin (n+1)\n", "spin 0", fuel=500)
        assert status == "fuel-exhausted"


class TestJsonShape:
    def test_entry_fields(self):
        entries, _ = run_trace(INSERT, "insert 3 [1,2,4]")
        js = entries[1].to_json()
        assert set(js) == {"rendered", "justification", "depth", "span"}
        assert isinstance(js["span"], list) and len(js["span"]) == 2


class TestDepthDiscipline:
    def test_depth_changes_only_with_matching_continuations(self):
        """Within one emitted entry sequence, depth equals the pending
        end-of-matching marks; it may only move when those are pushed or
        popped between emissions."""
        from haskelite.machine import EndMatch, FinalWhnf, Stepped, step
        from haskelite.program import load_program, prepare_entry

        program = load_program(INSERT)
        entry, _ = prepare_entry(program, "insert 3 [1,2,4]")
        opts = TraceOptions()
        tracer = Tracer(program.heap, program.global_names, entry, opts, program.supply)
        for e in tracer.entries_iter():
            if e.justification in ("initial expression", "final result"):
                continue
            marks = sum(
                1 for k in tracer.config.stack if isinstance(k, EndMatch)
            )
            assert e.depth <= marks


class TestMoreEdges:
    def test_division_by_zero_is_a_runtime_failure(self):
        entries, status = run_trace("", "div 1 0")
        assert status == "failed"
        assert "division by zero" in entries[-1].justification

    def test_cyclic_global_forces_to_a_cut_rendering(self):
        entries, status = run_trace("ones = 1 : ones\n", "ones")
        assert status == "done"
        assert entries[-1].justification == "final result"
        assert entries[-1].rendered == "1 : ones"

    def test_take_from_cyclic_list(self):
        entries, status = run_trace("ones = 1 : ones\n", "take 3 ones")
        assert status == "done"
        assert entries[-1].rendered == "[1, 1, 1]"
