"""Command-line interface: flags, exit codes, output formats."""

import json

import pytest

from haskelite.cli import main

INSERT = (
    "insert x [] = [x]\n"
    "insert x (y:ys) | x<=y = x:y:ys\n"
    "                | otherwise = y:insert x ys\n"
)


@pytest.fixture()
def insert_file(tmp_path):
    f = tmp_path / "insert.hs"
    f.write_text(INSERT)
    return str(f)


class TestRun:
    def test_plain_trace(self, insert_file, capsys):
        code = main(["run", insert_file, "-e", "insert 3 [1,2,4]"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "  insert 3 [1, 2, 4]"
        assert lines[1] == "  { 3 <= 1 = False }"
        assert lines[2] == "= .... False"
        assert lines[-1] == "= [1, 2, 3, 4]"
        assert lines[-2] == "  { final result }"

    def test_json_trace(self, insert_file, capsys):
        code = main(["run", insert_file, "-e", "insert 3 [1,2,4]", "--json"])
        out = capsys.readouterr().out
        assert code == 0
        entries = json.loads(out)
        assert entries[-1]["rendered"] == "[1, 2, 3, 4]"
        assert entries[-1]["justification"] == "final result"

    def test_plain_and_json_carry_the_same_triples(self, insert_file, capsys):
        main(["run", insert_file, "-e", "insert 3 [1,2,4]", "--json"])
        entries = json.loads(capsys.readouterr().out)
        main(["run", insert_file, "-e", "insert 3 [1,2,4]"])
        plain = capsys.readouterr().out.splitlines()
        renders = [plain[0].strip()] + [
            line[2:] for line in plain if line.startswith("= ")
        ]
        justs = [line.strip()[2:-2] for line in plain if line.strip().startswith("{ ")]
        assert renders == [e["rendered"] for e in entries]
        assert justs == [e["justification"] for e in entries[1:]]

    def test_match_failure_exit_code(self, tmp_path, capsys):
        f = tmp_path / "p.hs"
        f.write_text("f 0 = 1\n")
        assert main(["run", str(f), "-e", "f 2"]) == 2

    def test_type_error_exit_code(self, tmp_path, capsys):
        f = tmp_path / "p.hs"
        f.write_text("f x = x + True\n")
        assert main(["run", str(f), "-e", "f 1"]) == 3

    def test_syntax_error_exit_code(self, tmp_path, capsys):
        f = tmp_path / "p.hs"
        f.write_text("f x = (\n")
        assert main(["run", str(f), "-e", "f 1"]) == 4

    def test_fuel_exit_code(self, tmp_path, capsys):
        f = tmp_path / "p.hs"
        f.write_text("spin n = spin (n+1)\n")
        assert main(["run", str(f), "-e", "spin 0", "--fuel", "300"]) == 5

    def test_no_force_stops_at_whnf(self, insert_file, capsys):
        code = main(["run", insert_file, "-e", "insert 3 [1,2,4]", "--no-force"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[-1] == "= 1 : (insert 3 [2, 4])"

    def test_dots_flag(self, insert_file, capsys):
        main(["run", insert_file, "-e", "insert 3 [1,2,4]", "--dots", "2"])
        out = capsys.readouterr().out
        assert "= .. False" in out

    def test_machine_steps_flag(self, insert_file, capsys):
        main(["run", insert_file, "-e", "insert 3 [1,2,4]", "--machine-steps"])
        out = capsys.readouterr().out
        assert "{ Sat }" in out and "{ Update }" in out


class TestType:
    def test_lambda(self, capsys):
        assert main(["type", "-e", "\\x -> x"]) == 0
        assert capsys.readouterr().out.strip() == "a -> a"

    def test_with_program_context(self, insert_file, capsys):
        assert main(["type", insert_file, "-e", "insert"]) == 0
        assert capsys.readouterr().out.strip() == "Int -> [Int] -> [Int]"

    def test_ill_typed_expression(self, capsys):
        assert main(["type", "-e", "1 + True"]) == 3
