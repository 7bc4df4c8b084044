"""Tests for scenario parsing, running and reporting."""

import pytest

from diffalg.errors import ExpressionSyntaxError, FieldError, ScenarioError, UnknownVariableError
from diffalg.scenario.parser import parse_scenario
from diffalg.scenario.runner import matches, run_scenario
from diffalg.scenario.tasks import TASK_HANDLERS, ElementFact, IdealFact, TaskContext

from tests.conftest import poly

SQUARES = """
[ring]
field = F2
variables = X, Y
relations = "X^2", "Y^2"

[derivation D]
X = "X"
Y = "Y"

[task 1]
kind = well_defined
derivation = D
expect_verified = true

[task 2]
kind = max_differential
derivations = D
save_as = B
expect_generators = "Y, X"

[task 3]
kind = length
ideal = B
expect_length = 1
"""


@pytest.fixture
def squares_scenario():
    return parse_scenario(SQUARES, name="squares")


class TestParser:
    """Tests for reading scenario files."""

    def test_sections(self, squares_scenario):
        assert squares_scenario.ring.length == 4
        assert set(squares_scenario.derivations) == {"D"}
        assert [t.kind for t in squares_scenario.tasks] == ["well_defined", "max_differential", "length"]
        assert squares_scenario.tasks[1].get("save_as") == "B"
        assert squares_scenario.tasks[2].expectations == {"length": "1"}

    def test_missing_ring(self):
        with pytest.raises(ScenarioError, match=r"\[ring\]"):
            parse_scenario("[task 1]\nkind = length\n")

    def test_unknown_task_kind(self):
        with pytest.raises(ScenarioError, match="unknown task kind"):
            parse_scenario(SQUARES + "\n[task 4]\nkind = integrate\n")

    def test_unknown_section(self):
        with pytest.raises(ScenarioError, match="unknown section"):
            parse_scenario(SQUARES + "\n[notes]\ntext = hello\n")

    def test_unnumbered_task(self):
        with pytest.raises(ScenarioError, match="numbered"):
            parse_scenario(SQUARES + "\n[task last]\nkind = length\n")

    def test_duplicate_sections(self):
        with pytest.raises(ScenarioError, match="malformed"):
            parse_scenario(SQUARES + "\n[task 1]\nkind = length\n")

    def test_derivation_of_unknown_variable(self):
        with pytest.raises(UnknownVariableError):
            parse_scenario(SQUARES.replace('Y = "Y"', 'W = "Y"'))

    def test_syntax_errors_carry_the_line(self):
        with pytest.raises(ExpressionSyntaxError) as excinfo:
            parse_scenario(SQUARES.replace('"Y^2"', '"2Y^2"'))
        assert excinfo.value.line == 5

    def test_non_prime_field(self):
        with pytest.raises(FieldError):
            parse_scenario(SQUARES.replace("F2", "F4"))

    def test_task_expressions_are_read_with_the_file(self):
        with pytest.raises(ExpressionSyntaxError) as excinfo:
            parse_scenario(SQUARES + "\n[task 4]\nkind = length\nideal = X, 2Y\n")
        assert (excinfo.value.line, excinfo.value.column) == (29, 13)

    def test_expected_ideals_are_read_with_the_file(self):
        text = SQUARES + '\n[task 4]\nkind = max_differential\nderivations = D\nexpect_generators = "X, Y Z"\n'
        with pytest.raises(ExpressionSyntaxError) as excinfo:
            parse_scenario(text)
        assert (excinfo.value.line, excinfo.value.column) == (30, 27)

    def test_unknown_variable_in_a_task(self):
        with pytest.raises(UnknownVariableError):
            parse_scenario(SQUARES + "\n[task 4]\nkind = length\nideal = ideal(X, W)\n")

    def test_named_ideals_are_not_expressions(self):
        text = SQUARES + "\n[task 4]\nkind = length\nideal = m\n[task 5]\nkind = ext\nmodule = ideal(B)\n"
        assert len(parse_scenario(text).tasks) == 5


class TestMatches:
    """Tests for comparing facts with expectations."""

    def test_integers(self, squares_scenario):
        ctx = TaskContext(squares_scenario)
        assert matches(3, "3", ctx)
        assert matches(3, "<=5", ctx)
        assert matches(3, "nonzero", ctx)
        assert not matches(0, "nonzero", ctx)
        assert not matches(3, "> 3", ctx)

    def test_booleans(self, squares_scenario):
        ctx = TaskContext(squares_scenario)
        assert matches(True, "true", ctx)
        assert matches(False, "no", ctx)

    def test_ideals_compare_as_ideals(self, squares_scenario):
        ctx = TaskContext(squares_scenario)
        ring = squares_scenario.ring
        fact = IdealFact((poly(ring, "X"), poly(ring, "Y")))
        assert matches(fact, '"X + Y, Y"', ctx)
        assert matches(fact, "nonzero", ctx)
        assert not matches(fact, '"X"', ctx)
        assert matches(IdealFact(()), "0", ctx)

    def test_elements_compare_in_the_ring(self, squares_scenario):
        ctx = TaskContext(squares_scenario)
        ring = squares_scenario.ring
        assert matches(ElementFact(poly(ring, "X")), '"X + Y^2"', ctx)

    def test_tuples(self, squares_scenario):
        ctx = TaskContext(squares_scenario)
        assert matches((3, 2, 2), '"3, 2, 2"', ctx)

    def test_unreadable_expectation(self, squares_scenario):
        with pytest.raises(ScenarioError):
            matches(3, "three", TaskContext(squares_scenario))


class TestRunScenario:
    """Tests for running scenarios and printing reports."""

    def test_passing_scenario(self, squares_scenario):
        report = run_scenario(squares_scenario)
        assert report.passed
        lines = report.machine_lines()
        assert lines[0] == 'task.1.kind = "well_defined"'
        assert "task.1.verified = true" in lines
        assert 'task.2.generators = "X, Y"' in lines
        assert "task.3.length = 1" in lines
        assert lines[-1] == "scenario.status = PASS"

    def test_mismatch_fails(self):
        scenario = parse_scenario(SQUARES.replace("expect_length = 1", "expect_length = 2"))
        report = run_scenario(scenario)
        assert not report.passed
        assert report.tasks[2].status == "FAIL"
        assert report.tasks[2].mismatches == ["length: expected 2, got 1"]
        assert "task.3.status = FAIL" in report.machine_lines()

    def test_engine_errors_are_reported(self):
        text = SQUARES + "\n[task 4]\nkind = depth\nmodule = ideal(X, Y)\n[task 5]\nkind = apply\nderivation = E\nelement = X\n"
        report = run_scenario(parse_scenario(text))
        outcome = report.tasks[4]
        assert outcome.status == "ERROR"
        assert outcome.error_kind == "scenario"
        assert 'task.5.error = "scenario"' in report.machine_lines()
        assert report.tasks[3].status == "PASS"

    def test_index_errors_stay_in_their_task(self):
        text = SQUARES + "\n[task 4]\nkind = ext\nmodule = k\nindex = -1\n[task 5]\nkind = length\nideal = B\nexpect_length = 1\n"
        report = run_scenario(parse_scenario(text))
        assert report.tasks[3].status == "ERROR"
        assert report.tasks[3].error_kind == "index_range"
        assert report.tasks[4].status == "PASS"

    def test_unexpected_exceptions_stay_in_their_task(self, squares_scenario, monkeypatch):
        def broken(ctx, task):
            raise RuntimeError("boom")

        monkeypatch.setitem(TASK_HANDLERS, "length", broken)
        report = run_scenario(squares_scenario)
        assert [t.status for t in report.tasks] == ["PASS", "PASS", "ERROR"]
        assert report.tasks[2].error_kind == "internal"
        assert "RuntimeError: boom" in report.tasks[2].error
        assert 'task.3.error = "internal"' in report.machine_lines()

    def test_machine_text_has_no_timings(self, squares_scenario):
        first = run_scenario(squares_scenario).machine_text()
        second = run_scenario(parse_scenario(SQUARES, name="squares")).machine_text()
        assert first == second

    def test_human_text(self, squares_scenario):
        text = run_scenario(squares_scenario).human_text()
        assert text.startswith("Scenario squares over F2[X,Y]/(")
        assert "result: PASS (3/3 tasks)" in text
