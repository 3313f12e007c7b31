import json
import re

import pytest

from helpers import a1_problem, change_problem, replay_report_json
from thermosolve.errors import ParseError
from thermosolve.problem import finalize
from thermosolve.reasoner import SolutionPath, solve_problem, solve_problem_detailed
from thermosolve.report import (
    render_report,
    report_from_json,
    to_json,
    to_markdown,
)


@pytest.fixture(scope="module")
def a1_report():
    return solve_problem(a1_problem())


def test_report_fields(a1_report):
    assert a1_report.process_class == "single_change_of_state"
    assert a1_report.material == "air"
    assert a1_report.targets == ("W_12", "Q_12")
    assert set(a1_report.results) == {"W_12", "Q_12"}
    assert a1_report.undetermined == ()
    assert a1_report.provenance["m"] == "user"
    assert a1_report.provenance["R"] == "material"
    assert a1_report.provenance["R_univ"] == "constant"
    assert a1_report.units["W_12"] == "J"
    assert a1_report.units["T_1"] == "K"


def test_each_target_solved_exactly_once(a1_report):
    for target in a1_report.targets:
        solved_by = [s for s in a1_report.steps if s.variable == target]
        assert len(solved_by) == 1 or target in a1_report.knowns


def test_steps_numbered_and_within_tolerance(a1_report):
    for i, step in enumerate(a1_report.steps, start=1):
        assert step.index == i
        assert step.residual <= 1e-9


def test_attributes_include_derived(a1_report):
    assert a1_report.attributes["change"]["isothermal"] == "true"
    assert a1_report.attributes["material"]["substance"] == "air"


def test_markdown_sections(a1_report):
    text = to_markdown(a1_report)
    assert text.startswith("# Solution report")
    assert text.count("## Solution steps") == 1
    assert text.count("## Given") == 1
    assert text.count("## Results") == 1
    assert text.count("## Consistency audit") == 1
    assert "## Undetermined" not in text
    assert "## Warnings" not in text


def test_markdown_step_format(a1_report):
    text = to_markdown(a1_report)
    pattern = re.compile(r"^\d+\. `[A-Za-z0-9_@]+: .+ = .+`", re.MULTILINE)
    assert len(pattern.findall(text)) == len(a1_report.steps)
    # guarded equations carry their guard names
    assert "[guards: applies_isothermal_heat]" in text


def test_markdown_six_significant_digits(a1_report):
    text = to_markdown(a1_report)
    assert "- W_12 = 59688.3 J" in text
    assert "- Q_12 = -59688.3 J" in text
    # given values list provenance
    assert "- m = 1 kg (user)" in text
    assert "- R = 287.04 J/(kg·K) (material)" in text


def test_markdown_dimensionless_without_unit(a1_report):
    text = to_markdown(a1_report)
    assert "- kappa = 1.4 (material)" in text


def test_markdown_undetermined_section():
    problem = change_problem(
        attrs={"isothermal": True, "reversible": True},
        values={"m": 1.0, "T_1": 300.0, "V_1": 1.0, "V_2": 0.5})
    report = solve_problem(problem)
    text = to_markdown(report)
    assert "## Undetermined" in text
    assert "- n_poly: not reachable" in text


def test_json_roundtrip_lossless(a1_report):
    doc = json.loads(json.dumps(to_json(a1_report)))
    assert report_from_json(doc) == a1_report


def test_json_preserves_full_precision(a1_report):
    doc = to_json(a1_report)
    assert doc["results"]["W_12"] == a1_report.results["W_12"]
    text = json.dumps(doc)
    assert json.loads(text)["results"]["W_12"] == a1_report.results["W_12"]


def test_report_replayable_from_json_alone(a1_report):
    doc = json.loads(json.dumps(to_json(a1_report)))
    valuation = replay_report_json(doc)
    assert valuation["W_12"] == pytest.approx(59688.290012378005, rel=1e-9)


def test_report_from_json_malformed():
    with pytest.raises(ParseError):
        report_from_json({"process_class": "x"})
    with pytest.raises(ParseError):
        report_from_json({})


def test_empty_path_report():
    problem = finalize(a1_problem())
    path = SolutionPath(steps=())
    report = render_report(problem, path, dict(problem.knowns), [])
    text = to_markdown(report)
    assert "No steps were needed" in text
    assert report.steps == ()
    assert report_from_json(json.loads(json.dumps(to_json(report)))) == report


def test_audit_in_markdown(a1_report):
    text = to_markdown(a1_report)
    audit_names = [entry.equation for entry in a1_report.audit]
    assert "isothermal_work@change" in audit_names
    assert "- `isothermal_work@change`: residual" in text


def test_warnings_survive_roundtrip():
    outcome = solve_problem_detailed(a1_problem())
    report = outcome.report
    if not report.warnings:  # normal for this problem
        from dataclasses import replace

        report = replace(report, warnings=("synthetic warning",))
    text = to_markdown(report)
    assert "## Warnings" in text
    doc = json.loads(json.dumps(to_json(report)))
    assert report_from_json(doc) == report
