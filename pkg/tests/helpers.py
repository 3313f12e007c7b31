"""Shared problem builders used across the test modules."""

from __future__ import annotations

from thermosolve.problem import (
    create_problem,
    set_attribute,
    set_targets,
    set_value,
)

PROCESS_FLAGS = (
    "adiabatic",
    "isobaric",
    "isochoric",
    "isothermal",
    "polytropic",
    "reversible",
)


def change_problem(material="air", attrs=None, values=None, targets=(), schema=None):
    """single_change_of_state problem with all process flags answered."""
    problem = create_problem("single_change_of_state", schema=schema)
    set_attribute(problem, "material", "substance", material)
    flags = {name: False for name in PROCESS_FLAGS}
    flags.update(attrs or {})
    for name, value in flags.items():
        set_attribute(problem, "change", name, value)
    for name, value in (values or {}).items():
        set_value(problem, name, value)
    set_targets(problem, list(targets))
    return problem


def equilibrium_problem(material="air", values=None, targets=(), schema=None):
    problem = create_problem("equilibrium_state", schema=schema)
    set_attribute(problem, "material", "substance", material)
    for name, value in (values or {}).items():
        set_value(problem, name, value)
    set_targets(problem, list(targets))
    return problem


def a1_problem(targets=("W_12", "Q_12"), extra=None):
    """Isothermal reversible compression of air to half the volume."""
    values = {"m": 1.0, "T_1": 300.0, "V_1": 1.0, "V_2": 0.5}
    values.update(extra or {})
    return change_problem(
        attrs={"isothermal": True, "reversible": True},
        values=values,
        targets=targets,
    )


def replay_report_json(doc, tolerance=1e-9):
    """Re-derive a JSON report from nothing but its own text.

    Each step's rendered equation is parsed back into an expression pair and
    must balance, within tolerance, under the knowns plus the values of the
    steps before it. Returns the final valuation.
    """
    from thermosolve.expressions import evaluate, parse_expression

    valuation = dict(doc["knowns"])
    for step in doc["steps"]:
        lhs_text, sep, rhs_text = step["rendered"].partition(" = ")
        assert sep, f"step {step['index']} is not an equation: {step['rendered']!r}"
        valuation[step["variable"]] = step["value"]
        lhs = evaluate(parse_expression(lhs_text), None, valuation)
        rhs = evaluate(parse_expression(rhs_text), None, valuation)
        err = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
        assert err <= tolerance, (
            f"step {step['index']} ({step['equation']}) does not replay:"
            f" residual {err}")
    for name, value in doc["results"].items():
        assert valuation[name] == value
    return valuation
