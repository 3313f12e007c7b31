"""Solution reports: an explainable record of one solve run.

The JSON form is lossless (full float precision, every step, the audit);
the Markdown form is for reading, with values shown at six significant
digits.  Both are pure functions of the report object.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equations import residual as equation_residual
from .errors import ParseError
from .reasoner import AuditEntry, SolutionPath
from .problem import ProblemInstance


@dataclass(frozen=True)
class SolutionStep:
    index: int
    equation: str
    rendered: str
    guards: tuple[str, ...]
    variable: str
    value: float
    unit: str
    residual: float


@dataclass(frozen=True)
class SolutionReport:
    process_class: str
    material: str | None
    attributes: dict[str, dict[str, str]]
    knowns: dict[str, float]
    provenance: dict[str, str]
    targets: tuple[str, ...]
    results: dict[str, float]
    undetermined: tuple[str, ...]
    units: dict[str, str]
    steps: tuple[SolutionStep, ...]
    audit: tuple[AuditEntry, ...]
    warnings: tuple[str, ...]


def render_report(
    problem: ProblemInstance,
    path: SolutionPath,
    valuation: dict[str, float],
    audit: list[AuditEntry],
    *,
    warnings: tuple[str, ...] = (),
    undetermined: tuple[str, ...] = (),
) -> SolutionReport:
    units: dict[str, str] = {}
    for instance in problem.instances.values():
        for base, name in instance.variable_instances.items():
            units[name] = problem.schema.variables[base].si_unit
    units = {name: units[name] for name in sorted(units)}

    steps = tuple(
        SolutionStep(
            index=i,
            equation=inst.name,
            rendered=inst.render(),
            guards=tuple(inst.template.guards),
            variable=var,
            value=valuation[var],
            unit=units.get(var, ""),
            residual=equation_residual(inst, valuation),
        )
        for i, (inst, var) in enumerate(path.steps, start=1)
    )
    attributes = {
        instance_id: dict(sorted(problem.instances[instance_id].effective_attributes().items()))
        for instance_id in sorted(problem.instances)
        if problem.instances[instance_id].effective_attributes()
    }
    return SolutionReport(
        process_class=problem.process_class.name,
        material=problem.material_name,
        attributes=attributes,
        knowns={name: problem.knowns[name] for name in sorted(problem.knowns)},
        provenance={name: problem.provenance[name] for name in sorted(problem.provenance)},
        targets=tuple(problem.targets),
        results={t: valuation[t] for t in problem.targets if t in valuation},
        undetermined=tuple(undetermined),
        units=units,
        steps=steps,
        audit=tuple(audit),
        warnings=tuple(warnings),
    )


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _with_unit(value: float, unit: str) -> str:
    if unit in ("", "1"):  # dimensionless
        return _fmt(value)
    return f"{_fmt(value)} {unit}"


def to_markdown(report: SolutionReport) -> str:
    lines: list[str] = ["# Solution report", ""]
    lines.append(f"- process class: {report.process_class}")
    if report.material is not None:
        lines.append(f"- material: {report.material}")
    for instance_id, attrs in report.attributes.items():
        rendered = ", ".join(f"{a}={v}" for a, v in attrs.items())
        lines.append(f"- attributes of {instance_id}: {rendered}")
    lines.append("")

    lines.append("## Given")
    lines.append("")
    for name, value in report.knowns.items():
        origin = report.provenance.get(name, "user")
        lines.append(f"- {name} = {_with_unit(value, report.units.get(name, ''))} ({origin})")
    lines.append("")

    lines.append("## Solution steps")
    lines.append("")
    if not report.steps:
        lines.append("No steps were needed; every requested value was already given.")
    for step in report.steps:
        guard_note = f" [guards: {', '.join(step.guards)}]" if step.guards else ""
        lines.append(f"{step.index}. `{step.equation}: {step.rendered}`{guard_note}")
        lines.append(
            f"   solves {step.variable} = {_with_unit(step.value, step.unit)}"
            f" (residual {step.residual:.3g})"
        )
    lines.append("")

    lines.append("## Results")
    lines.append("")
    if not report.results:
        lines.append("(none)")
    for name, value in report.results.items():
        lines.append(f"- {name} = {_with_unit(value, report.units.get(name, ''))}")
    lines.append("")

    if report.undetermined:
        lines.append("## Undetermined")
        lines.append("")
        for name in report.undetermined:
            lines.append(f"- {name}: not reachable from the given values")
        lines.append("")

    lines.append("## Consistency audit")
    lines.append("")
    for entry in report.audit:
        lines.append(f"- `{entry.equation}`: residual {entry.residual:.3g}")
    if not report.audit:
        lines.append("(no fully determined equations)")
    lines.append("")

    if report.warnings:
        lines.append("## Warnings")
        lines.append("")
        for warning in report.warnings:
            lines.append(f"- {warning}")
        lines.append("")

    return "\n".join(lines)


def to_json(report: SolutionReport) -> dict:
    """JSON-ready dict preserving full float precision."""
    return {
        "process_class": report.process_class,
        "material": report.material,
        "attributes": report.attributes,
        "knowns": report.knowns,
        "provenance": report.provenance,
        "targets": list(report.targets),
        "results": report.results,
        "undetermined": list(report.undetermined),
        "units": report.units,
        "steps": [
            {
                "index": step.index,
                "equation": step.equation,
                "rendered": step.rendered,
                "guards": list(step.guards),
                "variable": step.variable,
                "value": step.value,
                "unit": step.unit,
                "residual": step.residual,
            }
            for step in report.steps
        ],
        "audit": [
            {
                "equation": entry.equation,
                "rendered": entry.rendered,
                "residual": entry.residual,
            }
            for entry in report.audit
        ],
        "warnings": list(report.warnings),
    }


def report_from_json(doc: dict) -> SolutionReport:
    """Rebuild a report from its JSON form; inverse of to_json."""
    try:
        steps = tuple(
            SolutionStep(
                index=item["index"],
                equation=item["equation"],
                rendered=item["rendered"],
                guards=tuple(item["guards"]),
                variable=item["variable"],
                value=float(item["value"]),
                unit=item["unit"],
                residual=float(item["residual"]),
            )
            for item in doc["steps"]
        )
        audit = tuple(
            AuditEntry(
                equation=item["equation"],
                rendered=item["rendered"],
                residual=float(item["residual"]),
            )
            for item in doc["audit"]
        )
        return SolutionReport(
            process_class=doc["process_class"],
            material=doc["material"],
            attributes={k: dict(v) for k, v in doc["attributes"].items()},
            knowns={k: float(v) for k, v in doc["knowns"].items()},
            provenance=dict(doc["provenance"]),
            targets=tuple(doc["targets"]),
            results={k: float(v) for k, v in doc["results"].items()},
            undetermined=tuple(doc["undetermined"]),
            units=dict(doc["units"]),
            steps=steps,
            audit=audit,
            warnings=tuple(doc["warnings"]),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed report document: {exc!r}") from exc
