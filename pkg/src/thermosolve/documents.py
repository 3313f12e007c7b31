"""Problem documents: a small YAML format for complete problem definitions.

The serializer emits only what the user decided (attribute answers, given
values, explicit targets); everything injected automatically (constants,
material properties, derived attributes, default targets) is recomputed
when the document is parsed, so parse(serialize(p)) rebuilds p exactly.
"""

from __future__ import annotations

from typing import Sequence

import yaml

from .errors import ParseError, ThermosolveError
from .knowledge import material_lookup
from .ontology import OntologySchema
from .problem import (
    CONCEPT_CHOICE,
    ProblemInstance,
    create_problem,
    set_attribute,
    set_targets,
    set_value,
)

_TOP_LEVEL_KEYS = ("process_class", "material", "attributes", "given", "targets")


def _auto_specialized(problem: ProblemInstance, instance_id: str) -> bool:
    """True when the instance concept is implied by the material choice."""
    if instance_id != "material" or problem.material_name is None:
        return False
    record = material_lookup(problem.material_name, problem.data_dir)
    return record.is_ideal_gas and problem.instances[instance_id].concept == "IdealGas"


def serialize_problem(problem: ProblemInstance) -> str:
    doc: dict = {"process_class": problem.process_class.name}
    if problem.material_name is not None:
        doc["material"] = problem.material_name

    baseline = create_problem(
        problem.process_class.name, schema=problem.schema, data_dir=problem.data_dir
    )
    attributes: dict[str, dict[str, str]] = {}
    for instance_id in sorted(problem.instances):
        instance = problem.instances[instance_id]
        entry: dict[str, str] = {}
        original = baseline.instances[instance_id].concept
        if instance.concept != original and not _auto_specialized(problem, instance_id):
            entry[CONCEPT_CHOICE] = instance.concept
        for attr in sorted(instance.attribute_state):
            if attr == "substance":
                continue  # carried by the material field
            entry[attr] = instance.attribute_state[attr]
        if entry:
            attributes[instance_id] = entry
    if attributes:
        doc["attributes"] = attributes

    def canonical(name: str) -> str:
        # the document vocabulary has no rename section, so variables are
        # written under their default names
        instance, base = problem.variable_owner(name)
        return f"{base}{instance.suffix}"

    given = {
        canonical(name): problem.knowns[name]
        for name in problem.knowns
        if problem.provenance.get(name) == "user"
    }
    if given:
        doc["given"] = {name: given[name] for name in sorted(given)}
    if problem.targets_explicit:
        doc["targets"] = [canonical(name) for name in problem.targets]
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def _load_yaml(text: str) -> dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            f"invalid YAML in problem document: {exc}",
            line=None if mark is None else mark.line + 1,
            column=None if mark is None else mark.column + 1,
        ) from exc
    if not isinstance(data, dict):
        raise ParseError("problem document must be a mapping")
    return data


def _check_shape(data: dict) -> list[str]:
    problems: list[str] = []
    unknown = set(data) - set(_TOP_LEVEL_KEYS)
    if unknown:
        problems.append(f"unknown document keys: {', '.join(sorted(unknown))}")
    if not isinstance(data.get("process_class"), str):
        raise ParseError("document needs a 'process_class' string field")
    if "material" in data and not isinstance(data["material"], str):
        raise ParseError("'material' must be a string")
    if "attributes" in data and not isinstance(data["attributes"], dict):
        raise ParseError("'attributes' must be a mapping of instance ids")
    if "given" in data and not isinstance(data["given"], dict):
        raise ParseError("'given' must be a mapping of variable names to numbers")
    if "targets" in data and not isinstance(data["targets"], list):
        raise ParseError("'targets' must be a list of variable names")
    return problems


def _apply_document(
    data: dict,
    schema: OntologySchema | None,
    data_dir: str | None,
    errors: list[str] | None,
) -> ProblemInstance | None:
    def attempt(fn, *args) -> bool:
        if errors is None:
            fn(*args)
            return True
        try:
            fn(*args)
            return True
        except ThermosolveError as exc:
            errors.append(str(exc))
            return False

    try:
        problem = create_problem(data["process_class"], schema=schema, data_dir=data_dir)
    except ThermosolveError as exc:
        if errors is None:
            raise
        errors.append(str(exc))
        return None

    attributes = data.get("attributes") or {}
    for instance_id in attributes:
        entry = attributes[instance_id]
        if not isinstance(entry, dict):
            message = f"attributes for {instance_id!r} must be a mapping"
            if errors is None:
                raise ParseError(message)
            errors.append(message)
            continue
        # concept choices first so attribute validity sees the final concept
        if CONCEPT_CHOICE in entry:
            attempt(set_attribute, problem, instance_id, CONCEPT_CHOICE, entry[CONCEPT_CHOICE])
        for attr in entry:
            if attr != CONCEPT_CHOICE:
                attempt(set_attribute, problem, instance_id, attr, entry[attr])

    if "material" in data:
        attempt(set_attribute, problem, "material", "substance", data["material"])

    for name, value in (data.get("given") or {}).items():
        attempt(set_value, problem, name, value)

    if data.get("targets"):
        attempt(set_targets, problem, [str(t) for t in data["targets"]])
    return problem


def parse_problem(
    text: str,
    schema: OntologySchema | None = None,
    data_dir: str | None = None,
) -> ProblemInstance:
    """Rebuild a problem (in the building state) from its document."""
    data = _load_yaml(text)
    shape_problems = _check_shape(data)
    if shape_problems:
        raise ParseError("; ".join(shape_problems))
    problem = _apply_document(data, schema, data_dir, errors=None)
    assert problem is not None
    return problem


def validate_document(
    schema: OntologySchema,
    text: str,
    data_dir: str | None = None,
) -> list[str]:
    """All conformance violations of a document; empty means it conforms."""
    data = _load_yaml(text)
    violations = _check_shape(data)
    _apply_document(data, schema, data_dir, errors=violations)
    return violations
