"""Interactive problem construction.

A problem instantiates a small slice of the ontology (system, material,
constants, one or two states, possibly a change of state), collects
attribute answers and known values through a dialogue, and is finalized
into an immutable-by-convention definition that the reasoner consumes.
"""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    AlreadyFinalized,
    IncompleteDefinition,
    InvalidValue,
    NonPositiveValue,
    NotANumber,
    TargetIsKnown,
    UnknownAttribute,
    UnknownElement,
    UnknownProcessClass,
    UnknownVariable,
)
from .knowledge import CONSTANTS, builtin_schema, material_lookup
from .ontology import (
    OntologySchema,
    SetAttribute,
    concept_ancestry,
    resolve_concept,
    specializations_of,
)

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# pseudo-attribute used for specialization answers
CONCEPT_CHOICE = "concept"


@dataclass(frozen=True)
class ProcessClass:
    name: str
    description: str
    state_count: int
    change_count: int


_PROCESS_CLASSES: dict[str, ProcessClass] = {}


def register_process_class(process_class: ProcessClass) -> None:
    if process_class.state_count < 1 or process_class.change_count < 0:
        raise InvalidValue(
            f"process class {process_class.name!r} must have at least one state",
        )
    _PROCESS_CLASSES[process_class.name] = process_class


def process_classes() -> list[ProcessClass]:
    return [_PROCESS_CLASSES[name] for name in sorted(_PROCESS_CLASSES)]


register_process_class(
    ProcessClass(
        name="equilibrium_state",
        description="A closed system in a single equilibrium state.",
        state_count=1,
        change_count=0,
    )
)
register_process_class(
    ProcessClass(
        name="single_change_of_state",
        description="A closed system undergoing one change between two states.",
        state_count=2,
        change_count=1,
    )
)


@dataclass
class ConceptInstance:
    id: str
    concept: str
    suffix: str = ""
    links: dict[str, str] = field(default_factory=dict)
    attribute_state: dict[str, str] = field(default_factory=dict)
    derived_attributes: dict[str, str] = field(default_factory=dict)
    variable_instances: dict[str, str] = field(default_factory=dict)

    def effective_attributes(self) -> dict[str, str]:
        merged = dict(self.derived_attributes)
        merged.update(self.attribute_state)  # explicit answers win
        return merged


@dataclass(frozen=True)
class PendingChoice:
    instance: str
    kind: str  # "specialization" or "attribute"
    attribute: str
    options: tuple[str, ...]


@dataclass
class ProblemInstance:
    process_class: ProcessClass
    schema: OntologySchema = field(compare=False, repr=False)
    data_dir: str | None = field(default=None, compare=False)
    instances: dict[str, ConceptInstance] = field(default_factory=dict)
    knowns: dict[str, float] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    targets: list[str] = field(default_factory=list)
    targets_explicit: bool = False
    material_name: str | None = None
    status: str = "building"

    def variable_names(self) -> list[str]:
        names: list[str] = []
        for instance_id in sorted(self.instances):
            names.extend(sorted(self.instances[instance_id].variable_instances.values()))
        return names

    def variable_owner(self, name: str) -> tuple[ConceptInstance, str]:
        """Instance owning variable ``name`` plus its base variable."""
        for instance in self.instances.values():
            for base, inst_name in instance.variable_instances.items():
                if inst_name == name:
                    return instance, base
        raise UnknownVariable(f"unknown variable {name!r}", name=name)

    def clone(self) -> "ProblemInstance":
        memo = {id(self.schema): self.schema}
        return copy.deepcopy(self, memo)


def _instantiate(
    problem: ProblemInstance, instance_id: str, concept: str, suffix: str = ""
) -> ConceptInstance:
    instance = ConceptInstance(id=instance_id, concept=concept, suffix=suffix)
    _attach_variables(problem, instance)
    problem.instances[instance_id] = instance
    return instance


def _attach_variables(problem: ProblemInstance, instance: ConceptInstance) -> None:
    resolved = resolve_concept(problem.schema, instance.concept)
    taken = set()
    for other in problem.instances.values():
        if other.id != instance.id:
            taken.update(other.variable_instances.values())
    for base in resolved.has_variables:
        if base in instance.variable_instances:
            continue
        name = f"{base}{instance.suffix}"
        if name in taken:
            raise InvalidValue(
                f"variable name {name!r} already used by another instance",
            )
        instance.variable_instances[base] = name


def create_problem(
    process_class: str,
    schema: OntologySchema | None = None,
    data_dir: str | None = None,
) -> ProblemInstance:
    """Instantiate the concept skeleton for one registered process class."""
    if process_class not in _PROCESS_CLASSES:
        raise UnknownProcessClass(
            f"unknown process class {process_class!r};"
            f" registered: {', '.join(sorted(_PROCESS_CLASSES))}",
            name=process_class,
        )
    cls = _PROCESS_CLASSES[process_class]
    schema = schema if schema is not None else builtin_schema(data_dir)
    problem = ProblemInstance(process_class=cls, schema=schema, data_dir=data_dir)

    system = _instantiate(problem, "system", "ClosedSystem")
    system.links["material"] = "material"
    _instantiate(problem, "material", "Material")
    _instantiate(problem, "constants", "Constants")

    if cls.state_count == 1:
        state_ids = ["state"]
        _instantiate(problem, "state", "State")
    else:
        state_ids = [f"state_{i}" for i in range(1, cls.state_count + 1)]
        for i, state_id in enumerate(state_ids, start=1):
            _instantiate(problem, state_id, "State", suffix=f"_{i}")
    system.links["state"] = ",".join(state_ids)

    for i in range(1, cls.change_count + 1):
        if cls.change_count == 1:
            change_id, suffix = "change", ""
        else:
            change_id, suffix = f"change_{i}", f"_{i}"
        change = _instantiate(problem, change_id, "ChangeOfState", suffix=suffix)
        change.links["initial_state"] = state_ids[i - 1]
        change.links["final_state"] = state_ids[i]

    constants = problem.instances["constants"]
    for base, value in (
        ("R_univ", CONSTANTS.R_univ),
        ("T0", CONSTANTS.T0),
        ("p0", CONSTANTS.p0),
    ):
        name = constants.variable_instances[base]
        problem.knowns[name] = value
        problem.provenance[name] = "constant"

    _refresh_derived_attributes(problem)
    return problem


def build_attribute_state(problem: ProblemInstance) -> dict[str, object]:
    """Concept-qualified view of all attribute answers and memberships.

    Keys are ``attr@Concept`` with the attribute's value, plus
    ``concept@Q`` mapped to the set of concepts the owning instance
    belongs to, for every ancestor Q.
    """
    state: dict[str, object] = {}
    for instance_id in sorted(problem.instances):
        instance = problem.instances[instance_id]
        ancestry = concept_ancestry(problem.schema, instance.concept)
        membership = frozenset(ancestry)
        for qualifier in ancestry:
            state.setdefault(f"{CONCEPT_CHOICE}@{qualifier}", membership)
        for attr, value in instance.effective_attributes().items():
            for qualifier in ancestry:
                state.setdefault(f"{attr}@{qualifier}", value)
    return state


def _condition_holds(state: Mapping[str, object], condition) -> bool:
    for key, expected in condition:
        actual = state.get(key)
        if actual is None:
            return False
        if isinstance(actual, (set, frozenset)):
            if expected not in actual:
                return False
        elif actual != expected:
            return False
    return True


def _refresh_derived_attributes(problem: ProblemInstance) -> None:
    schema = problem.schema
    for instance in problem.instances.values():
        instance.derived_attributes.clear()
    # fixpoint: derived answers may satisfy further rules; the iteration
    # bound keeps conflicting rules from oscillating forever
    for _ in range(len(schema.rules) + 1):
        changed = False
        state = build_attribute_state(problem)
        for rule_name in sorted(schema.rules):
            rule = schema.rules[rule_name]
            if not isinstance(rule.consequence, SetAttribute):
                continue
            if not _condition_holds(state, rule.condition):
                continue
            attr, _, qualifier = rule.consequence.attribute.partition("@")
            for instance_id in sorted(problem.instances):
                instance = problem.instances[instance_id]
                ancestry = concept_ancestry(schema, instance.concept)
                if qualifier not in ancestry:
                    continue
                resolved = resolve_concept(schema, instance.concept)
                if attr not in resolved.has_attributes:
                    continue
                if instance.derived_attributes.get(attr) == rule.consequence.value:
                    continue
                instance.derived_attributes[attr] = rule.consequence.value
                changed = True
        if not changed:
            break


def pending_choices(problem: ProblemInstance) -> list[PendingChoice]:
    """Open dialogue items, deterministically ordered.

    Specialization questions for an instance come before its attribute
    questions; instances are ordered by id, attributes by name.
    """
    choices: list[PendingChoice] = []
    for instance_id in sorted(problem.instances):
        instance = problem.instances[instance_id]
        children = specializations_of(problem.schema, instance.concept)
        if children:
            choices.append(
                PendingChoice(
                    instance=instance_id,
                    kind="specialization",
                    attribute=CONCEPT_CHOICE,
                    options=tuple(children),
                )
            )
        resolved = resolve_concept(problem.schema, instance.concept)
        answered = instance.effective_attributes()
        for attr in sorted(resolved.has_attributes):
            if attr in answered:
                continue
            allowed = problem.schema.attributes[attr].allowed_values
            choices.append(
                PendingChoice(
                    instance=instance_id,
                    kind="attribute",
                    attribute=attr,
                    options=tuple(allowed),
                )
            )
    return choices


def _require_building(problem: ProblemInstance) -> None:
    if problem.status != "building":
        raise AlreadyFinalized("problem is finalized; create a new one to edit")


def _get_instance(problem: ProblemInstance, instance_id: str) -> ConceptInstance:
    if instance_id not in problem.instances:
        raise UnknownElement(
            f"no instance {instance_id!r}; have: {', '.join(sorted(problem.instances))}",
            name=instance_id,
        )
    return problem.instances[instance_id]


def _symbolic_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _specialize(problem: ProblemInstance, instance: ConceptInstance, concept: str) -> None:
    if concept not in problem.schema.concepts:
        raise UnknownElement(f"unknown concept {concept!r}", name=concept)
    if concept == instance.concept:
        return
    ancestry = concept_ancestry(problem.schema, concept)
    if instance.concept not in ancestry:
        raise InvalidValue(
            f"{concept!r} is not a specialization of {instance.concept!r}",
        )
    instance.concept = concept
    _attach_variables(problem, instance)


def set_attribute(problem: ProblemInstance, instance_id: str, attribute: str, value) -> None:
    """Answer one dialogue item; re-setting the same value is a no-op."""
    _require_building(problem)
    instance = _get_instance(problem, instance_id)
    text = _symbolic_value(value)

    if attribute == CONCEPT_CHOICE:
        _specialize(problem, instance, text)
        _refresh_derived_attributes(problem)
        return

    resolved = resolve_concept(problem.schema, instance.concept)
    if attribute not in resolved.has_attributes:
        raise UnknownAttribute(
            f"instance {instance_id!r} ({instance.concept}) has no attribute {attribute!r}",
            attribute=attribute,
        )
    if attribute == "substance":
        # canonicalize synonyms like "Luft" before the allowed-values check
        text = material_lookup(text, problem.data_dir).name
    allowed = problem.schema.attributes[attribute].allowed_values
    if text not in allowed:
        raise InvalidValue(
            f"attribute {attribute!r} accepts {', '.join(allowed)}; got {text!r}",
        )
    instance.attribute_state[attribute] = text

    if attribute == "substance":
        record = material_lookup(text, problem.data_dir)
        problem.material_name = record.name
        if record.is_ideal_gas:
            ancestry = concept_ancestry(problem.schema, "IdealGas")
            if instance.concept in ancestry and instance.concept != "IdealGas":
                _specialize(problem, instance, "IdealGas")
    _refresh_derived_attributes(problem)


def set_value(problem: ProblemInstance, name: str, value) -> None:
    _require_building(problem)
    _, base = problem.variable_owner(name)
    if problem.provenance.get(name) == "constant":
        raise InvalidValue(f"{name!r} is a fixed constant and cannot be overridden")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NotANumber(f"value for {name!r} must be a real number, got {value!r}")
    number = float(value)
    if math.isnan(number) or math.isinf(number):
        raise NotANumber(f"value for {name!r} must be finite, got {number!r}")
    definition = problem.schema.variables[base]
    if definition.must_be_positive and number <= 0.0:
        raise NonPositiveValue(f"{name!r} must be positive, got {number!r}")
    problem.knowns[name] = number
    problem.provenance[name] = "user"
    if name in problem.targets:
        problem.targets.remove(name)


def set_targets(problem: ProblemInstance, names: Iterable[str]) -> None:
    """Choose what to solve for; an empty list selects everything unknown."""
    _require_building(problem)
    requested = list(dict.fromkeys(names))
    known_variables = set(problem.variable_names())
    for name in requested:
        if name not in known_variables:
            raise UnknownVariable(f"unknown variable {name!r}", name=name)
        if name in problem.knowns:
            raise TargetIsKnown(f"{name!r} already has a value", name=name)
    problem.targets = requested
    problem.targets_explicit = bool(requested)


def rename_variable(problem: ProblemInstance, old: str, new: str) -> None:
    """Rename a variable instance, updating values and targets atomically."""
    _require_building(problem)
    instance, base = problem.variable_owner(old)
    if not _IDENTIFIER.match(new):
        raise InvalidValue(f"{new!r} is not a valid variable name")
    if new == old:
        return
    if new in problem.variable_names():
        raise InvalidValue(f"variable name {new!r} is already in use")
    instance.variable_instances[base] = new
    if old in problem.knowns:
        problem.knowns[new] = problem.knowns.pop(old)
        problem.provenance[new] = problem.provenance.pop(old)
    problem.targets = [new if t == old else t for t in problem.targets]


def _guard_attributes(schema: OntologySchema) -> list[tuple[str, str]]:
    """(attribute, qualifier) pairs referenced by any equation guard."""
    pairs: set[tuple[str, str]] = set()
    for template in schema.equations.values():
        for rule_name in template.guards:
            for key, _ in schema.rules[rule_name].condition:
                attr, _, qualifier = key.partition("@")
                if attr != CONCEPT_CHOICE:
                    pairs.add((attr, qualifier))
    return sorted(pairs)


def missing_definitions(problem: ProblemInstance) -> list[str]:
    """What still blocks finalization, in reporting order."""
    missing: list[str] = []
    if problem.material_name is None:
        missing.append("material (set the substance attribute of the material instance)")
    guard_pairs = _guard_attributes(problem.schema)
    for instance_id in sorted(problem.instances):
        instance = problem.instances[instance_id]
        ancestry = set(concept_ancestry(problem.schema, instance.concept))
        resolved = resolve_concept(problem.schema, instance.concept)
        answered = instance.effective_attributes()
        for attr, qualifier in guard_pairs:
            if qualifier not in ancestry or attr not in resolved.has_attributes:
                continue
            if attr not in answered:
                missing.append(f"attribute {attr} of instance {instance_id}")
    return missing


def finalize(problem: ProblemInstance) -> ProblemInstance:
    """Validate completeness, inject material properties, fix targets."""
    if problem.status == "finalized":
        return problem
    missing = missing_definitions(problem)
    if missing:
        raise IncompleteDefinition(missing)

    record = material_lookup(problem.material_name, problem.data_dir)
    material = problem.instances["material"]
    for base, value in (
        ("R", record.specific_gas_constant),
        ("M", record.molar_mass),
        ("cv", record.cv),
        ("cp", record.cp),
        ("kappa", record.kappa),
    ):
        name = material.variable_instances[base]
        if name not in problem.knowns:  # user-supplied values win
            problem.knowns[name] = value
            problem.provenance[name] = "material"

    if not problem.targets_explicit:
        problem.targets = sorted(
            name for name in problem.variable_names() if name not in problem.knowns
        )
    problem.status = "finalized"
    return problem
