"""Ontology element model: loading, validation, inheritance, and export.

The schema knows five element kinds.  Concepts form a single-inheritance
forest via is_a and point at other elements via has_a relations; variables,
attributes, equations, and rules hang off concepts.  Everything is keyed by
a globally unique name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

import yaml

from .equations import EquationTemplate, template_from_text
from .errors import (
    CyclicInheritance,
    DanglingReference,
    DuplicateName,
    ParseError,
    UnknownElement,
)

# ---------------------------------------------------------------------------
# element model
# ---------------------------------------------------------------------------


class ElementKind(Enum):
    CONCEPT = "Concept"
    VARIABLE = "Variable"
    ATTRIBUTE = "Attribute"
    EQUATION = "Equation"
    RULE = "Rule"


@dataclass(frozen=True)
class HasRelation:
    """A named has_a relation from one concept to another."""

    name: str
    concept: str
    multiplicity: str  # one | many


@dataclass(frozen=True)
class ConceptDef:
    name: str
    parent: str | None = None
    synonyms: tuple[str, ...] = ()
    comment: str = ""
    has_concepts: tuple[HasRelation, ...] = ()
    has_variables: tuple[str, ...] = ()
    has_attributes: tuple[str, ...] = ()


@dataclass(frozen=True)
class VariableDef:
    name: str
    symbol: str
    si_unit: str
    owner_concept: str
    positivity: str = "unrestricted"  # or must_be_positive

    @property
    def must_be_positive(self) -> bool:
        return self.positivity == "must_be_positive"


@dataclass(frozen=True)
class AttributeDef:
    name: str
    owner_concept: str
    allowed_values: tuple[str, ...]


@dataclass(frozen=True)
class EnableEquation:
    equation: str


@dataclass(frozen=True)
class SetAttribute:
    attribute: str  # concept-qualified, e.g. isentropic@ChangeOfState
    value: str


@dataclass(frozen=True)
class RuleDef:
    name: str
    condition: tuple[tuple[str, str], ...]  # (attr@Concept, required value)
    consequence: Union[EnableEquation, SetAttribute]


@dataclass(frozen=True)
class OntologySchema:
    concepts: dict[str, ConceptDef] = field(default_factory=dict)
    variables: dict[str, VariableDef] = field(default_factory=dict)
    attributes: dict[str, AttributeDef] = field(default_factory=dict)
    equations: dict[str, EquationTemplate] = field(default_factory=dict)
    rules: dict[str, RuleDef] = field(default_factory=dict)

    @property
    def equation_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.equations))

    def element_kind(self, name: str) -> ElementKind:
        if name in self.concepts:
            return ElementKind.CONCEPT
        if name in self.variables:
            return ElementKind.VARIABLE
        if name in self.attributes:
            return ElementKind.ATTRIBUTE
        if name in self.equations:
            return ElementKind.EQUATION
        if name in self.rules:
            return ElementKind.RULE
        raise UnknownElement(f"unknown ontology element {name!r}", name=name)


def base_variable(variables: Mapping[str, object], slot_name: str) -> str | None:
    """Map a slot variable name to its declared variable, if any.

    Slot names may carry a state suffix (T_1, T_2); the declared variable
    wins over suffix stripping so names like Q_12 stay intact.
    """
    if slot_name in variables:
        return slot_name
    if slot_name.endswith(("_1", "_2")) and slot_name[:-2] in variables:
        return slot_name[:-2]
    return None


def slot_state_index(variables: Mapping[str, object], slot_name: str) -> str | None:
    """Return "1" or "2" for state-suffixed slot names, else None."""
    if slot_name in variables:
        return None
    if slot_name.endswith(("_1", "_2")) and slot_name[:-2] in variables:
        return slot_name[-1]
    return None


# ---------------------------------------------------------------------------
# SI unit expressions
# ---------------------------------------------------------------------------

_SI_SYMBOLS = {
    "m", "kg", "s", "A", "K", "mol", "cd",  # base
    "Hz", "N", "Pa", "J", "W", "C", "V",    # derived
    "1",                                      # dimensionless
}

_UNIT_TOKEN = re.compile(r"\s*([A-Za-z]+|1|\^|/|·|\*|\(|\)|-?\d+)")


def is_valid_si_unit(text: str) -> bool:
    """Check a unit expression like "J/(kg·K)", "m^3", or "1"."""
    tokens = []
    pos = 0
    while pos < len(text):
        match = _UNIT_TOKEN.match(text, pos)
        if match is None:
            return False
        tokens.append(match.group(1))
        pos = match.end()
    if not tokens:
        return False

    index = 0

    def peek():
        return tokens[index] if index < len(tokens) else None

    def parse_factor() -> bool:
        nonlocal index
        token = peek()
        if token == "(":
            index += 1
            if not parse_unit():
                return False
            if peek() != ")":
                return False
            index += 1
        elif token is not None and (token in _SI_SYMBOLS):
            index += 1
        else:
            return False
        if peek() == "^":
            index += 1
            exponent = peek()
            if exponent is None or not re.fullmatch(r"-?\d+", exponent):
                return False
            index += 1
        return True

    def parse_unit() -> bool:
        nonlocal index
        if not parse_factor():
            return False
        while peek() in ("/", "·", "*"):
            index += 1
            if not parse_factor():
                return False
        return True

    return parse_unit() and index == len(tokens)


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

_SECTIONS = ("concepts", "variables", "attributes", "equations", "rules")

SourceSet = Union[str, Sequence[str], Mapping[str, str]]


def _coerce_sources(sources: SourceSet) -> list[tuple[str, str]]:
    if isinstance(sources, str):
        return [("<schema>", sources)]
    if isinstance(sources, Mapping):
        return [(str(label), text) for label, text in sources.items()]
    return [(f"<schema {i}>", text) for i, text in enumerate(sources)]


def _parse_yaml(label: str, text: str):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        column = mark.column + 1 if mark is not None else None
        raise ParseError(f"malformed schema document: {exc}", source=label,
                         line=line, column=column) from exc


def _fail(label: str, where: str, problem: str) -> ParseError:
    return ParseError(f"{where}: {problem}", source=label)


def _expect_mapping(label, where, value):
    if not isinstance(value, dict):
        raise _fail(label, where, "expected a mapping")
    return value


def _expect_str(label, where, value):
    if not isinstance(value, str) or not value:
        raise _fail(label, where, "expected a non-empty string")
    return value


def _expect_str_list(label, where, value):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise _fail(label, where, "expected a list of strings")
    return value


def _symbolic(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return str(value)


def _check_fields(label, where, body, allowed):
    for key in body:
        if key not in allowed:
            raise _fail(label, where, f"unknown field {key!r}")


def _build_concept(label: str, name: str, body) -> ConceptDef:
    where = f"concept {name}"
    if body is None:
        body = {}
    body = _expect_mapping(label, where, body)
    _check_fields(label, where, body,
                  {"is_a", "synonyms", "comment", "has", "variables",
                   "attributes"})
    parent = body.get("is_a")
    if parent is not None:
        parent = _expect_str(label, where, parent)
    synonyms = tuple(_expect_str_list(label, where, body.get("synonyms", [])))
    comment = body.get("comment", "")
    if not isinstance(comment, str):
        raise _fail(label, where, "comment must be a string")
    relations = []
    seen_relations = set()
    for rel_name, rel_body in _expect_mapping(
            label, where, body.get("has", {}) or {}).items():
        rel_where = f"{where}, relation {rel_name}"
        rel_body = _expect_mapping(label, rel_where, rel_body)
        _check_fields(label, rel_where, rel_body, {"concept", "multiplicity"})
        target = _expect_str(label, rel_where, rel_body.get("concept"))
        multiplicity = rel_body.get("multiplicity", "one")
        if multiplicity not in ("one", "many"):
            raise _fail(label, rel_where, "multiplicity must be one or many")
        if rel_name in seen_relations:
            raise _fail(label, where, f"duplicate relation name {rel_name!r}")
        seen_relations.add(rel_name)
        relations.append(HasRelation(name=rel_name, concept=target,
                                     multiplicity=multiplicity))
    return ConceptDef(
        name=name, parent=parent, synonyms=synonyms, comment=comment,
        has_concepts=tuple(relations),
        has_variables=tuple(_expect_str_list(label, where,
                                             body.get("variables", []))),
        has_attributes=tuple(_expect_str_list(label, where,
                                              body.get("attributes", []))))


def _build_variable(label: str, name: str, body) -> VariableDef:
    where = f"variable {name}"
    body = _expect_mapping(label, where, body)
    _check_fields(label, where, body, {"symbol", "si_unit", "owner",
                                       "positive"})
    positive = body.get("positive", False)
    if not isinstance(positive, bool):
        raise _fail(label, where, "positive must be a boolean")
    return VariableDef(
        name=name,
        symbol=_expect_str(label, where, body.get("symbol", name)),
        si_unit=_expect_str(label, where, body.get("si_unit")),
        owner_concept=_expect_str(label, where, body.get("owner")),
        positivity="must_be_positive" if positive else "unrestricted")


def _build_attribute(label: str, name: str, body) -> AttributeDef:
    where = f"attribute {name}"
    body = _expect_mapping(label, where, body)
    _check_fields(label, where, body, {"owner", "values"})
    raw = body.get("values")
    if not isinstance(raw, list) or not raw:
        raise _fail(label, where, "values must be a non-empty list")
    values = tuple(_symbolic(v) for v in raw)
    if len(set(values)) != len(values):
        raise _fail(label, where, "values must be duplicate-free")
    return AttributeDef(name=name,
                        owner_concept=_expect_str(label, where,
                                                  body.get("owner")),
                        allowed_values=values)


def _build_equation(label: str, name: str, body) -> EquationTemplate:
    where = f"equation {name}"
    body = _expect_mapping(label, where, body)
    _check_fields(label, where, body, {"lhs", "rhs", "guards"})
    lhs = _expect_str(label, where, body.get("lhs"))
    rhs = _expect_str(label, where, body.get("rhs"))
    guards = tuple(_expect_str_list(label, where, body.get("guards", [])))
    return template_from_text(name, lhs, rhs, guards)


def _build_rule(label: str, name: str, body) -> RuleDef:
    where = f"rule {name}"
    body = _expect_mapping(label, where, body)
    _check_fields(label, where, body, {"if", "then"})
    condition_body = _expect_mapping(label, where, body.get("if"))
    if not condition_body:
        raise _fail(label, where, "condition must not be empty")
    condition = tuple(sorted((key, _symbolic(value))
                             for key, value in condition_body.items()))
    then = _expect_mapping(label, where, body.get("then"))
    if set(then) == {"enable_equation"}:
        consequence = EnableEquation(
            equation=_expect_str(label, where, then["enable_equation"]))
    elif set(then) == {"set_attribute"}:
        target = _expect_mapping(label, where, then["set_attribute"])
        _check_fields(label, where, target, {"attribute", "value"})
        consequence = SetAttribute(
            attribute=_expect_str(label, where, target.get("attribute")),
            value=_symbolic(target.get("value")))
    else:
        raise _fail(label, where,
                    "consequence must be enable_equation or set_attribute")
    return RuleDef(name=name, condition=condition, consequence=consequence)


_BUILDERS = {
    "concepts": _build_concept,
    "variables": _build_variable,
    "attributes": _build_attribute,
    "equations": _build_equation,
    "rules": _build_rule,
}


def load_schema(sources: SourceSet) -> OntologySchema:
    """Load and fully validate a schema from YAML document texts."""
    sections: dict[str, dict[str, object]] = {s: {} for s in _SECTIONS}
    owner_label: dict[str, str] = {}
    for label, text in _coerce_sources(sources):
        data = _parse_yaml(label, text)
        if data is None:
            continue
        if not isinstance(data, dict):
            raise ParseError("schema document must be a mapping",
                             source=label)
        for section, entries in data.items():
            if section not in sections:
                raise ParseError(f"unknown top-level section {section!r}",
                                 source=label)
            if entries is None:
                continue
            entries = _expect_mapping(label, f"section {section}", entries)
            for name, body in entries.items():
                if not isinstance(name, str) or not name:
                    raise _fail(label, f"section {section}",
                                "element names must be non-empty strings")
                if name in owner_label:
                    raise DuplicateName(
                        f"element name {name!r} defined more than once "
                        f"(in {owner_label[name]} and {label})", name=name)
                owner_label[name] = label
                sections[section][name] = _BUILDERS[section](label, name,
                                                             body)

    schema = OntologySchema(
        concepts=dict(sections["concepts"]),
        variables=dict(sections["variables"]),
        attributes=dict(sections["attributes"]),
        equations=dict(sections["equations"]),
        rules=dict(sections["rules"]))
    _check_references(schema)
    _check_inheritance_cycles(schema)
    _check_resolved_structure(schema)
    return schema


def _dangling(missing: str, referrer: str):
    raise DanglingReference(missing, referrer)


def _check_references(schema: OntologySchema) -> None:
    for concept in schema.concepts.values():
        referrer = f"concept {concept.name}"
        if concept.parent is not None and concept.parent not in schema.concepts:
            _dangling(concept.parent, referrer)
        for relation in concept.has_concepts:
            if relation.concept not in schema.concepts:
                _dangling(relation.concept, referrer)
        for variable in concept.has_variables:
            if variable not in schema.variables:
                _dangling(variable, referrer)
        for attribute in concept.has_attributes:
            if attribute not in schema.attributes:
                _dangling(attribute, referrer)
    for variable in schema.variables.values():
        if variable.owner_concept not in schema.concepts:
            _dangling(variable.owner_concept, f"variable {variable.name}")
        if not is_valid_si_unit(variable.si_unit):
            raise ParseError(
                f"variable {variable.name}: si_unit {variable.si_unit!r} "
                f"is not a well-formed SI unit expression")
    for attribute in schema.attributes.values():
        if attribute.owner_concept not in schema.concepts:
            _dangling(attribute.owner_concept, f"attribute {attribute.name}")
    for template in schema.equations.values():
        referrer = f"equation {template.name}"
        for slot in template.slots:
            if slot.qualifier is None:
                raise ParseError(
                    f"{referrer}: slot {slot.name!r} lacks a concept "
                    f"qualifier")
            if slot.qualifier not in schema.concepts:
                _dangling(slot.qualifier, referrer)
            if base_variable(schema.variables, slot.name) is None:
                _dangling(slot.name, referrer)
        for guard in template.guards:
            if guard not in schema.rules:
                _dangling(guard, referrer)
    for rule in schema.rules.values():
        referrer = f"rule {rule.name}"
        for key, value in rule.condition:
            _check_attribute_reference(schema, key, value, referrer)
        if isinstance(rule.consequence, EnableEquation):
            if rule.consequence.equation not in schema.equations:
                _dangling(rule.consequence.equation, referrer)
        else:
            _check_attribute_reference(schema, rule.consequence.attribute,
                                       rule.consequence.value, referrer)


def _check_attribute_reference(schema: OntologySchema, key: str, value: str,
                               referrer: str) -> None:
    if "@" not in key:
        raise ParseError(f"{referrer}: attribute reference {key!r} must be "
                         f"written attribute@Concept")
    attr_name, qualifier = key.split("@", 1)
    if qualifier not in schema.concepts:
        _dangling(qualifier, referrer)
    if attr_name == "concept":
        # specialization condition: the value names a concept
        if value not in schema.concepts:
            _dangling(value, referrer)
        return
    if attr_name not in schema.attributes:
        _dangling(attr_name, referrer)
    if value not in schema.attributes[attr_name].allowed_values:
        raise ParseError(
            f"{referrer}: value {value!r} is not allowed for attribute "
            f"{attr_name} (allowed: "
            f"{', '.join(schema.attributes[attr_name].allowed_values)})")


def _check_inheritance_cycles(schema: OntologySchema) -> None:
    cleared: set[str] = set()
    for start in schema.concepts:
        chain = []
        seen_here = set()
        node: str | None = start
        while node is not None and node not in cleared:
            if node in seen_here:
                cycle = chain[chain.index(node):] + [node]
                raise CyclicInheritance(cycle)
            seen_here.add(node)
            chain.append(node)
            node = schema.concepts[node].parent
        cleared.update(chain)


def _check_resolved_structure(schema: OntologySchema) -> None:
    for concept_name in schema.concepts:
        resolved = resolve_concept(schema, concept_name)
        for variable in resolved.has_variables:
            if schema.variables[variable].owner_concept not in _ancestry(
                    schema, concept_name):
                # ownership must sit on the concept (or an ancestor) that
                # lists the variable
                raise ParseError(
                    f"variable {variable} is listed by {concept_name} but "
                    f"owned by {schema.variables[variable].owner_concept}")
    for variable in schema.variables.values():
        own = schema.concepts[variable.owner_concept].has_variables
        if variable.name not in own:
            raise ParseError(
                f"variable {variable.name} names owner "
                f"{variable.owner_concept}, which does not list it")
    for attribute in schema.attributes.values():
        own = schema.concepts[attribute.owner_concept].has_attributes
        if attribute.name not in own:
            raise ParseError(
                f"attribute {attribute.name} names owner "
                f"{attribute.owner_concept}, which does not list it")
    for template in schema.equations.values():
        for slot in template.slots:
            base = base_variable(schema.variables, slot.name)
            resolved = resolve_concept(schema, slot.qualifier)
            if base not in resolved.has_variables:
                raise ParseError(
                    f"equation {template.name}: slot {slot.key} refers to a "
                    f"variable that {slot.qualifier} does not have")


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------


def _ancestry(schema: OntologySchema, name: str) -> list[str]:
    """Concept plus all ancestors, from the concept up to the root."""
    if name not in schema.concepts:
        raise UnknownElement(f"unknown concept {name!r}", name=name)
    chain = []
    node: str | None = name
    while node is not None:
        chain.append(node)
        node = schema.concepts[node].parent
    return chain


def concept_ancestry(schema: OntologySchema, name: str) -> tuple[str, ...]:
    return tuple(_ancestry(schema, name))


def resolve_concept(schema: OntologySchema, name: str) -> ConceptDef:
    """Merged view of a concept: own relations plus everything inherited.

    Child entries with the same relation name override parent entries;
    variable and attribute lists keep root-first order.
    """
    chain = list(reversed(_ancestry(schema, name)))  # root first
    relations: dict[str, HasRelation] = {}
    variables: list[str] = []
    attributes: list[str] = []
    for node in chain:
        definition = schema.concepts[node]
        for relation in definition.has_concepts:
            relations[relation.name] = relation
        for variable in definition.has_variables:
            if variable not in variables:
                variables.append(variable)
        for attribute in definition.has_attributes:
            if attribute not in attributes:
                attributes.append(attribute)
    own = schema.concepts[name]
    return ConceptDef(
        name=own.name, parent=own.parent, synonyms=own.synonyms,
        comment=own.comment, has_concepts=tuple(relations.values()),
        has_variables=tuple(variables), has_attributes=tuple(attributes))


def specializations_of(schema: OntologySchema, name: str) -> list[str]:
    """Direct is_a children, lexicographic."""
    if name not in schema.concepts:
        raise UnknownElement(f"unknown concept {name!r}", name=name)
    return sorted(child for child, definition in schema.concepts.items()
                  if definition.parent == name)


def canonical_concept(schema: OntologySchema, name: str) -> str:
    """Resolve a concept name or synonym to the canonical name."""
    if name in schema.concepts:
        return name
    for concept in schema.concepts.values():
        if name in concept.synonyms:
            return concept.name
    raise UnknownElement(f"unknown concept {name!r}", name=name)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def serialize_schema(schema: OntologySchema) -> str:
    """Render a schema back to one YAML document; load(serialize(s)) == s."""
    document: dict[str, dict] = {}
    concepts = {}
    for name in sorted(schema.concepts):
        concept = schema.concepts[name]
        body: dict = {}
        if concept.parent is not None:
            body["is_a"] = concept.parent
        if concept.synonyms:
            body["synonyms"] = list(concept.synonyms)
        if concept.comment:
            body["comment"] = concept.comment
        if concept.has_concepts:
            body["has"] = {
                relation.name: {"concept": relation.concept,
                                "multiplicity": relation.multiplicity}
                for relation in concept.has_concepts}
        if concept.has_variables:
            body["variables"] = list(concept.has_variables)
        if concept.has_attributes:
            body["attributes"] = list(concept.has_attributes)
        concepts[name] = body
    document["concepts"] = concepts
    document["variables"] = {
        name: {"symbol": v.symbol, "si_unit": v.si_unit,
               "owner": v.owner_concept, "positive": v.must_be_positive}
        for name, v in sorted(schema.variables.items())}
    document["attributes"] = {
        name: {"owner": a.owner_concept, "values": list(a.allowed_values)}
        for name, a in sorted(schema.attributes.items())}
    equations = {}
    for name in sorted(schema.equations):
        template = schema.equations[name]
        body = {"lhs": template.lhs_text, "rhs": template.rhs_text}
        if template.guards:
            body["guards"] = list(template.guards)
        equations[name] = body
    document["equations"] = equations
    rules = {}
    for name in sorted(schema.rules):
        rule = schema.rules[name]
        if isinstance(rule.consequence, EnableEquation):
            then = {"enable_equation": rule.consequence.equation}
        else:
            then = {"set_attribute": {"attribute": rule.consequence.attribute,
                                      "value": rule.consequence.value}}
        rules[name] = {"if": dict(rule.condition), "then": then}
    document["rules"] = rules
    return yaml.safe_dump(document, sort_keys=False, default_flow_style=False,
                          allow_unicode=True)


# ---------------------------------------------------------------------------
# graph export
# ---------------------------------------------------------------------------


def export_graph(schema: OntologySchema,
                 filter: Iterable[str] | None = None) -> dict:
    """Node-link document of the schema, optionally induced on concepts."""
    nodes: list[dict] = []
    edges: list[dict] = []

    def add_node(name: str, kind: ElementKind):
        nodes.append({"id": name, "kind": kind.value})

    def add_edge(source: str, target: str, label: str):
        edges.append({"from": source, "to": target, "label": label})

    for name in sorted(schema.concepts):
        add_node(name, ElementKind.CONCEPT)
    for name in sorted(schema.variables):
        add_node(name, ElementKind.VARIABLE)
    for name in sorted(schema.attributes):
        add_node(name, ElementKind.ATTRIBUTE)
    for name in sorted(schema.equations):
        add_node(name, ElementKind.EQUATION)
    for name in sorted(schema.rules):
        add_node(name, ElementKind.RULE)

    for name in sorted(schema.concepts):
        concept = schema.concepts[name]
        if concept.parent is not None:
            add_edge(name, concept.parent, "is_a")
        for relation in concept.has_concepts:
            add_edge(name, relation.concept, f"has_a_{relation.name}")
        for variable in concept.has_variables:
            add_edge(name, variable, "has_a_variable")
        for attribute in concept.has_attributes:
            add_edge(name, attribute, "has_a_attribute")
    for name in sorted(schema.equations):
        template = schema.equations[name]
        seen = set()
        for slot in template.slots:
            base = base_variable(schema.variables, slot.name)
            if base is not None and base not in seen:
                seen.add(base)
                add_edge(name, base, "has_a_variable")
        for guard in template.guards:
            add_edge(name, guard, "has_a_guard")
    for name in sorted(schema.rules):
        rule = schema.rules[name]
        seen = set()
        for key, value in rule.condition:
            attr_name, qualifier = key.split("@", 1)
            if attr_name == "concept":
                if value not in seen:
                    seen.add(value)
                    add_edge(name, value, "has_a_concept")
            elif attr_name not in seen:
                seen.add(attr_name)
                add_edge(name, attr_name, "has_a_attribute")
        if isinstance(rule.consequence, SetAttribute):
            attr_name = rule.consequence.attribute.split("@", 1)[0]
            if attr_name != "concept" and attr_name not in seen:
                add_edge(name, attr_name, "has_a_attribute")

    if filter is not None:
        wanted = list(filter)
        for name in wanted:
            if name not in schema.concepts:
                raise UnknownElement(
                    f"graph filter names unknown concept {name!r}", name=name)
        kept = set(wanted)
        owned = set(schema.variables) | set(schema.attributes)
        attached = {edge["to"] for edge in edges
                    if edge["from"] in kept and edge["to"] in owned}
        keep = kept | attached
        nodes = [node for node in nodes if node["id"] in keep]
        edges = [edge for edge in edges
                 if edge["from"] in keep and edge["to"] in keep]

    return {"nodes": nodes, "edges": edges}


_KIND_FILL = {
    "Concept": "white",
    "Variable": "lightblue",
    "Attribute": "lightyellow",
    "Equation": "orange",
    "Rule": "lightgrey",
}


def graph_to_dot(graph: dict, name: str = "ontology") -> str:
    """Graphviz DOT rendering of an export_graph document."""
    lines = [f"digraph {name} {{", "  rankdir=LR;",
             "  node [shape=box, style=filled];"]
    for node in graph["nodes"]:
        fill = _KIND_FILL.get(node["kind"], "white")
        lines.append(f'  "{node["id"]}" [fillcolor="{fill}"];')
    for edge in graph["edges"]:
        style = ", style=dashed" if edge["label"] == "is_a" else ""
        lines.append(f'  "{edge["from"]}" -> "{edge["to"]}" '
                     f'[label="{edge["label"]}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def validate_instance_document(schema: OntologySchema, doc: str) -> list[str]:
    """Check a problem document against the schema; returns violations."""
    from .documents import validate_document

    return validate_document(schema, doc)
