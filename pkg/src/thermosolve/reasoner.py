"""Equation instantiation, reachability, path extraction, and execution.

The reasoner turns a finalized problem into concrete equation instances,
propagates known values over the bipartite equation/variable graph, picks
the subset of firings a target actually needs, executes it numerically,
and audits every fully determined equation so an inconsistent input can
never produce a silently wrong report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .equations import EquationInstance, guards_satisfied, residual, solve_for
from .errors import (
    DomainError,
    DuplicateName,
    InconsistentInput,
    InvalidValue,
    NotSolvable,
    UnboundSlot,
    UnknownElement,
)
from .ontology import OntologySchema, base_variable, concept_ancestry, slot_state_index
from .problem import ConceptInstance, ProblemInstance, build_attribute_state, finalize

UNDIRECTED = "undirected"
VAR_TO_EQ = "var_to_eq"
EQ_TO_VAR = "eq_to_var"


def _is_kind(schema: OntologySchema, concept: str, kind: str) -> bool:
    return kind in concept_ancestry(schema, concept)


def classify_template(schema: OntologySchema, template) -> str:
    """How often a template is instantiated: per change, per state, or once."""
    per_change = False
    per_state = False
    for slot in template.slots:
        qualifier = slot.qualifier
        if _is_kind(schema, qualifier, "ChangeOfState"):
            per_change = True
        elif _is_kind(schema, qualifier, "State"):
            if slot_state_index(schema.variables, slot.name) is not None:
                per_change = True
            else:
                per_state = True
    if per_change:
        return "per_change"
    if per_state:
        return "per_state"
    return "once"


def _slot_owner(
    problem: ProblemInstance,
    schema: OntologySchema,
    template_name: str,
    slot,
    anchor: ConceptInstance | None,
    kind: str,
) -> ConceptInstance:
    qualifier = slot.qualifier
    if _is_kind(schema, qualifier, "ChangeOfState"):
        if anchor is None or not _is_kind(schema, anchor.concept, "ChangeOfState"):
            raise UnboundSlot(
                f"slot {slot.key} of {template_name} needs a change of state",
                slot=slot.key, equation=template_name)
        return anchor
    if _is_kind(schema, qualifier, "State"):
        index = slot_state_index(schema.variables, slot.name)
        if index is None:
            if kind != "per_state" or anchor is None:
                raise UnboundSlot(
                    f"slot {slot.key} of {template_name} has no anchoring state",
                    slot=slot.key, equation=template_name)
            return anchor
        if anchor is None or not _is_kind(schema, anchor.concept, "ChangeOfState"):
            raise UnboundSlot(
                f"slot {slot.key} of {template_name} is state-indexed but the"
                f" template has no change of state to anchor it",
                slot=slot.key, equation=template_name)
        link = "initial_state" if index == "1" else "final_state"
        return problem.instances[anchor.links[link]]
    candidates = [
        problem.instances[instance_id]
        for instance_id in sorted(problem.instances)
        if _is_kind(schema, problem.instances[instance_id].concept, qualifier)
    ]
    if len(candidates) != 1:
        raise UnboundSlot(
            f"slot {slot.key} of {template_name} needs exactly one {qualifier}"
            f" instance, found {len(candidates)}",
            slot=slot.key, equation=template_name)
    return candidates[0]


def setup_equations(
    problem: ProblemInstance,
    schema: OntologySchema | None = None,
    catalog: Sequence | None = None,
    residual_tolerance: float = 1e-9,
) -> list[EquationInstance]:
    """Instantiate every applicable template against the problem's instances.

    Guarded templates are skipped unless their guard rules hold under the
    problem's attribute answers; templates whose anchor concept has no
    instance (change-of-state equations in a one-state problem) produce
    nothing and their guards are never evaluated.
    """
    schema = schema if schema is not None else problem.schema
    templates = (
        list(catalog)
        if catalog is not None
        else [schema.equations[name] for name in sorted(schema.equations)]
    )
    attribute_state = build_attribute_state(problem)
    changes = [
        problem.instances[i]
        for i in sorted(problem.instances)
        if _is_kind(schema, problem.instances[i].concept, "ChangeOfState")
    ]
    states = [
        problem.instances[i]
        for i in sorted(problem.instances)
        if _is_kind(schema, problem.instances[i].concept, "State")
    ]

    instances: list[EquationInstance] = []
    for template in templates:
        kind = classify_template(schema, template)
        anchors: list[ConceptInstance | None]
        if kind == "per_change":
            anchors = list(changes)
        elif kind == "per_state":
            anchors = list(states)
        else:
            anchors = [None]
        if not anchors:
            continue
        if template.guards and not guards_satisfied(template, attribute_state, schema.rules):
            continue
        positive = frozenset(
            slot.key
            for slot in template.slots
            if schema.variables[base_variable(schema.variables, slot.name)].must_be_positive
        )
        for anchor in anchors:
            binding: dict[str, str] = {}
            owner_ids: list[str] = []
            for slot in template.slots:
                owner = _slot_owner(problem, schema, template.name, slot, anchor, kind)
                base = base_variable(schema.variables, slot.name)
                binding[slot.key] = owner.variable_instances[base]
                owner_ids.append(owner.id)
            if anchor is not None:
                anchor_id = anchor.id
            else:
                anchor_id = next(
                    (i for i in owner_ids if i != "constants"), owner_ids[0]
                )
            instances.append(
                EquationInstance(
                    template=template,
                    name=f"{template.name}@{anchor_id}",
                    binding=binding,
                    residual_tolerance=residual_tolerance,
                    positive_slots=positive,
                )
            )
    return instances


@dataclass
class ReasoningGraph:
    """Bipartite graph between equation instances and variable instances."""

    equations: dict[str, EquationInstance]
    variables: tuple[str, ...]
    edges: dict[tuple[str, str], str]
    knowns: dict[str, float]
    targets: tuple[str, ...]
    determined: set[str] = field(default_factory=set)
    fired: set[str] = field(default_factory=set)
    firing_order: list[tuple[str, str]] = field(default_factory=list)

    def equation_variables(self, name: str) -> tuple[str, ...]:
        return self.equations[name].variables


def build_graph(
    instances: Iterable[EquationInstance],
    knowns: Mapping[str, float],
    targets: Sequence[str] = (),
    variables: Sequence[str] | None = None,
) -> ReasoningGraph:
    """Fresh graph with known variables already feeding their equations."""
    equations: dict[str, EquationInstance] = {}
    for inst in instances:
        if inst.name in equations:
            raise DuplicateName(f"duplicate equation instance name {inst.name!r}")
        equations[inst.name] = inst

    names: list[str] = []
    seen = set()
    pools: list[Iterable[str]] = [
        (v for inst in equations.values() for v in inst.variables),
        knowns,
        targets,
    ]
    if variables is not None:
        pools.append(variables)
    for pool in pools:
        for name in pool:
            if name not in seen:
                seen.add(name)
                names.append(name)

    edges: dict[tuple[str, str], str] = {}
    for inst in equations.values():
        for var in inst.variables:
            edges[(inst.name, var)] = VAR_TO_EQ if var in knowns else UNDIRECTED

    return ReasoningGraph(
        equations=equations,
        variables=tuple(sorted(names)),
        edges=edges,
        knowns=dict(knowns),
        targets=tuple(targets),
        determined=set(knowns),
    )


def reachability(graph: ReasoningGraph, scan_order: Sequence[str] | None = None) -> frozenset[str]:
    """Propagate determinedness to a fixpoint.

    Equation nodes are scanned in instance-name order (or the explicit
    ``scan_order``); an equation with exactly one undirected edge fires,
    orienting that edge outward and feeding the newly determined variable
    into its other equations.  After each firing the scan restarts, which
    makes the firing sequence itself deterministic; the determined set is
    the same for every scan order.
    """
    if scan_order is None:
        order = sorted(graph.equations)
    else:
        order = list(scan_order)
        if sorted(order) != sorted(graph.equations):
            raise InvalidValue(
                "scan_order must be a permutation of the equation instance names")

    progress = True
    while progress:
        progress = False
        for eq_name in order:
            if eq_name in graph.fired:
                continue
            undirected = [
                var
                for var in graph.equation_variables(eq_name)
                if graph.edges[(eq_name, var)] == UNDIRECTED
            ]
            if len(undirected) != 1:
                continue
            produced = undirected[0]
            graph.edges[(eq_name, produced)] = EQ_TO_VAR
            graph.fired.add(eq_name)
            graph.determined.add(produced)
            graph.firing_order.append((eq_name, produced))
            for other in graph.equations:
                if other != eq_name and graph.edges.get((other, produced)) == UNDIRECTED:
                    graph.edges[(other, produced)] = VAR_TO_EQ
            progress = True
            break
    return frozenset(graph.determined)


def solvable(graph: ReasoningGraph, targets: Sequence[str] | None = None) -> tuple[bool, tuple[str, ...]]:
    wanted = graph.targets if targets is None else tuple(targets)
    unreached = tuple(sorted(t for t in wanted if t not in graph.determined))
    return (not unreached, unreached)


@dataclass
class SolutionPath:
    """Ordered (equation instance, solved variable) steps."""

    steps: tuple[tuple[EquationInstance, str], ...]
    derived_values: dict[str, float] = field(default_factory=dict)

    @property
    def equations(self) -> tuple[str, ...]:
        return tuple(inst.name for inst, _ in self.steps)


PathStrategy = Callable[[ReasoningGraph, Sequence[str]], SolutionPath]

_PATH_STRATEGIES: dict[str, PathStrategy] = {}


def register_path_strategy(name: str, strategy: PathStrategy) -> None:
    _PATH_STRATEGIES[name] = strategy


def _first_found(graph: ReasoningGraph, targets: Sequence[str]) -> SolutionPath:
    unreached = tuple(sorted(t for t in targets if t not in graph.determined))
    if unreached:
        raise NotSolvable(unreached)
    producer = {var: eq for eq, var in graph.firing_order}
    produced_by = dict(graph.firing_order)
    needed: set[str] = set()
    stack = [t for t in targets]
    while stack:
        var = stack.pop()
        if var in graph.knowns:
            continue
        eq_name = producer[var]
        if eq_name in needed:
            continue
        needed.add(eq_name)
        solved = produced_by[eq_name]
        stack.extend(v for v in graph.equation_variables(eq_name) if v != solved)
    steps = tuple(
        (graph.equations[eq_name], var)
        for eq_name, var in graph.firing_order
        if eq_name in needed
    )
    return SolutionPath(steps=steps)


register_path_strategy("first_found", _first_found)


def extract_path(
    graph: ReasoningGraph,
    targets: Sequence[str] | None = None,
    strategy: str = "first_found",
) -> SolutionPath:
    """Minimal executable prefix of the firing order covering the targets."""
    if strategy not in _PATH_STRATEGIES:
        raise UnknownElement(
            f"unknown path strategy {strategy!r};"
            f" registered: {', '.join(sorted(_PATH_STRATEGIES))}",
            name=strategy,
        )
    wanted = graph.targets if targets is None else tuple(targets)
    return _PATH_STRATEGIES[strategy](graph, wanted)


@dataclass(frozen=True)
class AuditEntry:
    equation: str
    rendered: str
    residual: float


def execute(
    path: SolutionPath,
    knowns: Mapping[str, float],
    instances: Iterable[EquationInstance] | None = None,
    audit: list[AuditEntry] | None = None,
    warnings: list[str] | None = None,
) -> dict[str, float]:
    """Run the path, then audit every fully determined equation.

    ``instances`` widens the audit beyond the path equations (the full
    instantiated set in normal solves).  The audit recomputes residuals
    under the final valuation and raises InconsistentInput for the first
    equation whose residual exceeds its tolerance, so over-determined but
    consistent inputs pass while contradictory ones name the equation
    that exposes them.
    """
    valuation = dict(knowns)
    for inst, var in path.steps:
        try:
            value = solve_for(inst, var, valuation, warnings=warnings)
        except DomainError as exc:
            raise DomainError(
                f"step {inst.name} solving {var}: {exc.message}",
                subexpression=exc.details.get("subexpression"),
            ) from exc
        valuation[var] = value
        path.derived_values[var] = value

    audit_pool = list(instances) if instances is not None else [inst for inst, _ in path.steps]
    for inst in sorted(audit_pool, key=lambda i: i.name):
        if not all(v in valuation for v in inst.variables):
            continue
        error = residual(inst, valuation)
        if audit is not None:
            audit.append(AuditEntry(equation=inst.name, rendered=inst.render(), residual=error))
        if error > inst.residual_tolerance:
            raise InconsistentInput(inst.name, error, inst.residual_tolerance)
    return valuation


@dataclass
class SolveOutcome:
    """Everything a solve run produced, for callers that need more than the report."""

    report: object
    problem: ProblemInstance
    graph: ReasoningGraph
    path: SolutionPath
    valuation: dict[str, float]
    undetermined: tuple[str, ...]


def solve_problem_detailed(
    problem: ProblemInstance,
    *,
    residual_tolerance: float = 1e-9,
    path_strategy: str = "first_found",
) -> SolveOutcome:
    from .report import render_report

    work = problem if problem.status == "finalized" else finalize(problem.clone())
    instances = setup_equations(work, residual_tolerance=residual_tolerance)
    graph = build_graph(
        instances, work.knowns, targets=tuple(work.targets), variables=work.variable_names()
    )
    reachability(graph)
    ok, unreached = solvable(graph)
    if not ok and work.targets_explicit:
        raise NotSolvable(list(unreached))
    effective = [t for t in work.targets if t in graph.determined]
    undetermined = unreached

    path = extract_path(graph, effective, strategy=path_strategy)
    audit: list[AuditEntry] = []
    warnings: list[str] = []
    valuation = execute(path, work.knowns, instances, audit=audit, warnings=warnings)
    report = render_report(
        work,
        path,
        valuation,
        audit,
        warnings=tuple(warnings),
        undetermined=undetermined,
    )
    return SolveOutcome(
        report=report,
        problem=work,
        graph=graph,
        path=path,
        valuation=valuation,
        undetermined=undetermined,
    )


def solve_problem(
    problem: ProblemInstance,
    *,
    residual_tolerance: float = 1e-9,
    path_strategy: str = "first_found",
):
    """Finalize (a copy of) the problem, reason, execute, and report."""
    return solve_problem_detailed(
        problem,
        residual_tolerance=residual_tolerance,
        path_strategy=path_strategy,
    ).report


def export_reasoning_graph(graph: ReasoningGraph) -> dict:
    """Node-link form of the graph with orientation and firing metadata."""
    nodes = [
        {
            "id": name,
            "kind": "Equation",
            "fired": name in graph.fired,
        }
        for name in sorted(graph.equations)
    ]
    nodes.extend(
        {
            "id": name,
            "kind": "Variable",
            "known": name in graph.knowns,
            "determined": name in graph.determined,
            "target": name in graph.targets,
        }
        for name in graph.variables
    )
    edges = []
    for (eq_name, var), orientation in sorted(graph.edges.items()):
        if orientation == VAR_TO_EQ:
            edges.append({"from": var, "to": eq_name, "label": "input"})
        elif orientation == EQ_TO_VAR:
            edges.append({"from": eq_name, "to": var, "label": "solves"})
        else:
            edges.append({"from": eq_name, "to": var, "label": UNDIRECTED})
    return {"nodes": nodes, "edges": edges}


def reasoning_graph_to_dot(doc: dict, name: str = "reasoning") -> str:
    """GraphViz rendering of an exported reasoning graph."""
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [style=filled];"]
    for node in doc["nodes"]:
        node_id = node["id"]
        if node["kind"] == "Equation":
            fill = "orange" if node.get("fired") else "white"
            shape = "box"
        else:
            fill = "lightblue" if node.get("determined") else "white"
            shape = "ellipse"
        extras = ""
        if node.get("target"):
            extras = ", penwidth=2"
        lines.append(
            f'  "{node_id}" [shape={shape}, fillcolor="{fill}"{extras}];'
        )
    for edge in doc["edges"]:
        if edge["label"] == UNDIRECTED:
            lines.append(f'  "{edge["from"]}" -> "{edge["to"]}" [dir=none];')
        else:
            lines.append(f'  "{edge["from"]}" -> "{edge["to"]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
