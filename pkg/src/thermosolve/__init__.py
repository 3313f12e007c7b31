"""Ontology-driven solver for introductory closed-system thermodynamics.

The package models theory as a small machine-readable ontology (concepts,
variables, attributes, equations, rules), instantiates concept-qualified
equations against a concrete problem, propagates known values over the
equation/variable graph, and executes the extracted solution path with a
residual audit over every fully determined equation.
"""

from .equations import (
    EquationInstance,
    EquationTemplate,
    guards_satisfied,
    residual,
    solve_for,
    template_from_text,
)
from .expressions import evaluate, parse_expression, render, slots_of
from .knowledge import (
    CONSTANTS,
    MaterialRecord,
    PhysicalConstants,
    builtin_schema,
    equation_catalog,
    material_lookup,
    materials_table,
)
from .ontology import (
    OntologySchema,
    canonical_concept,
    export_graph,
    graph_to_dot,
    load_schema,
    resolve_concept,
    serialize_schema,
    specializations_of,
    validate_instance_document,
)
from .problem import (
    PendingChoice,
    ProblemInstance,
    ProcessClass,
    create_problem,
    finalize,
    pending_choices,
    process_classes,
    register_process_class,
    rename_variable,
    set_attribute,
    set_targets,
    set_value,
)
from .documents import parse_problem, serialize_problem, validate_document
from .reasoner import (
    ReasoningGraph,
    SolutionPath,
    build_graph,
    execute,
    export_reasoning_graph,
    extract_path,
    reachability,
    register_path_strategy,
    setup_equations,
    solvable,
    solve_problem,
    solve_problem_detailed,
)
from .report import SolutionReport, report_from_json, render_report, to_json, to_markdown
from .service import ServiceConfig, create_app

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "EquationInstance",
    "EquationTemplate",
    "MaterialRecord",
    "OntologySchema",
    "PendingChoice",
    "PhysicalConstants",
    "ProblemInstance",
    "ProcessClass",
    "ReasoningGraph",
    "ServiceConfig",
    "SolutionPath",
    "SolutionReport",
    "build_graph",
    "builtin_schema",
    "canonical_concept",
    "create_app",
    "create_problem",
    "equation_catalog",
    "evaluate",
    "execute",
    "export_graph",
    "export_reasoning_graph",
    "extract_path",
    "finalize",
    "graph_to_dot",
    "guards_satisfied",
    "load_schema",
    "material_lookup",
    "materials_table",
    "parse_expression",
    "parse_problem",
    "pending_choices",
    "process_classes",
    "reachability",
    "register_path_strategy",
    "register_process_class",
    "rename_variable",
    "render",
    "render_report",
    "report_from_json",
    "residual",
    "resolve_concept",
    "serialize_problem",
    "serialize_schema",
    "set_attribute",
    "set_targets",
    "set_value",
    "setup_equations",
    "slots_of",
    "solvable",
    "solve_for",
    "solve_problem",
    "solve_problem_detailed",
    "specializations_of",
    "template_from_text",
    "to_json",
    "to_markdown",
    "validate_document",
    "validate_instance_document",
]
