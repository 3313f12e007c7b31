"""Command-line interface.

Exit codes: 0 solved/ok, 2 requested targets unreachable, 3 inconsistent
input values, 1 anything else (usage, parse, incomplete definitions).
Prompts and diagnostics go to stderr; reports and listings go to stdout,
and the JSON report bytes are identical between batch and interactive
runs of the same problem.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .documents import parse_problem, validate_document
from .errors import (
    InconsistentInput,
    NotSolvable,
    ParseError,
    ThermosolveError,
)
from .knowledge import builtin_schema, equation_catalog, materials_table
from .ontology import load_schema
from .problem import (
    ProblemInstance,
    create_problem,
    pending_choices,
    process_classes,
    set_attribute,
    set_targets,
    set_value,
)
from .reasoner import (
    export_reasoning_graph,
    reasoning_graph_to_dot,
    solve_problem_detailed,
)
from .report import to_json, to_markdown

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_SOLVABLE = 2
EXIT_INCONSISTENT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermosolve",
        description="Ontology-driven solver for closed-system thermodynamics problems.",
    )
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("THERMOSOLVE_DATA_DIR"),
        help="directory with schema and material YAML files (default: packaged data)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve a problem document")
    solve.add_argument("problem", help="path to a problem YAML document")
    solve.add_argument("--format", choices=("json", "md"), default="json")
    solve.add_argument("--report", metavar="FILE", help="write the report here instead of stdout")
    solve.add_argument(
        "--graph", metavar="FILE",
        help="also write the reasoning graph (.dot/.gv for GraphViz, else JSON)",
    )

    interactive = commands.add_parser("interactive", help="define a problem in a dialogue")
    interactive.add_argument("--format", choices=("json", "md"), default="json")

    validate = commands.add_parser("validate", help="check an ontology or a problem document")
    which = validate.add_mutually_exclusive_group(required=True)
    which.add_argument("--ontology", metavar="DIR", help="directory of schema YAML files")
    which.add_argument("--problem", metavar="FILE", help="problem document to validate")

    listing = commands.add_parser("list", help="show shipped knowledge")
    what = listing.add_mutually_exclusive_group(required=True)
    what.add_argument("--equations", action="store_true")
    what.add_argument("--materials", action="store_true")
    what.add_argument("--concepts", action="store_true")
    what.add_argument("--process-classes", action="store_true")

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--timeout", type=float, default=3600.0,
                       help="session idle timeout in seconds")
    serve.add_argument("--cors-origin", action="append", default=[],
                       help="allowed CORS origin (repeatable)")

    return parser


def _report_text(report, fmt: str) -> str:
    if fmt == "md":
        return to_markdown(report)
    return json.dumps(to_json(report), indent=2, sort_keys=True) + "\n"


def _write_output(text: str, destination: str | None) -> None:
    if destination:
        Path(destination).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_graph(graph, destination: str) -> None:
    doc = export_reasoning_graph(graph)
    if destination.endswith((".dot", ".gv")):
        Path(destination).write_text(reasoning_graph_to_dot(doc), encoding="utf-8")
    else:
        Path(destination).write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def _solve_and_emit(problem: ProblemInstance, fmt: str, report_file=None, graph_file=None) -> int:
    outcome = solve_problem_detailed(problem)
    _write_output(_report_text(outcome.report, fmt), report_file)
    if graph_file:
        _write_graph(outcome.graph, graph_file)
    return EXIT_OK


def cmd_solve(args) -> int:
    text = Path(args.problem).read_text(encoding="utf-8")
    problem = parse_problem(text, data_dir=args.data_dir)
    return _solve_and_emit(problem, args.format, args.report, args.graph)


def _prompt(message: str) -> str:
    sys.stderr.write(message)
    sys.stderr.flush()
    line = sys.stdin.readline()
    if not line:
        raise EOFError
    return line.strip()


def _choose(prompt: str, options: list[str]) -> str:
    for i, option in enumerate(options, start=1):
        sys.stderr.write(f"  {i}) {option}\n")
    while True:
        answer = _prompt(f"{prompt} [1-{len(options)}]: ")
        if answer.isdigit() and 1 <= int(answer) <= len(options):
            return options[int(answer) - 1]
        if answer in options:
            return answer
        sys.stderr.write(f"please answer 1-{len(options)} or a listed value\n")


def cmd_interactive(args) -> int:
    try:
        classes = [cls.name for cls in process_classes()]
        sys.stderr.write("process classes:\n")
        name = _choose("process class", classes)
        problem = create_problem(name, data_dir=args.data_dir)

        while True:
            pending = pending_choices(problem)
            if not pending:
                break
            choice = pending[0]
            sys.stderr.write(f"\n{choice.instance}: choose {choice.attribute}\n")
            value = _choose(f"{choice.instance}.{choice.attribute}", list(choice.options))
            set_attribute(problem, choice.instance, choice.attribute, value)

        sys.stderr.write(
            "\nenter known values as name=value, one per line; empty line to finish\n"
        )
        while True:
            line = _prompt("value> ")
            if not line:
                break
            name, sep, number = line.partition("=")
            if not sep:
                sys.stderr.write("expected name=value\n")
                continue
            try:
                set_value(problem, name.strip(), float(number))
            except ValueError:
                sys.stderr.write(f"not a number: {number.strip()!r}\n")
            except ThermosolveError as exc:
                sys.stderr.write(f"{exc.code}: {exc.message}\n")

        while True:
            line = _prompt("targets (space-separated, empty for all unknowns)> ")
            try:
                set_targets(problem, line.split())
                break
            except ThermosolveError as exc:
                sys.stderr.write(f"{exc.code}: {exc.message}\n")
    except EOFError:
        sys.stderr.write("\naborted: input ended before the problem was complete\n")
        return EXIT_ERROR

    return _solve_and_emit(problem, args.format)


def cmd_validate(args) -> int:
    if args.ontology:
        directory = Path(args.ontology)
        sources = {
            path.name: path.read_text(encoding="utf-8")
            for path in sorted(directory.glob("*.yaml"))
            if path.name != "materials.yaml"
        }
        if not sources:
            sys.stderr.write(f"no schema files in {directory}\n")
            return EXIT_ERROR
        schema = load_schema(sources)
        sys.stdout.write(
            f"ok: {len(schema.concepts)} concepts, {len(schema.variables)} variables,"
            f" {len(schema.attributes)} attributes, {len(schema.equations)} equations,"
            f" {len(schema.rules)} rules\n"
        )
        return EXIT_OK
    schema = builtin_schema(args.data_dir)
    text = Path(args.problem).read_text(encoding="utf-8")
    violations = validate_document(schema, text, data_dir=args.data_dir)
    if violations:
        for violation in violations:
            sys.stdout.write(f"violation: {violation}\n")
        return EXIT_ERROR
    sys.stdout.write("ok: document conforms to the schema\n")
    return EXIT_OK


def cmd_list(args) -> int:
    if args.equations:
        schema = builtin_schema(args.data_dir)
        for template in equation_catalog(schema):
            guard_note = ""
            if template.guards:
                guard_note = f"  [guards: {', '.join(template.guards)}]"
            sys.stdout.write(f"{template.name}: {template.render()}{guard_note}\n")
    elif args.materials:
        for record in sorted(materials_table(args.data_dir).values(), key=lambda r: r.name):
            sys.stdout.write(
                f"{record.name}: M = {record.molar_mass} kg/mol,"
                f" R = {record.specific_gas_constant} J/(kg K),"
                f" cv = {record.cv} J/(kg K), cp = {record.cp} J/(kg K)\n"
            )
    elif args.concepts:
        schema = builtin_schema(args.data_dir)
        for name in sorted(schema.concepts):
            concept = schema.concepts[name]
            parent = f" is_a {concept.parent}" if concept.parent else ""
            sys.stdout.write(f"{name}{parent}\n")
    else:
        for cls in process_classes():
            sys.stdout.write(f"{cls.name}: {cls.description}\n")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import ServiceConfig, run_service

    run_service(
        ServiceConfig(
            host=args.host,
            port=args.port,
            session_timeout=args.timeout,
            data_dir=args.data_dir,
            cors_origins=tuple(args.cors_origin),
        )
    )
    return EXIT_OK


_HANDLERS = {
    "solve": cmd_solve,
    "interactive": cmd_interactive,
    "validate": cmd_validate,
    "list": cmd_list,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except NotSolvable as exc:
        sys.stderr.write(f"{exc.code}: {exc.message}\n")
        return EXIT_NOT_SOLVABLE
    except InconsistentInput as exc:
        sys.stderr.write(f"{exc.code}: {exc.message}\n")
        return EXIT_INCONSISTENT
    except ParseError as exc:
        sys.stderr.write(f"{exc.code}: {exc.message}\n")
        return EXIT_ERROR
    except ThermosolveError as exc:
        sys.stderr.write(f"{exc.code}: {exc.message}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
