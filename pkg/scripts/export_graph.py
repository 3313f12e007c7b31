#!/usr/bin/env python3
"""Export the ontology graph, or the reasoning graph of one problem.

Without arguments the full schema graph is printed as GraphViz DOT;
--filter restricts it to chosen concepts (plus their variables and
attributes), --problem switches to the solved reasoning graph instead.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from thermosolve.documents import parse_problem
from thermosolve.knowledge import builtin_schema
from thermosolve.ontology import export_graph, graph_to_dot
from thermosolve.reasoner import (
    export_reasoning_graph,
    reasoning_graph_to_dot,
    solve_problem_detailed,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--filter", nargs="*", metavar="CONCEPT",
                        help="keep only these concepts and what they own")
    parser.add_argument("--problem", metavar="FILE",
                        help="export the reasoning graph of this problem document")
    parser.add_argument("--format", choices=("dot", "json"), default="dot")
    parser.add_argument("--out", metavar="FILE", help="write here instead of stdout")
    args = parser.parse_args()

    if args.problem:
        problem = parse_problem(Path(args.problem).read_text(encoding="utf-8"))
        outcome = solve_problem_detailed(problem)
        doc = export_reasoning_graph(outcome.graph)
        text = (
            reasoning_graph_to_dot(doc)
            if args.format == "dot"
            else json.dumps(doc, indent=2, sort_keys=True) + "\n"
        )
    else:
        schema = builtin_schema()
        doc = export_graph(schema, filter=args.filter)
        text = (
            graph_to_dot(doc)
            if args.format == "dot"
            else json.dumps(doc, indent=2, sort_keys=True) + "\n"
        )

    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
