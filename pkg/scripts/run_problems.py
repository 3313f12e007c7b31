#!/usr/bin/env python3
"""Solve every sample problem document and summarize the outcomes.

Documents whose file name marks them as failure demonstrations are
expected to raise; the script reports which error they produced.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from thermosolve.documents import parse_problem
from thermosolve.errors import ThermosolveError
from thermosolve.reasoner import solve_problem_detailed
from thermosolve.report import to_json, to_markdown


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--problems-dir",
        default=str(Path(__file__).parent / "problems"),
        help="directory of problem YAML documents",
    )
    parser.add_argument(
        "--out-dir",
        default=None,
        help="write one report per problem here (JSON and Markdown)",
    )
    args = parser.parse_args()

    problems_dir = Path(args.problems_dir)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    failures = 0
    for path in sorted(problems_dir.glob("*.yaml")):
        try:
            problem = parse_problem(path.read_text(encoding="utf-8"))
            outcome = solve_problem_detailed(problem)
        except ThermosolveError as exc:
            print(f"{path.name}: {exc.code}: {exc.message}")
            if "inconsistent" not in path.name and "underdetermined" not in path.name:
                failures += 1
            continue
        report = outcome.report
        shown = ", ".join(
            f"{name} = {value:.6g}" for name, value in list(report.results.items())[:4]
        )
        extra = " ..." if len(report.results) > 4 else ""
        note = ""
        if report.undetermined:
            note = f" (undetermined: {', '.join(report.undetermined)})"
        print(f"{path.name}: {len(report.steps)} steps; {shown}{extra}{note}")
        if out_dir:
            stem = path.stem
            (out_dir / f"{stem}.json").write_text(
                json.dumps(to_json(report), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            (out_dir / f"{stem}.md").write_text(to_markdown(report), encoding="utf-8")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
