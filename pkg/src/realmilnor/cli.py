"""Command line entry point.

    realmilnor analyze GERM.json [options]
    realmilnor corpus DIR [options]

Exit codes: 0 any verdict, 1 input error, 2 inconsistent evidence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (
    EXIT_INPUT,
    METHODS,
    GermFileError,
    Options,
    analyze,
    dumps,
    run_corpus,
    summary_row,
    summary_table,
)
from .classifier import Assertions
from .ideal import Limits
from .numeric import NumericConfig


def _add_common(p: argparse.ArgumentParser):
    d = NumericConfig()
    lim = Limits()
    p.add_argument("--method", choices=METHODS, default="both")
    p.add_argument("--epsilon", type=float, default=d.epsilon, help="outer radius of the numeric ball")
    p.add_argument("--delta-ratio", type=float, default=d.delta_ratio,
                   help="target size as a fraction of min |g| on the sphere")
    p.add_argument("--starts", type=int, default=d.starts, help="Newton starts per trial")
    p.add_argument("--trials", type=int, default=d.trials, help="independent numeric trials")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--cache-dir", default=None, help="directory for cached Groebner bases")
    p.add_argument("--assert-simply-connected-fiber", action="store_true",
                   help="vouch that the Milnor fiber is simply connected ((5,2) only)")
    p.add_argument("--assert-h1-trivial", action="store_true",
                   help="vouch that H_1 of the fiber vanishes (recorded, never sufficient)")
    p.add_argument("--max-degree", type=int, default=lim.max_degree)
    p.add_argument("--max-basis", type=int, default=lim.max_basis)
    p.add_argument("--inject-degree", type=int, default=None,
                   help="testing hook: use this value for every gradient degree")
    p.add_argument("--timings", action="store_true",
                   help="add per-stage wall times (makes reports non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="realmilnor", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="analyze one germ file")
    a.add_argument("path")
    _add_common(a)
    c = sub.add_parser("corpus", help="analyze every *.json germ in a directory")
    c.add_argument("directory")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--report-dir", default=None, help="also write one JSON report per germ here")
    _add_common(c)
    return parser


def options_from_args(args) -> Options:
    cfg = NumericConfig(epsilon=args.epsilon, delta_ratio=args.delta_ratio, starts=args.starts,
                        seed=args.seed, trials=args.trials)
    return Options(
        method=args.method,
        numeric=cfg,
        limits=Limits(max_degree=args.max_degree, max_basis=args.max_basis),
        assertions=Assertions(args.assert_simply_connected_fiber, args.assert_h1_trivial),
        cache_dir=args.cache_dir,
        inject_degree=args.inject_degree,
        timings=args.timings,
    )


def format_text(report: dict) -> str:
    if "error" in report:
        return f"error: {report['error']['message']}\n"
    g = report["germ"]
    cls = report["classification"]
    lines = [
        f"germ        {g['name']}  (n,p) = ({g['n']},{g['p']})",
        f"variables   {', '.join(g['variables'])}",
    ]
    lines += [f"f{k + 1:<10} {c}" for k, c in enumerate(g["components"])]
    lines.append(f"singularity {report['singularity']['status']}")
    for e in report["gradient_degrees"]:
        ch = e["chosen"]
        val = "unavailable" if ch is None else f"{ch['degree']} ({ch['method']})"
        lines.append(f"deg grad f{e['component']:<2} {val}")
    if report["map_degree"]:
        ch = report["map_degree"]["chosen"]
        lines.append("deg f       " + ("unavailable" if ch is None else f"{ch['degree']} ({ch['method']})"))
    lines += [
        f"chi         {cls['chi']}",
        f"link        {cls['link']['value']}",
        f"verdict     {cls['verdict']['label']}",
    ]
    for c in cls["citations"]:
        lines.append(f"  [{c['anchor']}] {c['statement']}")
    for note in cls["notes"]:
        lines.append(f"note: {note}")
    for w in report["warnings"]:
        lines.append(f"warning: {w}")
    for e in report["gradient_degrees"] + ([report["map_degree"]] if report["map_degree"] else []):
        for w in e["warnings"]:
            lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        options = options_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.command == "analyze":
        report, code = analyze(args.path, options)
        if code == EXIT_INPUT:
            print(f"error: {report['error']['message']}", file=sys.stderr)
        sys.stdout.write(dumps(report) if args.output == "json" else format_text(report))
        return code

    try:
        reports, code = run_corpus(args.directory, options, jobs=max(1, args.jobs))
    except GermFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rows = [summary_row(r) for r in reports]
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in reports:
            stem = Path(r["germ"]["source"]).stem
            (out / f"{stem}.report.json").write_text(dumps(r))
    if args.output == "json":
        sys.stdout.write(json.dumps({"summary": rows, "reports": reports}, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(summary_table(rows))
    return code


if __name__ == "__main__":
    sys.exit(main())
