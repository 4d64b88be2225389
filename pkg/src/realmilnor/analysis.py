"""Germ files in, deterministic JSON reports out.

``analyze`` runs parse -> singularity check -> gradient degrees -> classify
for one germ file and returns the report together with its exit code:
0 for any verdict, 1 for input errors, 2 for inconsistent evidence.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .classifier import NOT_SINGULAR, Assertions, classify, singularity_check
from .elk import INJECTED, DegreeResult, local_degree_elk
from .errors import RealMilnorError
from .ideal import Limits
from .numeric import NumericConfig, local_degree_numeric
from .polyring import MapGerm, Polynomial, gradient, parse_polynomial

SCHEMA_VERSION = 1
METHODS = ("elk", "numeric", "both")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONSISTENT = 2


@dataclass(frozen=True)
class Options:
    method: str = "both"
    numeric: NumericConfig = field(default_factory=NumericConfig)
    limits: Limits = field(default_factory=Limits)
    assertions: Assertions = field(default_factory=Assertions)
    cache_dir: str | None = None
    inject_degree: int | None = None
    timings: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "numeric": self.numeric.to_dict(),
            "max_degree": self.limits.max_degree,
            "max_basis": self.limits.max_basis,
            "assert_simply_connected_fiber": self.assertions.simply_connected_fiber,
            "assert_h1_trivial": self.assertions.h1_trivial,
            "inject_degree": self.inject_degree,
        }


class GermFileError(RealMilnorError, ValueError):
    pass


def load_germ(path) -> MapGerm:
    """Read a germ JSON file: {"name": ..., "variables": [...], "components": [...]}."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GermFileError(f"{path}: cannot read file: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GermFileError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return germ_from_dict(data, source=str(path), text=text)


def germ_from_dict(data, source="<germ>", text=None) -> MapGerm:
    if not isinstance(data, dict):
        raise GermFileError(f"{source}: top level must be a JSON object")
    for key, kind in (("name", str), ("variables", list), ("components", list)):
        if key not in data:
            raise GermFileError(f"{source}: missing key {key!r}")
        if not isinstance(data[key], kind):
            raise GermFileError(f"{source}: {key!r} must be a {kind.__name__}")
    variables = data["variables"]
    if not variables or not all(isinstance(v, str) and v.isidentifier() for v in variables):
        raise GermFileError(f"{source}: variables must be a nonempty list of identifiers")
    polys = []
    for k, comp in enumerate(data["components"]):
        if not isinstance(comp, str):
            raise GermFileError(f"{source}: component {k + 1} must be a string")
        try:
            polys.append(parse_polynomial(comp, variables))
        except RealMilnorError as exc:
            raise GermFileError(f"{source}:{_line_of(text, comp)}: component {k + 1}: {exc}") from exc
    extra = tuple(sorted((k, v) for k, v in data.items()
                         if k not in ("name", "variables", "components") and isinstance(v, str)))
    try:
        return MapGerm(data["name"], variables, polys, extra)
    except RealMilnorError as exc:
        raise GermFileError(f"{source}: {exc}") from exc


def _line_of(text, needle) -> int:
    """Line of the quoted component in the source, else of the "components" key."""
    if text:
        lines = text.splitlines()
        for probe in (json.dumps(needle), json.dumps(needle, ensure_ascii=False), '"components"'):
            for k, line in enumerate(lines, 1):
                if probe in line:
                    return k
    return 1


# ---------------------------------------------------------------------------
# degrees
# ---------------------------------------------------------------------------

def compute_degree(g: list[Polynomial], options: Options) -> dict:
    """Degree of a square map by the requested method(s); never raises on method failure."""
    entry = {"signature": None, "numeric": None, "chosen": None, "warnings": [], "disagreement": False}
    if any(gi.constant_term for gi in g):
        res = DegreeResult(0, "regular-point", {"reason": "map does not vanish at the origin"})
        entry["chosen"] = res.to_dict()
        entry["warnings"].append("map does not vanish at 0: local degree is 0")
        entry["_result"] = res
        return entry

    elk = num = None
    if options.method in ("elk", "both"):
        try:
            elk = local_degree_elk(g, limits=options.limits, cache_dir=options.cache_dir)
            entry["signature"] = elk.to_dict()
        except RealMilnorError as exc:
            entry["warnings"].append(f"signature method unavailable ({type(exc).__name__}): {exc}")
    if options.method in ("numeric", "both") or elk is None:
        if options.method == "elk":
            entry["warnings"].append("falling back to the numeric oracle")
        try:
            num = local_degree_numeric(g, options.numeric)
            entry["numeric"] = num.to_dict()
        except RealMilnorError as exc:
            entry["warnings"].append(f"numeric oracle failed ({type(exc).__name__}): {exc}")
    if elk is not None and num is not None and elk.degree != num.degree:
        entry["disagreement"] = True
        entry["warnings"].append(f"methods disagree: signature {elk.degree}, numeric {num.degree}")
    chosen = elk if elk is not None else num
    entry["chosen"] = None if chosen is None else chosen.to_dict()
    entry["_result"] = None if entry["disagreement"] else chosen
    return entry


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def analyze_germ(germ: MapGerm, options: Options, source: str | None = None) -> tuple[dict, int]:
    clock = {}
    warnings = []

    t0 = time.perf_counter()
    sing = singularity_check(germ, options.numeric, cache_dir=options.cache_dir)
    clock["singularity"] = time.perf_counter() - t0
    warnings.extend(sing.warnings)

    t0 = time.perf_counter()
    degree_entries = []
    results = []
    if sing.status == NOT_SINGULAR:
        warnings.append("origin is a regular point: gradient degrees not computed")
    else:
        for k, comp in enumerate(germ.components):
            if options.inject_degree is not None:
                res = DegreeResult(options.inject_degree, INJECTED, {"reason": "supplied on the command line"})
                entry = {"signature": None, "numeric": None, "chosen": res.to_dict(),
                         "warnings": ["degree injected, not computed"], "disagreement": False,
                         "_result": res}
            else:
                entry = compute_degree(gradient(comp), options)
            results.append(entry.pop("_result"))
            degree_entries.append({"component": k + 1, **entry})
    map_degree = None
    if germ.n == germ.p:
        map_degree = compute_degree(list(germ.components), options)
        map_degree.pop("_result")
    clock["degrees"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cls = classify(germ, results, sing, options.assertions)
    clock["classify"] = time.perf_counter() - t0

    disagreements = [e["component"] for e in degree_entries if e["disagreement"]]
    if map_degree and map_degree["disagreement"]:
        disagreements.append("map")
    inconsistent = cls.inconsistent or bool(disagreements)
    if disagreements:
        warnings.append(f"InconsistentEvidence: exact and numeric degrees disagree for {disagreements}")
    code = EXIT_INCONSISTENT if inconsistent else EXIT_OK

    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "realmilnor", "version": __version__},
        "germ": {
            "name": germ.name,
            "source": Path(source).name if source else None,
            "variables": list(germ.variables),
            "components": germ.component_texts(),
            "n": germ.n,
            "p": germ.p,
        },
        "config": options.to_dict(),
        "singularity": sing.to_dict(),
        "gradient_degrees": degree_entries,
        "map_degree": map_degree,
        "classification": cls.to_dict(),
        "warnings": warnings,
        "exit_code": code,
    }
    if options.timings:
        report["timing_seconds"] = {k: round(v, 4) for k, v in clock.items()}
    return report, code


def analyze(path, options: Options | None = None) -> tuple[dict, int]:
    """Analyze one germ file; input errors give an error report and exit code 1."""
    options = options or Options()
    try:
        germ = load_germ(path)
    except RealMilnorError as exc:
        return error_report(path, exc), EXIT_INPUT
    return analyze_germ(germ, options, str(path))


def error_report(path, exc) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "realmilnor", "version": __version__},
        "germ": {"source": Path(path).name},
        "error": {"type": type(exc.__cause__ or exc).__name__, "message": str(exc)},
        "exit_code": EXIT_INPUT,
    }


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def corpus_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise GermFileError(f"{directory}: not a directory")
    return sorted(directory.glob("*.json"))


def _run_one(args):
    path, options = args
    return analyze(path, options)


def run_corpus(directory, options: Options | None = None, jobs: int = 1) -> tuple[list, int]:
    """Analyze every *.json germ in ``directory``; returns (reports, exit code)."""
    options = options or Options()
    files = corpus_files(directory)
    if not files:
        raise GermFileError(f"{directory}: no germ files (*.json)")
    work = [(f, options) for f in files]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    reports = [r for r, _ in results]
    code = max(c for _, c in results)
    return reports, code


def summary_row(report) -> dict:
    germ = report.get("germ", {})
    if "error" in report:
        return {"name": germ.get("source"), "pair": None, "degrees": None, "chi": None,
                "verdict": f"error: {report['error']['type']}", "status": None,
                "exit_code": report["exit_code"]}
    cls = report["classification"]
    md = report["map_degree"]
    return {
        "name": germ["name"],
        "pair": [germ["n"], germ["p"]],
        "degrees": cls["degrees"],
        "map_degree": md["chosen"]["degree"] if md and md["chosen"] else None,
        "chi": cls["chi"],
        "link": cls["link"]["value"],
        "verdict": cls["verdict"]["label"],
        "status": report["singularity"]["status"],
        "exit_code": report["exit_code"],
    }


def summary_table(rows) -> str:
    headers = ["name", "(n,p)", "status", "degrees", "map deg", "chi", "link", "verdict", "exit"]
    body = []
    for r in rows:
        pair = "-" if r["pair"] is None else f"({r['pair'][0]},{r['pair'][1]})"
        degs = "-" if not r.get("degrees") else ",".join("?" if d is None else str(d) for d in r["degrees"])
        md = r.get("map_degree")
        body.append([
            str(r["name"]), pair, str(r["status"] or "-"), degs,
            "-" if md is None else str(md),
            "-" if r["chi"] is None else str(r["chi"]), str(r.get("link") or "-"),
            r["verdict"], str(r["exit_code"]),
        ])
    widths = [max(len(h), *(len(row[i]) for row in body)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in body]
    return "\n".join(lines) + "\n"
