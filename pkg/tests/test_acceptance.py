"""Acceptance criteria, one test each, at their stated tolerances and time limits.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary (and directly when run as ``python tests/test_acceptance.py``).
"""

import functools
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE, CORPUS  # noqa: E402
from oracles import linear_degree, local_dimension, power_map, winding_degree  # noqa: E402
from realmilnor.analysis import Options, analyze, analyze_germ, load_germ  # noqa: E402
from realmilnor.classifier import (  # noqa: E402
    EMPTY,
    EVIDENCE_NUMERIC,
    NONEMPTY_CONNECTED,
    NONTRIVIAL,
    TRIVIAL,
    UNDETERMINED,
    VERIFIED_ALGEBRAIC,
    Assertions,
    SingularityReport,
    classify,
    singularity_check,
)
from realmilnor.cli import main  # noqa: E402
from realmilnor.elk import SIGNATURE, DegreeResult, apply_functional, inertia, local_algebra, local_degree_elk  # noqa: E402
from realmilnor.errors import RealMilnorError  # noqa: E402
from realmilnor.numeric import NumericConfig, local_degree_numeric  # noqa: E402
from realmilnor.polyring import MapGerm, Polynomial, default_variables, gradient, jacobian_matrix  # noqa: E402


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                ACCEPTANCE.append(f"[{number}] FAIL  {title}: {type(exc).__name__}: {exc}".splitlines()[0])
                print(ACCEPTANCE[-1])
                raise
            ACCEPTANCE.append(f"[{number}] PASS  {title}" + (f" ({detail})" if detail else ""))
            print(ACCEPTANCE[-1])
        return run
    return wrap


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def both_degrees(entry):
    return entry["signature"]["degree"], entry["numeric"]["degree"]


# ---------------------------------------------------------------------------

@criterion(1, "z^2 and z^3 degrees 2 and 3 by both methods, dimensions 4 and 9, < 5 s each")
def test_zk_degrees():
    out = []
    for name, k, dim in (("z2", 2, 4), ("z3", 3, 9)):
        (rep, code), secs = timed(analyze, CORPUS / f"{name}.json")
        md = rep["map_degree"]
        assert code == 0
        assert both_degrees(md) == (k, k)
        assert md["signature"]["certificate"]["quotient_dimension"] == dim
        comps = load_germ(CORPUS / f"{name}.json").components
        assert local_dimension([c.as_dict() for c in comps], 2) == dim
        assert winding_degree(power_map(k)) == k
        assert secs < 5
        out.append(f"{name}: {secs:.2f}s")
    return ", ".join(out)


@criterion(2, "x^3 -> 1 and x^2 -> 0 by both methods, < 1 s each")
def test_one_variable():
    out = []
    for name, k in (("cube1d", 1), ("square1d", 0)):
        germ = load_germ(CORPUS / f"{name}.json")
        t0 = time.perf_counter()
        elk = local_degree_elk(list(germ.components)).degree
        num = local_degree_numeric(list(germ.components)).degree
        secs = time.perf_counter() - t0
        assert (elk, num) == (k, k)
        assert secs < 1
        out.append(f"{name}: {secs:.2f}s")
    return ", ".join(out)


@criterion(3, "cusp (4,2): 2 components x 2 methods all equal 2, chi = -1, NonTrivial, < 60 s")
def test_cusp():
    (rep, code), secs = timed(analyze, CORPUS / "cusp24.json")
    values = [d for e in rep["gradient_degrees"] for d in both_degrees(e)]
    cls = rep["classification"]
    assert code == 0
    assert values == [2, 2, 2, 2]
    assert cls["chi"] == -1
    assert cls["verdict"]["kind"] == NONTRIVIAL
    assert secs < 60
    return f"{secs:.2f}s"


@criterion(4, "Hopf (8,5): deg grad f1 = 1, link empty, NonTrivial, < 30 s")
def test_hopf():
    (rep, code), secs = timed(analyze, CORPUS / "hopf85.json")
    first = rep["gradient_degrees"][0]
    germ = load_germ(CORPUS / "hopf85.json")
    hess = jacobian_matrix(gradient(germ.components[0]))
    det_sign = linear_degree([[float(e.constant_term) for e in row] for row in hess])
    cls = rep["classification"]
    assert code == 0
    assert both_degrees(first) == (1, 1) and det_sign == 1
    assert cls["link"]["value"] == EMPTY
    assert cls["verdict"]["kind"] == NONTRIVIAL
    assert secs < 30
    return f"{secs:.2f}s"


def _substitute(polys, a):
    n = len(a)
    xs = [Polynomial.variable(n, i) for i in range(n)]
    images = [sum((xs[j].scale(a[i][j]) for j in range(n)), Polynomial.zero(n)) for i in range(n)]
    return [p.substitute(images) for p in polys]


def _random_matrix(n, rng, positive=True):
    while True:
        a = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        d = np.linalg.det(np.array(a, dtype=float))
        if (d > 0.5) if positive else (abs(d) > 0.5):
            return a


def _odd_suite():
    names = default_variables(5)
    q = " + ".join(f"{v}^2" for v in names)

    def weighted(w):
        return " + ".join(f"{c}*{v}^2" for c, v in zip(w, names))

    germs = [load_germ(CORPUS / "radial52.json")]
    for k, w in enumerate([(1, 2, 3, 1, 5), (3, 1, 2, 4, 1)]):
        qw = weighted(w)
        germs.append(MapGerm.from_strings(f"weighted{k}", names, [f"x1*({qw})", f"x2*({qw})"]))
    germs.append(MapGerm.from_strings("target-mixed", names, [f"(x1 + x2)*({q})", f"x2*({q})"]))
    rng = random.Random(52)
    base = list(germs[0].components)
    for k in range(2):
        a = _random_matrix(5, rng, positive=False)
        germs.append(MapGerm(f"linear{k}", names, _substitute(base, a)))
    return germs


@criterion(5, "n odd: >= 5 isolated (5,2) germs, every computed degree 0 and chi = 1")
def test_odd_dimension_law():
    germs = _odd_suite()
    assert len(germs) >= 5
    count = 0
    for g in germs:
        rep, code = analyze_germ(g, Options())
        assert rep["singularity"]["status"] in (VERIFIED_ALGEBRAIC, EVIDENCE_NUMERIC), g.name
        assert code == 0
        for e in rep["gradient_degrees"]:
            computed = [r["degree"] for r in (e["signature"], e["numeric"]) if r is not None]
            assert computed, f"{g.name}: no degree for component {e['component']}"
            assert all(d == 0 for d in computed), (g.name, computed)
            count += len(computed)
        assert rep["classification"]["chi"] == 1
    return f"{len(germs)} germs, {count} degrees"


def _degree_maps(germ):
    maps = [("map", list(germ.components))] if germ.n == germ.p else []
    maps += [(f"grad f{k + 1}", gradient(c)) for k, c in enumerate(germ.components)]
    return maps


@criterion(6, "phi-invariance: 20 random positive functionals give one signature")
def test_phi_invariance():
    rng = random.Random(6)
    checked = 0
    for path in sorted(CORPUS.glob("*.json")):
        germ = load_germ(path)
        for label, g in _degree_maps(germ):
            if any(c.constant_term for c in g):
                continue
            try:
                alg = local_algebra(g)
                base = local_degree_elk(g).degree
            except RealMilnorError:
                continue
            seen = set()
            while len(seen) < 20 or not seen:
                w = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(alg.basis.dimension)]
                if apply_functional(w, alg.jacobian, alg.basis) <= 0:
                    continue
                pos, neg, zero = inertia(alg.form(w).matrix)
                assert zero == 0 and pos - neg == base, (path.stem, label)
                seen.add(tuple(w))
            checked += 1
    assert checked >= 10
    return f"{checked} exact-path maps"


@criterion(7, "coordinate invariance: 10 orientation-preserving integer substitutions per germ")
def test_coordinate_invariance():
    rng = random.Random(7)
    cfg = NumericConfig()
    checked = 0
    for path in sorted(CORPUS.glob("*.json")):
        germ = load_germ(path)
        if not singularity_check(germ).isolated:
            continue
        label, g = _degree_maps(germ)[0]
        methods = {}
        for name, fn in (("signature", local_degree_elk), ("numeric", lambda m: local_degree_numeric(m, cfg))):
            try:
                methods[name] = (fn, fn(g).degree)
            except RealMilnorError:
                pass
        assert methods, path.stem
        for _ in range(10):
            a = _random_matrix(germ.n, rng)
            comps = _substitute(list(germ.components), a)
            h = comps if label == "map" else gradient(comps[0])
            for name, (fn, base) in methods.items():
                assert fn(h).degree == base, (path.stem, name, a)
            checked += 1
    return f"{checked} substituted germs"


@criterion(8, "classifier table, H1-only rejection, injected (6,3) degree +1 -> exit 2")
def test_classifier_table(capsys):
    def shape(n, p):
        names = default_variables(n)
        return MapGerm.from_strings(f"s{n}{p}", names, [f"{v}^2" for v in names[:p]])

    iso = SingularityReport(VERIFIED_ALGEBRAIC)
    d = lambda v, p: [DegreeResult(v, SIGNATURE)] * p

    c = classify(shape(6, 3), d(0, 3), iso)
    assert (c.verdict.kind, c.chi, c.link.value, c.sphere_count) == (TRIVIAL, 1, NONEMPTY_CONNECTED, 1)
    c = classify(shape(8, 5), d(1, 5), iso)
    assert (c.verdict.kind, c.link.value) == (NONTRIVIAL, EMPTY)
    c = classify(shape(4, 2), d(2, 2), iso)
    assert (c.verdict.kind, c.chi) == (NONTRIVIAL, -1)
    c = classify(shape(5, 2), d(0, 2), iso)
    assert (c.verdict.kind, c.chi) == (UNDETERMINED, 1)
    c = classify(shape(5, 2), d(0, 2), iso, Assertions(h1_trivial=True))
    assert c.verdict.kind == UNDETERMINED

    radial52 = str(CORPUS / "radial52.json")
    assert main(["analyze", radial52, "--assert-h1-trivial", "--output", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["classification"]["verdict"]["kind"] == UNDETERMINED
    assert main(["analyze", radial52, "--assert-simply-connected-fiber", "--output", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["classification"]["verdict"]["kind"] == TRIVIAL

    code = main(["analyze", str(CORPUS / "radial63.json"), "--inject-degree", "1", "--output", "json"])
    rep = json.loads(capsys.readouterr().out)
    assert code == 2
    assert rep["classification"]["verdict"]["reason"].startswith("InconsistentEvidence")


@criterion(9, "determinism: two corpus runs with --seed 42 are byte-identical")
def test_determinism(tmp_path, capsys):
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        main(["corpus", str(CORPUS), "--seed", "42", "--output", "json", "--report-dir", str(d), "--jobs", "4"])
        stdout = capsys.readouterr().out
        files = {p.name: p.read_bytes() for p in sorted(d.glob("*.json"))}
        outputs.append((stdout, files))
    assert outputs[0][0] == outputs[1][0]
    assert outputs[0][1] == outputs[1][1]
    assert len(outputs[0][1]) == len(list(CORPUS.glob("*.json")))
    return f"{len(outputs[0][1])} reports"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
