import pytest
from hypothesis import given
from hypothesis import strategies as st

from realmilnor.classifier import (
    EMPTY,
    EVIDENCE_NUMERIC,
    NONEMPTY,
    NONEMPTY_CONNECTED,
    NONTRIVIAL,
    NOT_SINGULAR,
    SUSPECT,
    TRIVIAL,
    UNDETERMINED,
    VERIFIED_ALGEBRAIC,
    Assertions,
    LinkStatus,
    SingularityReport,
    church_lamotke_triage,
    classify,
    euler_characteristic,
    link_status,
    singularity_check,
    sphere_count,
)
from realmilnor.elk import DegreeResult, SIGNATURE
from realmilnor.errors import InconsistentEvidenceError
from realmilnor.polyring import MapGerm, default_variables

ISOLATED = SingularityReport(VERIFIED_ALGEBRAIC)
NUMERIC_ONLY = SingularityReport(EVIDENCE_NUMERIC)


def germ(n, p):
    """Placeholder germ with the right shape; classify only reads (n, p)."""
    names = default_variables(n)
    return MapGerm.from_strings(f"shape{n}{p}", names, [f"{v}^2" for v in names[:p]])


def degs(value, p):
    return [DegreeResult(value, SIGNATURE)] * p


def test_singularity_check_examples():
    assert singularity_check(MapGerm.from_strings("id", "xy", ["x", "y"])).status == NOT_SINGULAR
    z2 = MapGerm.from_strings("z2", "xy", ["x^2 - y^2", "2*x*y"])
    assert singularity_check(z2).status == VERIFIED_ALGEBRAIC
    line = MapGerm.from_strings("line", "xy", ["x^2", "x*y"])
    assert singularity_check(line).status == SUSPECT


def test_singularity_check_numeric_only():
    z3 = MapGerm.from_strings("z3", "xy", ["x^3 - 3*x*y^2", "3*x^2*y - y^3"])
    rep = singularity_check(z3)
    assert rep.isolated
    assert rep.min_rank_ratio > 1e-6


def test_euler_characteristic():
    assert euler_characteristic(5, 7) == 1
    assert euler_characteristic(5, None) == 1
    assert euler_characteristic(4, 2) == -1
    assert euler_characteristic(6, 0) == 1
    assert euler_characteristic(4, None) is None


def test_link_status():
    assert link_status((6, 3), 5).value == NONEMPTY
    assert link_status((8, 5), 1).value == EMPTY
    assert link_status((8, 5), 0).value == NONEMPTY
    assert link_status((5, 2), 0).value == NONEMPTY
    assert link_status((6, 3), 0, TRIVIAL).value == NONEMPTY_CONNECTED


def test_sphere_count():
    link = LinkStatus(NONEMPTY)
    assert sphere_count(1, (6, 3), link) == 1
    assert sphere_count(3, (6, 3), link) == 3
    with pytest.raises(InconsistentEvidenceError):
        sphere_count(0, (6, 3), link)
    assert sphere_count(1, (5, 2), link) is None
    assert sphere_count(1, (5, 2), link, simply_connected_fiber=True) == 1


def test_triage():
    assert "non-trivial" in church_lamotke_triage(4, 3)
    assert "every" in church_lamotke_triage(3, 2)
    assert "every" in church_lamotke_triage(7, 4)
    assert "non-trivial" in church_lamotke_triage(9, 3)


def test_decision_table():
    c = classify(germ(6, 3), degs(0, 3), ISOLATED)
    assert (c.verdict.kind, c.chi, c.link.value, c.sphere_count) == (TRIVIAL, 1, NONEMPTY_CONNECTED, 1)

    c = classify(germ(8, 5), degs(1, 5), ISOLATED)
    assert (c.verdict.kind, c.link.value) == (NONTRIVIAL, EMPTY)

    c = classify(germ(4, 2), degs(2, 2), ISOLATED)
    assert (c.verdict.kind, c.chi) == (NONTRIVIAL, -1)

    c = classify(germ(5, 2), degs(0, 2), ISOLATED)
    assert (c.verdict.kind, c.chi) == (UNDETERMINED, 1)
    assert c.verdict.label == "Undetermined(requires pi_1(F_f)=0, not machine-checked)"

    c = classify(germ(5, 2), degs(0, 2), ISOLATED, Assertions(h1_trivial=True))
    assert c.verdict.kind == UNDETERMINED and "h1-not-enough" in c.citations

    c = classify(germ(5, 2), degs(0, 2), ISOLATED, Assertions(simply_connected_fiber=True))
    assert c.verdict.kind == TRIVIAL and c.chi == 1


def test_inconsistencies_become_undetermined():
    c = classify(germ(6, 3), degs(1, 3), ISOLATED)
    assert c.verdict.kind == UNDETERMINED and c.inconsistent
    assert c.verdict.reason.startswith("InconsistentEvidence")

    c = classify(germ(4, 2), [DegreeResult(1, SIGNATURE), DegreeResult(2, SIGNATURE)], ISOLATED)
    assert c.inconsistent

    c = classify(germ(5, 2), degs(2, 2), ISOLATED)
    assert c.inconsistent


def test_numeric_evidence_is_labelled():
    c = classify(germ(4, 2), degs(0, 2), NUMERIC_ONLY)
    assert c.verdict.label == "Trivial (numeric-evidence)"


def test_non_isolated_and_equal_dimensions():
    c = classify(germ(6, 3), degs(0, 3), SingularityReport(SUSPECT))
    assert c.verdict.kind == UNDETERMINED
    assert classify(germ(3, 3), degs(0, 3), ISOLATED).verdict.kind == TRIVIAL
    assert classify(germ(2, 2), degs(0, 2), ISOLATED).verdict.kind == UNDETERMINED


PAIRS = [(2, 2), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3), (6, 3), (7, 3), (8, 5), (9, 4)]


@given(st.sampled_from(PAIRS), st.lists(st.one_of(st.none(), st.integers(-3, 3)), min_size=1, max_size=5),
       st.sampled_from([VERIFIED_ALGEBRAIC, EVIDENCE_NUMERIC, SUSPECT]), st.booleans(), st.booleans())
def test_classification_invariants(pair, values, status, scf, h1):
    n, p = pair
    degrees = [None if v is None else DegreeResult(v, SIGNATURE) for v in (values * p)[:p]]
    args = (germ(n, p), degrees, SingularityReport(status), Assertions(scf, h1))
    c = classify(*args)
    assert c == classify(*args)
    if c.verdict.kind == TRIVIAL:
        assert c.chi == 1
        if pair == (6, 3):
            assert c.sphere_count == 1
    if pair == (6, 3) and status != SUSPECT and degrees[0] is not None and degrees[0].degree > 0:
        assert c.inconsistent
    known = {d.degree for d in degrees if d is not None}
    if status != SUSPECT and len(known) > 1:
        assert c.inconsistent
    if status != SUSPECT and n % 2 and known - {0}:
        assert c.inconsistent
    if c.link.value == EMPTY:
        assert n == p or pair in {(4, 3), (8, 5), (16, 9)}
