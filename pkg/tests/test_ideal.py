import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import P, polys
from oracles import local_dimension
from realmilnor.errors import NotZeroDimensionalError, ResourceLimitError
from realmilnor.ideal import (
    GREVLEX,
    GRLEX,
    Limits,
    TermOrder,
    buchberger,
    cached_buchberger,
    ideal_contains,
    is_origin_confined,
    normal_form,
    quotient_basis,
)
from realmilnor.polyring import Polynomial


def _texts(gb, variables="xy"):
    return sorted(g.to_text(list(variables)) for g in gb.basis)


def test_hand_computed_basis():
    gb = buchberger([P("x^2 - y^2"), P("x*y")])
    assert _texts(gb) == sorted(["x*y", "x^2 - y^2", "y^3"])
    assert sorted(gb.leading_monomials) == sorted([(1, 1), (2, 0), (0, 3)])


def test_principal_and_redundant_generators():
    assert _texts(buchberger([P("x", "x")]), "x") == ["x"]
    assert _texts(buchberger([P("x^2", "x"), P("x^3", "x")]), "x") == ["x^2"]


def test_normal_forms():
    gb = buchberger([P("x^2 - y^2"), P("x*y")])
    assert normal_form(P("x^3"), gb).is_zero()
    assert normal_form(P("x^2*y + 3*x*y - x^2 + y^2"), gb).is_zero()
    assert normal_form(P("1"), gb) == P("1")
    assert normal_form(P("x^2"), gb) == P("y^2")


def test_quotient_basis():
    gb = buchberger([P("x^2 - y^2"), P("x*y")])
    qb = quotient_basis(gb)
    assert set(qb.monomials) == {(0, 0), (1, 0), (0, 1), (0, 2)}
    assert qb.dimension == 4 == local_dimension([{(2, 0): 1, (0, 2): -1}, {(1, 1): 1}], 2)
    assert quotient_basis(buchberger([P("x", "x")])).monomials == ((0,),)
    with pytest.raises(NotZeroDimensionalError):
        quotient_basis(buchberger([P("x^2")]))


def test_origin_confinement():
    assert is_origin_confined(buchberger([P("x^2 - y^2"), P("x*y")]))
    assert not is_origin_confined(buchberger([P("x^2 - x"), P("y")]))
    assert is_origin_confined(buchberger([P("x"), P("y")]))


def test_resource_limits():
    gens = [P("x^2 - y^2"), P("x*y")]
    with pytest.raises(ResourceLimitError):
        buchberger(gens, limits=Limits(max_degree=2))
    with pytest.raises(ResourceLimitError):
        buchberger(gens, limits=Limits(max_basis=2))


def test_cache_is_transparent(tmp_path):
    gens = [P("x^3 - 3*x*y^2"), P("3*x^2*y - y^3")]
    plain = buchberger(gens)
    first = cached_buchberger(gens, cache_dir=tmp_path)
    second = cached_buchberger(gens, cache_dir=tmp_path)
    assert plain.basis == first.basis == second.basis
    assert len(list(tmp_path.glob("gb-*.json"))) == 1


# ---------------------------------------------------------------------------
# properties over random confined ideals
# ---------------------------------------------------------------------------

@st.composite
def confined_ideals(draw):
    """<x^a, y^b, extras>: the pure powers force the origin to be the only zero."""
    a, b = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    extra = draw(st.lists(polys(max_terms=3, max_exp=3), max_size=2))
    gens = [P(f"x^{a}"), P(f"y^{b}")]
    gens += [e - Polynomial.constant(2, e.constant_term) for e in extra]
    gens = [g for g in gens if not g.is_zero()]
    return gens


@given(confined_ideals())
def test_quotient_dimension_matches_linear_algebra(gens):
    gb = buchberger(gens)
    assert is_origin_confined(gb)
    assert quotient_basis(gb).dimension == local_dimension([g.as_dict() for g in gens], 2)


@given(confined_ideals(), polys(), polys())
def test_normal_form_is_multiplicative(gens, p, q):
    gb = buchberger(gens)
    assert normal_form(p * q, gb) == normal_form(normal_form(p, gb) * normal_form(q, gb), gb)


@given(confined_ideals(), polys(), polys())
def test_membership_is_order_independent(gens, p, h):
    grev = buchberger(gens, TermOrder(GREVLEX))
    grl = buchberger(gens, TermOrder(GRLEX))
    assert ideal_contains(grev, p) == ideal_contains(grl, p)
    member = h * gens[0] + p * gens[-1]
    assert ideal_contains(grev, member) and ideal_contains(grl, member)
    assert quotient_basis(grev).dimension == quotient_basis(grl).dimension


@given(confined_ideals())
def test_variables_are_nilpotent(gens):
    gb = buchberger(gens)
    dim = quotient_basis(gb).dimension
    assume(dim > 0)
    for i in range(2):
        assert normal_form(Polynomial.variable(2, i) ** dim, gb).is_zero()
