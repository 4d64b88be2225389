"""Exact local degree through the signature of the Eisenbud-Levine-Khimshiashvili form.

For g: (R^n, 0) -> (R^n, 0) whose ideal <g_1, ..., g_n> has the origin as its
only complex zero, the quotient algebra A = Q[x]/<g> is finite dimensional and
the Jacobian determinant J spans its socle.  For any linear functional phi on A
with phi(J) > 0 the symmetric form (a, b) -> phi(a*b) is nondegenerate and its
signature is the local topological degree of g at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    DegenerateFormError,
    DimensionMismatchError,
    NotOriginConfinedError,
    ZeroJacobianClassError,
)
from .ideal import (
    GroebnerBasis,
    Limits,
    QuotientBasis,
    Reducer,
    TermOrder,
    cached_buchberger,
    is_origin_confined,
    quotient_basis,
)
from .polyring import Polynomial, jacobian_determinant

SIGNATURE = "signature"
NUMERIC = "numeric"
INJECTED = "injected"


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    method: str
    certificate: dict = field(default_factory=dict)
    warnings: tuple = ()

    def to_dict(self) -> dict:
        return {"degree": self.degree, "method": self.method,
                "certificate": self.certificate, "warnings": list(self.warnings)}


@dataclass(frozen=True)
class BilinearForm:
    basis: QuotientBasis
    matrix: tuple  # rows of Fractions

    @property
    def size(self) -> int:
        return len(self.matrix)


def inertia(m: Sequence[Sequence]) -> tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) of a symmetric rational matrix by congruence."""
    a = [[Fraction(v) for v in row] for row in m]
    size = len(a)
    if any(len(row) != size for row in a):
        raise DimensionMismatchError("matrix is not square")
    for i in range(size):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(size))
    pos = neg = 0
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j, giving a[i][i] = 2 a[i][j] != 0
            for k in range(size):
                a[i][k] += a[j][k]
            for k in range(size):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        col = [a[k][piv] for k in active]
        for x, r in enumerate(active):
            if not col[x]:
                continue
            f = col[x] / d
            row_r = a[r]
            row_p = a[piv]
            for c in active:
                if row_p[c]:
                    row_r[c] -= f * row_p[c]
    return pos, neg, size - pos - neg


def signature(m: Sequence[Sequence]) -> int:
    pos, neg, _ = inertia(m)
    return pos - neg


def choose_functional(j_nf: Polynomial, basis: QuotientBasis, order: TermOrder) -> list[Fraction]:
    """Dual of the highest-order standard monomial present in J, scaled so phi(J) = 1."""
    if j_nf.is_zero():
        raise ZeroJacobianClassError("Jacobian determinant is zero in the quotient algebra")
    idx = basis.index()
    present = [m for m, _ in j_nf.as_dict().items()]
    top = max(present, key=order.key)
    weights = [Fraction(0)] * basis.dimension
    weights[idx[top]] = 1 / j_nf.coefficient(top)
    return weights


def apply_functional(weights, p: Polynomial, basis: QuotientBasis) -> Fraction:
    idx = basis.index()
    return sum((weights[idx[m]] * c for m, c in p.as_dict().items()), Fraction(0))


@dataclass
class LocalAlgebra:
    """Quotient algebra of an origin-confined ideal with cached products."""

    gb: GroebnerBasis
    basis: QuotientBasis
    jacobian: Polynomial

    def __post_init__(self):
        self._reduce = Reducer(self.gb)
        nv = self.gb.nvars
        mons = [Polynomial.monomial(m) for m in self.basis.monomials] if nv else []
        size = self.basis.dimension
        self.products = [[None] * size for _ in range(size)]
        for i in range(size):
            for j in range(i, size):
                prod = self._reduce(mons[i] * mons[j])
                self.products[i][j] = self.products[j][i] = prod

    def form(self, weights) -> BilinearForm:
        size = self.basis.dimension
        rows = tuple(
            tuple(apply_functional(weights, self.products[i][j], self.basis) for j in range(size))
            for i in range(size)
        )
        return BilinearForm(self.basis, rows)


def local_algebra(g: Sequence[Polynomial], order: TermOrder | None = None,
                  limits: Limits | None = None, cache_dir=None) -> LocalAlgebra:
    """Groebner basis, quotient basis and Jacobian class of <g>; checks confinement."""
    g = list(g)
    order = order or TermOrder()
    jac = jacobian_determinant(g)
    if any(gi.constant_term for gi in g):
        raise ValueError("map does not vanish at the origin")
    gb = cached_buchberger(g, order, limits, cache_dir)
    basis = quotient_basis(gb)
    if not is_origin_confined(gb):
        raise NotOriginConfinedError(
            "ideal has complex zeros other than the origin; global and local algebras differ"
        )
    return LocalAlgebra(gb, basis, Reducer(gb)(jac))


def local_degree_elk(g: Sequence[Polynomial], order: TermOrder | None = None,
                     limits: Limits | None = None, cache_dir=None) -> DegreeResult:
    """Local degree at 0 of a polynomial map with algebraically isolated zero."""
    order = order or TermOrder()
    alg = local_algebra(g, order, limits, cache_dir)
    weights = choose_functional(alg.jacobian, alg.basis, order)
    form = alg.form(weights)
    pos, neg, zero = inertia(form.matrix)
    if zero:
        raise DegenerateFormError(
            "bilinear form is singular although phi(J) > 0",
            diagnostics={
                "basis": [list(m) for m in alg.basis.monomials],
                "jacobian_class": str(alg.jacobian),
                "weights": [str(w) for w in weights],
                "inertia": [pos, neg, zero],
            },
        )
    cert = {
        "quotient_dimension": alg.basis.dimension,
        "standard_monomials": [list(m) for m in alg.basis.monomials],
        "functional": [str(w) for w in weights],
        "inertia": [pos, neg, zero],
        "order": order.describe(),
    }
    return DegreeResult(pos - neg, SIGNATURE, cert)
