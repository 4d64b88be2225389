"""Exact sparse multivariate polynomials over the rationals.

Polynomials are immutable maps from exponent tuples to nonzero ``Fraction``
coefficients.  Terms are kept in graded-lexicographic order (largest first)
with respect to the variable order supplied by the caller, so two equal
polynomials always print and hash identically.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    GermError,
    NegativeExponentError,
    NotSquareError,
    PolySyntaxError,
    ResourceLimitError,
    UnknownVariableError,
)

MAX_EXPONENT = 64
MAX_TERMS = 100_000

Monomial = tuple


def grlex_key(exps):
    return (sum(exps), exps)


def _coerce(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("_nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | Iterable = ()):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, Fraction] = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise DimensionMismatchError(
                    f"monomial {exps} has length {len(exps)}, ring has {nvars} variables"
                )
            if any(e < 0 for e in exps):
                raise NegativeExponentError(f"negative exponent in {exps}")
            acc[exps] = acc.get(exps, Fraction(0)) + _coerce(c)
        self._nvars = nvars
        self._terms = {m: c for m, c in acc.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # trusted constructor: terms already canonical (no zeros, tuples of ints)
        p = cls.__new__(cls)
        p._nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars, c):
        c = _coerce(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, nvars, i):
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exps, coeff=1):
        exps = tuple(exps)
        return cls(len(exps), {exps: coeff})

    # -- inspection ---------------------------------------------------------

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> tuple:
        """(exponents, coefficient) pairs, largest grlex monomial first."""
        return tuple(sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True))

    def as_dict(self) -> dict:
        return dict(self._terms)

    def coefficient(self, exps) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self._nvars, Fraction(0))

    def lowest_degree_part(self) -> "Polynomial":
        """Homogeneous component of smallest total degree."""
        if not self._terms:
            return self
        d = min(sum(m) for m in self._terms)
        return Polynomial._raw(self._nvars, {m: c for m, c in self._terms.items() if sum(m) == d})

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if isinstance(other, Polynomial):
            if other._nvars != self._nvars:
                raise DimensionMismatchError(
                    f"ring mismatch: {self._nvars} vs {other._nvars} variables"
                )
            return other
        if isinstance(other, (int, Rational)):
            return Polynomial.constant(self._nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial._raw(self._nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self._nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self._mul(other)

    def _mul(self, other, limit=None):
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
            if limit is not None and len(out) > limit:
                raise ResourceLimitError(f"expansion exceeds {limit} terms")
        return Polynomial._raw(self._nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return self._pow(k)

    def _pow(self, k: int, limit=None):
        if not isinstance(k, int) or k < 0:
            raise NegativeExponentError(f"exponent must be a non-negative integer, got {k!r}")
        result = Polynomial.constant(self._nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result._mul(base, limit)
            k >>= 1
            if k:
                base = base._mul(base, limit)
        return result

    def scale(self, c) -> "Polynomial":
        c = _coerce(c)
        if not c:
            return Polynomial.zero(self._nvars)
        return Polynomial._raw(self._nvars, {m: v * c for m, v in self._terms.items()})

    def mul_monomial(self, exps, c=1) -> "Polynomial":
        c = _coerce(c)
        if not c:
            return Polynomial.zero(self._nvars)
        return Polynomial._raw(
            self._nvars,
            {tuple(a + b for a, b in zip(m, exps)): v * c for m, v in self._terms.items()},
        )

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._nvars == other._nvars and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self == Polynomial.constant(self._nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation -------------------------------------------

    def diff(self, i: int) -> "Polynomial":
        return differentiate(self, i)

    def __call__(self, point):
        return evaluate(self, point)

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Compose with a polynomial map: x_i -> images[i]."""
        if len(images) != self._nvars:
            raise DimensionMismatchError(
                f"need {self._nvars} images, got {len(images)}"
            )
        if not images:
            return self
        target = images[0].nvars
        result = Polynomial.zero(target)
        cache: dict = {}
        for exps, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(exps):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = images[i] ** e
                    term = term * cache[key]
            result = result + term
        return result

    # -- printing -----------------------------------------------------------

    def to_text(self, variables: Sequence[str] | None = None) -> str:
        if variables is None:
            variables = default_variables(self._nvars)
        if len(variables) != self._nvars:
            raise DimensionMismatchError("variable name count does not match ring")
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.terms:
            factors = []
            for name, e in zip(variables, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            a = abs(c)
            if not mono:
                body = _fmt_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_rational(a)}*{mono}"
            if not parts:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f"- {body}" if c < 0 else f"+ {body}")
        return " ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Polynomial({self._nvars}, {self.to_text()!r})"


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def default_variables(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos,
                                  "number, identifier, operator or parenthesis")
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, variables):
        self.toks = _tokenize(text)
        self.i = 0
        self.index = {v: k for k, v in enumerate(variables)}
        self.n = len(variables)

    @property
    def cur(self):
        return self.toks[self.i]

    def accept(self, op):
        if self.cur.kind == "op" and self.cur.text == op:
            self.i += 1
            return True
        return False

    def expect_uint(self, what):
        tok = self.cur
        if tok.kind == "op" and tok.text == "-":
            raise NegativeExponentError(f"negative exponent at position {tok.pos}")
        if tok.kind != "num":
            raise PolySyntaxError(f"unexpected {_describe(tok)}", tok.pos, what)
        self.i += 1
        return int(tok.text), tok

    def parse(self):
        p = self.expr()
        if self.cur.kind != "eof":
            raise PolySyntaxError(f"unexpected {_describe(self.cur)}", self.cur.pos,
                                  "'+', '-', '*' or end of input")
        return p

    def expr(self):
        p = self.term()
        while True:
            if self.accept("+"):
                p = p + self.term()
            elif self.accept("-"):
                p = p - self.term()
            else:
                return p

    def term(self):
        p = self.factor()
        while self.accept("*"):
            p = p._mul(self.factor(), MAX_TERMS)
        return p

    def factor(self):
        p = self.base()
        if self.accept("^"):
            k, tok = self.expect_uint("unsigned integer exponent")
            if k > MAX_EXPONENT:
                raise ResourceLimitError(
                    f"exponent {k} at position {tok.pos} exceeds cap {MAX_EXPONENT}"
                )
            p = p._pow(k, MAX_TERMS)
        return p

    def base(self):
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            value = Fraction(int(tok.text))
            if self.accept("/"):
                den, dtok = self.expect_uint("unsigned integer denominator")
                if den == 0:
                    raise PolySyntaxError("zero denominator", dtok.pos, "nonzero denominator")
                value = value / den
            return Polynomial.constant(self.n, value)
        if tok.kind == "id":
            self.i += 1
            if tok.text not in self.index:
                raise UnknownVariableError(tok.text, tok.pos)
            return Polynomial.variable(self.n, self.index[tok.text])
        if self.accept("("):
            p = self.expr()
            if not self.accept(")"):
                raise PolySyntaxError(f"unexpected {_describe(self.cur)}", self.cur.pos, "')'")
            return p
        if self.accept("-"):
            return -self.factor()
        raise PolySyntaxError(f"unexpected {_describe(tok)}", tok.pos,
                              "number, identifier, '(' or '-'")


def _describe(tok: _Tok) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


def _guard_terms(p: Polynomial):
    if len(p) > MAX_TERMS:
        raise ResourceLimitError(f"polynomial has {len(p)} terms, cap is {MAX_TERMS}")


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``text`` into a canonical polynomial over ``variables``.

    Grammar (whitespace ignored, no implicit multiplication)::

        expr   := term (('+'|'-') term)*
        term   := factor ('*' factor)*
        factor := base ('^' uint)?
        base   := rational | identifier | '(' expr ')' | '-' factor
    """
    variables = list(variables)
    if len(set(variables)) != len(variables):
        raise ValueError(f"duplicate variable names in {variables}")
    p = _Parser(text, variables).parse()
    _guard_terms(p)
    for exps in p._terms:
        if max(exps, default=0) > MAX_EXPONENT:
            raise ResourceLimitError(f"exponent above cap {MAX_EXPONENT} in result")
    return p


# ---------------------------------------------------------------------------
# Calculus
# ---------------------------------------------------------------------------

def differentiate(p: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < p.nvars:
        raise IndexError(f"variable index {i} out of range for {p.nvars} variables")
    out = {}
    for exps, c in p._terms.items():
        e = exps[i]
        if e:
            m = exps[:i] + (e - 1,) + exps[i + 1:]
            out[m] = c * e
    return Polynomial._raw(p.nvars, out)


def gradient(p: Polynomial) -> list[Polynomial]:
    return [differentiate(p, i) for i in range(p.nvars)]


def jacobian_matrix(g: Sequence[Polynomial]) -> list[list[Polynomial]]:
    if not g:
        return []
    return [gradient(gi) for gi in g]


def _minor_expander(matrix: Sequence[Sequence[Polynomial]], max_work: int | None = None):
    """minor(cols): determinant of the bottom len(cols) rows restricted to ``cols``.

    Laplace expansion along the top row with one memo shared by every column
    subset, so all maximal minors of a wide matrix reuse each other's pieces.
    ``max_work`` caps the total number of coefficient products.
    """
    p = len(matrix)
    nv = matrix[0][0].nvars
    memo: dict = {(): Polynomial.constant(nv, 1)}
    work = [0]

    def minor(cols):
        if cols in memo:
            return memo[cols]
        row = matrix[p - len(cols)]
        total = Polynomial.zero(nv)
        for k, c in enumerate(cols):
            entry = row[c]
            if entry.is_zero():
                continue
            sub = minor(cols[:k] + cols[k + 1:])
            work[0] += len(entry) * len(sub)
            if max_work is not None and work[0] > max_work:
                raise ResourceLimitError(f"minor expansion exceeds {max_work} coefficient products")
            term = entry * sub
            total = total - term if k % 2 else total + term
        memo[cols] = total
        return total

    return minor


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant of a square matrix of polynomials (Laplace with memoised minors)."""
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix):
        raise NotSquareError(f"matrix is not square ({n} rows)")
    return _minor_expander(matrix)(tuple(range(n)))


def jacobian_determinant(g: Sequence[Polynomial]) -> Polynomial:
    if not g:
        raise NotSquareError("empty system")
    n = g[0].nvars
    if len(g) != n:
        raise NotSquareError(f"{len(g)} components in {n} variables")
    return determinant(jacobian_matrix(g))


def maximal_minors(matrix: Sequence[Sequence[Polynomial]], max_work: int | None = None) -> list[Polynomial]:
    """All p x p minors of a p x n polynomial matrix, columns in lexicographic order."""
    p = len(matrix)
    n = len(matrix[0]) if p else 0
    if p == 0 or n < p:
        return []
    minor = _minor_expander(matrix, max_work)
    return [minor(cols) for cols in itertools.combinations(range(n), p)]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(p: Polynomial, point):
    """Exact value at a rational point, float value at a float point."""
    point = list(point)
    if len(point) != p.nvars:
        raise DimensionMismatchError(f"point has {len(point)} coordinates, ring has {p.nvars}")
    exact = all(isinstance(v, (int, Rational)) and not isinstance(v, bool) for v in point)
    if exact:
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for exps, c in p._terms.items():
            t = c
            for v, e in zip(pt, exps):
                if e:
                    t *= v ** e
            total += t
        return total
    pt = [float(v) for v in point]
    return math.fsum(
        float(c) * math.prod(v ** e for v, e in zip(pt, exps) if e)
        for exps, c in p._terms.items()
    )


class PolyMap:
    """Vectorised float evaluation of a list of polynomials and of their Jacobian.

    ``PolyMap(g)(X)`` takes points of shape (m, n) and returns (m, k);
    ``jacobian(X)`` returns (m, k, n).
    """

    def __init__(self, components: Sequence[Polynomial]):
        components = list(components)
        if not components:
            raise ValueError("empty polynomial map")
        self.nvars = components[0].nvars
        if any(c.nvars != self.nvars for c in components):
            raise DimensionMismatchError("components live in different rings")
        self.components = components
        self._value = _compile(components)
        self._jac = _compile([differentiate(c, i) for c in components for i in range(self.nvars)])

    def _apply(self, compiled, X):
        exps, coefs = compiled
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if exps.shape[0] == 0:
            return np.zeros((X.shape[0], coefs.shape[1]))
        maxpow = int(exps.max(initial=0))
        pw = np.empty((maxpow + 1,) + X.shape)
        pw[0] = 1.0
        for k in range(1, maxpow + 1):
            pw[k] = pw[k - 1] * X
        cols = np.arange(X.shape[1])
        mono = pw[exps[None, :, :], np.arange(X.shape[0])[:, None, None], cols[None, None, :]]
        return mono.prod(axis=2) @ coefs

    def __call__(self, X):
        return self._apply(self._value, X)

    def jacobian(self, X):
        out = self._apply(self._jac, X)
        return out.reshape(out.shape[0], len(self.components), self.nvars)


def _compile(polys: Sequence[Polynomial]):
    """Union of monomials (T, n) and coefficient matrix (T, len(polys))."""
    nv = polys[0].nvars if polys else 0
    monos = sorted({m for p in polys for m in p.as_dict()})
    index = {m: k for k, m in enumerate(monos)}
    coefs = np.zeros((len(monos), len(polys)))
    for j, p in enumerate(polys):
        for m, c in p.as_dict().items():
            coefs[index[m], j] = float(c)
    exps = np.array(monos, dtype=int).reshape(len(monos), nv)
    return exps, coefs


# ---------------------------------------------------------------------------
# Map germs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapGerm:
    name: str
    variables: tuple
    components: tuple
    metadata: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "metadata", tuple(self.metadata))
        if not self.components:
            raise GermError(f"germ {self.name!r} has no components")
        for k, c in enumerate(self.components):
            if c.nvars != len(self.variables):
                raise GermError(f"component {k + 1} of {self.name!r} is in the wrong ring")
            if c.constant_term != 0:
                raise GermError(
                    f"component {k + 1} of {self.name!r} has constant term "
                    f"{c.constant_term}; a germ must vanish at the origin"
                )

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def p(self) -> int:
        return len(self.components)

    @classmethod
    def from_strings(cls, name, variables, components, **metadata):
        variables = list(variables)
        polys = [parse_polynomial(text, variables) for text in components]
        return cls(name, variables, polys, tuple(sorted(metadata.items())))

    def component_texts(self) -> list[str]:
        return [c.to_text(self.variables) for c in self.components]

    def to_json_dict(self) -> dict:
        d = {"name": self.name, "variables": list(self.variables),
             "components": self.component_texts()}
        d.update(dict(self.metadata))
        return d
