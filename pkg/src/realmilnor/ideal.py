"""Buchberger Groebner bases, normal forms and quotient-algebra bases over Q.

Only global term orders are supported.  The local algebra at the origin is
reached by requiring the ideal to be *origin-confined* (its only complex zero
is 0), in which case the global quotient already is the local one.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import gmpy2
from gmpy2 import mpq, mpz

from .errors import NotZeroDimensionalError, ResourceLimitError
from .polyring import Polynomial, parse_polynomial, default_variables

GRLEX = "grlex"
GREVLEX = "grevlex"

DEFAULT_MAX_DEGREE = 60
DEFAULT_MAX_BASIS = 5000


@dataclass(frozen=True)
class TermOrder:
    kind: str = GREVLEX
    permutation: tuple | None = None

    def __post_init__(self):
        if self.kind not in (GRLEX, GREVLEX):
            raise ValueError(f"unknown term order {self.kind!r}")

    def key(self, exps):
        if self.permutation is not None:
            exps = tuple(exps[i] for i in self.permutation)
        if self.kind == GRLEX:
            return (sum(exps), exps)
        return (sum(exps), tuple(-e for e in reversed(exps)))

    def heap_key(self, exps):
        """Key whose ascending order is the term order descending."""
        k = self.key(exps)
        return (-k[0], tuple(-e for e in k[1]))

    def describe(self) -> str:
        if self.permutation is None:
            return self.kind
        return f"{self.kind}{list(self.permutation)}"


@dataclass(frozen=True)
class Limits:
    max_degree: int = DEFAULT_MAX_DEGREE
    max_basis: int = DEFAULT_MAX_BASIS
    max_pairs: int | None = None
    max_work: int | None = None  # coefficient operations across all reductions


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple
    basis: tuple
    order: TermOrder = field(default_factory=TermOrder)

    @property
    def nvars(self) -> int:
        return self.generators[0].nvars

    @property
    def leading_monomials(self) -> tuple:
        return tuple(leading_monomial(g, self.order) for g in self.basis)

    def is_unit(self) -> bool:
        return any(sum(m) == 0 for m in self.leading_monomials)


@dataclass(frozen=True)
class QuotientBasis:
    monomials: tuple

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def index(self) -> dict:
        return {m: k for k, m in enumerate(self.monomials)}


# ---------------------------------------------------------------------------
# low-level helpers on {exps: Fraction} dictionaries
# ---------------------------------------------------------------------------

def leading_monomial(p: Polynomial, order: TermOrder):
    return max(p.as_dict(), key=order.key)


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _to_q(d: dict) -> dict:
    return {m: mpq(c.numerator, c.denominator) for m, c in d.items()}


def _from_q(d: dict) -> dict:
    return {m: Fraction(int(c.numerator), int(c.denominator)) for m, c in d.items()}


def _primitive(d: dict, order: TermOrder) -> dict:
    """Scale to integer coefficients with content 1 and positive leading coefficient."""
    if not d:
        return d
    den = mpz(1)
    for c in d.values():
        den = gmpy2.lcm(den, c.denominator)
    g = mpz(0)
    for c in d.values():
        g = gmpy2.gcd(g, c.numerator * (den // c.denominator))
    lead = max(d, key=order.key)
    if d[lead] < 0:
        g = -g
    factor = mpq(den, g)
    return {m: c * factor for m, c in d.items()}


def _reduce(f: dict, G: list, order: TermOrder, budget: list | None = None) -> dict:
    """Remainder of f on division by G = [(lm, lc, dict), ...].

    ``budget`` is a one-element list of remaining coefficient operations,
    shared across calls; running out raises ResourceLimitError.
    """
    f = dict(f)
    rem = {}
    hkey = order.heap_key
    heap = [(hkey(m), m) for m in f]
    heapq.heapify(heap)
    while heap:
        _, m = heapq.heappop(heap)
        c = f.pop(m, None)
        if c is None:
            continue
        for gm, gc, g in G:
            if _divides(gm, m):
                shift = tuple(a - b for a, b in zip(m, gm))
                q = c / gc
                if budget is not None:
                    budget[0] -= len(g)
                    if budget[0] < 0:
                        raise ResourceLimitError("reduction work exceeds max_work")
                for mon, co in g.items():
                    if mon == gm:
                        continue
                    mm = tuple(a + b for a, b in zip(mon, shift))
                    old = f.get(mm)
                    if old is None:
                        f[mm] = -q * co
                        heapq.heappush(heap, (hkey(mm), mm))
                    else:
                        v = old - q * co
                        if v:
                            f[mm] = v
                        else:
                            del f[mm]
                break
        else:
            rem[m] = c
    return rem


def _spoly(a, b):
    (am, ac, ad), (bm, bc, bd) = a, b
    l = _lcm(am, bm)
    sa = tuple(x - y for x, y in zip(l, am))
    sb = tuple(x - y for x, y in zip(l, bm))
    out: dict = {}
    for mon, co in ad.items():
        mm = tuple(x + y for x, y in zip(mon, sa))
        out[mm] = out.get(mm, 0) + co / ac
    for mon, co in bd.items():
        mm = tuple(x + y for x, y in zip(mon, sb))
        v = out.get(mm, 0) - co / bc
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return {m: c for m, c in out.items() if c}


def _entry(d: dict, order: TermOrder):
    lm = max(d, key=order.key)
    return (lm, d[lm], d)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def buchberger(generators: Sequence[Polynomial], order: TermOrder | None = None,
               limits: Limits | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal spanned by ``generators``.

    Pairs are processed by the normal strategy: smallest lcm of leading
    monomials under ``order``, ties broken by the pair's indices.  Pairs with
    coprime leading monomials are skipped (Buchberger's first criterion).
    """
    order = order or TermOrder()
    limits = limits or Limits()
    generators = tuple(generators)
    if not generators:
        raise ValueError("need at least one generator")
    nv = generators[0].nvars
    if any(g.nvars != nv for g in generators):
        raise ValueError("generators live in different rings")

    budget = None if limits.max_work is None else [limits.max_work]
    G: list = []
    for g in generators:
        d = _to_q(g.as_dict())
        if not d:
            continue
        d = _reduce(d, G, order, budget) if G else d
        if d:
            G.append(_entry(_primitive(d, order), order))
    if not G:
        return GroebnerBasis(generators, (), order)

    def pair_entry(i, j):
        return (order.key(_lcm(G[i][0], G[j][0])), (i, j))

    pairs = [pair_entry(i, j) for i, j in itertools.combinations(range(len(G)), 2)]
    heapq.heapify(pairs)
    processed = 0
    while pairs:
        _, (i, j) = heapq.heappop(pairs)
        gi, gj = G[i], G[j]
        if all(a == 0 or b == 0 for a, b in zip(gi[0], gj[0])):
            continue
        lcm_deg = sum(_lcm(gi[0], gj[0]))
        if lcm_deg > limits.max_degree:
            raise ResourceLimitError(
                f"S-pair degree {lcm_deg} exceeds max_degree={limits.max_degree}"
            )
        processed += 1
        if limits.max_pairs is not None and processed > limits.max_pairs:
            raise ResourceLimitError(f"more than max_pairs={limits.max_pairs} S-pairs reduced")
        s = _spoly(gi, gj)
        h = _reduce(s, G, order, budget)
        if not h:
            continue
        entry = _entry(_primitive(h, order), order)
        if len(G) + 1 > limits.max_basis:
            raise ResourceLimitError(f"basis size exceeds max_basis={limits.max_basis}")
        k = len(G)
        G.append(entry)
        for a in range(k):
            heapq.heappush(pairs, pair_entry(a, k))
        if sum(entry[0]) == 0:
            break  # unit ideal

    return GroebnerBasis(generators, _interreduce(G, order, nv), order)


def _interreduce(G: list, order: TermOrder, nv: int) -> tuple:
    # minimal basis: drop elements whose leading monomial is divisible by another's
    G = sorted(G, key=lambda e: order.key(e[0]))
    minimal = []
    for e in G:
        if not any(_divides(o[0], e[0]) for o in minimal):
            minimal.append(e)
    reduced = []
    for k, e in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        tail = {m: c for m, c in e[2].items() if m != e[0]}
        r = _reduce(tail, others, order)
        d = {e[0]: e[1]}
        d.update(r)
        lc = d[e[0]]
        reduced.append(Polynomial(nv, _from_q({m: c / lc for m, c in d.items()})))
    reduced.sort(key=lambda p: order.key(leading_monomial(p, order)))
    return tuple(reduced)


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    if p.nvars != gb.nvars:
        raise ValueError("polynomial and basis live in different rings")
    G = [_entry(_to_q(g.as_dict()), gb.order) for g in gb.basis]
    return Polynomial(p.nvars, _from_q(_reduce(_to_q(p.as_dict()), G, gb.order)))


class Reducer:
    """Repeated normal forms against one basis without re-building the divisor list."""

    def __init__(self, gb: GroebnerBasis):
        self.gb = gb
        self._G = [_entry(_to_q(g.as_dict()), gb.order) for g in gb.basis]

    def __call__(self, p: Polynomial) -> Polynomial:
        return Polynomial(p.nvars, _from_q(_reduce(_to_q(p.as_dict()), self._G, self.gb.order)))


def quotient_basis(gb: GroebnerBasis) -> QuotientBasis:
    """Standard monomials of a zero-dimensional ideal, ascending in the term order."""
    n = gb.nvars
    lms = gb.leading_monomials
    if any(sum(m) == 0 for m in lms):
        return QuotientBasis(())
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] > 0 and sum(m) == m[i]]
        if not pure:
            raise NotZeroDimensionalError(
                f"variable {i + 1} has no pure power among the leading monomials"
            )
        bounds.append(min(pure))
    standard = [
        exps for exps in itertools.product(*(range(b) for b in bounds))
        if not any(_divides(m, exps) for m in lms)
    ]
    standard.sort(key=gb.order.key)
    return QuotientBasis(tuple(standard))


def is_origin_confined(gb: GroebnerBasis, n: int | None = None) -> bool:
    """True iff every variable is nilpotent modulo the ideal."""
    n = gb.nvars if n is None else n
    qb = quotient_basis(gb)
    if qb.dimension == 0:
        return False  # unit ideal has no zero at all
    reduce = Reducer(gb)
    for i in range(n):
        x = Polynomial.variable(gb.nvars, i)
        r = reduce(x)
        k = 1
        while r and k < qb.dimension:
            r = reduce(r * x)
            k += 1
        if r:
            return False
    return True


def ideal_contains(gb: GroebnerBasis, p: Polynomial) -> bool:
    return normal_form(p, gb).is_zero()


# ---------------------------------------------------------------------------
# optional on-disk cache
# ---------------------------------------------------------------------------

def cache_key(generators: Sequence[Polynomial], order: TermOrder) -> str:
    names = default_variables(generators[0].nvars)
    payload = json.dumps(
        {"generators": [g.to_text(names) for g in generators], "order": order.describe()},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def cached_buchberger(generators, order=None, limits=None, cache_dir=None) -> GroebnerBasis:
    """``buchberger`` with an optional JSON cache; results never depend on the cache."""
    order = order or TermOrder()
    if cache_dir is None:
        return buchberger(generators, order, limits)
    generators = tuple(generators)
    path = Path(cache_dir) / f"gb-{cache_key(generators, order)}.json"
    names = default_variables(generators[0].nvars)
    if path.exists():
        try:
            data = json.loads(path.read_text())
            basis = tuple(parse_polynomial(t, names) for t in data["basis"])
            return GroebnerBasis(generators, basis, order)
        except (OSError, ValueError, KeyError):
            pass
    gb = buchberger(generators, order, limits)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(f".{os.getpid()}.tmp")
    tmp.write_text(json.dumps({"basis": [g.to_text(names) for g in gb.basis],
                               "order": order.describe()}, indent=1))
    tmp.replace(path)
    return gb
