"""Triviality verdicts for isolated-singularity map germs (R^n, 0) -> (R^p, 0).

A germ is *trivial* when its Milnor fiber is diffeomorphic to the closed
(n - p)-disk.  The decision logic combines:

* Euler characteristic of the fiber: 1 - deg_0(grad f_1) for even n, 1 for odd n;
  moreover all deg_0(grad f_i) agree (and vanish for odd n);
* Church-Lamotke: the link can be empty only for n = p or (n, p) in
  {(4, 3), (8, 5), (16, 9)}, and which dimension pairs admit non-trivial germs;
* the n - p = 3 characterisations: (6, 3) trivial iff degree 0, (8, 5) trivial
  iff the link is nonempty, (5, 2) trivial iff the fiber is simply connected;
* the (4, 2) criterion: trivial iff degree 0;
* for (6, 3) the Euler characteristic counts the 2-spheres bounding the fiber.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .elk import DegreeResult, SIGNATURE, inertia
from .errors import InconsistentEvidenceError, ResourceLimitError, NotZeroDimensionalError
from .ideal import Limits, TermOrder, cached_buchberger, is_origin_confined, quotient_basis
from .numeric import NumericConfig, sphere_points
from .polyring import MapGerm, PolyMap, Polynomial, jacobian_matrix, maximal_minors

VERIFIED_ALGEBRAIC = "isolated-verified-algebraic"
EVIDENCE_NUMERIC = "isolated-evidence-numeric"
SUSPECT = "suspect-nonisolated"
NOT_SINGULAR = "not-singular-at-origin"

TRIVIAL = "Trivial"
NONTRIVIAL = "NonTrivial"
UNDETERMINED = "Undetermined"

EMPTY = "empty"
NONEMPTY = "nonempty"
NONEMPTY_CONNECTED = "nonempty-connected"
UNKNOWN = "unknown"

# sigma_min / sigma_max of the Jacobian below this counts as rank deficient
RANK_RATIO_TOL = 1e-6
ISOLATION_SAMPLES = 2 ** 14
SINGULARITY_GB_LIMITS = Limits(max_degree=24, max_basis=400, max_pairs=400, max_work=200_000)
MINOR_WORK_LIMIT = 500_000

EMPTY_LINK_PAIRS = {(4, 3), (8, 5), (16, 9)}

# Citation anchors: stable identifiers with a one-line statement of the fact used.
CITATIONS = {
    "euler-even": "n even: chi(F_f) = 1 - deg_0(grad f_1), and deg_0(grad f_i) is the same for every i",
    "euler-odd": "n odd: chi(F_f) = 1, and deg_0(grad f_i) = 0 for every i",
    "cl-empty-link": "Church-Lamotke: 0 isolated in f^-1(0) forces n = p or (n,p) in {(4,3),(8,5),(16,9)}; "
                     "for n = p trivial except the exceptional case, the other pairs never trivial",
    "cl-triage": "Church-Lamotke: for n-p <= 2 non-trivial germs exist only for (2,2),(4,3),(4,2); "
                 "for n-p >= 4 they exist for all pairs; for n-p = 3 only (5,2),(8,5) and possibly (6,3)",
    "char-63": "(6,3): f trivial iff deg_0(grad f_1) = 0",
    "char-63-link": "(6,3): f trivial iff the link is connected iff deg_0(grad f_1) = 0",
    "char-85": "(8,5): f trivial iff the link is nonempty",
    "char-85-degree": "(8,5): f trivial iff the link is nonempty iff deg_0(grad f_1) = 0",
    "char-52": "(5,2): f trivial iff pi_1(F_f) = 0",
    "h1-not-enough": "(5,2): H_1(F_f) = 0 makes the link a 2-sphere but does not force a disk fiber "
                     "(homology 3-spheres that are not simply connected)",
    "char-42": "(4,2): f trivial iff deg_0(grad f_1) = 0",
    "sphere-count": "(6,3): chi(F_f) equals the number of 2-spheres in the boundary of F_f",
    "boundary-euler": "compact odd-dimensional M: chi(boundary M) = 2 chi(M)",
    "fiber-connectivity": "nonempty link: the Milnor fiber is (p-2)-connected",
    "disk-euler": "a closed disk has Euler characteristic 1",
}


@dataclass(frozen=True)
class SingularityReport:
    status: str
    details: str = ""
    min_rank_ratio: float | None = None
    warnings: tuple = ()

    @property
    def isolated(self) -> bool:
        return self.status in (VERIFIED_ALGEBRAIC, EVIDENCE_NUMERIC)

    def to_dict(self) -> dict:
        return {"status": self.status, "details": self.details,
                "min_rank_ratio": None if self.min_rank_ratio is None else float(f"{self.min_rank_ratio:.6g}"),
                "warnings": list(self.warnings)}


@dataclass(frozen=True)
class LinkStatus:
    value: str
    justification: str = ""

    def to_dict(self):
        return {"value": self.value, "justification": self.justification}


@dataclass(frozen=True)
class Verdict:
    kind: str
    reason: str = ""
    evidence: str = "algebraic"

    @property
    def label(self) -> str:
        if self.kind == TRIVIAL and self.evidence == "numeric":
            return "Trivial (numeric-evidence)"
        if self.kind == UNDETERMINED and self.reason:
            return f"Undetermined({self.reason})"
        return self.kind

    def to_dict(self):
        return {"kind": self.kind, "label": self.label, "reason": self.reason,
                "evidence": self.evidence}


@dataclass(frozen=True)
class Assertions:
    """Facts the user vouches for that the tool cannot compute."""

    simply_connected_fiber: bool = False
    h1_trivial: bool = False


@dataclass(frozen=True)
class Classification:
    pair: tuple
    verdict: Verdict
    chi: int | None
    link: LinkStatus
    sphere_count: int | None
    degrees: tuple
    citations: tuple
    notes: tuple = ()
    inconsistencies: tuple = ()

    @property
    def inconsistent(self) -> bool:
        return bool(self.inconsistencies)

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "verdict": self.verdict.to_dict(),
            "chi": self.chi,
            "link": self.link.to_dict(),
            "sphere_count": self.sphere_count,
            "degrees": list(self.degrees),
            "citations": [{"anchor": a, "statement": CITATIONS[a]} for a in self.citations],
            "notes": list(self.notes),
            "inconsistencies": list(self.inconsistencies),
        }


# ---------------------------------------------------------------------------
# singularity check
# ---------------------------------------------------------------------------

def _rank_at_origin(jac: Sequence[Sequence[Polynomial]]) -> int:
    rows = [[Fraction(e.constant_term) for e in row] for row in jac]
    rank, col, m = 0, 0, [r[:] for r in rows]
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            f = m[r][col] / m[rank][col]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def _rank_ratio(jm: PolyMap, X) -> np.ndarray:
    s = np.linalg.svd(jm.jacobian(X), compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(s[:, 0] > 0, s[:, -1] / s[:, 0], 0.0)


def _min_rank_ratio(jm: PolyMap, n: int, radius: float, seed: int) -> float:
    """Smallest sigma_min/sigma_max of the Jacobian on the sphere of given radius."""
    pts = sphere_points(n, ISOLATION_SAMPLES, seed) * radius
    ratios = _rank_ratio(jm, pts)
    best = np.argsort(ratios, kind="stable")[:4]
    minimum = float(ratios[best[0]])
    if n > 1:
        p = len(jm.components)

        def objective(v):
            x = radius * v / np.linalg.norm(v)
            J = jm.jacobian(x[None, :])[0]
            fro = np.sum(J * J)
            if fro == 0:
                return 0.0
            return float(np.linalg.det(J @ J.T) / (fro / p) ** p)

        for k in best:
            sol = minimize(objective, pts[k] / radius, method="BFGS",
                           options={"gtol": 1e-14, "maxiter": 200})
            x = radius * sol.x / np.linalg.norm(sol.x)
            minimum = min(minimum, float(_rank_ratio(jm, x[None, :])[0]))
    return minimum


def _definite_quadratic(p: Polynomial) -> bool:
    """Is p's lowest-degree part a positive or negative definite quadratic form?"""
    low = p.lowest_degree_part()
    if low.total_degree != 2:
        return False
    n = p.nvars
    q = [[Fraction(0)] * n for _ in range(n)]
    for m, c in low.as_dict().items():
        idx = [i for i, e in enumerate(m) for _ in range(e)]
        i, j = idx
        if i == j:
            q[i][i] += c
        else:
            q[i][j] += c / 2
            q[j][i] += c / 2
    pos, neg, _ = inertia(q)
    return pos == n or neg == n


def singularity_check(f: MapGerm, cfg: NumericConfig | None = None,
                      cache_dir=None, algebraic: bool = True) -> SingularityReport:
    """Classify the origin as regular, isolated singular point, or suspect."""
    cfg = cfg or NumericConfig()
    jac = jacobian_matrix(list(f.components))
    if _rank_at_origin(jac) == f.p:
        return SingularityReport(NOT_SINGULAR, "Jacobian has full rank p at the origin")
    if f.p > f.n:
        return SingularityReport(SUSPECT, "more components than variables: rank p is never attained")

    warnings = []
    jm = PolyMap(list(f.components))
    radii = (cfg.epsilon, cfg.epsilon / 2, cfg.epsilon / 4)
    ratios = [_min_rank_ratio(jm, f.n, r, cfg.seed + 7 + k) for k, r in enumerate(radii)]
    min_ratio = min(ratios)
    numeric_ok = min_ratio > RANK_RATIO_TOL

    certificate = None
    if algebraic:
        try:
            minors = [m for m in maximal_minors(jac, MINOR_WORK_LIMIT) if not m.is_zero()]
        except ResourceLimitError as exc:
            minors = None
            warnings.append(f"algebraic isolation check skipped: {exc}")
        if minors == []:
            return SingularityReport(SUSPECT, "all maximal minors vanish identically", min_ratio)
        definite = None
        if minors:
            definite = next((k for k, m in enumerate(minors) if _definite_quadratic(m)), None)
        if definite is not None:
            certificate = f"maximal minor #{definite + 1} starts with a definite quadratic form"
        elif minors:
            try:
                gb = cached_buchberger(minors, TermOrder(), SINGULARITY_GB_LIMITS, cache_dir)
                quotient_basis(gb)
                if is_origin_confined(gb):
                    certificate = "ideal of maximal minors is zero-dimensional and origin-confined"
            except NotZeroDimensionalError:
                pass
            except ResourceLimitError as exc:
                warnings.append(f"algebraic isolation check skipped: {exc}")

    detail = f"min sigma_min/sigma_max of Df on spheres of radius {radii}: " \
             + ", ".join(f"{r:.3g}" for r in ratios)
    if certificate:
        if not numeric_ok:
            warnings.append("numeric sampling found a near rank drop despite the algebraic certificate")
        return SingularityReport(VERIFIED_ALGEBRAIC, certificate + "; " + detail, min_ratio, tuple(warnings))
    if numeric_ok:
        return SingularityReport(EVIDENCE_NUMERIC, detail, min_ratio, tuple(warnings))
    return SingularityReport(SUSPECT, detail, min_ratio, tuple(warnings))


# ---------------------------------------------------------------------------
# structural facts
# ---------------------------------------------------------------------------

def euler_characteristic(n: int, deg: int | None) -> int | None:
    if n % 2:
        return 1
    if deg is None:
        return None
    return 1 - deg


def link_status(pair: tuple, deg: int | None, verdict: str | None = None) -> LinkStatus:
    n, p = pair
    if n != p and (n, p) not in EMPTY_LINK_PAIRS:
        if (n, p) == (6, 3) and verdict == TRIVIAL:
            return LinkStatus(NONEMPTY_CONNECTED, "char-63-link")
        return LinkStatus(NONEMPTY, "cl-empty-link")
    if (n, p) == (8, 5) and deg is not None:
        return LinkStatus(NONEMPTY if deg == 0 else EMPTY, "char-85-degree")
    return LinkStatus(UNKNOWN, "cl-empty-link")


def sphere_count(chi: int | None, pair: tuple, link: LinkStatus,
                 simply_connected_fiber: bool = False) -> int | None:
    """Number of 2-spheres bounding a simply connected 3-dimensional fiber."""
    if chi is None or link.value not in (NONEMPTY, NONEMPTY_CONNECTED):
        return None
    if tuple(pair) != (6, 3) and not simply_connected_fiber:
        return None
    if chi < 1:
        raise InconsistentEvidenceError(
            f"chi = {chi} would mean {chi} boundary spheres; a nonempty link needs at least one"
        )
    return chi


def church_lamotke_triage(n: int, p: int) -> str:
    d = n - p
    if d < 0 or p < 2:
        return "outside n >= p >= 2"
    if d <= 2:
        if (n, p) in {(2, 2), (4, 3), (4, 2)}:
            return "non-trivial germs exist for this pair"
        return "every isolated-singularity germ in this pair is trivial"
    if d == 3:
        if (n, p) in {(5, 2), (8, 5), (6, 3)}:
            return "decided germ by germ by the n-p = 3 characterisation"
        return "every isolated-singularity germ in this pair is trivial"
    return "non-trivial germs exist for this pair"


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _degree_values(degrees) -> list:
    out = []
    for d in degrees:
        if isinstance(d, DegreeResult):
            out.append(d.degree)
        else:
            out.append(d)
    return out


def classify(f: MapGerm, degrees: Sequence, sing: SingularityReport,
             assertions: Assertions | None = None) -> Classification:
    """Decision table over (n, p); never raises, problems become notes or inconsistencies."""
    assertions = assertions or Assertions()
    n, p = f.n, f.p
    pair = (n, p)
    degs = _degree_values(degrees)
    methods = [d.method for d in degrees if isinstance(d, DegreeResult)]
    cites: list[str] = []
    notes: list[str] = []
    bad: list[str] = []

    def cite(*anchors):
        for a in anchors:
            if a not in cites:
                cites.append(a)

    def done(verdict, chi=None, link=None, spheres=None):
        return Classification(pair, verdict, chi, link or LinkStatus(UNKNOWN), spheres,
                              tuple(degs), tuple(cites), tuple(notes), tuple(bad))

    if not (n >= p >= 2):
        return done(Verdict(UNDETERMINED, "requires n >= p >= 2"))
    if not sing.isolated:
        return done(Verdict(UNDETERMINED, f"singularity status is {sing.status}"))

    known = [d for d in degs if d is not None]
    if len(set(known)) > 1:
        bad.append(f"component degrees differ: {degs}")
        cite("euler-even" if n % 2 == 0 else "euler-odd")
    if n % 2 and any(known):
        bad.append(f"n is odd but a gradient degree is nonzero: {degs}")
        cite("euler-odd")
    deg = degs[0] if degs and degs[0] is not None else (known[0] if known else None)
    if deg is not None and (not degs or degs[0] is None):
        notes.append("deg_0(grad f_1) unavailable; using another component's degree")

    chi = euler_characteristic(n, deg)
    cite("euler-odd" if n % 2 else "euler-even")
    algebraic = sing.status == VERIFIED_ALGEBRAIC and (
        not methods or all(m == SIGNATURE for m in methods[:1]))
    evidence = "algebraic" if algebraic else "numeric"

    if bad:
        return done(Verdict(UNDETERMINED, "InconsistentEvidence: " + "; ".join(bad), evidence),
                    chi, link_status(pair, None))

    if pair == (6, 3):
        cite("char-63", "char-63-link")
        if deg is None:
            return done(Verdict(UNDETERMINED, "degree unknown", evidence), chi, link_status(pair, None))
        kind = TRIVIAL if deg == 0 else NONTRIVIAL
        link = link_status(pair, deg, kind)
        cite("sphere-count", "boundary-euler")
        try:
            spheres = sphere_count(chi, pair, link)
        except InconsistentEvidenceError as exc:
            bad.append(str(exc))
            return done(Verdict(UNDETERMINED, "InconsistentEvidence: " + str(exc), evidence), chi, link)
        if kind == TRIVIAL:
            cite("disk-euler")
        return done(Verdict(kind, "", evidence), chi, link, spheres)

    if pair == (8, 5):
        cite("char-85", "char-85-degree", "cl-empty-link")
        if deg is None:
            return done(Verdict(UNDETERMINED, "degree unknown", evidence), chi, link_status(pair, None))
        link = link_status(pair, deg)
        if deg == 0:
            cite("fiber-connectivity")
            return done(Verdict(TRIVIAL, "", evidence), chi, link,
                        sphere_count(chi, pair, link, simply_connected_fiber=True))
        return done(Verdict(NONTRIVIAL, "", evidence), chi, link)

    if pair == (5, 2):
        cite("char-52")
        link = link_status(pair, deg)
        if assertions.simply_connected_fiber:
            notes.append("fiber simple connectivity asserted by the user, not computed")
            return done(Verdict(TRIVIAL, "user-asserted pi_1(F_f) = 0", evidence), chi, link,
                        sphere_count(chi, pair, link, simply_connected_fiber=True))
        if assertions.h1_trivial:
            cite("h1-not-enough")
            notes.append("H_1(F_f) = 0 assertion ignored: homology alone does not force a disk fiber")
        return done(Verdict(UNDETERMINED, "requires pi_1(F_f)=0, not machine-checked", evidence),
                    chi, link)

    if pair == (4, 2):
        cite("char-42")
        link = link_status(pair, deg)
        if deg is None:
            return done(Verdict(UNDETERMINED, "degree unknown", evidence), chi, link)
        return done(Verdict(TRIVIAL if deg == 0 else NONTRIVIAL, "", evidence), chi, link)

    if n == p:
        cite("cl-empty-link")
        link = link_status(pair, deg)
        if n == 2:
            notes.append("the exceptional equal-dimension case is not pinned down; "
                         "(2,2) admits non-trivial germs")
            cite("cl-triage")
            return done(Verdict(UNDETERMINED, "n = p = 2 is the exceptional equal-dimension case",
                                evidence), chi, link)
        if chi is not None and chi != 1:
            cite("disk-euler")
            bad.append(f"equal dimensions force a trivial germ, but chi = {chi} != 1")
            return done(Verdict(UNDETERMINED, "InconsistentEvidence: " + bad[-1], evidence), chi, link)
        return done(Verdict(TRIVIAL, "", evidence), chi, link)

    cite("cl-triage")
    triage = church_lamotke_triage(n, p)
    notes.append(f"Church-Lamotke triage for {pair}: {triage}")
    return done(Verdict(UNDETERMINED, "no characterisation implemented for this pair", evidence),
                chi, link_status(pair, deg))


def check_consistency(c: Classification):
    """Raise if a classification violates a known structural invariant."""
    if c.inconsistencies:
        raise InconsistentEvidenceError("; ".join(c.inconsistencies))
    if c.verdict.kind == TRIVIAL and c.chi != 1:
        raise InconsistentEvidenceError(f"trivial germ with chi = {c.chi}")
    if tuple(c.pair) == (6, 3) and c.verdict.kind == TRIVIAL and c.sphere_count != 1:
        raise InconsistentEvidenceError("trivial (6,3) germ must bound exactly one sphere")
