"""Numerical local degree: signed preimage count of a small regular value.

The oracle samples spheres around 0 to pick a ball radius on which |g| stays
away from zero, then for a few random target directions solves g(x) = target
inside the ball by multistart damped Newton and sums sign(det Dg) over the
distinct roots.  All trials must agree, otherwise no degree is claimed.
Everything runs in float64 and is heuristic evidence, not a certificate.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares
from scipy.special import ndtri
from scipy.stats import qmc

from .elk import NUMERIC, DegreeResult
from .errors import (
    DimensionMismatchError,
    InconsistentTrialsError,
    IsolationSuspectError,
    SingularJacobianAtRootError,
)
from .polyring import PolyMap, Polynomial

SPHERE_SAMPLES = 2 ** 14
REFINE_STARTS = 6
MAX_NEWTON_ITER = 80
MAX_RESAMPLES = 8
MAX_HALVINGS = 30
STAGNATION = 0.999
POLISH_STEPS = 4
# |det Dg| / prod(row norms) below this counts as a singular Jacobian at a root
SINGULAR_RATIO = 1e-10


@dataclass(frozen=True)
class NumericConfig:
    epsilon: float = 1e-2
    delta_ratio: float = 0.1
    starts: int = 400
    newton_tol: float = 1e-12
    dedup_tol: float = 1e-7
    seed: int = 0
    trials: int = 5

    def __post_init__(self):
        if not 0 < self.delta_ratio < 1:
            raise ValueError("delta_ratio must lie in (0, 1)")
        if self.starts < 50:
            raise ValueError("starts must be at least 50")
        if self.trials < 3:
            raise ValueError("trials must be at least 3")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Root:
    point: tuple
    sign: int
    residual: float


@dataclass(frozen=True)
class RootList:
    roots: tuple = ()

    @property
    def degree(self) -> int:
        return sum(r.sign for r in self.roots)

    def __len__(self):
        return len(self.roots)


@dataclass(frozen=True)
class IsolationEstimate:
    radius: float
    min_norm: float
    per_radius: tuple = field(default=())  # (radius, refined min |g|)


def _as_map(g) -> PolyMap:
    if isinstance(g, PolyMap):
        return g
    return PolyMap(list(g))


def sphere_points(n: int, count: int, seed: int) -> np.ndarray:
    """Quasi-random points on the unit sphere S^{n-1} (scrambled Sobol + inverse normal)."""
    if n == 1:
        u = qmc.Sobol(1, scramble=True, seed=seed).random(count)
        return np.where(u < 0.5, -1.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = qmc.Sobol(n, scramble=True, seed=seed).random(count)
    z = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def ball_points(n: int, count: int, radius: float, seed: int) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = qmc.Sobol(n + 1, scramble=True, seed=seed).random(count)
    z = ndtri(np.clip(u[:, :n], 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    r = radius * u[:, n:] ** (1.0 / n)
    return z / norms * r


def sphere_minimum(func, n: int, radius: float, seed: int, samples: int = SPHERE_SAMPLES):
    """Smallest value of a nonnegative vector-norm objective on the sphere of given radius.

    ``func`` maps points (m, n) to residual vectors (m, k); the minimum of the
    norm is first sampled, then refined by least squares from the best samples.
    Returns (refined minimum, largest sampled norm).
    """
    pts = sphere_points(n, samples, seed) * radius
    vals = np.linalg.norm(func(pts), axis=1)
    best = np.argsort(vals, kind="stable")[:REFINE_STARTS]
    minimum = float(vals[best[0]])
    scale = float(np.median(vals)) or 1.0
    if n > 1:
        for k in best:
            def resid(v):
                x = radius * v / np.linalg.norm(v)
                return func(x[None, :])[0] / scale

            sol = least_squares(resid, pts[k] / radius, method="lm", xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=400 * n)
            x = radius * sol.x / np.linalg.norm(sol.x)
            minimum = min(minimum, float(np.linalg.norm(func(x[None, :])[0])))
    return minimum, float(vals.max())


def estimate_isolation_radius(g, cfg: NumericConfig) -> IsolationEstimate:
    """Largest of eps, eps/2, eps/4 on whose sphere min |g| exceeds 1e3 * newton_tol."""
    gm = _as_map(g)
    if len(gm.components) != gm.nvars:
        raise DimensionMismatchError("numeric degree needs a square system")
    if np.any(np.abs(gm(np.zeros((1, gm.nvars)))) > 0):
        raise ValueError("map does not vanish at the origin")
    threshold = 1e3 * cfg.newton_tol
    per = []
    for k, r in enumerate((cfg.epsilon, cfg.epsilon / 2, cfg.epsilon / 4)):
        m, _ = sphere_minimum(gm, gm.nvars, r, cfg.seed + k)
        per.append((r, m))
    good = [(r, m) for r, m in per if m > threshold]
    if not good:
        raise IsolationSuspectError(
            "min |g| on every sampled sphere is below "
            f"{threshold:g}: the zero at 0 may not be isolated ({per})"
        )
    r, m = max(good)
    return IsolationEstimate(r, m, tuple(per))


def _batched_step(J, F):
    try:
        return np.linalg.solve(J, -F[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return -(np.linalg.pinv(J) @ F[..., None])[..., 0]


def _newton(gm: PolyMap, X, target, cfg: NumericConfig, radius: float):
    X = X.copy()
    F = gm(X) - target
    res = np.linalg.norm(F, axis=1)
    active = np.ones(len(X), dtype=bool)
    for _ in range(MAX_NEWTON_ITER):
        active &= (res >= cfg.newton_tol) & np.all(np.isfinite(X), axis=1)
        active &= np.linalg.norm(X, axis=1) < 10 * radius
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Xa, Fa, ra = X[idx], F[idx], res[idx]
        step = _batched_step(gm.jacobian(Xa), Fa)
        t = np.ones(idx.size)
        todo = np.ones(idx.size, dtype=bool)
        newX, newF, newr = Xa.copy(), Fa.copy(), ra.copy()
        for _ in range(MAX_HALVINGS):
            k = np.flatnonzero(todo)
            if k.size == 0:
                break
            cand = Xa[k] + t[k, None] * step[k]
            cf = gm(cand) - target
            cr = np.linalg.norm(cf, axis=1)
            # Armijo on |g - target|^2 with c = 1e-4
            ok = np.isfinite(cr) & (cr ** 2 <= (1 - 2e-4 * t[k]) * ra[k] ** 2)
            acc = k[ok]
            newX[acc], newF[acc], newr[acc] = cand[ok], cf[ok], cr[ok]
            todo[acc] = False
            t[k[~ok]] *= 0.5
        # no acceptable step, or progress too slow to reach a root: give up on the start
        stalled = todo | (newr > STAGNATION * ra)
        X[idx], F[idx], res[idx] = newX, newF, newr
        active[idx[stalled & (newr >= cfg.newton_tol)]] = False
    return X, res


def _polish(gm: PolyMap, X, target, steps: int = POLISH_STEPS):
    """Plain Newton steps on converged points, keeping each point's best iterate.

    The absolute residual test can stop far from the root when the target is
    tiny; a few quadratic steps pin roots down before deduplication.
    """
    best = X.copy()
    best_res = np.linalg.norm(gm(best) - target, axis=1)
    cur = X.copy()
    for _ in range(steps):
        cur = cur + _batched_step(gm.jacobian(cur), gm(cur) - target)
        res = np.linalg.norm(gm(cur) - target, axis=1)
        better = np.isfinite(res) & (res < best_res)
        best[better], best_res[better] = cur[better], res[better]
    return best, best_res


def _det_ratio(J):
    dets = np.linalg.det(J)
    rows = np.prod(np.linalg.norm(J, axis=-1), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return dets, np.where(rows > 0, np.abs(dets) / rows, 0.0)


def solve_preimages(g, target: Sequence[float], cfg: NumericConfig,
                    radius: float | None = None, seed: int | None = None) -> RootList:
    """Distinct solutions of g(x) = target with |x| < radius, each with sign det Dg."""
    gm = _as_map(g)
    n = gm.nvars
    target = np.asarray(target, dtype=float)
    if target.shape != (n,):
        raise DimensionMismatchError(f"target must have {n} entries")
    radius = cfg.epsilon if radius is None else radius
    seed = cfg.seed if seed is None else seed
    X0 = ball_points(n, cfg.starts, radius, seed)
    X, res = _newton(gm, X0, target, cfg, radius)
    ok = res < cfg.newton_tol
    cand, cres = _polish(gm, X[ok], target) if ok.any() else (X[ok], res[ok])
    inside = np.linalg.norm(cand, axis=1) < radius
    cand, cres = cand[inside], cres[inside]
    order = np.lexsort(cand.T[::-1]) if len(cand) else np.array([], dtype=int)
    kept, kept_res = [], []
    for i in order:
        x = cand[i]
        if any(np.linalg.norm(x - y) <= cfg.dedup_tol for y in kept):
            continue
        kept.append(x)
        kept_res.append(cres[i])
    roots = []
    if kept:
        J = gm.jacobian(np.array(kept))
        dets, ratios = _det_ratio(J)
        for x, r, d, q in zip(kept, kept_res, dets, ratios):
            if q < SINGULAR_RATIO:
                raise SingularJacobianAtRootError(
                    f"Jacobian nearly singular at root {x.tolist()} (ratio {q:.3g})", root=x)
            roots.append(Root(tuple(float(v) for v in x), 1 if d > 0 else -1, float(r)))
    return RootList(tuple(roots))


def _unit(rng, n):
    while True:
        u = rng.standard_normal(n)
        nu = np.linalg.norm(u)
        if nu > 1e-8:
            return u / nu


def local_degree_numeric(g, cfg: NumericConfig | None = None) -> DegreeResult:
    """Degree at 0 as the common signed root count over ``cfg.trials`` random targets."""
    cfg = cfg or NumericConfig()
    gm = _as_map(g)
    est = estimate_isolation_radius(gm, cfg)
    delta = cfg.delta_ratio * est.min_norm
    rng = np.random.default_rng(cfg.seed)
    values, trials, notes = [], [], []
    for t in range(cfg.trials):
        for attempt in range(MAX_RESAMPLES):
            u = _unit(rng, gm.nvars)
            try:
                rl = solve_preimages(gm, delta * u, cfg, est.radius, seed=cfg.seed + 101 * t + attempt)
                break
            except SingularJacobianAtRootError as exc:
                notes.append(f"trial {t}: resampled target ({exc})")
        else:
            raise SingularJacobianAtRootError(f"trial {t}: no regular target after {MAX_RESAMPLES} tries")
        values.append(rl.degree)
        trials.append({
            "direction": [_r(v) for v in u],
            "roots": [{"point": [_r(v) for v in r.point], "sign": r.sign} for r in rl.roots],
            "signed_count": rl.degree,
        })
    if len(set(values)) != 1:
        raise InconsistentTrialsError(f"trials disagree: {values}", values)
    cert = {
        "radius": est.radius,
        "min_norm": _r(est.min_norm),
        "delta": _r(delta),
        "trials": trials,
    }
    return DegreeResult(values[0], NUMERIC, cert, tuple(notes))


def _r(v: float) -> float:
    return float(f"{float(v):.10g}")


def as_square_map(g: Sequence[Polynomial]) -> PolyMap:
    return PolyMap(list(g))
