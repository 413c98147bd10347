"""Independent checks: Monte-Carlo geometry and exhaustive subset search.

Nothing in this module calls the engines' scoring code. Euclidean radii are
estimated from support functions over random directions, caps by sampling
and conical membership, and exact rescoring goes through qhull.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from . import limits
from .errors import ScaleLimit
from .sphere import Cap, in_spherical_hull

SCORERS = ("euclid_radius", "cap_about_axis")


@dataclass(frozen=True)
class RandomSource:
    """Seeded stream: numpy PCG64 keyed by ``SeedSequence(seed, spawn_key=(stream,))``."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream < 0:
            raise ValueError("stream id must be nonnegative")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(self.stream,)))
        )

    def spawn(self, stream: int) -> "RandomSource":
        return RandomSource(self.seed, stream)


def _rng(rng):
    if isinstance(rng, RandomSource):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RandomSource(0 if rng is None else int(rng)).generator()


def uniform_directions(n, dim, rng):
    g = _rng(rng).standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _support_min(P, U):
    best, arg = math.inf, None
    for start in range(0, len(U), 50_000):
        h = np.max(U[start:start + 50_000] @ P.T, axis=1)
        j = int(np.argmin(h))
        if h[j] < best:
            best, arg = float(h[j]), U[start + j]
    return best, arg


def _refine_support_min(P, U, rounds, gen, starts=8, per_round=128):
    # random local search about the best sampled directions; every evaluated
    # direction is a genuine unit vector, so the estimate stays an upper bound
    d = P.shape[1]
    h = np.max(U @ P.T, axis=1)
    seeds = U[np.argsort(h, kind="stable")[:starts]]
    spread = 2.0 * len(U) ** (-1.0 / max(d - 1, 1))
    best = float(h.min())
    for u in seeds:
        cur, val, step = u, float(np.max(P @ u)), spread
        for _ in range(rounds):
            cand = cur + step * gen.standard_normal((per_round, d))
            cand /= np.linalg.norm(cand, axis=1, keepdims=True)
            hv = np.max(cand @ P.T, axis=1)
            j = int(np.argmin(hv))
            if hv[j] < val:
                cur, val = cand[j], float(hv[j])
            else:
                step *= 0.5
        best = min(best, val)
    return best


def mc_containment_radius(Q, n_dirs, rng=None, directions=None, refine: int = 0) -> float:
    """``min_u max_q <q, u>`` over random unit directions ``u``.

    An upper estimate of the containment radius (it never undershoots).
    ``directions`` replaces the random draw when given. ``refine > 0`` adds
    that many rounds of random local search about the best directions found,
    which tightens the estimate in ``d >= 3`` where uniform coverage is coarse.
    """
    P = np.asarray(getattr(Q, "points", Q), dtype=float)
    gen = None
    if directions is None:
        if n_dirs < 1:
            raise ValueError("n_dirs must be at least 1")
        gen = _rng(rng)
        U = uniform_directions(n_dirs, P.shape[1], gen)
    else:
        U = np.atleast_2d(np.asarray(directions, dtype=float))
    best, _ = _support_min(P, U)
    if refine > 0:
        gen = gen if gen is not None else _rng(rng)
        best = min(best, _refine_support_min(P, U, refine, gen))
    return best


def _complement_basis(axis):
    return np.linalg.svd(axis[None, :])[2][1:]


def sample_cap(cap: Cap, n, rng):
    """``n`` points uniform in the cap (colatitude from the area measure)."""
    gen = _rng(rng)
    axis = np.asarray(cap.axis, dtype=float)
    m = len(axis)
    rho = float(cap.rho)
    # colatitude density is proportional to sin^(m-2)(theta) on [0, rho]
    peak = math.sin(min(rho, math.pi / 2))
    thetas = np.empty(0)
    while len(thetas) < n:
        want = 2 * (n - len(thetas)) + 16
        th = gen.uniform(0.0, rho, want)
        keep = gen.uniform(0.0, 1.0, want) * peak ** (m - 2) <= np.sin(th) ** (m - 2)
        thetas = np.concatenate([thetas, th[keep]])
    thetas = thetas[:n]
    w = gen.standard_normal((n, m - 1))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    return np.cos(thetas)[:, None] * axis + np.sin(thetas)[:, None] * (w @ _complement_basis(axis))


def mc_cap_contained(C, cap: Cap, n_samples, rng=None) -> bool:
    """True iff every sampled point of ``cap`` lies in the spherical hull of ``C``.

    One-sided: ``False`` refutes containment, ``True`` is evidence only.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    P = np.asarray(getattr(C, "points", C), dtype=float)
    if cap.rho == 0:
        return bool(in_spherical_hull(P, cap.axis))
    X = sample_cap(cap, n_samples, rng)
    return bool(np.all(in_spherical_hull(P, X)))


def _origin_in_hull(S):
    A = np.vstack([S.T, np.ones(len(S))])
    b = np.zeros(S.shape[1] + 1)
    b[-1] = 1.0
    # an LP feasibility check, independent of the engines' least-squares path
    res = linprog(np.zeros(len(S)), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0


def qhull_radius(S) -> float:
    """Exact containment radius from qhull's facet equations (0 if not interior)."""
    try:
        hull = ConvexHull(S)
    except (QhullError, ValueError):
        return 0.0
    return max(0.0, float(np.min(-hull.equations[:, -1])))


def qhull_cap(S, axis) -> float:
    """Exact largest cap about ``axis`` in the spherical hull of ``S`` via qhull."""
    if _origin_in_hull(S):
        return math.pi
    pts = np.vstack([np.zeros(S.shape[1]), S])
    try:
        hull = ConvexHull(pts)
    except (QhullError, ValueError):
        return 0.0
    through = np.abs(hull.equations[:, -1]) <= 1e-12
    if not np.any(through):
        return 0.0
    inward = -hull.equations[through, :-1]
    s = float(np.min(inward @ axis))
    return max(0.0, math.asin(min(1.0, s)))


def _mc_scores_euclid(P, subsets, U):
    H = U @ P.T
    out = np.empty(len(subsets))
    for i, S in enumerate(subsets):
        out[i] = max(0.0, float(np.min(np.max(H[:, list(S)], axis=1)))) if S else 0.0
    return out


def _mc_scores_cap(P, subsets, X, axis):
    angles = np.arccos(np.clip(X @ axis, -1.0, 1.0))
    out = np.empty(len(subsets))
    for i, S in enumerate(subsets):
        sub = P[list(S)]
        if not S:
            out[i] = 0.0
        elif _origin_in_hull(sub):
            out[i] = math.pi
        elif len(sub) < P.shape[1] or np.linalg.matrix_rank(sub) < P.shape[1]:
            out[i] = 0.0
        else:
            member = in_spherical_hull(sub, X)
            out[i] = float(np.min(angles[~member])) if not member.all() else math.pi / 2
    return out


def exhaustive_best_subset(points, k, scorer, rng=None, n_samples=10_000, axis=None, refine=True):
    """Best subset of size at most ``k`` under a Monte-Carlo scorer.

    Both scorers are upper estimates, so with ``refine`` every subset whose
    estimate reaches the exact (qhull) score of the current leader is
    rescored exactly; the returned score is then exact. Ties go to the
    lexicographically smallest index tuple.

    Returns
    -------
    indices : tuple of int
    score : float
    """
    if scorer not in SCORERS:
        raise ValueError(f"scorer must be one of {SCORERS}")
    P = np.asarray(getattr(points, "points", points), dtype=float)
    n = len(P)
    if n > limits.ORACLE_MAX_POINTS:
        raise ScaleLimit(f"exhaustive search: n={n} exceeds guard n <= {limits.ORACLE_MAX_POINTS}")
    if k <= 0:
        return (), 0.0
    subsets = [S for size in range(1, min(k, n) + 1) for S in combinations(range(n), size)]
    gen = _rng(rng)
    if scorer == "euclid_radius":
        U = uniform_directions(n_samples, P.shape[1], gen)
        mc = _mc_scores_euclid(P, subsets, U)
        exact = lambda S: qhull_radius(P[list(S)])  # noqa: E731
    else:
        if axis is None:
            axis = np.zeros(P.shape[1])
            axis[-1] = 1.0
        axis = np.asarray(axis, dtype=float)
        X = sample_cap(Cap(axis, math.pi / 2), n_samples, gen)
        mc = _mc_scores_cap(P, subsets, X, axis)
        exact = lambda S: qhull_cap(P[list(S)], axis)  # noqa: E731

    if not refine:
        top = float(mc.max())
        return min(S for S, s in zip(subsets, mc) if s >= top), top

    order = np.argsort(-mc, kind="stable")
    best = exact(subsets[order[0]])
    scored = {subsets[order[0]]: best}
    for j in order[1:]:
        if mc[j] < best - 1e-9:
            break
        s = exact(subsets[j])
        scored[subsets[j]] = s
        best = max(best, s)
    cutoff = best - 1e-12 * max(1.0, best)
    winner = min(S for S, s in scored.items() if s >= cutoff)
    return winner, scored[winner]
