"""Euclidean convex geometry about the origin.

Everything here is centred at the origin ``o``: the containment radius of a
finite point set is the radius of the largest ball ``B(o, r)`` inside its
convex hull, and the polar of a set is taken with respect to ``o``.

Two enumeration paths are kept deliberately separate:

* :func:`containment_radius` walks the affinely independent ``d``-subsets of
  the points and keeps hyperplanes that support the hull (facet path);
* :func:`polar_max_norm` solves the ``d x d`` systems ``<x, l> = 1`` and keeps
  feasible solutions (vertex path of the polar polytope).

For a set with the origin in the interior of its hull the two are reciprocal,
which the test-suite uses as a cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.optimize import linprog, lsq_linear, nnls
from scipy.spatial import ConvexHull, QhullError

from . import limits
from .errors import PremiseViolated

INTERIOR_MARGIN = 1e-9
MEMBERSHIP_TOL = 1e-9
MAX_CONDITION = 1e12
SUPPORT_TOL = 1e-9

# combinations processed per vectorised block
_BLOCK = 20_000


@dataclass(frozen=True)
class EuclideanPointSet:
    """Finite point set in R^d; indices are the identity of points."""

    dim: int
    points: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, self.dim)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(
                f"every point must have exactly {self.dim} coordinates, got shape {pts.shape}"
            )
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(pts):
                raise ValueError("labels must align with points")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_points(cls, points, labels=None) -> "EuclideanPointSet":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array-like (n, d)")
        return cls(pts.shape[1], pts, labels)

    def __len__(self):
        return len(self.points)

    def subset(self, indices) -> "EuclideanPointSet":
        idx = list(indices)
        labels = None if self.labels is None else tuple(self.labels[i] for i in idx)
        return EuclideanPointSet(self.dim, self.points[idx].reshape(len(idx), self.dim), labels)

    def scaled(self, factor: float) -> "EuclideanPointSet":
        return EuclideanPointSet(self.dim, self.points * factor, self.labels)


@dataclass(frozen=True)
class OriginBall:
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError("radius must be nonnegative")


@dataclass(frozen=True)
class Halfspace:
    """``{x : <x, normal> <= offset}``."""

    normal: np.ndarray = field(compare=False)
    offset: float

    def __post_init__(self):
        normal = np.array(self.normal, dtype=float)
        if np.linalg.norm(normal) < 1e-12:
            raise ValueError("halfspace normal must be nonzero")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)

    def contains(self, x, tol=0.0) -> bool:
        return float(np.dot(self.normal, x)) <= self.offset + tol

    def __eq__(self, other):
        if not isinstance(other, Halfspace):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.normal, other.normal)

    def __hash__(self):
        return hash((self.offset, self.normal.tobytes()))


def as_points(Q) -> np.ndarray:
    """Return the ``(n, d)`` coordinate array of a point set or array-like."""
    if isinstance(Q, EuclideanPointSet):
        return Q.points
    pts = np.asarray(Q, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"dimension mismatch among points (array shape {pts.shape})")
    return pts


def _scale(P):
    return max(1.0, float(np.abs(P).max())) if P.size else 1.0


def nonneg_lstsq(A, b):
    """``min ||A w - b||`` over ``w >= 0`` with the residual recomputed from ``w``.

    The residual reported by some scipy releases of ``nnls`` can disagree with
    the returned weights; when it does, bounded-variable least squares is
    tried as well and the better fit is kept.

    Returns
    -------
    weights : ndarray
    residual : float
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    w, reported = nnls(A, b, maxiter=50 * max(A.shape[1], 10))
    residual = float(np.linalg.norm(A @ w - b))
    if abs(residual - reported) > 1e-12 * max(1.0, float(np.linalg.norm(b))):
        alt = lsq_linear(A, b, bounds=(0.0, np.inf), method="bvls").x
        alt = np.maximum(alt, 0.0)
        alt_res = float(np.linalg.norm(A @ alt - b))
        if alt_res < residual:
            w, residual = alt, alt_res
    return w, residual


def hull_membership(P, x):
    """Closed membership of ``x`` in ``conv(P)`` as a nonnegative least-squares fit.

    Solves ``min ||[P^T; s 1^T] w - [x; s]||`` over ``w >= 0`` where ``s`` is
    the coordinate scale, so the residual is measured in coordinate units.

    Returns
    -------
    residual : float
    weights : ndarray, shape (n,)
    """
    P = np.asarray(P, dtype=float)
    s = _scale(P)
    A = np.vstack([P.T, np.full(len(P), s)])
    b = np.append(np.asarray(x, dtype=float), s)
    w, residual = nonneg_lstsq(A, b)
    return residual, w


def contains_origin_interior(Q) -> bool:
    """Decide whether a ball of radius 1e-9 about the origin fits in ``conv(Q)``.

    The witness is the cross-polytope with vertices ``±1e-9·sqrt(d)·e_i``,
    which contains that ball; each vertex is tested for hull membership.
    """
    P = as_points(Q)
    n, d = P.shape
    if n <= d:
        return False
    sv = np.linalg.svd(P, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        return False
    delta = INTERIOR_MARGIN * math.sqrt(d)
    tol = 1e-13 * _scale(P)
    for i in range(d):
        for sign in (1.0, -1.0):
            x = np.zeros(d)
            x[i] = sign * delta
            residual, _ = hull_membership(P, x)
            if residual > tol:
                return False
    return True


def _hyperplanes_through(base):
    """Unit normals and offsets of hyperplanes through ``d`` points.

    ``base`` has shape ``(..., d, d)``; returns ``(a, b, ok)`` with ``a`` of
    shape ``(..., d)``, ``b = <a, base_0>`` and ``ok`` false for affinely
    dependent or ill-conditioned tuples.
    """
    d = base.shape[-1]
    if d == 1:
        a = np.ones(base.shape[:-2] + (1,))
        b = base[..., 0, 0]
        return a, b, np.ones(b.shape, dtype=bool)
    D = base[..., 1:, :] - base[..., :1, :]
    _, s, vt = np.linalg.svd(D, full_matrices=True)
    a = vt[..., -1, :]
    big = s[..., 0]
    ok = (big > 1e-12) & (s[..., -1] * MAX_CONDITION > big)
    b = np.einsum("...i,...i->...", a, base[..., 0, :])
    return a, b, ok


def _critical_facet(P, tol=SUPPORT_TOL):
    """Smallest signed offset over supporting hyperplanes of ``conv(P)``.

    Returns ``(radius, normal)``: ``normal`` is the outward unit normal of the
    critical supporting hyperplane. ``radius`` is ``-inf`` when no
    supporting hyperplane exists (fewer than ``d`` affinely independent
    points).
    """
    n, d = P.shape
    best, best_normal = -math.inf, None
    if n < d:
        return best, best_normal
    abs_tol = tol * _scale(P)
    found = math.inf
    combos = np.array(list(combinations(range(n), d)), dtype=np.intp)
    for start in range(0, len(combos), _BLOCK):
        block = combos[start:start + _BLOCK]
        a, b, ok = _hyperplanes_through(P[block])
        slack = a @ P.T - b[:, None]
        below = ok & np.all(slack <= abs_tol, axis=1)
        above = ok & np.all(slack >= -abs_tol, axis=1)
        cand = np.concatenate([np.where(below, b, np.inf), np.where(above, -b, np.inf)])
        j = int(np.argmin(cand))
        if cand[j] < found:
            found = float(cand[j])
            k = j % len(block)
            best_normal = a[k] if j < len(block) else -a[k]
    if math.isinf(found):
        return best, None
    return found, best_normal


def signed_facet_radius(Q) -> float:
    """Minimum signed distance from the origin to supporting hyperplanes of ``conv(Q)``.

    Positive exactly when the origin is interior; no premise check.
    """
    P = as_points(Q)
    limits.check_enumeration(len(P), P.shape[1], "facet enumeration")
    return _critical_facet(P)[0]


def critical_direction(Q):
    """``(radius, u)`` where ``u`` is the outward normal of the critical facet."""
    P = as_points(Q)
    limits.check_enumeration(len(P), P.shape[1], "facet enumeration")
    return _critical_facet(P)


def batched_facet_radius(P, tol=SUPPORT_TOL):
    """Signed facet radius for a stack of equally sized point sets.

    ``P`` has shape ``(m, k, d)``; returns an array of length ``m`` with
    ``-inf`` for sets without a supporting hyperplane.
    """
    m, k, d = P.shape
    out = np.full(m, np.inf)
    if k < d:
        return np.full(m, -np.inf)
    abs_tol = tol * _scale(P)
    for T in combinations(range(k), d):
        a, b, ok = _hyperplanes_through(P[:, list(T), :])
        slack = np.einsum("mkd,md->mk", P, a) - b[:, None]
        below = ok & np.all(slack <= abs_tol, axis=1)
        above = ok & np.all(slack >= -abs_tol, axis=1)
        out = np.minimum(out, np.where(below, b, np.inf))
        out = np.minimum(out, np.where(above, -b, np.inf))
    out[np.isinf(out)] = -np.inf
    return out


def containment_radius(Q) -> float:
    """Largest ``r`` with ``B(o, r)`` contained in ``conv(Q)``.

    Computed as the minimum distance from the origin over supporting
    hyperplanes spanned by affinely independent ``d``-subsets of ``Q``.

    Raises
    ------
    ScaleLimit
        If ``n`` or ``d`` exceed the enumeration guard.
    PremiseViolated
        If the origin is not interior to the hull.
    """
    P = as_points(Q)
    limits.check_enumeration(len(P), P.shape[1], "containment_radius")
    if not contains_origin_interior(P):
        raise PremiseViolated("origin is not interior to conv(Q)")
    return max(_critical_facet(P)[0], 0.0)


def hull_radius(Q) -> float:
    """Signed containment radius from a qhull facet list, for sets past the guard.

    Returns ``-inf`` for degenerate (not full-dimensional) input.
    """
    P = as_points(Q)
    try:
        hull = ConvexHull(P)
    except (QhullError, ValueError):
        return -math.inf
    return float(np.min(-hull.equations[:, -1]))


def polar_points(S) -> list:
    """One halfspace ``{x : <x, s> <= 1}`` per point ``s``."""
    P = as_points(S) if len(S) else np.zeros((0, 0))
    return [Halfspace(p, 1.0) for p in P]


def _polar_is_bounded(L):
    n, d = L.shape
    for i in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d)
            c[i] = -sign
            res = linprog(c, A_ub=L, b_ub=np.ones(n), bounds=[(None, None)] * d, method="highs")
            if res.status == 3:
                return False
            if res.status != 0:
                raise RuntimeError(f"polar boundedness LP failed: {res.message}")
    return True


def polar_max_norm(L) -> float:
    """Smallest ``R`` with ``polar(L)`` inside ``B(o, R)``; ``math.inf`` if unbounded.

    The vertices of ``polar(L)`` are the feasible solutions of the systems
    ``<x, l> = 1`` over ``d``-subsets of ``L``.
    """
    P = as_points(L)
    n, d = P.shape
    limits.check_enumeration(n, d, "polar_max_norm")
    if n < d + 1 or not _polar_is_bounded(P):
        return math.inf
    best = 0.0
    combos = np.array(list(combinations(range(n), d)), dtype=np.intp)
    for start in range(0, len(combos), _BLOCK):
        block = combos[start:start + _BLOCK]
        A = P[block]
        sv = np.linalg.svd(A, compute_uv=False)
        ok = (sv[:, 0] > 1e-12) & (sv[:, -1] * MAX_CONDITION > sv[:, 0])
        if not np.any(ok):
            continue
        X = np.linalg.solve(A[ok], np.ones((int(ok.sum()), d, 1)))[..., 0]
        feasible = np.all(X @ P.T <= 1.0 + SUPPORT_TOL, axis=1)
        if np.any(feasible):
            best = max(best, float(np.max(np.linalg.norm(X[feasible], axis=1))))
    return best


def caratheodory_select(Q) -> tuple:
    """Indices of at most ``d + 1`` points of ``Q`` whose hull contains the origin.

    Starts from a nonnegative least-squares convex combination and removes
    points along null-space directions of the lifted system until the
    support is affinely independent.
    """
    P = as_points(Q)
    n, d = P.shape
    if n == 0:
        raise PremiseViolated("empty point set")
    residual, w = hull_membership(P, np.zeros(d))
    if residual > MEMBERSHIP_TOL:
        raise PremiseViolated(f"origin not in conv(Q) (residual {residual:.3g})")
    support = [i for i in range(n) if w[i] > 0]
    weights = w[support] / w[support].sum()
    while len(support) > d + 1:
        M = np.vstack([P[support].T, np.ones(len(support))])
        v = np.linalg.svd(M)[2][-1]
        if not np.any(v > 1e-14):
            v = -v
        pos = v > 1e-14
        ratios = np.full(len(v), np.inf)
        ratios[pos] = weights[pos] / v[pos]
        j = int(np.argmin(ratios))
        del support[j]
        # refit rather than carry the step, so rounding cannot accumulate
        _, w = hull_membership(P[support], np.zeros(d))
        keep = w > 0
        support = [s for s, k in zip(support, keep) if k]
        weights = w[keep] / w[keep].sum()
    residual, _ = hull_membership(P[support], np.zeros(d))
    if residual > MEMBERSHIP_TOL:
        raise RuntimeError(f"Caratheodory reduction lost feasibility (residual {residual:.3g})")
    return tuple(sorted(support))
