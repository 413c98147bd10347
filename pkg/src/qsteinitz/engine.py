"""Quantitative Steinitz and Helly selection with certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from . import limits
from .errors import PremiseViolated, ScaleLimit, VerificationFailed
from .euclid import (
    as_points,
    batched_facet_radius,
    contains_origin_interior,
    containment_radius,
    critical_direction,
    hull_membership,
    hull_radius,
    polar_max_norm,
)

PREMISE_TOL = 1e-9
TIE_TOL = 1e-12


@dataclass(frozen=True)
class RBound:
    """Known bracket on the Steinitz radius constant in dimension ``dim``."""

    dim: int

    @property
    def lower(self) -> float:
        return 1.0 / (6.0 * self.dim**2)

    @property
    def upper(self) -> float:
        return 1.0 / (2.0 * math.sqrt(self.dim))


@dataclass(frozen=True)
class SteinitzCertificate:
    indices: tuple
    achieved_radius: float
    method: str
    cardinality_bound: int
    premise_radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.method not in ("exact", "greedy"):
            raise ValueError(f"unknown method {self.method!r}")
        if len(self.indices) > self.cardinality_bound:
            raise ValueError("certificate exceeds its cardinality bound")
        if not self.achieved_radius >= 0:
            raise ValueError("achieved_radius must be nonnegative")


class HellySelection(NamedTuple):
    indices: tuple
    guaranteed_polar_radius: float


def _premise_radius_of(P):
    n, d = P.shape
    if n <= limits.max_enum_points() and d <= limits.max_enum_dim():
        return containment_radius(P)
    if not contains_origin_interior(P):
        raise PremiseViolated("origin is not interior to conv(Q)")
    return hull_radius(P)


def _check_premise(P, premise_radius):
    try:
        r = _premise_radius_of(P)
    except PremiseViolated:
        raise PremiseViolated(
            f"B(o, {premise_radius:g}) is not contained in conv(Q): origin not interior"
        ) from None
    if r < premise_radius - PREMISE_TOL:
        raise PremiseViolated(
            f"B(o, {premise_radius:g}) is not contained in conv(Q) (containment radius {r:.6g})"
        )
    return r


def select_exact(Q, premise_radius: float = 1.0) -> SteinitzCertificate:
    """Best subset of at most ``2d`` points by exhaustive search.

    Subsets are scored by their containment radius; among maximizers the
    lexicographically smallest sorted index tuple wins.
    """
    P = as_points(Q)
    n, d = P.shape
    if n > limits.max_exact_points():
        raise ScaleLimit(f"select_exact: n={n} exceeds guard n <= {limits.max_exact_points()}")
    limits.check_enumeration(n, d, "select_exact")
    _check_premise(P, premise_radius)

    blocks = []
    for k in range(d + 1, min(2 * d, n) + 1):
        combos = np.array(list(combinations(range(n), k)), dtype=np.intp)
        blocks.append((combos, batched_facet_radius(P[combos])))
    top = max(float(scores.max()) for _, scores in blocks)
    cutoff = top - TIE_TOL * max(1.0, abs(top))
    best_idx, best_score = None, 0.0
    for combos, scores in blocks:
        # combinations() is lexicographic: the first hit is the smallest tuple of this size
        hits = np.flatnonzero(scores >= cutoff)
        if len(hits):
            cand = tuple(int(i) for i in combos[hits[0]])
            if best_idx is None or cand < best_idx:
                best_idx, best_score = cand, float(scores[hits[0]])
    return SteinitzCertificate(best_idx, max(best_score, 0.0), "exact", 2 * d, premise_radius)


def _min_norm_direction(S):
    # direction minimizing the support function of a lower-dimensional hull
    _, w = hull_membership(S, np.zeros(S.shape[1]))
    total = w.sum()
    scale = max(1.0, float(np.abs(S).max()))
    if total > 0:
        x = S.T @ w / total
        norm = np.linalg.norm(x)
        if norm > 1e-12 * scale:
            return -x / norm
    v = np.linalg.svd(S, full_matrices=True)[2][-1]
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if len(nz) and v[nz[0]] < 0:
        v = -v
    return v


def _greedy_direction(S):
    radius, u = critical_direction(S)
    if u is None or math.isinf(radius):
        return _min_norm_direction(S)
    return u


def select_greedy(Q, premise_radius: float = 1.0) -> SteinitzCertificate:
    """Support-direction heuristic: grow the subset toward its weakest facet.

    Seeds with the two points extreme along ``±e1``; each step adds the point
    of ``Q`` maximizing ``<q, u*>`` where ``u*`` is the outward normal of the
    current subset's critical facet. The resulting radius carries no
    guarantee.
    """
    P = as_points(Q)
    n, d = P.shape
    if n > limits.GREEDY_MAX_POINTS:
        raise ScaleLimit(f"select_greedy: n={n} exceeds guard n <= {limits.GREEDY_MAX_POINTS}")
    if d > limits.max_enum_dim():
        raise ScaleLimit(f"select_greedy: d={d} exceeds guard d <= {limits.max_enum_dim()}")
    _check_premise(P, premise_radius)

    chosen = [int(np.argmax(P[:, 0]))]
    lo = int(np.argmin(P[:, 0]))
    if lo not in chosen:
        chosen.append(lo)
    while len(chosen) < 2 * d:
        u = _greedy_direction(P[chosen])
        j = int(np.argmax(P @ u))
        if j in chosen:
            break
        chosen.append(j)
    indices = tuple(sorted(chosen))
    sub = P[list(indices)]
    r = critical_direction(sub)[0] if contains_origin_interior(sub) else 0.0
    return SteinitzCertificate(indices, max(r, 0.0), "greedy", 2 * d, premise_radius)


def select(Q, method: str = "auto", premise_radius: float = 1.0) -> SteinitzCertificate:
    """Dispatch to exact search within its guard, greedy otherwise (``method='auto'``)."""
    if method == "auto":
        P = as_points(Q)
        fits = len(P) <= limits.max_exact_points() and P.shape[1] <= limits.max_enum_dim()
        method = "exact" if fits else "greedy"
    if method == "exact":
        return select_exact(Q, premise_radius)
    if method == "greedy":
        return select_greedy(Q, premise_radius)
    raise ValueError(f"unknown selection method {method!r}")


def qht_select(L, method: str = "auto") -> HellySelection:
    """Keep at most ``2d`` constraints ``<x, l> <= 1`` with a bounded polar.

    Requires ``polar(L)`` inside the unit ball. The selected ``L'`` satisfies
    ``polar(L') ⊆ B(o, 1/r)`` where ``r`` is the containment radius the
    Steinitz selection achieved on ``L``; this is re-verified by polar vertex
    enumeration.
    """
    P = as_points(L)
    n, d = P.shape
    within_enum = n <= limits.max_enum_points() and d <= limits.max_enum_dim()
    if within_enum:
        R = polar_max_norm(P)
    else:
        r = hull_radius(P)
        R = 1.0 / r if r > 0 else math.inf
    if R > 1.0 + PREMISE_TOL:
        raise PremiseViolated(f"polar(L) is not inside B(o, 1) (max polar norm {R:.6g})")
    cert = select(P, method, premise_radius=1.0 / max(R, 1.0))
    guaranteed = 1.0 / cert.achieved_radius if cert.achieved_radius > 0 else math.inf
    sub = P[list(cert.indices)]
    if len(sub) <= limits.max_enum_points():
        check = polar_max_norm(sub)
        if check > guaranteed + PREMISE_TOL:
            raise VerificationFailed(
                f"polar(L') has norm {check:.12g} beyond guaranteed {guaranteed:.12g}"
            )
    return HellySelection(cert.indices, guaranteed)
