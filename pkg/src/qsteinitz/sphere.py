"""Spherical primitives: caps, spherical hull membership, polar cones, projection.

Points live on the unit sphere ``S^d`` in ``R^(d+1)``; the distinguished
axis is the north pole ``e_{d+1}``. A set that fits in no open hemisphere has
spherical hull equal to the whole sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from . import limits
from .errors import EquatorSingularity, PremiseViolated
from .euclid import MAX_CONDITION, hull_membership, nonneg_lstsq

NORM_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9
CONE_MARGIN = 1e-9
EQUATOR_TOL = 1e-12

# (bases x query points) above which membership falls back to per-point NNLS
_BASIS_BUDGET = 5_000_000


def north_pole(d: int) -> np.ndarray:
    e = np.zeros(d + 1)
    e[-1] = 1.0
    return e


def _unit_rows(points):
    P = np.array(points, dtype=float)
    if P.ndim != 2:
        raise ValueError(f"expected an (n, d+1) array, got shape {P.shape}")
    norms = np.linalg.norm(P, axis=1)
    if np.any(norms < 1e-300):
        raise ValueError("zero vector cannot be normalized onto the sphere")
    return P / norms[:, None]


@dataclass(frozen=True)
class SphericalPointSet:
    """Unit vectors in ``R^(d+1)`` with ``d >= 2``; normalized on construction."""

    ambient_dim: int
    points: np.ndarray

    def __post_init__(self):
        if self.ambient_dim < 3:
            raise ValueError("spherical point sets need d >= 2 (ambient dimension >= 3)")
        P = np.array(self.points, dtype=float)
        if P.ndim == 1 and P.size == 0:
            P = P.reshape(0, self.ambient_dim)
        if P.ndim != 2 or P.shape[1] != self.ambient_dim:
            raise ValueError(f"points must have {self.ambient_dim} coordinates, got {P.shape}")
        if len(P):
            P = _unit_rows(P)
        P.setflags(write=False)
        object.__setattr__(self, "points", P)

    @classmethod
    def from_points(cls, points) -> "SphericalPointSet":
        P = np.asarray(points, dtype=float)
        return cls(P.shape[1], P)

    @property
    def d(self) -> int:
        return self.ambient_dim - 1

    def __len__(self):
        return len(self.points)

    def subset(self, indices) -> "SphericalPointSet":
        idx = list(indices)
        return SphericalPointSet(self.ambient_dim, self.points[idx].reshape(len(idx), self.ambient_dim))

    def rotated(self, R) -> "SphericalPointSet":
        return SphericalPointSet(self.ambient_dim, self.points @ np.asarray(R).T)


@dataclass(frozen=True)
class Cap:
    """``scap(axis, rho) = {u : <u, axis> >= cos(rho)}``."""

    axis: np.ndarray
    rho: float

    def __post_init__(self):
        axis = np.array(self.axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > NORM_TOL:
            raise ValueError("cap axis must be a unit vector")
        if not 0.0 <= self.rho <= math.pi:
            raise ValueError("cap radius must lie in [0, pi]")
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)

    @classmethod
    def north(cls, d: int, rho: float) -> "Cap":
        return cls(north_pole(d), rho)

    def contains(self, u, tol=0.0):
        return np.asarray(u) @ self.axis >= math.cos(self.rho) - tol


@dataclass(frozen=True)
class ConeRep:
    """The open cone ``{x : <x, c> > 0 for every generator c}``."""

    generators: np.ndarray

    def __post_init__(self):
        G = _unit_rows(self.generators)
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @classmethod
    def of(cls, C) -> "ConeRep":
        return cls(_points(C))

    def contains(self, x, margin=CONE_MARGIN):
        """Strict membership decided with a witness margin."""
        return np.all(np.asarray(x) @ self.generators.T > margin, axis=-1)


def _points(C):
    if isinstance(C, SphericalPointSet):
        return C.points
    return _unit_rows(C)


def central_project(x):
    """``(x_1/x_{d+1}, ..., x_d/x_{d+1})``; accepts one vector or a stack."""
    x = np.asarray(x, dtype=float)
    last = x[..., -1]
    if np.any(np.abs(last) < EQUATOR_TOL):
        raise EquatorSingularity("point on (or numerically at) the equator")
    return x[..., :-1] / last[..., None]


def lift_north(z):
    """Inverse of :func:`central_project` onto the open northern hemisphere."""
    z = np.asarray(z, dtype=float)
    y = np.concatenate([z, np.ones(z.shape[:-1] + (1,))], axis=-1)
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


def cap_to_ball_radius(rho: float) -> float:
    """Radius of the ball that a polar cap of radius ``rho`` projects onto."""
    if not 0.0 <= rho < math.pi / 2:
        raise PremiseViolated(f"cap radius {rho!r} outside [0, pi/2)")
    return math.tan(rho)


def spolar_empty(C) -> bool:
    """True iff no ``x`` has ``<x, c> > 0`` for all ``c``, i.e. ``o`` in ``conv(C)``.

    The boundary case (origin on the hull boundary) counts as empty.
    """
    P = _points(C)
    if len(P) == 0:
        return False
    residual, _ = hull_membership(P, np.zeros(P.shape[1]))
    return residual <= MEMBERSHIP_TOL


def _cone_member_nnls(P, X):
    A = P.T
    out = np.empty(len(X), dtype=bool)
    for i, x in enumerate(X):
        _, res = nonneg_lstsq(A, x)
        out[i] = res <= MEMBERSHIP_TOL
    return out


def _cone_member_bases(P, X, combos):
    m = P.shape[1]
    B = np.transpose(P[combos], (0, 2, 1))  # columns are generators
    sv = np.linalg.svd(B, compute_uv=False)
    ok = sv[:, -1] * MAX_CONDITION > sv[:, 0]
    inverses = np.linalg.inv(B[ok])
    out = np.zeros(len(X), dtype=bool)
    step = max(1, 4_000_000 // max(1, len(X) * m))
    for start in range(0, len(inverses), step):
        lam = np.einsum("bij,qj->bqi", inverses[start:start + step], X)
        out |= np.any(np.all(lam >= -MEMBERSHIP_TOL, axis=-1), axis=0)
        if out.all():
            break
    return out


def in_spherical_hull(C, x):
    """Membership of unit vector(s) ``x`` in the spherical hull of ``C``.

    Inside an open hemisphere this is conical-hull membership ``x = sum l_i c_i``
    with ``l_i >= 0``; otherwise the hull is the whole sphere. Accepts one
    vector (returns ``bool``) or a stack (returns a boolean array).
    """
    P = _points(C)
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if spolar_empty(P):
        out = np.ones(len(X), dtype=bool)
    elif len(P) == 0:
        out = np.zeros(len(X), dtype=bool)
    else:
        n, m = len(P), P.shape[1]
        spans = n >= m and np.linalg.matrix_rank(P) == m
        if spans and math.comb(n, m) * len(X) <= _BASIS_BUDGET:
            combos = np.array(list(combinations(range(n), m)), dtype=np.intp)
            out = _cone_member_bases(P, X, combos)
        else:
            out = _cone_member_nnls(P, X)
    return bool(out[0]) if single else out


def extreme_rays(C, tol=CONE_MARGIN):
    """Unit extreme rays of the closed polar cone ``{x : <x, c> >= 0}``.

    Enumerates the one-dimensional solution sets of ``d`` active constraints
    ``<x, c_i> = 0`` and keeps the orientation lying in the cone.
    """
    P = _points(C)
    n, m = P.shape
    d = m - 1
    limits.check_enumeration(n, d, "extreme-ray enumeration")
    if n < d:
        return np.zeros((0, m))
    combos = np.array(list(combinations(range(n), d)), dtype=np.intp)
    rays = []
    for start in range(0, len(combos), 20_000):
        block = combos[start:start + 20_000]
        _, s, vt = np.linalg.svd(P[block], full_matrices=True)
        x = vt[:, -1, :]
        ok = (s[:, 0] > 1e-12) & (s[:, -1] * MAX_CONDITION > s[:, 0])
        vals = x @ P.T
        pos = ok & np.all(vals >= -tol, axis=1)
        neg = ok & np.all(vals <= tol, axis=1)
        rays.append(x[pos])
        rays.append(-x[neg])
    return np.concatenate(rays) if rays else np.zeros((0, m))


def largest_cap_about_axis(C, axis=None) -> float:
    """Largest ``rho`` with ``scap(axis, rho)`` inside the spherical hull of ``C``.

    ``pi`` for a full-sphere hull; otherwise ``pi/2`` minus the largest angle
    between the axis and an extreme ray of the polar cone, clipped at 0.
    """
    P = _points(C)
    n, m = P.shape
    if axis is None:
        axis = north_pole(m - 1)
    axis = np.asarray(axis, dtype=float)
    if spolar_empty(P):
        return math.pi
    limits.check_enumeration(n, m - 1, "largest_cap_about_axis")
    if n < m or np.linalg.matrix_rank(P) < m:
        return 0.0
    if not in_spherical_hull(P, axis):
        return 0.0
    rays = extreme_rays(P)
    if len(rays) == 0:
        return 0.0
    cosines = np.clip(rays @ axis, -1.0, 1.0)
    widest = float(np.max(np.arccos(cosines)))
    return max(0.0, math.pi / 2 - widest)


def rotation_to_north(axis) -> np.ndarray:
    """A proper rotation ``R`` (det +1) with ``R @ axis = e_{d+1}``."""
    v = np.asarray(axis, dtype=float)
    v = v / np.linalg.norm(v)
    m = len(v)
    e = north_pole(m - 1)
    if np.allclose(v, e, atol=1e-15):
        return np.eye(m)
    # Householder reflection swapping v and e, then a reflection fixing e
    w = v - e
    H = np.eye(m) - 2.0 * np.outer(w, w) / (w @ w)
    F = np.eye(m)
    F[0, 0] = -1.0
    return F @ H
