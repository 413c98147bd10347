"""Spherical point selection by reduction to the Euclidean engines.

Three cases, decided on the input set ``C`` and the premise cap
``scap(e_{d+1}, rho)``:

``full_sphere``
    ``C`` fits in no open hemisphere. A Caratheodory selection of at most
    ``d + 2`` points already has the whole sphere as spherical hull.
``northern``
    ``C`` lies in the open northern hemisphere. Central projection turns the
    cap into the ball ``B(o, tan rho)`` and the Steinitz selection applies.
``general``
    Otherwise the polar body ``K`` is projected; each point ``c`` contributes
    the halfspace ``{z : <z, -c_bar> <= c_last}`` and the Helly selection is
    run on the resulting constraints. When some ``c_last <= 0`` the
    constraints have no polar form about the projected pole, and polarity is
    re-centred at the Chebyshev centre of the projected polar body.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import limits
from .engine import qht_select, select
from .errors import PremiseViolated, VerificationFailed
from .euclid import caratheodory_select, polar_max_norm
from .sphere import (
    SphericalPointSet,
    central_project,
    largest_cap_about_axis,
    north_pole,
    spolar_empty,
)

NORTH_TOL = 1e-9
PREMISE_TOL = 1e-9
CAP_TOL = 1e-9

CASES = ("full_sphere", "northern", "general")


@dataclass(frozen=True)
class LemmaScalars:
    t: float
    rho: float
    r: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")
        if not 0 < self.rho < math.pi / 2:
            raise ValueError("rho must lie in (0, pi/2)")
        if not 0 < self.r <= 1:
            raise ValueError("r must lie in (0, 1]")


@dataclass(frozen=True)
class SphericalCertificate:
    """Selected subset of ``C`` with its verified and analytic cap radii.

    ``internal_radius`` is the Euclidean radius entering ``certified_cap``;
    in the unshifted cases it is capped at 1, the range where the tangent
    estimates behind the bound hold.
    """

    indices: tuple
    case_tag: str
    achieved_cap: float
    certified_cap: float
    internal_radius: Optional[float] = None
    polarity_center_shifted: bool = False
    method: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.case_tag not in CASES:
            raise ValueError(f"unknown case tag {self.case_tag!r}")
        if self.method not in ("exact", "greedy", "caratheodory"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.achieved_cap <= math.pi:
            raise ValueError("achieved_cap must lie in [0, pi]")


def certified_cap_radius(rho: float, r: float) -> float:
    """``pi/2 - arctan(cot(rho) / r)``, the cap kept by a Helly selection of radius ``r``."""
    if not 0 < rho < math.pi / 2:
        raise PremiseViolated(f"rho={rho!r} outside (0, pi/2)")
    if not 0 < r <= 1:
        raise PremiseViolated(f"r={r!r} outside (0, 1]")
    return math.pi / 2 - math.atan(1.0 / (math.tan(rho) * r))


def tan_bounds_hold(t, slack: float = 0.0):
    """``t <= tan t``, and ``tan t <= 2t`` when ``t < pi/4``. Vectorises over arrays."""
    t = np.asarray(t, dtype=float)
    tan = np.tan(t)
    lower = t <= tan + slack
    upper = (t >= math.pi / 4) | (tan <= 2 * t + slack)
    out = lower & upper
    return bool(out) if out.ndim == 0 else out


def _check_inputs(P, rho):
    if P.shape[1] < 3:
        raise PremiseViolated("spherical selection needs d >= 2")
    if not 0 < rho < math.pi / 2:
        raise PremiseViolated(f"rho={rho!r} outside (0, pi/2)")
    cap = largest_cap_about_axis(P, north_pole(P.shape[1] - 1))
    if cap < rho - PREMISE_TOL:
        raise PremiseViolated(
            f"scap(e, {rho:.6g}) is not inside sconv(C) (largest cap {cap:.6g})"
        )
    return cap


def _as_sphere_points(C):
    if isinstance(C, SphericalPointSet):
        return C.points
    return SphericalPointSet.from_points(C).points


def _northern(P, rho, verified_cap, method):
    rho_eff = min(rho, verified_cap)
    Q = central_project(P) / math.tan(rho)
    cert = select(Q, method, premise_radius=math.tan(rho_eff) / math.tan(rho))
    r_raw = cert.achieved_radius
    r = min(r_raw, 1.0)
    certified = math.atan(r * math.tan(rho))
    achieved = largest_cap_about_axis(P[list(cert.indices)])
    out = SphericalCertificate(
        cert.indices, "northern", achieved, certified, r, False, cert.method
    )
    return out, r_raw


def _chebyshev_center(A, b):
    n, d = A.shape
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * d + [(0, None)],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"Chebyshev centre LP failed: {res.message}")
    return res.x[:d], float(res.x[-1])


def _general(P, rho, verified_cap, method):
    A = -P[:, :-1]
    b = P[:, -1].copy()
    if np.all(b > 0):
        L = A / b[:, None]
        scale = 1.0 / math.tan(min(rho, verified_cap))
        sel = qht_select(L * scale, method)
        r = min(1.0 / sel.guaranteed_polar_radius, 1.0)
        certified = certified_cap_radius(rho, r)
        shifted = False
    else:
        p, slack = _chebyshev_center(A, b)
        if slack <= 0:
            raise RuntimeError("projected polar body has empty interior")
        beta = b - A @ p
        L = A / beta[:, None]
        R = polar_max_norm(L)
        sel = qht_select(L * R, method)
        r = 1.0 / sel.guaranteed_polar_radius
        bound = float(np.linalg.norm(p)) + R * sel.guaranteed_polar_radius
        certified = math.pi / 2 - math.atan(bound)
        shifted = True
    n, d = P.shape[0], P.shape[1] - 1
    used = method
    if used == "auto":
        used = "exact" if n <= limits.max_exact_points() and d <= limits.max_enum_dim() else "greedy"
    achieved = largest_cap_about_axis(P[list(sel.indices)])
    return SphericalCertificate(sel.indices, "general", achieved, certified, r, shifted, used)


def select_spherical(C, rho: float, method: str = "auto") -> SphericalCertificate:
    """Select at most ``2d`` points of ``C`` whose spherical hull keeps a polar cap.

    Requires ``scap(e_{d+1}, rho)`` inside the spherical hull of ``C``
    (verified here). The certificate's ``achieved_cap`` is the exact largest
    polar cap in the hull of the selection; ``certified_cap`` is the analytic
    lower bound of the case that produced it.
    """
    P = _as_sphere_points(C)
    verified = _check_inputs(P, rho)
    if spolar_empty(P):
        idx = caratheodory_select(P)
        return SphericalCertificate(idx, "full_sphere", math.pi, math.pi, None, False, "caratheodory")
    if np.all(P[:, -1] > NORTH_TOL):
        cert, _ = _northern(P, rho, verified, method)
    else:
        cert = _general(P, rho, verified, method)
    if cert.achieved_cap < cert.certified_cap - CAP_TOL:
        raise VerificationFailed(
            f"achieved cap {cert.achieved_cap:.12g} below certified {cert.certified_cap:.12g}"
        )
    return cert


def gamma_consistency_probe(C, rho_small: float, method: str = "exact") -> float:
    """``achieved_cap / rho`` minus the Euclidean radius on the projected instance.

    Only meaningful for northern inputs at small ``rho`` where both ratios
    should agree to first order.
    """
    P = _as_sphere_points(C)
    if not np.all(P[:, -1] > NORTH_TOL):
        raise PremiseViolated("probe requires C in the open northern hemisphere")
    if not 0 < rho_small <= 0.01:
        raise PremiseViolated(f"probe requires 0 < rho <= 0.01, got {rho_small!r}")
    verified = _check_inputs(P, rho_small)
    cert, r_raw = _northern(P, rho_small, verified, method)
    return cert.achieved_cap / rho_small - r_raw
