"""Instance generation, canonical JSON files and certificate verification."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import limits
from .engine import SteinitzCertificate, select
from .errors import PremiseViolated, SchemaError
from .euclid import containment_radius, hull_radius
from .oracles import RandomSource, mc_cap_contained, mc_containment_radius
from .pipeline import SphericalCertificate, select_spherical
from .sphere import Cap, largest_cap_about_axis, north_pole, rotation_to_north, spolar_empty

SCHEMA_VERSION = 1
NORMALIZATION_TOL = 1e-9
KINDS = ("euclidean", "spherical")

DEFAULT_SAMPLES = 100_000
CAP_MARGIN = 1e-6
RADIUS_TOL = 1e-9


# -- canonical JSON -----------------------------------------------------------

def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise SchemaError(f"non-finite number {x!r} cannot be serialized")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(value, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in value):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in value) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise SchemaError(f"cannot serialize {type(value).__name__}")


def canonical_json(doc) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    return _encode(doc, 2, 0) + "\n"


# -- file types ---------------------------------------------------------------

@dataclass(frozen=True)
class InstanceFile:
    kind: str
    dim: int
    points: tuple
    cap: Optional[dict] = None
    premise_radius: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"kind must be one of {KINDS}")
        pts = tuple(tuple(float(c) for c in p) for p in self.points)
        width = self.dim if self.kind == "euclidean" else self.dim + 1
        if not pts:
            raise SchemaError("instance has no points")
        if any(len(p) != width for p in pts):
            raise SchemaError(f"every point must have {width} coordinates")
        object.__setattr__(self, "points", pts)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)

    @property
    def rho(self) -> Optional[float]:
        return None if self.cap is None else float(self.cap["rho"])

    def to_doc(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "dim": self.dim,
            "points": [list(p) for p in self.points],
            "cap": None,
            "premise_radius": self.premise_radius,
            "metadata": dict(self.metadata),
        }
        if self.cap is not None:
            doc["cap"] = {"axis": [float(a) for a in self.cap["axis"]], "rho": float(self.cap["rho"])}
        return doc

    def dumps(self) -> str:
        return canonical_json(self.to_doc())

    def digest(self) -> str:
        return "sha256:" + hashlib.sha256(self.dumps().encode()).hexdigest()


def _require(doc, key, kind=None):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"field {key!r} has wrong type {type(value).__name__}")
    return value


def _number(x, what):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{what} must be a number")
    return float(x)


def instance_from_doc(doc) -> InstanceFile:
    """Parse an instance document exactly as stored (no normalization)."""
    if not isinstance(doc, dict):
        raise SchemaError("instance document must be an object")
    if _require(doc, "schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc.get('schema_version')!r}")
    kind = _require(doc, "kind", str)
    dim = _require(doc, "dim", int)
    points = _require(doc, "points", list)
    if not all(isinstance(p, list) for p in points):
        raise SchemaError("points must be a list of coordinate lists")
    pts = [[_number(c, "coordinate") for c in p] for p in points]
    cap = doc.get("cap")
    if cap is not None:
        if not isinstance(cap, dict):
            raise SchemaError("cap must be an object or null")
        cap = {
            "axis": [_number(a, "cap axis") for a in _require(cap, "axis", list)],
            "rho": _number(_require(cap, "rho"), "cap rho"),
        }
    premise = doc.get("premise_radius")
    premise = None if premise is None else _number(premise, "premise_radius")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SchemaError("metadata must be an object")
    if kind == "spherical" and cap is None:
        raise SchemaError("spherical instances need a cap")
    return InstanceFile(kind, dim, pts, cap, premise, metadata)


def normalized_instance(inst: InstanceFile) -> InstanceFile:
    """Unit-normalize spherical points and rotate the cap axis to the north pole."""
    if inst.kind != "spherical":
        return inst
    P = inst.array
    norms = np.linalg.norm(P, axis=1)
    if np.any(np.abs(norms - 1.0) > NORMALIZATION_TOL):
        raise SchemaError("spherical points must have unit norm (tolerance 1e-9)")
    P = P / norms[:, None]
    axis = np.asarray(inst.cap["axis"], dtype=float)
    if len(axis) != inst.dim + 1 or abs(np.linalg.norm(axis) - 1.0) > NORMALIZATION_TOL:
        raise SchemaError("cap axis must be a unit vector of the ambient dimension")
    axis = axis / np.linalg.norm(axis)
    metadata = dict(inst.metadata)
    north = north_pole(inst.dim)
    if not np.array_equal(axis, north):
        R = rotation_to_north(axis)
        P = P @ R.T
        metadata["rotation"] = R.tolist()
    cap = {"axis": north.tolist(), "rho": inst.cap["rho"]}
    return InstanceFile(inst.kind, inst.dim, P.tolist(), cap, inst.premise_radius, metadata)


def parse_instance(text: str) -> InstanceFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return instance_from_doc(doc)


def load_instance(path) -> tuple:
    """Read an instance file. Returns ``(normalized_instance, digest_of_file_content)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    raw = parse_instance(text)
    return normalized_instance(raw), raw.digest()


def save_text(path, text):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise SchemaError(f"cannot write {path}: {exc}") from None


@dataclass(frozen=True)
class CertificateFile:
    instance_digest: str
    kind: str
    certificate: object
    verification: dict

    def to_doc(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "instance_digest": self.instance_digest,
            "kind": self.kind,
            "certificate": _certificate_doc(self.certificate),
            "verification": self.verification,
        }

    def dumps(self) -> str:
        return canonical_json(self.to_doc())


def _certificate_doc(cert):
    doc = asdict(cert)
    doc["indices"] = list(cert.indices)
    return doc


_EUCLID_FIELDS = ("indices", "achieved_radius", "method", "cardinality_bound", "premise_radius")
_SPHERE_FIELDS = (
    "indices", "case_tag", "achieved_cap", "certified_cap",
    "internal_radius", "polarity_center_shifted", "method",
)


def certificate_from_doc(doc) -> CertificateFile:
    if not isinstance(doc, dict):
        raise SchemaError("certificate document must be an object")
    if _require(doc, "schema_version") != SCHEMA_VERSION:
        raise SchemaError("unsupported schema_version")
    kind = _require(doc, "kind", str)
    body = _require(doc, "certificate", dict)
    fields = _EUCLID_FIELDS if kind == "euclidean" else _SPHERE_FIELDS
    if kind not in KINDS:
        raise SchemaError(f"kind must be one of {KINDS}")
    if set(body) != set(fields):
        raise SchemaError(f"certificate fields must be {fields}")
    try:
        cert = (SteinitzCertificate if kind == "euclidean" else SphericalCertificate)(
            **{k: body[k] for k in fields}
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed certificate: {exc}") from None
    verification = _require(doc, "verification", dict)
    return CertificateFile(_require(doc, "instance_digest", str), kind, cert, verification)


def parse_certificate(text: str) -> CertificateFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return certificate_from_doc(doc)


def load_certificate(path) -> CertificateFile:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_certificate(fh.read())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None


# -- generators ---------------------------------------------------------------

def _radius_or_minus_inf(P):
    n, d = P.shape
    try:
        if n <= limits.max_enum_points() and d <= limits.max_enum_dim():
            return containment_radius(P)
        return hull_radius(P)
    except PremiseViolated:
        return -math.inf


def _premise_ok(P):
    return _radius_or_minus_inf(P) >= 1.0


def gen_euclid(dim: int, n: int, seed: int) -> InstanceFile:
    """``n`` random points at radii in [1.05, 3] whose hull contains ``B(o, 1)``.

    Falls back to scaled cross-polytope vertices when the random draw misses
    the premise, then trims random extras that are not needed for it.
    """
    if dim < 2:
        raise ValueError("gen_euclid needs dim >= 2")
    if n < 2 * dim:
        raise ValueError(f"gen_euclid needs n >= 2*dim (got n={n}, dim={dim})")
    rng = RandomSource(seed).generator()
    dirs = rng.standard_normal((n, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    extras = dirs * rng.uniform(1.05, 3.0, n)[:, None]
    kept = list(range(n))
    cross = []
    if not _premise_ok(extras):
        R = 1.05 * math.sqrt(dim)
        axes = [sign * R * np.eye(dim)[i] for i in range(dim) for sign in (1.0, -1.0)]
        order = [int(i) for i in rng.permutation(n)]
        for v in axes:
            cross.append(v)
            current = np.vstack([extras[kept]] + cross)
            if not _premise_ok(current):
                continue
            # drop random extras the premise does not need, down to n points
            for i in order:
                if len(kept) + len(cross) <= n:
                    break
                trial = [j for j in kept if j != i]
                if _premise_ok(np.vstack([extras[trial]] + cross)):
                    kept = trial
            if len(kept) + len(cross) <= n:
                break
    augmented = len(cross)
    pts = np.vstack([extras[kept]] + cross) if cross else extras
    P = np.array(pts)
    if len(P) != n or not _premise_ok(P):
        raise RuntimeError("gen_euclid failed to reach the premise with n points")
    meta = {"generator": "gen_euclid", "seed": int(seed), "n": int(n), "cross_polytope_points": augmented}
    return InstanceFile("euclidean", dim, P.tolist(), None, 1.0, meta)


def ring_colatitude(dim: int, cap: float) -> float:
    """Colatitude of a lifted ``±e_i`` ring whose hull has polar cap ``cap``."""
    return math.atan(math.sqrt(dim) * math.tan(cap))


def ring_cap(dim: int, colatitude: float) -> float:
    return math.atan(math.tan(colatitude) / math.sqrt(dim))


def gen_sphere(dim: int, n: int, rho: float, seed: int, southern_fraction: float = 0.0) -> InstanceFile:
    """Random spherical instance whose hull contains ``scap(e_{d+1}, rho)``.

    A ring of ``2*dim`` points is planted so its hull's polar cap exceeds
    ``rho``; the other points are random, a ``southern_fraction`` of all
    points lying just below the equator around a random tilt direction.
    """
    if dim < 2:
        raise ValueError("gen_sphere needs dim >= 2")
    if not 0 < rho < math.pi / 2:
        raise ValueError(f"rho must lie in (0, pi/2), got {rho!r}")
    if not 0 <= southern_fraction < 1:
        raise ValueError("southern_fraction must lie in [0, 1)")
    if n < 2 * dim:
        raise ValueError(f"gen_sphere needs n >= 2*dim (got n={n}, dim={dim})")
    rng = RandomSource(seed).generator()
    target = min(1.05 * rho, (rho + math.pi / 2) / 2)
    theta = ring_colatitude(dim, target)
    ring = []
    for i in range(dim):
        for sign in (1.0, -1.0):
            p = np.zeros(dim + 1)
            p[i] = sign * math.sin(theta)
            p[-1] = math.cos(theta)
            ring.append(p)
    n_south = min(int(round(southern_fraction * n)), n - 2 * dim)
    n_north = n - 2 * dim - n_south

    def horizontal(k):
        w = rng.standard_normal((k, dim))
        return w / np.linalg.norm(w, axis=1, keepdims=True)

    colat = rng.uniform(0.0, min(1.5 * theta, math.pi / 2 - 0.02), n_north)
    north = np.hstack([np.sin(colat)[:, None] * horizontal(n_north), np.cos(colat)[:, None]])
    tilt = horizontal(1)[0]
    spread = rng.uniform(0.2, 2.0)
    w = tilt + spread * rng.standard_normal((n_south, dim))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    deepest = min(math.pi / 2 - 0.01, max(0.02, 0.6 * (math.pi / 2 - target)) * (1 + spread))
    depth = rng.uniform(0.01, deepest, n_south)
    south = np.hstack([np.cos(depth)[:, None] * w, -np.sin(depth)[:, None]])
    P = np.vstack([np.array(ring), north, south])
    if largest_cap_about_axis(P) < rho - 1e-9:
        raise RuntimeError("gen_sphere: planted ring does not satisfy the cap premise")
    meta = {
        "generator": "gen_sphere",
        "seed": int(seed),
        "n": int(n),
        "southern_fraction": float(southern_fraction),
        "southern_spread": float(spread),
        "ring_colatitude": theta,
    }
    cap = {"axis": north_pole(dim).tolist(), "rho": float(rho)}
    return InstanceFile("spherical", dim, P.tolist(), cap, None, meta)


# -- selection and verification -------------------------------------------------

def verification_rng(digest: str) -> RandomSource:
    return RandomSource(int(digest.split(":")[-1][:16], 16))


def run_selection(inst: InstanceFile, digest: str, method: str = "auto", samples: int = DEFAULT_SAMPLES):
    """Select on a normalized instance and attach a verification record."""
    if inst.kind == "euclidean":
        premise = 1.0 if inst.premise_radius is None else inst.premise_radius
        cert = select(inst.array, method, premise_radius=premise)
    else:
        cert = select_spherical(inst.array, inst.rho, "auto" if method == "auto" else method)
    record = CertificateFile(digest, inst.kind, cert, {})
    report = verify(inst, record, digest, samples)
    return CertificateFile(digest, inst.kind, cert, report)


def verify(inst: InstanceFile, cfile: CertificateFile, digest: str, samples: int = DEFAULT_SAMPLES) -> dict:
    """Re-derive a certificate's claims from the instance.

    Returns a verification record whose ``status`` is ``"passed"`` or
    ``"failed"``; failures are listed under ``failures``.
    """
    failures = []
    margins = {}
    if cfile.instance_digest != digest:
        failures.append("instance digest mismatch")
    if cfile.kind != inst.kind:
        failures.append("certificate kind does not match instance kind")
        return _report("failed", failures, {}, margins)
    P = inst.array
    cert = cfile.certificate
    idx = list(cert.indices)
    if len(set(idx)) != len(idx) or any(i < 0 or i >= len(P) for i in idx):
        failures.append("indices out of range or repeated")
        return _report("failed", failures, {}, margins)
    sub = P[idx]
    rng = verification_rng(digest)
    if inst.kind == "euclidean":
        d = inst.dim
        counts = {"directions": samples}
        premise = 1.0 if inst.premise_radius is None else inst.premise_radius
        if len(idx) > 2 * d or cert.cardinality_bound != 2 * d:
            failures.append("cardinality above 2d")
        r_all = _radius_or_minus_inf(P)
        margins["premise"] = r_all - premise
        if r_all < premise - RADIUS_TOL:
            failures.append("premise B(o, premise_radius) not contained in conv(Q)")
        r_sub = max(_radius_or_minus_inf(sub), 0.0)
        margins["radius_recomputed"] = r_sub - cert.achieved_radius
        if abs(r_sub - cert.achieved_radius) > RADIUS_TOL:
            failures.append("achieved_radius does not match the selection")
        mc = mc_containment_radius(sub, samples, rng)
        margins["monte_carlo"] = mc - cert.achieved_radius
        if mc < cert.achieved_radius - 1e-12:
            failures.append("Monte-Carlo support estimate below achieved_radius")
    else:
        d = inst.dim
        counts = {"cap_samples": samples}
        bound = d + 2 if cert.case_tag == "full_sphere" else 2 * d
        if len(idx) > bound:
            failures.append(f"cardinality above {bound}")
        cap_all = largest_cap_about_axis(P)
        margins["premise"] = cap_all - inst.rho
        if cap_all < inst.rho - RADIUS_TOL:
            failures.append("premise cap not contained in sconv(C)")
        if cert.case_tag == "full_sphere" and not spolar_empty(sub):
            failures.append("full_sphere selection fits in an open hemisphere")
        cap_sub = largest_cap_about_axis(sub)
        margins["cap_recomputed"] = cap_sub - cert.achieved_cap
        if abs(cap_sub - cert.achieved_cap) > RADIUS_TOL:
            failures.append("achieved_cap does not match the selection")
        margins["certified_slack"] = cert.achieved_cap - cert.certified_cap
        if cert.achieved_cap < cert.certified_cap - RADIUS_TOL:
            failures.append("achieved_cap below certified_cap")
        probe = Cap(north_pole(d), min(math.pi, max(cert.achieved_cap - CAP_MARGIN, 0.0)))
        if not mc_cap_contained(sub, probe, samples, rng):
            failures.append("Monte-Carlo cap sample outside sconv(selection)")
    return _report("failed" if failures else "passed", failures, counts, margins)


def _report(status, failures, counts, margins):
    return {
        "status": status,
        "failures": list(failures),
        "oracle_samples": counts,
        "margins": {k: (float(v) if math.isfinite(v) else None) for k, v in margins.items()},
    }
