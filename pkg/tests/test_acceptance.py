"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` or ``[FAIL]`` line with its measured
quantities; the lines are repeated in the pytest terminal summary. Run the
file directly (``python tests/test_acceptance.py``) for the lines alone.
"""
import math
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import record_acceptance  # noqa: E402
from qsteinitz.engine import RBound, select_exact  # noqa: E402
from qsteinitz.euclid import containment_radius, contains_origin_interior, hull_membership, polar_max_norm  # noqa: E402
from qsteinitz.oracles import RandomSource, mc_containment_radius  # noqa: E402
from qsteinitz.pipeline import (  # noqa: E402
    certified_cap_radius,
    gamma_consistency_probe,
    select_spherical,
    tan_bounds_hold,
)
from qsteinitz.sphere import spolar_empty  # noqa: E402
from qsteinitz.workbench import (  # noqa: E402
    gen_euclid,
    gen_sphere,
    parse_certificate,
    parse_instance,
    run_selection,
)

SEED = 20240611
SOUTHERN_MIX = (0.0, 0.3, 0.5)
VERIFY_SAMPLES = 100_000


def report(number, title, ok, detail):
    record_acceptance(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


# -- shared corpora -----------------------------------------------------------

@lru_cache(maxsize=None)
def euclid_corpus():
    rng = RandomSource(SEED, 1).generator()
    out = []
    for t in range(100):
        n = int(rng.integers(4, 11))
        out.append(gen_euclid(2, n, SEED + t))
    return tuple(out)


def _sphere_instance(t):
    rng = RandomSource(SEED, 1000 + t).generator()
    n = int(rng.integers(6, 11))
    rho = float(rng.uniform(0.1, 1.0))
    return gen_sphere(2, n, rho, SEED + t, SOUTHERN_MIX[t % len(SOUTHERN_MIX)])


@lru_cache(maxsize=None)
def sphere_corpus():
    """100 spherical instances with exact selection and full verification."""
    started = time.perf_counter()
    rows = []
    for t in range(100):
        inst = _sphere_instance(t)
        rows.append((inst, run_selection(inst, inst.digest(), "exact", VERIFY_SAMPLES)))
    return tuple(rows), time.perf_counter() - started


# -- criteria -----------------------------------------------------------------

def test_1_tangent_bounds():
    started = time.perf_counter()
    gen = RandomSource(SEED, 11).generator()
    wide = gen.uniform(0.0, math.pi / 2, 100_000)
    wide = wide[wide > 0]
    narrow = gen.uniform(0.0, math.pi / 4, 100_000)
    narrow = narrow[narrow > 0]
    bad_lower = int(np.sum(wide > np.tan(wide) + 1e-12))
    bad_upper = int(np.sum(~tan_bounds_hold(narrow, slack=1e-12)))
    bad_all = int(np.sum(~tan_bounds_hold(wide, slack=1e-12)))
    elapsed = time.perf_counter() - started
    ok = bad_lower == 0 and bad_upper == 0 and bad_all == 0 and elapsed < 1.0
    report(1, "t <= tan t and tan t <= 2t", ok,
           f"{bad_lower + bad_all} + {bad_upper} violations over {len(wide)} + {len(narrow)} samples, {elapsed:.3f} s (limit 1 s)")


def test_2_cap_half_product_bound():
    started = time.perf_counter()
    gen = RandomSource(SEED, 12).generator()
    r = 1.0 - gen.uniform(0.0, 1.0, 100_000)  # (0, 1]
    rho = gen.uniform(0.0, math.pi / 2, 100_000)
    rho = np.where(rho > 0, rho, 1e-300)
    violations = 0
    worst = math.inf
    for ri, pi in zip(r.tolist(), rho.tolist()):
        slack = certified_cap_radius(pi, ri) - ri * pi / 2
        worst = min(worst, slack)
        violations += slack < -1e-12
    elapsed = time.perf_counter() - started
    ok = violations == 0 and elapsed < 1.0
    report(2, "pi/2 - arctan(cot rho / r) >= r rho / 2", ok,
           f"{violations} violations in 100000 samples, min slack {worst:.3g}, {elapsed:.3f} s (limit 1 s)")


def test_3_duality_and_monte_carlo():
    started = time.perf_counter()
    gen = RandomSource(SEED, 13).generator()
    worst_dual, worst_gap, low_gap = 0.0, 0.0, 0.0
    for t in range(200):
        d = 2 + t % 2
        while True:
            P = gen.standard_normal((int(gen.integers(d + 2, 13)), d))
            if contains_origin_interior(P):
                break
        exact = containment_radius(P)
        worst_dual = max(worst_dual, abs(polar_max_norm(P) * exact - 1.0))
        gap = mc_containment_radius(P, 10_000, RandomSource(SEED, 100 + t), refine=40) - exact
        worst_gap = max(worst_gap, gap)
        low_gap = min(low_gap, gap)
    elapsed = time.perf_counter() - started
    ok = worst_dual <= 1e-9 and worst_gap <= 1e-3 and low_gap >= -1e-12 and elapsed < 10.0
    report(3, "polar max norm x containment radius = 1, Monte-Carlo radius", ok,
           f"max |R r - 1| = {worst_dual:.2g} (tol 1e-9), MC - exact in [{low_gap:.2g}, {worst_gap:.2g}] "
           f"(tol +1e-3), 200 instances, {elapsed:.2f} s (limit 10 s)")


def test_4_planar_steinitz_selection():
    started = time.perf_counter()
    bound = RBound(2)
    radii, sizes = [], []
    for inst in euclid_corpus():
        cert = select_exact(inst.array)
        radii.append(cert.achieved_radius)
        sizes.append(len(cert.indices))
    elapsed = time.perf_counter() - started
    ok = max(sizes) <= 4 and min(radii) >= bound.lower and elapsed < 20.0
    report(4, "exact selection in d = 2", ok,
           f"max size {max(sizes)} (<= 4), min radius {min(radii):.4f} against bracket "
           f"[{bound.lower:.4f}, {bound.upper:.4f}], {elapsed:.2f} s (limit 20 s)")


def test_5_spherical_selection():
    rows, elapsed = sphere_corpus()
    cases = {"full_sphere": 0, "northern": 0, "general": 0}
    size_bad = cap_bad = verify_bad = 0
    worst_ratio = math.inf
    for inst, cfile in rows:
        cert = cfile.certificate
        cases[cert.case_tag] += 1
        size_bad += len(cert.indices) > 4
        cap_bad += cert.achieved_cap < inst.rho / 48
        verify_bad += cfile.verification["status"] != "passed"
        worst_ratio = min(worst_ratio, cert.achieved_cap / inst.rho)
    mixed = all(v > 0 for v in cases.values())
    ok = size_bad == cap_bad == verify_bad == 0 and mixed and elapsed < 60.0
    report(5, "spherical selection on a mixed corpus", ok,
           f"cases {cases}, {size_bad} over 4 points, {cap_bad} below rho/48 (min cap/rho {worst_ratio:.3f}), "
           f"{verify_bad} failed Monte-Carlo verifications at {VERIFY_SAMPLES} samples, {elapsed:.2f} s (limit 60 s)")


def test_6_certified_cap_chain():
    rows, _ = sphere_corpus()
    checked = bound_bad = cap_bad = 0
    for inst, cfile in rows:
        cert = cfile.certificate
        if cert.case_tag == "full_sphere" or cert.polarity_center_shifted:
            continue
        checked += 1
        bound_bad += cert.certified_cap < cert.internal_radius * inst.rho / 2 - 1e-12
        cap_bad += cert.achieved_cap < cert.certified_cap - 1e-9
    ok = checked > 0 and bound_bad == 0 and cap_bad == 0
    report(6, "certified cap chain on unshifted certificates", ok,
           f"{checked} certificates checked, {bound_bad} below r rho / 2, {cap_bad} with achieved < certified")


def test_7_small_cap_probe():
    started = time.perf_counter()
    worst = 0.0
    for t in range(20):
        gen = RandomSource(SEED, 2000 + t).generator()
        inst = gen_sphere(2, int(gen.integers(6, 11)), 0.01, SEED + 500 + t, 0.0)
        worst = max(worst, abs(gamma_consistency_probe(inst.array, 0.01)))
    elapsed = time.perf_counter() - started
    ok = worst <= 0.05 and elapsed < 10.0
    report(7, "spherical vs Euclidean ratio at rho = 0.01", ok,
           f"max |cap/rho - r| = {worst:.3g} (tol 0.05) over 20 northern instances, {elapsed:.2f} s (limit 10 s)")


def test_8_full_sphere_case():
    gen = RandomSource(SEED, 14).generator()
    found = size_bad = residual_bad = cap_bad = 0
    worst_residual = 0.0
    while found < 20:
        d = 2 + found % 2
        C = gen.standard_normal((int(gen.integers(d + 2, 13)), d + 1))
        C /= np.linalg.norm(C, axis=1, keepdims=True)
        if not spolar_empty(C):
            continue
        found += 1
        cert = select_spherical(C, float(gen.uniform(0.1, 1.0)))
        residual = hull_membership(C[list(cert.indices)], np.zeros(d + 1))[0]
        worst_residual = max(worst_residual, residual)
        size_bad += len(cert.indices) > d + 2
        residual_bad += residual > 1e-9
        cap_bad += cert.achieved_cap != math.pi or cert.case_tag != "full_sphere"
    ok = size_bad == residual_bad == cap_bad == 0
    report(8, "full-sphere selections", ok,
           f"20 instances (d = 2, 3), {size_bad} over d + 2 points, max residual {worst_residual:.2g} "
           f"(tol 1e-9), {cap_bad} with cap other than pi")


def test_9_determinism_and_round_trip():
    rows, _ = sphere_corpus()
    differing = round_trip_bad = 0
    for t, (inst, cfile) in enumerate(rows):
        again = _sphere_instance(t)
        rerun = run_selection(again, again.digest(), "exact", VERIFY_SAMPLES)
        differing += again.dumps() != inst.dumps() or rerun.dumps() != cfile.dumps()
        round_trip_bad += parse_instance(inst.dumps()) != inst
        round_trip_bad += parse_certificate(cfile.dumps()).dumps() != cfile.dumps()
    for inst in euclid_corpus():
        cfile = run_selection(inst, inst.digest(), "exact", 10_000)
        rerun = run_selection(inst, inst.digest(), "exact", 10_000)
        differing += rerun.dumps() != cfile.dumps()
        round_trip_bad += parse_instance(inst.dumps()) != inst
        round_trip_bad += parse_certificate(cfile.dumps()).dumps() != cfile.dumps()
    ok = differing == 0 and round_trip_bad == 0
    report(9, "determinism and serialization round-trip", ok,
           f"{differing} of 200 reruns differ byte-wise, {round_trip_bad} round-trip mismatches over 400 files")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
