import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cross_polytope, ring
from qsteinitz.errors import EquatorSingularity, PremiseViolated, ScaleLimit
from qsteinitz.oracles import RandomSource, mc_cap_contained
from qsteinitz.sphere import (
    Cap,
    ConeRep,
    SphericalPointSet,
    cap_to_ball_radius,
    central_project,
    extreme_rays,
    in_spherical_hull,
    largest_cap_about_axis,
    lift_north,
    north_pole,
    rotation_to_north,
    spolar_empty,
)

RING_CAP = math.atan(1 / math.sqrt(2))


def random_unit(rng, n, m):
    X = rng.standard_normal((n, m))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


# -- types --------------------------------------------------------------------

def test_point_set_normalizes():
    C = SphericalPointSet.from_points([[0.0, 0.0, 2.0], [3.0, 4.0, 0.0]])
    np.testing.assert_allclose(np.linalg.norm(C.points, axis=1), 1.0, atol=1e-12)
    assert C.d == 2 and len(C.subset([1])) == 1


def test_point_set_needs_d_at_least_two():
    with pytest.raises(ValueError):
        SphericalPointSet.from_points([[1.0, 0.0]])


def test_point_set_rotation_preserves_norms(rng):
    C = SphericalPointSet.from_points(random_unit(rng, 6, 3))
    R = rotation_to_north(C.points[0])
    np.testing.assert_allclose(C.rotated(R).points[0], north_pole(2), atol=1e-12)


def test_cap_validation_and_membership():
    with pytest.raises(ValueError):
        Cap([0.0, 0.0, 2.0], 0.1)
    with pytest.raises(ValueError):
        Cap(north_pole(2), 4.0)
    cap = Cap.north(2, math.pi / 4)
    assert cap.contains(lift_north([0.99, 0.0]))
    assert not cap.contains(lift_north([1.01, 0.0]))


def test_cone_rep_strict_membership():
    cone = ConeRep.of(ring())
    assert cone.contains(north_pole(2))
    assert not cone.contains(np.array([1.0, 0.0, 0.0]))


# -- projection ---------------------------------------------------------------

def test_project_north_pole():
    np.testing.assert_allclose(central_project([0.0, 0.0, 1.0]), [0.0, 0.0])


def test_project_substitution():
    np.testing.assert_allclose(central_project([0.6, 0.0, 0.8]), [0.75, 0.0])


def test_project_equator():
    with pytest.raises(EquatorSingularity):
        central_project([1.0, 0.0, 0.0])


def test_lift_examples():
    np.testing.assert_allclose(lift_north([0.0, 0.0]), [0.0, 0.0, 1.0])
    np.testing.assert_allclose(lift_north([1.0, 0.0]), np.array([1.0, 0.0, 1.0]) / math.sqrt(2))


def test_lift_round_trip(rng):
    Z = rng.standard_normal((10_000, 2)) * 5
    X = lift_north(Z)
    assert np.all(X[:, -1] > 0)
    assert np.max(np.abs(central_project(X) - Z)) <= 1e-12 * 5


def test_cap_to_ball_radius():
    assert cap_to_ball_radius(math.pi / 4) == pytest.approx(1.0)
    assert cap_to_ball_radius(0.0) == 0.0
    with pytest.raises(PremiseViolated):
        cap_to_ball_radius(math.pi / 2)


def test_projection_maps_cap_boundary_to_ball():
    rho = 0.7
    t = np.linspace(0, 2 * np.pi, 50)
    boundary = np.column_stack([np.sin(rho) * np.cos(t), np.sin(rho) * np.sin(t), np.full(50, np.cos(rho))])
    np.testing.assert_allclose(np.linalg.norm(central_project(boundary), axis=1), cap_to_ball_radius(rho))


# -- hemisphere tests ---------------------------------------------------------

def test_spolar_empty_examples(rng):
    assert spolar_empty(cross_polytope(3))
    assert not spolar_empty(ring())
    X = random_unit(rng, 10, 3)
    X[:, -1] = np.maximum(np.abs(X[:, -1]), 0.1)
    assert not spolar_empty(SphericalPointSet.from_points(X))


def test_in_hull_members(rng):
    C = SphericalPointSet.from_points(random_unit(rng, 8, 3) + [0, 0, 1.5])
    for c in C.points:
        assert in_spherical_hull(C, c)


def test_in_hull_full_sphere(rng):
    X = random_unit(rng, 20, 3)
    assert np.all(in_spherical_hull(cross_polytope(3), X))


def test_in_hull_ring_excludes_south_pole():
    assert not in_spherical_hull(ring(), -north_pole(2))
    assert in_spherical_hull(ring(), north_pole(2))


def test_in_hull_batched_matches_nnls(rng):
    C = SphericalPointSet.from_points(random_unit(rng, 7, 3) + [0, 0, 1.0])
    X = random_unit(rng, 400, 3)
    batched = in_spherical_hull(C, X)
    one_by_one = np.array([in_spherical_hull(C, x) for x in X[:60]])
    np.testing.assert_array_equal(batched[:60], one_by_one)
    # a half-space witness rules out points that fail the polar test
    rays = extreme_rays(C)
    outside = np.any(X @ rays.T < -1e-9, axis=1)
    np.testing.assert_array_equal(batched, ~outside)


# -- caps ---------------------------------------------------------------------

def test_cap_of_single_point_is_zero():
    assert largest_cap_about_axis(np.array([[0.0, 0.0, 1.0]]), north_pole(2)) == 0.0


def test_cap_of_full_sphere(rng):
    axis = random_unit(rng, 1, 3)[0]
    assert largest_cap_about_axis(cross_polytope(3), axis) == math.pi


def test_cap_of_ring_closed_form():
    assert largest_cap_about_axis(ring(), north_pole(2)) == pytest.approx(RING_CAP, abs=1e-12)


def test_cap_of_ring_monte_carlo():
    # largest radius whose sampled cap stays in the hull, on a coarse grid
    src = RandomSource(11)
    grid = np.arange(0.55, 0.70, 0.005)
    ok = [mc_cap_contained(ring(), Cap.north(2, float(r)), 100_000, src.spawn(i)) for i, r in enumerate(grid)]
    best = grid[np.flatnonzero(ok)].max()
    assert abs(best - RING_CAP) <= 0.005


@pytest.mark.parametrize("colatitude", [0.2, 0.5, 1.0, 1.3])
def test_cap_of_rings_in_higher_dimension(colatitude):
    for d in (2, 3, 4):
        C = ring(d, colatitude)
        expected = math.atan(math.tan(colatitude) / math.sqrt(d))
        assert largest_cap_about_axis(C) == pytest.approx(expected, abs=1e-12)


def test_cap_axis_outside_hull_is_zero():
    assert largest_cap_about_axis(ring(), -north_pole(2)) == 0.0


def test_cap_guard(rng):
    with pytest.raises(ScaleLimit):
        largest_cap_about_axis(random_unit(rng, 41, 3) + [0, 0, 2.0])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_cap_is_rotation_invariant(seed):
    rng = np.random.default_rng(seed)
    C = random_unit(rng, 8, 3) + [0, 0, 1.2]
    C /= np.linalg.norm(C, axis=1, keepdims=True)
    axis = random_unit(rng, 1, 3)[0]
    R = rotation_to_north(axis)
    assert np.linalg.det(R) == pytest.approx(1.0)
    before = largest_cap_about_axis(C, axis)
    after = largest_cap_about_axis(C @ R.T, north_pole(2))
    assert after == pytest.approx(before, abs=1e-9)
