import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperballs.errors import DomainError, UnreachableOnRay
from hyperballs.geometry import (
    ConvexPolygon2D,
    EuclideanBall,
    HalfSpace,
    PuncturedSpace,
    UnitBall,
    as_vector,
    ball_contains_ball,
    boundary_distance,
    directions_2d,
    random_directions,
    rectangle,
    solve_radii_along_rays,
    solve_radius_along_ray,
)


def test_unit_ball_distance_and_membership():
    G = UnitBall(3)
    assert boundary_distance(G, [0.3, 0.4, 0.0]) == pytest.approx(0.5)
    assert G.contains([0.0, 0.0, 0.999])
    assert not G.contains([0.6, 0.8, 0.0])
    with pytest.raises(DomainError):
        boundary_distance(G, [1.0, 0.0, 0.0])


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        UnitBall(2).contains([0.1, 0.1, 0.1])


def test_half_space_and_punctures():
    assert boundary_distance(HalfSpace(2), [5.0, 0.25]) == 0.25
    G = PuncturedSpace(((-1.0, 0.0), (1.0, 0.0)))
    assert boundary_distance(G, [0.0, 1.0]) == pytest.approx(math.sqrt(2))
    with pytest.raises(DomainError):
        boundary_distance(G, [1.0, 0.0])


def test_rectangle_distance():
    R = rectangle(2.0, 1.0)
    assert boundary_distance(R, [0.6, 0.4]) == pytest.approx(0.4)
    assert boundary_distance(R, [1.0, 0.5]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ConvexPolygon2D(((0, 0), (0, 1), (1, 1), (1, 0)))


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.95, 0.95), st.floats(-0.95, 0.95), st.floats(0, 2 * math.pi))
def test_ray_exit_lands_on_boundary(a, b, th):
    x = np.array([a, b]) * 0.7
    d = np.array([[math.cos(th), math.sin(th)]])
    for G in (UnitBall(2), rectangle(2.0, 2.0, (-1.0, -1.0))):
        t = G.ray_exit(x, d)[0]
        assert G.distance(x + t * d[0]) == pytest.approx(0.0, abs=1e-12)


def test_ray_exit_hits_puncture_only_when_aligned():
    G = PuncturedSpace(((1.0, 0.0),))
    t = G.ray_exit(np.zeros(2), np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert t[0] == pytest.approx(1.0)
    assert math.isinf(t[1])


def test_ray_solver_linear_target():
    G = UnitBall(2)
    x = np.array([0.1, 0.2])
    f = lambda Y: np.linalg.norm(Y - x, axis=-1)
    _, dirs = directions_2d(16)
    sol = solve_radii_along_rays(G, f, x, dirs, 0.3)
    assert sol.reachable.all()
    assert np.allclose(sol.t, 0.3, atol=1e-12)
    assert np.all(sol.t_lo <= sol.t) and np.all(sol.t <= sol.t_hi)


def test_ray_solver_unreachable():
    G = UnitBall(2)
    f = lambda Y: np.linalg.norm(Y, axis=-1)
    with pytest.raises(UnreachableOnRay):
        solve_radius_along_ray(G, f, [0.0, 0.0], [1.0, 0.0], 2.0)


def test_random_directions_are_unit_and_seeded():
    a = random_directions(50, 4, seed=3)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
    assert np.array_equal(a, random_directions(50, 4, seed=3))


def test_euclidean_ball_helpers():
    big = EuclideanBall([0.0, 0.0], 2.0)
    small = EuclideanBall([0.5, 0.0], 1.0)
    assert ball_contains_ball(big, small)
    assert not ball_contains_ball(small, big)
    pts = small.boundary_points_2d(12)
    assert np.allclose(np.linalg.norm(pts - small.center, axis=1), 1.0)
    with pytest.raises(ValueError):
        EuclideanBall([0, 0], 0.0)
    assert as_vector([1, 2]).dtype == float
