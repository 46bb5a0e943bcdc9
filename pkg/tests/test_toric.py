from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from toricres.errors import UnsupportedGeometryError
from toricres.fixtures import M33_SUPPORTS, STURMFELS_PAPER_RAYS, STURMFELS_SUPPORTS
from toricres.toric import (
    codimension,
    divisor_class,
    facet_normals,
    homogenized_exponent,
    lattice_points_in_window,
    minkowski_points,
    support_problem,
    variety_from_points,
    variety_of,
)

SIMPLEX2 = ((0, 0), (1, 0), (0, 1))


def test_projective_plane_fan():
    x = variety_from_points(SIMPLEX2)
    assert x.dim == 2
    assert set(x.rays) == {(-1, -1), (0, 1), (1, 0)}
    assert len(x.max_cones) == 3
    assert x.class_rank == 1
    # grading kills the rays and is constant +-1 on a smooth plane
    cols = {g[0] for g in x.grading}
    assert cols in ({1}, {-1})
    assert x.degree_of([1, 1, 1]) in ((3,), (-3,))


def test_p1xp1_fan():
    x = variety_from_points(((0, 0), (1, 0), (0, 1), (1, 1)))
    assert set(x.rays) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(x.max_cones) == 4
    assert x.class_rank == 2
    for cone in x.max_cones:
        assert len(cone) == 2


def test_grading_annihilates_rays():
    for pts in (SIMPLEX2, ((0, 0), (2, 0), (1, 3)), ((0, 0), (1, 0), (0, 1), (2, 2))):
        x = variety_from_points(pts)
        for k in range(x.dim):
            vec = [x.rays[r][k] for r in range(x.n_rays)]
            assert x.degree_of(vec) == (0,) * x.class_rank


def test_interval_fan():
    x = variety_from_points(((0,), (2,)))
    assert x.rays == ((-1,), (1,))
    assert len(x.max_cones) == 2
    assert x.class_rank == 1
    assert abs(x.degree_of([1, 1])[0]) == 2


def test_irrelevant_exponents():
    x = variety_from_points(SIMPLEX2)
    gens = x.irrelevant_exponents()
    assert len(gens) == 3
    for cone, g in zip(x.max_cones, gens):
        for r in range(x.n_rays):
            assert g[r] == (0 if r in cone else 1)


def test_homogenized_exponents_unit_simplex():
    x = variety_from_points(SIMPLEX2)
    exps = [homogenized_exponent(x, SIMPLEX2, p) for p in SIMPLEX2]
    # the three points homogenize to the three variables
    assert sorted(exps) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    for e in exps:
        assert x.degree_of(e) == divisor_class(x, SIMPLEX2)


def test_sturmfels_variety_matches_published_rays():
    prob = support_problem(STURMFELS_SUPPORTS)
    x = variety_of(prob)
    assert x.dim == 2
    assert set(x.rays) == set(STURMFELS_PAPER_RAYS)
    assert len(x.rays) == 8
    assert len(x.max_cones) == 8
    assert x.class_rank == 6
    assert x.torsion == ()


def test_space_example_variety():
    prob = support_problem(M33_SUPPORTS)
    x = variety_of(prob)
    assert x.dim == 3
    assert x.n_rays == 7
    assert x.class_rank == 4
    assert x.torsion == ()


def test_minkowski_points():
    pts = minkowski_points((((0,), (1,)), ((0,), (2,))))
    assert pts == [(0,), (1,), (2,), (3,)]


def test_codimension_values():
    assert codimension(STURMFELS_SUPPORTS) == 1
    assert codimension(M33_SUPPORTS) == 1
    assert codimension((((0, 0), (1, 0), (0, 1)),) * 3) == 1
    # three univariate supports: one too many equations
    assert codimension((((0,), (1,)),) * 3) == 2


def test_degenerate_span_rejected():
    with pytest.raises(UnsupportedGeometryError):
        facet_normals([(0, 0), (1, 1), (2, 2)])


def test_lattice_points_projective_plane():
    x = variety_from_points(SIMPLEX2)
    alpha = x.degree_of([2, 0, 0])
    pts = lattice_points_in_window(x, alpha, (0, 0, 0))
    assert len(pts) == 6
    for u in pts:
        assert x.degree_of(u) == alpha
        assert all(c >= 0 for c in u)
    pts = lattice_points_in_window(x, alpha, (-1, -1, -1))
    assert len(pts) == 21
    # window around an unreachable class stays empty
    assert lattice_points_in_window(x, alpha, (3, 3, 3)) == []


def test_lattice_points_interval():
    x = variety_from_points(((0,), (3,)))
    alpha = x.degree_of([1, 2])
    pts = lattice_points_in_window(x, alpha, (0, 0))
    assert len(pts) == 4  # monomials of degree 3 in two variables
    assert lattice_points_in_window(x, alpha, (-2, -2)) != []


small_support = st.lists(
    st.tuples(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3)),
    min_size=3, max_size=5, unique=True,
)


@given(small_support)
@settings(max_examples=40, deadline=None)
def test_variety_invariants_random(points):
    try:
        x = variety_from_points(tuple(points))
    except UnsupportedGeometryError:
        return  # collinear draw
    # grading annihilates every ray direction
    for k in range(x.dim):
        vec = [x.rays[r][k] for r in range(x.n_rays)]
        assert x.degree_of(vec) == (0,) * x.class_rank
    assert len(x.max_cones) >= 3
    assert x.class_rank == x.n_rays - x.dim
    for cone in x.max_cones:
        assert len(cone) >= x.dim


@given(small_support)
@settings(max_examples=20, deadline=None)
def test_homogenization_lands_in_divisor_class(points):
    try:
        x = variety_from_points(tuple(points))
    except UnsupportedGeometryError:
        return
    sup = tuple(points)
    cls = divisor_class(x, sup)
    for p in sup:
        e = homogenized_exponent(x, sup, p)
        assert all(c >= 0 for c in e)
        assert x.degree_of(e) == cls
