# Test 02 - Rational Polyhedral Cones
"""
Double description in both directions, membership modes, the lattice of
relatively open faces, and the binary cone operations.
"""

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prisma.algebra.cone import (
    RELATIVE_INTERIOR,
    Cone,
    combine,
    dual_description,
    intersect,
    membership,
    minkowski_sum,
    open_faces,
)
from prisma.core.errors import DimensionMismatch, InputError


def generator_lists(n: int, low: int = -3, high: int = 3):
    vector = st.tuples(*[st.integers(low, high)] * n)
    return st.lists(vector, min_size=1, max_size=n + 2)


# --- Descriptions ---

def test_orthant_facets():
    c = Cone.orthant(2)
    assert c.rays == ((0, 1), (1, 0))
    assert c.inequalities == ((0, 1), (1, 0))
    assert c.is_pointed and c.dim == 2
    assert c.grading() == (1, 1)


def test_facets_of_a_skew_cone():
    c = Cone.from_generators([(1, 0), (1, 2)], 2)
    assert set(c.inequalities) == {(0, 1), (2, -1)}


def test_halfplane_has_a_line():
    c = Cone.from_constraints([], [(-1, 0)], 2)
    assert c.rays == ((-1, 0),)
    assert c.lineality.to_list() == [[0, 1]]
    assert not c.is_pointed
    assert c.grading() is None


def test_lower_dimensional_cone_keeps_its_equation():
    c = Cone.from_generators([(1, 1)], 2)
    assert c.dim == 1
    assert c.equations.to_list() == [[1, -1]]
    assert c.contains((2, 2))
    assert not c.contains((1, 0))
    assert c.contains((2, 2), RELATIVE_INTERIOR)
    assert not c.contains((0, 0), RELATIVE_INTERIOR)


def test_full_and_zero_cones():
    assert Cone.full(3).lineality.dim == 3
    assert Cone.full(3).contains((-5, 2, 9))
    z = Cone.zero(2)
    assert z.dim == 0
    assert z.contains((0, 0)) and not z.contains((1, 0))


@given(st.integers(1, 3).flatmap(generator_lists))
def test_descriptions_round_trip(gens):
    n = len(gens[0])
    c = Cone.from_generators(gens, n)
    back = Cone.from_constraints(c.equations.rows, c.inequalities, n)
    assert back.rays == c.rays
    assert back.lineality == c.lineality
    assert back.inequalities == c.inequalities
    for g in gens:
        assert c.contains(g)
    assert c.contains(c.interior_point(), RELATIVE_INTERIOR)


@given(st.integers(1, 3).flatmap(generator_lists))
def test_generator_order_does_not_matter(gens):
    n = len(gens[0])
    assert Cone.from_generators(gens, n) == Cone.from_generators(list(reversed(gens)), n)


def test_dual_description_takes_exactly_one_description():
    assert dual_description(2, rays=[[1, 0], [0, 1]]) == Cone.orthant(2)
    assert dual_description(2, inequalities=[[1, 0], [0, 1]]) == Cone.orthant(2)
    with pytest.raises(InputError):
        dual_description(2)
    with pytest.raises(InputError):
        dual_description(2, rays=[[1, 0]], inequalities=[[1, 0]])


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        Cone.from_generators([(1, 0, 0)], 2)
    with pytest.raises(DimensionMismatch):
        Cone.orthant(2).contains((1, 2, 3))
    with pytest.raises(DimensionMismatch):
        intersect(Cone.orthant(2), Cone.orthant(3))


def test_unknown_membership_mode():
    with pytest.raises(InputError):
        membership(Cone.orthant(2), (1, 1), "interior-ish")


# --- Operations ---

def test_intersection_and_sum():
    halfplane = Cone.from_constraints([], [(-1, 0)], 2)
    meet = intersect(Cone.orthant(2), halfplane)
    assert meet.rays == ((0, 1),) and meet.dim == 1
    joined = minkowski_sum(Cone.from_generators([(1, 0)], 2), Cone.from_generators([(0, 1)], 2))
    assert joined == Cone.orthant(2)
    assert combine("intersect", Cone.orthant(2), halfplane) == meet
    with pytest.raises(InputError):
        combine("union", Cone.orthant(2), halfplane)


@given(generator_lists(2), generator_lists(2))
def test_intersection_is_pointwise(a, b):
    ca, cb = Cone.from_generators(a, 2), Cone.from_generators(b, 2)
    both = intersect(ca, cb)
    for x in range(-3, 4):
        for y in range(-3, 4):
            assert both.contains((x, y)) == (ca.contains((x, y)) and cb.contains((x, y)))


# --- Faces ---

def test_faces_of_the_orthant():
    faces = open_faces(Cone.orthant(2))
    assert [f.dim for f in faces] == [0, 1, 1, 2]
    assert [f.rays for f in faces[1:3]] == [[(0, 1)], [(1, 0)]]


def test_faces_of_a_ray_and_a_halfplane():
    assert [f.dim for f in Cone.from_generators([(1, 1)], 2).open_faces()] == [0, 1]
    assert [f.dim for f in Cone.from_constraints([], [(-1, 0)], 2).open_faces()] == [1, 2]


def test_locate_points_in_open_faces():
    c = Cone.orthant(2)
    assert c.locate((0, 3)).span.to_list() == [[0, 1]]
    assert c.locate((2, 3)).dim == 2
    assert c.locate((0, 0)).dim == 0
    assert c.locate((-1, 0)) is None


@given(st.integers(1, 3).flatmap(generator_lists))
def test_open_faces_partition_the_cone(gens):
    n = len(gens[0])
    c = Cone.from_generators(gens, n)
    faces = c.open_faces()
    for p in product(range(-2, 3), repeat=n):
        owners = [f for f in faces if f.contains(p)]
        assert len(owners) == (1 if c.contains(p) else 0)
        if owners:
            assert owners[0] is c.locate(p)
            assert owners[0].closed_face.contains(p)
