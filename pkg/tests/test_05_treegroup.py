# Test 05 - Rooted-Tree Groups
"""
The recursive tree order against its chain-extension oracle, joins and
meets, generating tuples, associated monoids and their embedded forms.
"""

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prisma.algebra.exactlin import IntMatrix, rank
from prisma.algebra.monoidexpr import closure, member
from prisma.algebra.treegroup import (
    GeneratorTuple,
    ParasemifieldSpec,
    RootedTree,
    associated_monoid,
    canonical_generators,
    chain_extension_monoid,
    duplicate_generator,
    duplicated_monoid,
    element,
    embedded_associated_monoid,
    embedify,
    identity,
    join,
    join_meet,
    leq,
    leq_oracle,
    meet,
    q_membership,
)
from prisma.core.errors import DimensionMismatch, InputError, NoInversePair, SpecMismatch
from prisma.core.schemas import GeneratorTupleDoc

CHAIN2 = ParasemifieldSpec.of((-1, 0))
STAR2 = ParasemifieldSpec.of((-1, 0, 0))
POINT = ParasemifieldSpec.of((-1,))


def parent_lists(max_vertices: int = 4):
    return st.integers(1, max_vertices).flatmap(
        lambda m: st.tuples(*[st.integers(0, i - 1) for i in range(1, m)]).map(lambda tail: (-1,) + tail)
    )


@st.composite
def spec_with_elements(draw, count: int = 2):
    factors = draw(st.lists(parent_lists(3), min_size=1, max_size=2))
    spec = ParasemifieldSpec.of(*factors)
    coords = st.tuples(*[st.integers(-2, 2)] * spec.vertex_count)
    return (spec,) + tuple(draw(coords) for _ in range(count))


# --- Trees and specs ---

def test_tree_shapes():
    assert RootedTree.chain(3).parents == (-1, 0, 1)
    assert RootedTree.star(2).parents == (-1, 0, 0)
    assert RootedTree.star(2).subtrees == [(0, 1, 2), (1,), (2,)]
    assert ParasemifieldSpec.of((-1, 0), (-1,)).offsets == [0, 2]


def test_elements_check_their_spec():
    with pytest.raises(DimensionMismatch):
        element(CHAIN2, (1, 2, 3))
    with pytest.raises(SpecMismatch):
        element(CHAIN2, (1, 2)) + element(ParasemifieldSpec.of((-1,), (-1,)), (1, 2))
    assert (element(CHAIN2, (1, 2)) - element(CHAIN2, (1, 2))) == identity(CHAIN2)
    assert element(CHAIN2, (1, -2)).times(3).coords == (3, -6)


# --- Order ---

def test_root_decides_on_a_chain():
    assert leq(CHAIN2, (0, -5), (0, 0))
    assert leq(CHAIN2, (-1, 100), (0, 0))
    assert not leq(CHAIN2, (0, 1), (0, 0))


def test_star_siblings_are_incomparable():
    a = (0, 1, -1)
    assert not leq(STAR2, a, (0, 0, 0)) and not leq(STAR2, (0, 0, 0), a)
    assert join(STAR2, a, (0, 0, 0)).coords == (0, 1, 0)
    assert meet(STAR2, a, (0, 0, 0)).coords == (0, 0, -1)


def test_join_takes_the_larger_root():
    j, m = join_meet(CHAIN2, (1, -9), (0, 9))
    assert j.coords == (1, -9)
    assert m.coords == (0, 9)


def test_negative_cone_membership():
    assert q_membership(CHAIN2, (-1, 7))
    assert not q_membership(CHAIN2, (0, 1))


@given(spec_with_elements())
def test_recursive_order_matches_chain_extensions(data):
    spec, a, b = data
    assert leq(spec, a, b) == leq_oracle(spec, a, b)


@given(spec_with_elements(count=3))
def test_join_is_a_least_upper_bound(data):
    spec, a, b, c = data
    j = join(spec, a, b)
    assert j == join(spec, b, a)
    assert leq(spec, a, j) and leq(spec, b, j)
    assert leq(spec, a, b) == (j.coords == tuple(b))
    if leq(spec, a, c) and leq(spec, b, c):
        assert leq(spec, j, c)
    assert join(spec, join(spec, a, b), c) == join(spec, a, join(spec, b, c))


@given(spec_with_elements(count=1), st.integers(2, 4))
def test_roots_can_be_extracted(data, k):
    spec, a = data
    if q_membership(spec, tuple(k * x for x in a)):
        assert q_membership(spec, a)


# --- Generating tuples ---

def test_canonical_tuple_on_a_chain():
    x = canonical_generators(CHAIN2)
    assert x.length == 4
    assert x.matrix.to_list() == [[1, -1, 0, 0], [0, 0, 1, -1]]


def test_canonical_tuple_of_the_trivial_spec():
    x = canonical_generators(ParasemifieldSpec())
    assert x.length == 2 and x.matrix.nrows == 0


def test_tuple_from_document():
    doc = GeneratorTupleDoc.model_validate({"spec": {"factors": [{"parents": [-1, 0]}]}})
    assert GeneratorTuple.from_doc(doc) == canonical_generators(CHAIN2)
    doc = GeneratorTupleDoc.model_validate({"spec": {"factors": [{"parents": [-1]}]}, "matrix": [[1, 1]]})
    assert GeneratorTuple.from_doc(doc).matrix.to_list() == [[1, 1]]
    with pytest.raises(DimensionMismatch):
        GeneratorTuple.from_vertex_matrix(CHAIN2, IntMatrix.from_rows([[1, 1]]))


def test_associated_monoid_of_the_canonical_chain_tuple():
    e = associated_monoid(canonical_generators(CHAIN2))
    assert member(e, (0, 1, 0, 0))
    assert member(e, (0, 1, 5, 0))
    assert member(e, (1, 1, 0, 1))
    assert not member(e, (1, 0, 0, 0))
    assert not member(e, (1, 1, 1, 0))


def test_closure_for_a_single_vertex():
    e = associated_monoid(canonical_generators(POINT))
    assert closure(e).to_dict() == {"lineality": [], "hilbert_basis": [[0, 1], [1, 1]]}


def test_chain_extension_form_agrees():
    x = canonical_generators(STAR2)
    direct, oracle = associated_monoid(x), chain_extension_monoid(x)
    for alpha in product(range(2), repeat=x.length):
        assert member(direct, alpha) == member(oracle, alpha)


# --- Embedded form ---

def test_embedify_frees_a_repeated_generator():
    x = GeneratorTuple.from_vertex_matrix(POINT, IntMatrix.from_rows([[1, 1]]))
    y = embedify(x)
    assert y.matrix == x.matrix
    assert rank(y.exponents) == y.length
    assert y.exponents.to_list() == [[1, 1], [1, 0], [1, 0]]
    assert y.basis.to_list() == [[1, -1, 1]]


def test_embedify_needs_an_inverse_pair_and_nonnegative_exponents():
    with pytest.raises(NoInversePair):
        embedify(GeneratorTuple(POINT, IntMatrix.from_rows([[1, 2]]), IntMatrix.from_rows([[1], [1]])))
    with pytest.raises(InputError):
        embedify(GeneratorTuple(POINT, IntMatrix.from_rows([[1, -1]]), IntMatrix.from_rows([[-1], [0]])))


@given(
    st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2),
)
def test_embedded_monoid_agrees_with_the_direct_one(rows):
    x = GeneratorTuple.from_vertex_matrix(CHAIN2, IntMatrix.from_rows(rows, 2))
    assert embedify(x).matrix == x.matrix
    direct, embedded = associated_monoid(x), embedded_associated_monoid(x)
    for alpha in product(range(3), repeat=2):
        assert member(direct, alpha) == member(embedded, alpha)


def test_duplicated_generator_pulls_back():
    x = GeneratorTuple.from_vertex_matrix(CHAIN2, IntMatrix.from_rows([[1, -1], [-2, 3]]))
    doubled = duplicate_generator(x, 1)
    assert doubled.length == 3
    via_map, direct = duplicated_monoid(x, 1), associated_monoid(doubled)
    for alpha in product(range(3), repeat=3):
        assert member(via_map, alpha) == member(direct, alpha)
    with pytest.raises(InputError):
        duplicate_generator(x, 5)
