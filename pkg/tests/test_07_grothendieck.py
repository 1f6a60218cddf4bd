# Test 07 - Group Completion
"""
Invariants of group completions of finitely presented commutative monoids.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prisma.algebra.grothendieck import (
    MonoidPresentation,
    class_is_zero,
    group_completion,
    is_trivial,
    permuted,
    with_idempotence,
)
from prisma.core.errors import DimensionMismatch, InputError
from prisma.core.schemas import PresentationDoc


@st.composite
def presentations(draw):
    g = draw(st.integers(1, 3))
    side = st.tuples(*[st.integers(0, 2)] * g)
    relations = draw(st.lists(st.tuples(side, side), max_size=3))
    return MonoidPresentation.of(g, relations)


def test_idempotent_generator_completes_to_zero():
    assert is_trivial(MonoidPresentation.of(1, [((1,), (2,))]))


def test_free_monoid_completes_to_z():
    group = group_completion(MonoidPresentation.of(1))
    assert group.free_rank == 1 and group.torsion == ()
    assert not class_is_zero(MonoidPresentation.of(1), (1,))


def test_torsion_appears():
    p = MonoidPresentation.of(2, [((2, 0), (0, 2))])
    group = group_completion(p)
    assert group.free_rank == 1
    assert group.torsion == (2,)
    assert group.element((2, 0)) == group.element((0, 2))
    assert group.element((1, 0)) != group.element((0, 1))
    assert group.to_dict()["torsion"] == [2]


def test_absorbing_relations_kill_everything():
    p = MonoidPresentation.of(2, [((1, 0), (1, 1)), ((0, 1), (1, 1))])
    assert is_trivial(p)
    assert group_completion(p).to_dict() == {"free_rank": 0, "torsion": [], "trivial": True, "class_map": [[], []]}


def test_class_absorbed_by_another_element_vanishes():
    p = MonoidPresentation.of(2, [((1, 0), (1, 1))])
    assert class_is_zero(p, (0, 1))
    assert class_is_zero(p, (0, 5))
    assert not class_is_zero(p, (1, 0))


def test_presentation_from_document():
    doc = PresentationDoc.model_validate({"generators": 2, "relations": [[[2, 0], [0, 2]]]})
    p = MonoidPresentation.from_doc(doc)
    assert p.relation_matrix.to_list() == [[2, -2]]
    assert p.to_json() == {"generators": 2, "relations": [[[2, 0], [0, 2]]]}


def test_presentations_are_validated():
    with pytest.raises(InputError):
        MonoidPresentation.of(1, [((-1,), (0,))])
    with pytest.raises(DimensionMismatch):
        MonoidPresentation.of(2, [((1,), (0, 1))])
    with pytest.raises(InputError):
        MonoidPresentation.of(-1)
    with pytest.raises(InputError):
        permuted(MonoidPresentation.of(2), [0, 0])
    with pytest.raises(DimensionMismatch):
        group_completion(MonoidPresentation.of(2)).element((1,))


@given(presentations())
def test_adding_idempotence_trivializes(p):
    assert is_trivial(with_idempotence(p))


@given(presentations(), st.randoms(use_true_random=False))
def test_renaming_generators_keeps_the_group(p, rnd):
    perm = list(range(p.generator_count))
    rnd.shuffle(perm)
    a, b = group_completion(p), group_completion(permuted(p, perm))
    assert (a.free_rank, a.torsion) == (b.free_rank, b.torsion)


@given(presentations())
def test_relations_hold_in_the_completion(p):
    group = group_completion(p)
    for u, v in p.relations:
        assert group.element(u) == group.element(v)
