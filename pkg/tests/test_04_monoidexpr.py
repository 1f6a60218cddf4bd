# Test 04 - Monoid Expressions
"""
Compilation to piece unions, exact membership, closures by both routes,
spans, the purity probe, prismality certificates and the JSON format.
"""

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prisma.algebra.exactlin import IntMatrix, Subspace
from prisma.algebra.hilbert import Verdict
from prisma.algebra.monoidexpr import (
    ALMOST_PRISMAL,
    CLOSURE_BASIC,
    PRISMAL,
    Certificate,
    FinGen,
    FullLattice,
    Intersect,
    Lex,
    Orthant,
    Preimage,
    Product,
    Restrict,
    TreeCone,
    check_certificate,
    closure,
    closure_in_subspace,
    expr_from_json,
    expr_to_json,
    linear_extensions,
    member,
    member_verdict,
    prismality_certificate,
    purity_probe,
    span,
)
from prisma.core.errors import (
    CertificateUnavailable,
    DimensionMismatch,
    InputError,
    PurityRequired,
    TooLarge,
    UnsupportedShape,
)

C = Intersect((Orthant(2), Preimage.of([[1, -1], [1, 0]], Lex(2))))
D = Intersect((Orthant(2), Preimage.of([[-1, 1], [0, 1]], Lex(2))))
GAPPED = FinGen.of([(2, 0), (3, 0)])


def lex_nonpositive(v):
    return next((x for x in v if x), 0) <= 0


# --- Leaves ---

def test_lex_membership():
    e = Lex(2)
    assert member(e, (0, 0))
    assert member(e, (-1, 5))
    assert member(e, (0, -3))
    assert not member(e, (0, 1))
    assert not member(e, (1, -5))


def test_orthant_and_lattice():
    assert member(Orthant(3), (0, 2, 1)) and not member(Orthant(3), (0, -1, 1))
    assert member(FullLattice(2), (-7, 3))


def test_tree_cone_on_a_chain_and_a_star():
    chain = TreeCone((-1, 0))
    assert member(chain, (0, -5)) and member(chain, (-1, 100))
    assert not member(chain, (0, 1)) and not member(chain, (1, -1))
    star = TreeCone((-1, 0, 0))
    assert member(star, (0, -1, 0)) and member(star, (0, -1, -1))
    assert not member(star, (0, 1, -1))


def test_tree_cone_pieces_stay_few_on_wide_trees():
    star = TreeCone((-1,) + (0,) * 10)
    assert len(star.compile_node().pieces) == 2
    assert member(star, (0,) + (-1,) * 10) and member(star, (-1,) + (5,) * 10)
    assert not member(star, (0, 1) + (-1,) * 9)
    assert len(TreeCone((-1, 0, 1, 2)).compile_node().pieces) == 4
    broom = TreeCone((-1,) + (0,) * 13 + tuple(range(1, 14)))
    with pytest.raises(TooLarge):
        broom.compile_node()


def test_tree_parents_are_validated():
    with pytest.raises(InputError):
        TreeCone((0, -1))
    with pytest.raises(InputError):
        TreeCone((-1, 2, 0))


def test_chain_extensions_of_a_star():
    assert linear_extensions((-1, 0, 0)) == [(0, 1, 2), (0, 2, 1)]
    with pytest.raises(TooLarge):
        linear_extensions((-1, 0, 0), cap=2)


# --- Operations ---

def test_remark_monoids_meet_only_at_zero():
    for p in product(range(4), repeat=2):
        assert member(C, p) == (p == (0, 0) or p[0] < p[1])
        assert member(D, p) == (p == (0, 0) or p[1] < p[0])
        assert member(Intersect((C, D)), p) == (p == (0, 0))


def test_product_and_restriction():
    e = Product((Lex(1), Orthant(1)))
    assert e.ambient_dim == 2
    assert member(e, (-1, 3)) and not member(e, (1, 3))
    r = Restrict.of(Lex(2), [(1, 1)])
    assert member(r, (-2, -2)) and not member(r, (-2, 0)) and not member(r, (2, 2))


def test_dimension_mismatches_are_rejected():
    with pytest.raises(DimensionMismatch):
        Intersect((Orthant(2), Lex(3)))
    with pytest.raises(DimensionMismatch):
        Preimage.of([[1, 0, 0]], Lex(2))
    with pytest.raises(DimensionMismatch):
        member(Lex(2), (1, 2, 3))


@given(
    st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2),
    st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
)
def test_compiled_preimage_matches_definition(rows, alpha):
    m = IntMatrix.from_rows(rows, 2)
    e = Intersect((Orthant(2), Preimage(m, Lex(2))))
    expected = min(alpha) >= 0 and lex_nonpositive(m.apply(alpha))
    assert member(e, alpha) == expected


# --- Non-saturated finitely generated monoids ---

def test_gapped_monoid_is_a_filter():
    e = Intersect((GAPPED, FullLattice(2)))
    assert member(e, (5, 0)) and not member(e, (1, 0))


def test_gapped_monoid_cannot_sit_under_a_preimage():
    with pytest.raises(UnsupportedShape):
        member(Preimage.of([[1, 0], [0, 1]], GAPPED), (2, 0))


def test_closure_through_a_gapped_monoid_needs_purity():
    with pytest.raises(PurityRequired):
        closure(Intersect((GAPPED, Orthant(2))))
    assert closure(GAPPED).to_dict() == {"lineality": [], "hilbert_basis": [[1, 0]]}


def test_membership_budget_surfaces_as_too_large():
    e = Intersect((FinGen.of([(2, 0), (-2, 0), (0, 1)]), FullLattice(2)))
    assert member_verdict(e, (40, 40), budget=5) is Verdict.UNKNOWN
    with pytest.raises(TooLarge):
        member(e, (40, 40), budget=5)


# --- Closures and spans ---

def test_closures_of_leaves():
    assert closure(Lex(2)).to_dict() == {"lineality": [[0, 1]], "hilbert_basis": [[-1, 0]]}
    assert closure(Orthant(2)).to_dict() == {"lineality": [], "hilbert_basis": [[0, 1], [1, 0]]}
    assert closure(FullLattice(2)).lineality_basis.nrows == 2


def test_closure_does_not_commute_with_intersection():
    assert closure(Intersect((C, D))).is_zero
    assert closure(Intersect((C, D)), CLOSURE_BASIC).is_zero
    apart = closure(C).intersect(closure(D))
    assert apart.to_dict() == {"lineality": [], "hilbert_basis": [[1, 1]]}


def test_closure_routes_and_errors():
    with pytest.raises(UnsupportedShape):
        closure(Lex(2), CLOSURE_BASIC)
    with pytest.raises(InputError):
        closure(Lex(2), "sideways")


def test_closure_in_a_subspace():
    section = closure_in_subspace(Lex(2), Subspace.span_of([(1, 1)], 2))
    assert section.to_dict() == {"lineality": [], "hilbert_basis": [[-1, -1]]}
    basic = closure_in_subspace(Intersect((Orthant(2), Lex(2))), Subspace.span_of([(1, -1)], 2), CLOSURE_BASIC)
    assert basic.is_zero


def test_spans():
    assert span(Lex(3)) == Subspace.full(3)
    assert span(Restrict.of(Lex(3), [(1, 0, 1), (0, 1, 0)])).dim == 2
    assert span(Intersect((C, D))).dim == 0
    assert span(GAPPED).to_list() == [[1, 0]]


# --- Purity ---

def test_purity_probe_finds_the_gap():
    report = purity_probe(GAPPED, 2)
    assert not report.pure
    assert report.counterexample == (1, 0) and report.multiplier == 2
    assert report.to_dict()["counterexample"] == [1, 0]


def test_cones_and_lex_are_pure():
    assert purity_probe(Lex(2), 3).pure
    assert purity_probe(C, 3).pure
    assert purity_probe(TreeCone((-1, 0, 0)), 2).pure


def test_purity_is_undecided_when_the_budget_runs_out():
    gapped = FinGen.of([(1, 0), (1, 2)])
    assert purity_probe(gapped, 2, nonnegative=True).counterexample == (1, 1)
    starved = purity_probe(gapped, 2, nonnegative=True, budget=0)
    assert starved.pure is None and starved.undecided > 0
    assert starved.counterexample is None
    assert starved.to_dict()["pure"] is None


# --- Prismality certificates ---

@pytest.mark.parametrize("e", [
    Lex(2),
    C,
    Product((Lex(2), Lex(1))),
    Preimage.of([[1], [1]], Lex(2)),
    Restrict.of(Lex(3), [(1, 0, 1), (0, 1, 0)]),
    TreeCone((-1, 0, 0)),
])
def test_derived_certificates_check(e):
    cert = prismality_certificate(e)
    assert cert.claim == PRISMAL
    assert check_certificate(cert) == []


def test_non_epimorphism_goes_through_image_factorization():
    cert = prismality_certificate(Preimage.of([[1], [1]], Lex(2)))
    assert cert.rule == "image-factorization"
    assert set(cert.maps) == {"factor", "embedding"}
    assert [c.rule for c in cert.walk()][:3] == ["image-factorization", "epimorphism-preimage", "embedding"]


def test_gapped_monoid_is_almost_prismal():
    assert prismality_certificate(GAPPED).claim == ALMOST_PRISMAL
    assert prismality_certificate(Intersect((GAPPED, Orthant(2)))).claim == ALMOST_PRISMAL
    with pytest.raises(CertificateUnavailable):
        prismality_certificate(Product((GAPPED, Lex(1))))


def test_tampered_certificates_are_caught():
    assert check_certificate(Certificate("lex", PRISMAL, Orthant(2)))
    assert check_certificate(Certificate("fingen", PRISMAL, GAPPED))
    good = prismality_certificate(Product((Lex(1), Lex(1))))
    assert check_certificate(Certificate("cartesian", PRISMAL, Product((Lex(1), Lex(2))), good.children))


def test_tree_certificate_respects_the_vertex_cap():
    with pytest.raises(TooLarge):
        prismality_certificate(TreeCone((-1, 0, 0, 0)), max_vertices=3)


# --- JSON ---

def test_json_round_trip_of_a_nested_expression():
    doc = {
        "type": "intersect",
        "args": [
            {"type": "orthant", "dim": 2},
            {"type": "preimage", "matrix": [[1, -1], [1, 0]], "cols": 2, "arg": {"type": "lex", "dim": 2}},
        ],
    }
    e = expr_from_json(doc)
    assert e == C
    assert expr_to_json(e) == doc


def test_json_errors_carry_paths():
    bad = {
        "type": "intersect",
        "args": [{"type": "orthant", "dim": 1}, {"type": "preimage", "matrix": [[1, 0, 0]], "arg": {"type": "lex", "dim": 2}}],
    }
    with pytest.raises(DimensionMismatch) as info:
        expr_from_json(bad)
    assert info.value.path == "$.args[1]"
    with pytest.raises(InputError) as info:
        expr_from_json({"type": "banana"})
    assert info.value.path.startswith("$")
    with pytest.raises(InputError):
        expr_from_json({"type": "fingen", "gens": []})
