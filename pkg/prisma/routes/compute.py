# Compute Routes - Cones, Hilbert Bases and Monoid Expressions
"""
Commands over cones and monoid expressions: hilbert, saturate, closure,
closure-in-subspace, member, span, purity, faces, decompose and certify.
"""

import logging

from prisma.algebra.cone import dual_description
from prisma.algebra.exactlin import Subspace
from prisma.algebra.facedecomp import decompose, verify_decomposition
from prisma.algebra.hilbert import AffineMonoid, Verdict, hilbert_basis, saturate_monoid
from prisma.algebra.monoidexpr import (
    check_certificate,
    closure,
    closure_in_subspace,
    expr_from_doc,
    member_verdict,
    prismality_certificate,
    purity_probe,
    span,
)
from prisma.core.config import settings
from prisma.core.errors import InputError, TooLarge, VerificationFailed, check_dim
from prisma.core.schemas import (
    ConeDoc,
    ConeInput,
    ExprInput,
    JobOptions,
    MemberInput,
    SaturateInput,
    SubspaceExprInput,
)
from prisma.routes.registry import CommandRouter

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Compute"])


def cone_from_doc(doc: ConeDoc):
    return dual_description(
        doc.dim,
        rays=doc.rays,
        lineality=doc.lineality,
        equations=doc.equations,
        inequalities=doc.inequalities,
    )


@router.command("hilbert", ConeInput, summary="Hilbert basis and lineality of a cone's lattice points")
def hilbert(doc: ConeInput, options: JobOptions, target=None) -> dict:
    return hilbert_basis(cone_from_doc(doc.cone)).to_dict()


@router.command("saturate", SaturateInput, summary="Saturation of a finitely generated monoid")
def saturate(doc: SaturateInput, options: JobOptions, target=None) -> dict:
    dim = doc.dim if doc.dim is not None else (len(doc.gens[0]) if doc.gens else None)
    if dim is None:
        raise InputError("an empty generator list needs an explicit dim", path="$.dim")
    return saturate_monoid(AffineMonoid.of(doc.gens, dim)).to_dict()


@router.command("closure", ExprInput, summary="Lattice points of the closed convex hull of an expression")
def closure_command(doc: ExprInput, options: JobOptions, target=None) -> dict:
    return closure(expr_from_doc(doc.expr, "$.expr"), doc.route).to_dict()


@router.command("closure-in-subspace", SubspaceExprInput, summary="Closure of the section by a rational subspace")
def closure_in_subspace_command(doc: SubspaceExprInput, options: JobOptions, target=None) -> dict:
    e = expr_from_doc(doc.expr, "$.expr")
    for i, v in enumerate(doc.subspace.basis):
        if len(v) != doc.subspace.dim:
            raise InputError(f"basis vector has length {len(v)}, expected {doc.subspace.dim}", path=f"$.subspace.basis[{i}]")
    v = Subspace.span_of(doc.subspace.basis, doc.subspace.dim)
    return closure_in_subspace(e, v, doc.route).to_dict()


@router.command("member", MemberInput, summary="Exact membership of a point")
def member_command(doc: MemberInput, options: JobOptions, target=None) -> dict:
    e = expr_from_doc(doc.expr, "$.expr")
    check_dim(e.ambient_dim, len(doc.point), "point")
    verdict = member_verdict(e, doc.point, options.budget)
    if verdict is Verdict.UNKNOWN:
        raise TooLarge(f"membership of {doc.point} undecided within {options.budget} search states", witness=doc.point)
    return {"member": verdict is Verdict.YES}


@router.command("span", ExprInput, summary="Linear span of an expression")
def span_command(doc: ExprInput, options: JobOptions, target=None) -> dict:
    v = span(expr_from_doc(doc.expr, "$.expr"))
    return {"dim": v.dim, "basis": v.to_list()}


@router.command("purity", ExprInput, summary="Box search for a point outside the monoid with a multiple inside")
def purity(doc: ExprInput, options: JobOptions, target=None) -> dict:
    e = expr_from_doc(doc.expr, "$.expr")
    box = options.box if options.box is not None else settings.DEFAULT_BOX
    return purity_probe(e, box, options.multipliers, budget=options.budget).to_dict()


@router.command("faces", ConeInput, summary="Relatively open faces of a cone")
def faces(doc: ConeInput, options: JobOptions, target=None) -> dict:
    c = cone_from_doc(doc.cone)
    return {"cone": c.to_dict(), "faces": [f.to_dict() for f in c.open_faces()]}


@router.command("decompose", ExprInput, summary="Face decomposition of a monoid with its sampled checks")
def decompose_command(doc: ExprInput, options: JobOptions, target=None) -> dict:
    e = expr_from_doc(doc.expr, "$.expr")
    pieces = decompose(e)
    box = options.box if options.box is not None else settings.DEFAULT_BOX
    report = verify_decomposition(pieces, box, options.seed, options.max_pairs,
                                  multipliers=options.multipliers, budget=options.budget)
    return {"pieces": [p.to_dict() for p in pieces], "report": report.to_dict(), "passed": report.passed}


@router.command("certify", ExprInput, summary="Prismality derivation, checked node by node")
def certify(doc: ExprInput, options: JobOptions, target=None) -> dict:
    e = expr_from_doc(doc.expr, "$.expr")
    max_vertices = options.max_vertices or settings.ORACLE_MAX_VERTICES
    cert = prismality_certificate(e, max_vertices, options.budget)
    problems = check_certificate(cert, options.budget)
    if problems:
        logger.error(f"Certificate failed its own check: {problems}")
        raise VerificationFailed("the derived certificate does not check", witness=problems)
    return {"claim": cert.claim, "certificate": cert.to_dict()}
