# Tree Routes - Tree Groups and Group Completion
"""
Commands over rooted-tree groups and monoid presentations: tree-leq,
tree-join, tree-cx and grothendieck.
"""

import logging

from prisma.algebra.grothendieck import MonoidPresentation, class_is_zero, group_completion
from prisma.algebra.monoidexpr import closure
from prisma.algebra.treegroup import (
    GeneratorTuple,
    ParasemifieldSpec,
    associated_monoid,
    element,
    embedded_associated_monoid,
    embedify,
    join_meet,
    leq,
    leq_oracle,
)
from prisma.core.config import settings
from prisma.core.errors import TooLarge
from prisma.core.schemas import GrothendieckInput, JobOptions, TreePairInput, TreeTupleInput
from prisma.routes.registry import CommandRouter

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Trees"])


def _pair(doc: TreePairInput):
    spec = ParasemifieldSpec.from_doc(doc.spec)
    return spec, element(spec, doc.a), element(spec, doc.b)


@router.command("tree-leq", TreePairInput, summary="Compare two elements of a tree group")
def tree_leq(doc: TreePairInput, options: JobOptions, target=None) -> dict:
    spec, a, b = _pair(doc)
    cap = options.max_vertices or settings.ORACLE_MAX_VERTICES
    try:
        oracle = leq_oracle(spec, a, b, cap)
    except TooLarge:
        logger.warning(f"Skipping the chain-extension oracle: a factor exceeds {cap} vertices")
        oracle = None
    return {"leq": leq(spec, a, b), "geq": leq(spec, b, a), "oracle": oracle}


@router.command("tree-join", TreePairInput, summary="Join and meet of two elements of a tree group")
def tree_join(doc: TreePairInput, options: JobOptions, target=None) -> dict:
    spec, a, b = _pair(doc)
    j, m = join_meet(spec, a, b)
    return {"join": list(j.coords), "meet": list(m.coords)}


@router.command("tree-cx", TreeTupleInput, summary="Associated monoid of a generating tuple")
def tree_cx(doc: TreeTupleInput, options: JobOptions, target=None) -> dict:
    x = GeneratorTuple.from_doc(doc.generators)
    if doc.embed:
        e = embedded_associated_monoid(x)
        shown = embedify(x)
    else:
        e = associated_monoid(x)
        shown = x
    return {"tuple": shown.to_json(), "expr": e.to_json(), "closure": closure(e).to_dict()}


@router.command("grothendieck", GrothendieckInput, summary="Group completion of a finitely presented monoid")
def grothendieck(doc: GrothendieckInput, options: JobOptions, target=None) -> dict:
    p = MonoidPresentation.from_doc(doc.presentation)
    payload = group_completion(p).to_dict()
    if doc.element is not None:
        payload["element"] = {
            "class": list(group_completion(p).element(doc.element)),
            "zero": class_is_zero(p, doc.element),
        }
    return payload
