# Face Decomposition
"""
Splits a monoid C into the pieces A⁰ ∩ C, one per relatively open face A of
the closed hull cl(conv(C)), and checks the properties such a decomposition
must have on sampled lattice points.

Pieces are predicates plus face data: a piece of a non-saturated monoid need
not be finitely generated, so only its closure gets a Hilbert basis.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from prisma.algebra.cone import Cone, OpenFace
from prisma.algebra.exactlin import IntVector, add, vec
from prisma.algebra.hilbert import AffineMonoid, SaturatedMonoid, Verdict, hilbert_basis, membership
from prisma.algebra.monoidexpr import (
    DEFAULT_BUDGET,
    FinGen,
    MonoidExpr,
    Piece,
    Restrict,
    box_points,
    closure,
    compile,
    member,
)
from prisma.core.errors import PurityRequired, UnsupportedShape
from prisma.core.schemas import PropertyOut

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MonoidFacePiece:
    """
    The piece A⁰ ∩ C of a monoid C.

    Attributes:
        face: The open face A of cl(conv(C)); None for the zero piece of a hull with lineality.
        closure: Lattice points of cl(conv(A⁰ ∩ C)).
        dim: dim A.
        expr: The monoid C.
    """

    face: Optional[OpenFace]
    closure: SaturatedMonoid
    dim: int
    expr: MonoidExpr

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    def contains(self, alpha: Sequence[int], budget: int = DEFAULT_BUDGET) -> bool:
        if self.face is None or self.face.dim == 0:
            return not any(alpha)
        return self.face.contains(alpha) and member(self.expr, alpha, budget)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "span": self.face.span.to_list() if self.face is not None else [],
            "rays": [list(r) for r in self.face.rays] if self.face is not None else [],
            "closure": self.closure.to_dict(),
        }


def _as_expr(e: Union[MonoidExpr, AffineMonoid]) -> MonoidExpr:
    return FinGen(e) if isinstance(e, AffineMonoid) else e


def hull_cone(e: Union[MonoidExpr, AffineMonoid]) -> Cone:
    """cl(conv(C)) as a cone."""
    try:
        return closure(_as_expr(e)).cone
    except PurityRequired as err:
        raise UnsupportedShape(f"the convex hull is not computable polyhedrally: {err.message}")


def _face_piece(face: OpenFace, nonzero: Optional[IntVector] = None) -> Piece:
    hull = face.parent
    tight = [a for i, a in enumerate(hull.inequalities) if i in face.tight]
    loose = [a for i, a in enumerate(hull.inequalities) if i not in face.tight]
    strict = loose + ([nonzero] if nonzero is not None else [])
    return Piece.of(list(hull.equations.rows) + tight, strict, ())


def _meets_face(e: MonoidExpr, face: OpenFace) -> bool:
    """Whether A⁰ ∩ C contains a nonzero point."""
    if isinstance(e, FinGen):
        return face.dim > 0
    n = e.ambient_dim
    union = compile(e)
    if face.tight == frozenset(range(len(face.parent.inequalities))):
        # A linear face: nonzero points have l·x != 0 for some basis vector l.
        probes = [v for l in face.span.basis.rows for v in (l, tuple(-x for x in l))]
        return any(p.meet(_face_piece(face, probe)).is_feasible(n) for p in union.pieces for probe in probes)
    return any(p.meet(_face_piece(face)).is_feasible(n) for p in union.pieces)


def _piece_closure(e: MonoidExpr, face: OpenFace) -> SaturatedMonoid:
    if isinstance(e, FinGen):
        return hilbert_basis(face.closed_face)
    return closure(Restrict(e, face.span))


def decompose(e: Union[MonoidExpr, AffineMonoid]) -> List[MonoidFacePiece]:
    """
    One piece per open face A of cl(conv(C)) with A⁰ ∩ C ≠ {0}, plus the zero piece.

    Raises:
        UnsupportedShape: If the hull of C is not polyhedrally computable.
    """
    e = _as_expr(e)
    hull = hull_cone(e)
    n = e.ambient_dim
    pieces: List[MonoidFacePiece] = []
    faces = hull.open_faces()
    if faces[0].dim > 0:
        pieces.append(MonoidFacePiece(None, hilbert_basis(Cone.zero(n)), 0, e))
    for face in faces:
        if face.dim == 0:
            pieces.append(MonoidFacePiece(face, hilbert_basis(Cone.zero(n)), 0, e))
        elif _meets_face(e, face):
            pieces.append(MonoidFacePiece(face, _piece_closure(e, face), face.dim, e))
    logger.info(f"Decomposed a monoid in Z^{n} into {len(pieces)} pieces over {len(faces)} hull faces")
    return pieces


# --- Verification ---

@dataclass
class DecompositionReport:
    pieces: int
    points: int
    properties: List[PropertyOut] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def add(self, name: str, checked: int, witness=None, **detail) -> None:
        self.properties.append(PropertyOut(name=name, passed=witness is None, checked=checked, witness=witness, detail=detail))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "pieces": self.pieces,
            "points": self.points,
            "properties": [p.model_dump() for p in self.properties],
        }


def _pairs(left: List[IntVector], right: List[IntVector], rng: random.Random, limit: int) -> Iterable[Tuple[IntVector, IntVector]]:
    if len(left) * len(right) <= limit:
        return [(a, b) for a in left for b in right]
    return [(rng.choice(left), rng.choice(right)) for _ in range(limit)]


def verify_decomposition(
    pieces: Sequence[MonoidFacePiece],
    box: int = 8,
    seed: int = 7,
    max_pairs: int = 400,
    nonnegative: bool = True,
    multipliers: Sequence[int] = (2, 3),
    budget: int = DEFAULT_BUDGET,
) -> DecompositionReport:
    """
    Checks a decomposition on the lattice points of a box.

    Properties: pieces partition the nonzero points of C; every closure is
    generated by its Hilbert basis on the box; the full-dimensional piece
    has the closure of C; α ∈ D, β ∈ C \\ D̄ puts α + β in a higher-dimensional
    piece; α ∈ D, γ ∈ D̄ keeps α + γ in D; every piece is pure on the box.

    Args:
        pieces: Output of `decompose`.
        box: Box bound B; points range over [0, B]^n, or [-B, B]^n unless nonnegative.
        seed: Seed of the pair sampler.
        max_pairs: Pairs sampled per piece for the two sum properties.
        nonnegative: Restrict the box to the nonnegative orthant.
        multipliers: Multipliers tried by the purity check.
        budget: Membership search budget.
    """
    e = pieces[0].expr
    n = e.ambient_dim
    rng = random.Random(seed)
    hull = hull_cone(e)
    low = 0 if nonnegative else -box
    grid = [vec(p) for p in box_points(n, low, box)]
    members = [p for p in grid if member(e, p, budget)]
    nonzero_members = [p for p in members if any(p)]
    report = DecompositionReport(pieces=len(pieces), points=len(members))

    def piece_of(p: Sequence[int]) -> List[int]:
        return [i for i, piece in enumerate(pieces) if piece.contains(p, budget)]

    witness = None
    for p in nonzero_members:
        owners = piece_of(p)
        if len(owners) != 1:
            witness = {"point": list(p), "pieces": owners}
            break
    report.add("partition", len(nonzero_members), witness)

    sizes = [len(piece.closure.hilbert_basis) for piece in pieces]
    witness, checked, undecided = None, 0, 0
    for i, piece in enumerate(pieces):
        generated = AffineMonoid.of(piece.closure.generators(), n)
        for p in grid:
            if not piece.closure.contains(p):
                continue
            checked += 1
            verdict = membership(generated, p, budget).verdict
            undecided += verdict is Verdict.UNKNOWN
            if verdict is Verdict.NO:
                witness = {"piece": i, "point": list(p), "basis": [list(h) for h in piece.closure.hilbert_basis]}
                break
        if witness is not None:
            break
    report.add("finitely-generated-closures", checked, witness, basis_sizes=sizes, undecided=undecided)

    whole = closure(e)
    full = [piece for piece in pieces if piece.dim == hull.dim]
    witness = None
    if not full:
        witness = {"reason": "no full-dimensional piece"}
    else:
        for p in grid:
            if full[0].closure.contains(p) != whole.contains(p):
                witness = {"point": list(p)}
                break
    report.add("full-piece-closure", len(grid), witness)

    dims_ok, absorb_ok, pure_ok = None, None, None
    dim_checks = absorb_checks = pure_checks = 0
    for i, piece in enumerate(pieces):
        if piece.dim == 0:
            continue
        inside = [p for p in nonzero_members if piece.contains(p, budget)]
        if not inside:
            continue
        outside = [p for p in members if not piece.closure.contains(p)]
        closure_points = [p for p in grid if piece.closure.contains(p)]

        for alpha, beta in _pairs(inside, outside, rng, max_pairs):
            dim_checks += 1
            target = hull.locate(add(alpha, beta))
            if dims_ok is None and (target is None or target.dim <= piece.dim):
                dims_ok = {"piece": i, "alpha": list(alpha), "beta": list(beta)}
        for alpha, gamma in _pairs(inside, closure_points, rng, max_pairs):
            absorb_checks += 1
            if absorb_ok is None and not piece.contains(add(alpha, gamma), budget):
                absorb_ok = {"piece": i, "alpha": list(alpha), "gamma": list(gamma)}
        for p in grid:
            if not any(p) or piece.contains(p, budget):
                continue
            for k in multipliers:
                pure_checks += 1
                if pure_ok is None and piece.contains(tuple(k * x for x in p), budget):
                    pure_ok = {"piece": i, "point": list(p), "multiplier": k}

    report.add("sum-leaves-piece", dim_checks, dims_ok)
    report.add("closure-absorbed", absorb_checks, absorb_ok)
    report.add("pieces-pure", pure_checks, pure_ok)
    logger.info(f"Decomposition check: {len(members)} box points, passed={report.passed}")
    return report
