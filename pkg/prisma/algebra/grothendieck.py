# Group Completion
"""
Group completion of finitely presented commutative monoids.

A presentation ⟨g_1..g_g | u = v, ...⟩ completes to the cokernel of the
relation matrix with rows u - v. The Smith form U·R·V = D gives the invariant
factors, and x ↦ x·V carries exponent vectors into coordinates where the
group is ⊕ Z/d_i ⊕ Z^r.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

from prisma.algebra.exactlin import IntMatrix, IntVector, smith_normal_form, sub, vec
from prisma.core.errors import InputError, check_dim
from prisma.core.schemas import PresentationDoc

logger = logging.getLogger(__name__)

Relation = Tuple[IntVector, IntVector]


@dataclass(frozen=True)
class MonoidPresentation:
    """Generators 0..g-1 and relations (u, v) meaning Σ u_i·g_i = Σ v_i·g_i."""

    generator_count: int
    relations: Tuple[Relation, ...] = ()

    def __post_init__(self):
        if self.generator_count < 0:
            raise InputError("generator count must be nonnegative")
        for i, (u, v) in enumerate(self.relations):
            check_dim(self.generator_count, len(u), f"relation {i} left side")
            check_dim(self.generator_count, len(v), f"relation {i} right side")
            if any(x < 0 for x in u + v):
                raise InputError(f"relation {i} has a negative exponent", path=f"$.relations[{i}]")

    @classmethod
    def of(cls, generator_count: int, relations: Sequence[Tuple[Sequence[int], Sequence[int]]] = ()) -> "MonoidPresentation":
        return cls(generator_count, tuple((vec(u), vec(v)) for u, v in relations))

    @classmethod
    def from_doc(cls, doc: PresentationDoc) -> "MonoidPresentation":
        return cls.of(doc.generators, doc.relations)

    @property
    def relation_matrix(self) -> IntMatrix:
        return IntMatrix.from_rows([sub(u, v) for u, v in self.relations], self.generator_count)

    def to_json(self) -> dict:
        return {"generators": self.generator_count, "relations": [[list(u), list(v)] for u, v in self.relations]}


@dataclass(frozen=True)
class CompletionGroup:
    """
    ⊕ Z/d_i ⊕ Z^free_rank together with the coordinate change of the generators.

    Attributes:
        generator_count: g.
        diagonal: Nonzero Smith invariants d_1 | d_2 | ..., ones included.
        free_rank: g minus the rank of the relation matrix.
        transform: V with y = x·V.
    """

    generator_count: int
    diagonal: Tuple[int, ...]
    free_rank: int
    transform: IntMatrix

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.diagonal if d > 1)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def element(self, u: Sequence[int]) -> IntVector:
        """Normal form of the class of u: torsion coordinates reduced mod d_i, then the free coordinates."""
        check_dim(self.generator_count, len(u), "exponent vector")
        y = [sum(u[i] * self.transform.rows[i][j] for i in range(self.generator_count)) for j in range(self.generator_count)]
        k = len(self.diagonal)
        torsion = [y[i] % d for i, d in enumerate(self.diagonal) if d > 1]
        return tuple(torsion + y[k:])

    @cached_property
    def class_map(self) -> List[IntVector]:
        """The class of each generator."""
        return [self.element(tuple(int(i == j) for j in range(self.generator_count))) for i in range(self.generator_count)]

    def to_dict(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "trivial": self.is_trivial,
            "class_map": [list(c) for c in self.class_map],
        }


def group_completion(p: MonoidPresentation) -> CompletionGroup:
    r = p.relation_matrix
    d, _, v = smith_normal_form(r)
    diagonal = tuple(d.rows[i][i] for i in range(min(d.nrows, d.ncols)) if d.rows[i][i])
    group = CompletionGroup(p.generator_count, diagonal, p.generator_count - len(diagonal), v)
    logger.debug(f"Completion of {p.generator_count} generators / {len(p.relations)} relations: "
                 f"free rank {group.free_rank}, torsion {list(group.torsion)}")
    return group


def class_is_zero(p: MonoidPresentation, u: Sequence[int]) -> bool:
    """Whether [u] = 0 in the completion, i.e. z = u + z for some z in the monoid."""
    return not any(group_completion(p).element(u))


def is_trivial(p: MonoidPresentation) -> bool:
    return group_completion(p).is_trivial


def with_idempotence(p: MonoidPresentation) -> MonoidPresentation:
    """Adds g_i = g_i + g_i for every generator."""
    g = p.generator_count
    extra = tuple(
        (tuple(int(j == i) for j in range(g)), tuple(2 * int(j == i) for j in range(g)))
        for i in range(g)
    )
    return MonoidPresentation(g, p.relations + extra)


def permuted(p: MonoidPresentation, perm: Sequence[int]) -> MonoidPresentation:
    """Renames generator i to perm[i] and reverses the relation order."""
    g = p.generator_count
    if sorted(perm) != list(range(g)):
        raise InputError(f"{list(perm)} is not a permutation of {g} generators")

    def move(u: IntVector) -> IntVector:
        out = [0] * g
        for i, x in enumerate(u):
            out[perm[i]] = x
        return tuple(out)

    return MonoidPresentation(g, tuple((move(u), move(v)) for u, v in reversed(p.relations)))
