# Rational Polyhedral Cones
"""
Rational polyhedral cones held in both representations at once.

A `Cone` stores its lineality space, the extreme rays of its pointed part,
the equations of its linear span and its facet normals. Both
representations come out of the incremental double description method, so
two cones describing the same set compare equal field by field.

The relatively open faces of a cone partition it; `open_faces` lists them
and `Cone.locate` finds the face whose relative interior holds a point.
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from prisma.algebra.exactlin import (
    IntMatrix,
    IntVector,
    Subspace,
    dot,
    inverse_rational,
    primitive,
    scale,
    scale_to_integers,
    sub,
    vec,
)
from prisma.core.errors import InputError, check_dim

logger = logging.getLogger(__name__)

CLOSED = "closed"
RELATIVE_INTERIOR = "relative_interior"


def _project_out(v: IntVector, space: Subspace) -> IntVector:
    """Orthogonal projection of v onto the complement of `space`, scaled to a primitive integer vector."""
    if space.dim == 0:
        return primitive(v)
    basis = space.basis
    gram = basis @ basis.transpose()
    inverse = inverse_rational(gram)
    bv = basis.apply(v)
    coeffs = [sum(inverse[i][j] * bv[j] for j in range(len(bv))) for i in range(len(bv))]
    projected = [Fraction(x) for x in v]
    for c, row in zip(coeffs, basis.rows):
        for j, x in enumerate(row):
            projected[j] -= c * x
    return scale_to_integers(projected)


def _double_description(
    equations: Iterable[Sequence[int]],
    inequalities: Iterable[Sequence[int]],
    n: int,
) -> Tuple[Subspace, Tuple[IntVector, ...]]:
    """
    Converts {x : E·x = 0, A·x >= 0} into generators.

    Returns:
        The lineality space and the canonical extreme rays of the pointed part:
        primitive, projected orthogonally off the lineality space, sorted.
    """
    constraints = [(primitive(e), True) for e in equations if any(e)]
    constraints += [(a, False) for a in sorted({primitive(a) for a in inequalities if any(a)})]

    lineality: List[IntVector] = list(IntMatrix.identity(n).rows)
    rays: List[IntVector] = []
    tight: List[FrozenSet[int]] = []
    processed: FrozenSet[int] = frozenset()

    for k, (a, is_equation) in enumerate(constraints):
        values = [dot(a, l) for l in lineality]
        j = next((i for i, v in enumerate(values) if v), None)
        if j is not None:
            # The constraint cuts the lineality space: trade one direction for a ray.
            l0, v0 = lineality[j], values[j]
            s = 1 if v0 > 0 else -1
            lineality = [
                primitive(sub(scale(v0, l), scale(v, l0)))
                for i, (l, v) in enumerate(zip(lineality, values))
                if i != j
            ]
            rays = [primitive(sub(scale(abs(v0), r), scale(s * dot(a, r), l0))) for r in rays]
            if not is_equation:
                tight = [z | {k} for z in tight]
                rays.append(scale(s, l0))
                tight.append(processed)
        else:
            values = [dot(a, r) for r in rays]
            positive = [i for i, v in enumerate(values) if v > 0]
            negative = [i for i, v in enumerate(values) if v < 0]
            new_rays: List[IntVector] = []
            new_tight: List[FrozenSet[int]] = []
            for i, v in enumerate(values):
                if v == 0:
                    new_rays.append(rays[i])
                    new_tight.append(tight[i] if is_equation else tight[i] | {k})
                elif v > 0 and not is_equation:
                    new_rays.append(rays[i])
                    new_tight.append(tight[i])
            for p in positive:
                for q in negative:
                    common = tight[p] & tight[q]
                    if any(common <= tight[i] for i in range(len(rays)) if i != p and i != q):
                        continue
                    new_rays.append(primitive(sub(scale(values[p], rays[q]), scale(values[q], rays[p]))))
                    new_tight.append(common if is_equation else common | {k})
            rays, tight = new_rays, new_tight
        if not is_equation:
            processed = processed | {k}
        logger.debug(f"Double description step {k}: {len(lineality)} lineality, {len(rays)} rays")

    space = Subspace.span_of(lineality, n)
    return space, tuple(sorted({_project_out(r, space) for r in rays}))


@dataclass(frozen=True)
class Cone:
    """
    A rational polyhedral cone in R^n.

    Attributes:
        ambient_dim: n.
        rays: Extreme rays of the pointed part, canonical and sorted.
        lineality: The largest linear subspace contained in the cone.
        equations: Canonical integer normals of the cone's linear span.
        inequalities: Facet normals, projected into the span, sorted.
    """

    ambient_dim: int
    rays: Tuple[IntVector, ...]
    lineality: Subspace
    equations: IntMatrix
    inequalities: Tuple[IntVector, ...]

    # --- Construction ---

    @classmethod
    def from_generators(
        cls,
        rays: Iterable[Sequence[int]],
        ambient_dim: int,
        lineality: Iterable[Sequence[int]] = (),
    ) -> "Cone":
        """Builds cone(rays) + span(lineality) and computes its facets."""
        rays = [vec(r) for r in rays]
        lineality = [vec(l) for l in lineality]
        for r in rays + lineality:
            check_dim(ambient_dim, len(r), "cone generator")
        normals, facets = _double_description(lineality, rays, ambient_dim)
        lin, extreme = _double_description(normals.basis.rows, facets, ambient_dim)
        return cls(ambient_dim, extreme, lin, normals.basis, facets)

    @classmethod
    def from_constraints(
        cls,
        equations: Iterable[Sequence[int]],
        inequalities: Iterable[Sequence[int]],
        ambient_dim: int,
    ) -> "Cone":
        """Builds {x : E·x = 0, A·x >= 0} and computes its generators."""
        equations = [vec(e) for e in equations]
        inequalities = [vec(a) for a in inequalities]
        for row in equations + inequalities:
            check_dim(ambient_dim, len(row), "cone constraint")
        lin, extreme = _double_description(equations, inequalities, ambient_dim)
        normals, facets = _double_description(lin.basis.rows, extreme, ambient_dim)
        return cls(ambient_dim, extreme, lin, normals.basis, facets)

    @classmethod
    def zero(cls, n: int) -> "Cone":
        return cls.from_generators((), n)

    @classmethod
    def full(cls, n: int) -> "Cone":
        return cls.from_constraints((), (), n)

    @classmethod
    def orthant(cls, n: int) -> "Cone":
        return cls.from_generators(IntMatrix.identity(n).rows, n)

    # --- Queries ---

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.equations.nrows

    @property
    def is_pointed(self) -> bool:
        return self.lineality.dim == 0

    @cached_property
    def span(self) -> Subspace:
        return Subspace.from_equations(self.equations.rows, self.ambient_dim)

    def generators(self) -> List[IntVector]:
        """Monoid-style generators: the rays and both signs of each lineality basis vector."""
        gens = list(self.rays)
        for l in self.lineality.basis.rows:
            gens.extend([l, scale(-1, l)])
        return gens

    def contains(self, p: Sequence[int], mode: str = CLOSED) -> bool:
        check_dim(self.ambient_dim, len(p), "point")
        if any(dot(e, p) for e in self.equations.rows):
            return False
        if mode == CLOSED:
            return all(dot(a, p) >= 0 for a in self.inequalities)
        if mode == RELATIVE_INTERIOR:
            return all(dot(a, p) > 0 for a in self.inequalities)
        raise InputError(f"unknown membership mode {mode!r}")

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators())

    def grading(self) -> Optional[IntVector]:
        """
        An integral linear form that is positive on every nonzero point of a pointed cone.

        Returns:
            The sum of the facet normals, or None when the cone has a lineality space.
        """
        if not self.is_pointed:
            return None
        total = [0] * self.ambient_dim
        for a in self.inequalities:
            total = [x + y for x, y in zip(total, a)]
        return tuple(total)

    def interior_point(self) -> IntVector:
        """The sum of the extreme rays, a point in the relative interior."""
        total = (0,) * self.ambient_dim
        for r in self.rays:
            total = tuple(x + y for x, y in zip(total, r))
        return total

    # --- Faces ---

    @cached_property
    def _face_table(self) -> Dict[FrozenSet[int], "OpenFace"]:
        table: Dict[FrozenSet[int], OpenFace] = {}
        queue = deque([frozenset(range(len(self.rays)))])
        while queue:
            ray_set = queue.popleft()
            tight = frozenset(
                i for i, a in enumerate(self.inequalities)
                if all(dot(a, self.rays[g]) == 0 for g in ray_set)
            )
            if tight in table:
                continue
            gens = [self.rays[g] for g in sorted(ray_set)]
            span = Subspace.span_of(gens + list(self.lineality.basis.rows), self.ambient_dim)
            table[tight] = OpenFace(self, tight, tuple(sorted(ray_set)), span)
            for i in range(len(self.inequalities)):
                if i not in tight:
                    queue.append(frozenset(g for g in ray_set if dot(self.inequalities[i], self.rays[g]) == 0))
        logger.debug(f"Enumerated {len(table)} open faces of a {self.dim}-dimensional cone")
        return table

    def open_faces(self) -> List["OpenFace"]:
        return sorted(self._face_table.values(), key=lambda f: (f.dim, f.span.basis.rows))

    def locate(self, p: Sequence[int]) -> Optional["OpenFace"]:
        """Returns the open face whose relative interior contains p, or None if p is outside the cone."""
        if not self.contains(p):
            return None
        tight = frozenset(i for i, a in enumerate(self.inequalities) if dot(a, p) == 0)
        return self._face_table[tight]

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "rays": [list(r) for r in self.rays],
            "lineality": self.lineality.to_list(),
            "equations": self.equations.to_list(),
            "inequalities": [list(a) for a in self.inequalities],
        }


@dataclass(frozen=True, eq=False)
class OpenFace:
    """A relatively open face of `parent`, identified by the facets tight on it."""

    parent: Cone
    tight: FrozenSet[int]
    ray_indices: Tuple[int, ...]
    span: Subspace

    @property
    def dim(self) -> int:
        return self.span.dim

    @property
    def rays(self) -> List[IntVector]:
        return [self.parent.rays[i] for i in self.ray_indices]

    @cached_property
    def closed_face(self) -> Cone:
        return Cone.from_generators(self.rays, self.parent.ambient_dim, self.parent.lineality.basis.rows)

    def contains(self, p: Sequence[int]) -> bool:
        """Relative-interior membership of p in this face."""
        if not self.parent.contains(p):
            return False
        return all((dot(a, p) == 0) == (i in self.tight) for i, a in enumerate(self.parent.inequalities))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "span": self.span.to_list(), "rays": [list(r) for r in self.rays]}


# --- Module-level operations ---

def dual_description(
    ambient_dim: int,
    *,
    rays: Optional[Iterable[Sequence[int]]] = None,
    lineality: Iterable[Sequence[int]] = (),
    equations: Iterable[Sequence[int]] = (),
    inequalities: Optional[Iterable[Sequence[int]]] = None,
) -> Cone:
    """Completes a V-description (rays [+ lineality]) or an H-description (inequalities [+ equations])."""
    if (rays is None) == (inequalities is None):
        raise InputError("give exactly one of a ray description or an inequality description")
    if rays is not None:
        return Cone.from_generators(rays, ambient_dim, lineality)
    return Cone.from_constraints(equations, inequalities, ambient_dim)


def membership(c: Cone, p: Sequence[int], mode: str = CLOSED) -> bool:
    return c.contains(p, mode)


def intersect(a: Cone, b: Cone) -> Cone:
    check_dim(a.ambient_dim, b.ambient_dim, "cone")
    return Cone.from_constraints(
        a.equations.rows + b.equations.rows,
        a.inequalities + b.inequalities,
        a.ambient_dim,
    )


def minkowski_sum(a: Cone, b: Cone) -> Cone:
    check_dim(a.ambient_dim, b.ambient_dim, "cone")
    return Cone.from_generators(
        a.rays + b.rays,
        a.ambient_dim,
        a.lineality.basis.rows + b.lineality.basis.rows,
    )


def combine(op: str, a: Cone, b: Cone) -> Cone:
    if op == "intersect":
        return intersect(a, b)
    if op == "minkowski_sum":
        return minkowski_sum(a, b)
    raise InputError(f"unknown cone operation {op!r}")


def open_faces(c: Cone) -> List[OpenFace]:
    return c.open_faces()
