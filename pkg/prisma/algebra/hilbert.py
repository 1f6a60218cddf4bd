# Hilbert Bases and Affine Monoids
"""
Hilbert bases of rational cones, saturation of finitely generated monoids
and monoid membership.

The Hilbert basis of a cone is computed in four stages:
1. Split off the lineality space with a unimodular change of coordinates.
2. Restrict the pointed quotient to the lattice of its linear span.
3. Triangulate it (pulling triangulation, first ray as apex) and list the
   lattice points of each half-open fundamental parallelepiped.
4. Keep the candidates that are not a sum of two nonzero cone points.

The work per simplex is bounded by its determinant.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import floor
from typing import Iterable, List, Optional, Sequence, Tuple

from prisma.algebra.cone import Cone, intersect
from prisma.algebra.exactlin import (
    IntMatrix,
    IntVector,
    Subspace,
    dot,
    hermite_normal_form,
    inverse_rational,
    lattice_coordinates,
    row_hnf,
    smith_normal_form,
    sub,
    vec,
    zero_vector,
)
from prisma.core.errors import check_dim

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SaturatedMonoid:
    """
    The lattice points of a rational cone, Z^n ∩ cone.

    Attributes:
        ambient_dim: n.
        lineality_basis: Basis of the lineality lattice; the monoid contains ± each row.
        hilbert_basis: The minimal generators of the pointed part, reduced modulo the lineality.
        cone: The cone whose lattice points this monoid is.
    """

    ambient_dim: int
    lineality_basis: IntMatrix
    hilbert_basis: Tuple[IntVector, ...]
    cone: Cone

    def contains(self, p: Sequence[int]) -> bool:
        return self.cone.contains(p)

    def generators(self) -> List[IntVector]:
        gens = list(self.hilbert_basis)
        for row in self.lineality_basis.rows:
            gens.extend([row, tuple(-x for x in row)])
        return gens

    def intersect(self, other: "SaturatedMonoid") -> "SaturatedMonoid":
        """Saturated monoids are closed under intersection: the Hilbert basis of the intersected cone."""
        return hilbert_basis(intersect(self.cone, other.cone))

    @property
    def is_zero(self) -> bool:
        return not self.hilbert_basis and self.lineality_basis.nrows == 0

    def to_dict(self) -> dict:
        return {
            "lineality": self.lineality_basis.to_list(),
            "hilbert_basis": [list(h) for h in self.hilbert_basis],
        }


@dataclass(frozen=True)
class AffineMonoid:
    """A finitely generated submonoid of Z^n; generators are deduplicated, nonzero and sorted."""

    ambient_dim: int
    gens: Tuple[IntVector, ...]

    @classmethod
    def of(cls, gens: Iterable[Sequence[int]], ambient_dim: int) -> "AffineMonoid":
        canonical = sorted({vec(g) for g in gens if any(g)})
        for g in canonical:
            check_dim(ambient_dim, len(g), "monoid generator")
        return cls(ambient_dim, tuple(canonical))

    @cached_property
    def cone(self) -> Cone:
        return Cone.from_generators(self.gens, self.ambient_dim)

    @cached_property
    def saturation(self) -> SaturatedMonoid:
        return hilbert_basis(self.cone)

    @cached_property
    def group_lattice(self) -> IntMatrix:
        """Canonical basis of the group generated by the monoid."""
        return row_hnf(self.gens, self.ambient_dim)

    def to_dict(self) -> dict:
        return {"type": "fingen", "gens": [list(g) for g in self.gens]}


# --- Hilbert basis ---

def _unimodular_inverse(m: IntMatrix) -> IntMatrix:
    inverse = inverse_rational(m)
    return IntMatrix.from_rows(([int(x) for x in row] for row in inverse), m.ncols)


def _reduce_modulo(v: IntVector, lattice: IntMatrix) -> IntVector:
    """Canonical representative of v modulo a lattice in Hermite form."""
    for row in lattice.rows:
        pivot = next(j for j, x in enumerate(row) if x)
        q = v[pivot] // row[pivot]
        if q:
            v = tuple(x - q * y for x, y in zip(v, row))
    return v


def _pulling_triangulation(rays: Sequence[IntVector], d: int) -> List[Tuple[IntVector, ...]]:
    """Simplicial cones covering the pointed cone spanned by `rays`, apex = first ray at every level."""
    if not rays:
        return []
    cone = Cone.from_generators(rays, d)
    rays = list(cone.rays)
    if len(rays) == cone.dim:
        return [tuple(rays)]
    apex = rays[0]
    simplices = []
    for a in cone.inequalities:
        if dot(a, apex) == 0:
            continue
        facet = [r for r in rays if dot(a, r) == 0]
        for sigma in _pulling_triangulation(facet, d):
            simplices.append((apex,) + sigma)
    return simplices


def _parallelepiped_points(generators: Sequence[IntVector]) -> List[IntVector]:
    """Nonzero lattice points of the half-open parallelepiped spanned by a basis of Q^d."""
    d = len(generators)
    g = IntMatrix.from_rows(generators, d)
    h, _ = hermite_normal_form(g)
    radices = [h.rows[i][i] for i in range(d)]
    inverse = inverse_rational(g)
    points = []
    for residue in product(*(range(r) for r in radices)):
        if not any(residue):
            continue
        lam = [sum(Fraction(residue[i]) * inverse[i][j] for i in range(d)) for j in range(d)]
        frac = [x - floor(x) for x in lam]
        point = [sum(frac[i] * generators[i][j] for i in range(d)) for j in range(d)]
        points.append(tuple(int(x) for x in point))
    return points


def _pointed_hilbert_basis(rays: Sequence[IntVector], d: int) -> List[IntVector]:
    """Hilbert basis of a full-dimensional pointed cone in Z^d."""
    if d == 0 or not rays:
        return []
    cone = Cone.from_generators(rays, d)
    grading = cone.grading()
    candidates = set(cone.rays)
    simplices = _pulling_triangulation(cone.rays, d)
    for sigma in simplices:
        candidates.update(_parallelepiped_points(sigma))
    ordered = sorted(candidates, key=lambda c: (dot(grading, c), c))
    basis = []
    for h in ordered:
        degree = dot(grading, h)
        reducible = any(
            dot(grading, c) < degree and cone.contains(sub(h, c))
            for c in ordered
        )
        if not reducible:
            basis.append(h)
    logger.debug(f"Pointed Hilbert basis in dim {d}: {len(simplices)} simplices, "
                 f"{len(candidates)} candidates, {len(basis)} irreducible")
    return basis


def hilbert_basis(c: Cone) -> SaturatedMonoid:
    """
    Computes the minimal generating set of the monoid Z^n ∩ c.

    Args:
        c: A rational polyhedral cone.

    Returns:
        The saturated monoid with its lineality lattice basis (Hermite form)
        and the sorted Hilbert basis of the pointed part.
    """
    n = c.ambient_dim
    lineality = c.lineality.basis
    k = lineality.nrows

    # In coordinates y = x·V the lineality lattice is Z^k × 0.
    if k:
        _, _, v = smith_normal_form(lineality)
    else:
        v = IntMatrix.identity(n)
    v_inverse = _unimodular_inverse(v)

    def project(x: Sequence[int]) -> IntVector:
        return tuple(dot(x, v.column(j)) for j in range(k, n))

    quotient_rays = [project(r) for r in c.rays]
    m = n - k
    span = Subspace.span_of(quotient_rays, m)
    span_basis = span.basis
    coordinates = [lattice_coordinates(span_basis, r) for r in quotient_rays]

    basis = []
    for z in _pointed_hilbert_basis(coordinates, span.dim):
        x = [0] * m
        for coeff, row in zip(z, span_basis.rows):
            for j, entry in enumerate(row):
                x[j] += coeff * entry
        lifted = tuple(dot((0,) * k + tuple(x), v_inverse.column(j)) for j in range(n))
        basis.append(_reduce_modulo(lifted, lineality))

    logger.debug(f"Hilbert basis of a cone in Z^{n}: lineality {k}, {len(basis)} generators")
    return SaturatedMonoid(n, lineality, tuple(sorted(set(basis))), c)


def saturate_monoid(m: AffineMonoid) -> SaturatedMonoid:
    """The saturation of a finitely generated monoid is the lattice-point set of its cone."""
    return m.saturation


# --- Membership ---

class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class MembershipResult:
    verdict: Verdict
    certificate: Optional[IntVector] = None

    @property
    def is_member(self) -> bool:
        return self.verdict is Verdict.YES

    def to_dict(self) -> dict:
        payload = {"verdict": self.verdict.value}
        if self.certificate is not None:
            payload["certificate"] = list(self.certificate)
        return payload


def _graded_search(m: AffineMonoid, p: IntVector, budget: int) -> MembershipResult:
    """Depth-first search for a nondecreasing generator sequence summing to p; exhaustive on pointed cones."""
    gens = m.gens
    dead = set()
    stack: List[List] = [[p, 0, 0]]  # target, lowest generator allowed, next generator to try
    chosen: List[int] = []
    states = 0
    while stack:
        frame = stack[-1]
        target, low, i = frame
        if not any(target):
            coefficients = [0] * len(gens)
            for index in chosen:
                coefficients[index] += 1
            return MembershipResult(Verdict.YES, tuple(coefficients))
        if i >= len(gens):
            dead.add((target, low))
            stack.pop()
            if chosen:
                chosen.pop()
            continue
        frame[2] = i + 1
        rest = sub(target, gens[i])
        if (rest, i) in dead or not m.cone.contains(rest):
            continue
        states += 1
        if states > budget:
            logger.warning(f"Membership search exceeded its budget of {budget} states")
            return MembershipResult(Verdict.UNKNOWN)
        stack.append([rest, i, i])
        chosen.append(i)
    return MembershipResult(Verdict.NO)


def _breadth_first_search(m: AffineMonoid, p: IntVector, budget: int) -> MembershipResult:
    """Bounded search from 0 for monoids whose cone contains a line; can only answer Yes or Unknown."""
    start = zero_vector(m.ambient_dim)
    parents = {start: None}
    frontier = [start]
    while frontier and len(parents) <= budget:
        next_frontier = []
        for point in frontier:
            for index, g in enumerate(m.gens):
                nxt = tuple(x + y for x, y in zip(point, g))
                if nxt in parents:
                    continue
                parents[nxt] = (point, index)
                if nxt == p:
                    coefficients = [0] * len(m.gens)
                    cursor = nxt
                    while parents[cursor] is not None:
                        cursor, used = parents[cursor]
                        coefficients[used] += 1
                    return MembershipResult(Verdict.YES, tuple(coefficients))
                next_frontier.append(nxt)
        frontier = next_frontier
    logger.warning(f"Membership search in a non-pointed monoid stopped after {len(parents)} states")
    return MembershipResult(Verdict.UNKNOWN)


def membership(m: AffineMonoid, p: Sequence[int], budget: int = 200_000) -> MembershipResult:
    """
    Decides whether p is a nonnegative integer combination of the generators.

    Args:
        m: The monoid.
        p: The candidate point.
        budget: Search states explored before answering Unknown.

    Returns:
        Yes with the coefficient vector, No (exact), or Unknown.

    Raises:
        DimensionMismatch: If p does not live in Z^n.
    """
    check_dim(m.ambient_dim, len(p), "point")
    p = vec(p)
    if not any(p):
        return MembershipResult(Verdict.YES, (0,) * len(m.gens))
    if not m.cone.contains(p):
        return MembershipResult(Verdict.NO)
    if lattice_coordinates(m.group_lattice, p) is None:
        return MembershipResult(Verdict.NO)
    if m.cone.is_pointed:
        return _graded_search(m, p, budget)
    return _breadth_first_search(m, p, budget)


def is_saturated(m: AffineMonoid, budget: int = 200_000) -> bool:
    """
    True when the monoid provably equals its saturation.

    Every generator of the saturation must be a member; an Unknown verdict
    counts as not proved.
    """
    for h in m.saturation.generators():
        result = membership(m, h, budget)
        if not result.is_member:
            logger.debug(f"Saturation generator {h} is not certified in the monoid: {result.verdict.value}")
            return False
    return True
