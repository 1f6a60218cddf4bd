# Rooted-Tree Lattice-Ordered Groups
"""
Lattice-ordered groups built from rooted trees, used as additively
idempotent parasemifields.

Each vertex w of a rooted tree carries a copy of Z; an element is the
vector of its vertex coordinates. Notation is additive throughout: the
parasemifield product is vector addition, its sum is the join, and 1_S is
the zero vector. A finite product of trees is a `ParasemifieldSpec`; the
empty product is the trivial parasemifield.

Order rule: g >= 0 on the subtree of v iff g_v > 0, or g_v = 0 and g >= 0 on
every child subtree. `leq_oracle` checks the same order against every
chain extension of the tree.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple, Union

from prisma.algebra.exactlin import IntMatrix, IntVector, rank, vec
from prisma.algebra.monoidexpr import (
    DEFAULT_MAX_VERTICES,
    Intersect,
    Lex,
    MonoidExpr,
    Orthant,
    Preimage,
    Product,
    TreeCone,
    linear_extensions,
    permutation_matrix,
    tree_children,
    validate_parents,
)
from prisma.core.errors import DimensionMismatch, InputError, NoInversePair, SpecMismatch
from prisma.core.schemas import GeneratorTupleDoc, TreeSpecDoc

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootedTree:
    """A rooted tree in parent-list form; vertex 0 is the root and parents precede children."""

    parents: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parents", validate_parents(self.parents))

    @classmethod
    def chain(cls, m: int) -> "RootedTree":
        return cls(tuple(i - 1 for i in range(m)))

    @classmethod
    def star(cls, leaves: int) -> "RootedTree":
        return cls((-1,) + (0,) * leaves)

    @property
    def vertex_count(self) -> int:
        return len(self.parents)

    @cached_property
    def children(self) -> List[List[int]]:
        return tree_children(self.parents)

    @cached_property
    def subtrees(self) -> List[Tuple[int, ...]]:
        """subtrees[v] lists v and all of its descendants."""
        result: List[List[int]] = [[v] for v in range(self.vertex_count)]
        for v in reversed(range(1, self.vertex_count)):
            result[self.parents[v]].extend(result[v])
        return [tuple(sorted(s)) for s in result]

    def to_json(self) -> dict:
        return {"parents": list(self.parents)}


@dataclass(frozen=True)
class ParasemifieldSpec:
    """A finite product of rooted-tree groups; vertex coordinates are concatenated factor by factor."""

    factors: Tuple[RootedTree, ...] = ()

    @classmethod
    def of(cls, *parent_lists: Sequence[int]) -> "ParasemifieldSpec":
        return cls(tuple(RootedTree(tuple(p)) for p in parent_lists))

    @classmethod
    def from_doc(cls, doc: TreeSpecDoc) -> "ParasemifieldSpec":
        return cls(tuple(RootedTree(tuple(f.parents)) for f in doc.factors))

    @property
    def vertex_count(self) -> int:
        return sum(t.vertex_count for t in self.factors)

    @cached_property
    def offsets(self) -> List[int]:
        offsets, total = [], 0
        for t in self.factors:
            offsets.append(total)
            total += t.vertex_count
        return offsets

    def split(self, coords: Sequence[int]) -> List[Tuple[int, ...]]:
        """The per-factor slices of a coordinate vector."""
        return [tuple(coords[o:o + t.vertex_count]) for o, t in zip(self.offsets, self.factors)]

    def to_json(self) -> dict:
        return {"factors": [t.to_json() for t in self.factors]}


@dataclass(frozen=True)
class TreeElement:
    spec: ParasemifieldSpec
    coords: IntVector

    def __post_init__(self):
        if len(self.coords) != self.spec.vertex_count:
            raise DimensionMismatch(
                f"element has {len(self.coords)} coordinates, the spec has {self.spec.vertex_count} vertices"
            )

    def _same_spec(self, other: "TreeElement") -> None:
        if other.spec != self.spec:
            raise SpecMismatch("tree elements belong to different parasemifields")

    def __add__(self, other: "TreeElement") -> "TreeElement":
        self._same_spec(other)
        return TreeElement(self.spec, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: "TreeElement") -> "TreeElement":
        self._same_spec(other)
        return TreeElement(self.spec, tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> "TreeElement":
        return TreeElement(self.spec, tuple(-x for x in self.coords))

    def times(self, k: int) -> "TreeElement":
        return TreeElement(self.spec, tuple(k * x for x in self.coords))

    def to_json(self) -> dict:
        return {"coords": list(self.coords)}


Elementish = Union[TreeElement, Sequence[int]]


def element(spec: ParasemifieldSpec, coords: Iterable[int]) -> TreeElement:
    return TreeElement(spec, vec(coords))


def identity(spec: ParasemifieldSpec) -> TreeElement:
    return TreeElement(spec, (0,) * spec.vertex_count)


def _coerce(spec: ParasemifieldSpec, x: Elementish) -> TreeElement:
    if isinstance(x, TreeElement):
        if x.spec != spec:
            raise SpecMismatch("element does not belong to the given parasemifield")
        return x
    return element(spec, x)


# --- Order ---

def _nonnegative(tree: RootedTree, g: Sequence[int], v: int = 0) -> bool:
    if g[v]:
        return g[v] > 0
    return all(_nonnegative(tree, g, c) for c in tree.children[v])


def leq(spec: ParasemifieldSpec, a: Elementish, b: Elementish) -> bool:
    """a <= b in the product order; each factor uses the recursive tree rule."""
    g = _coerce(spec, b) - _coerce(spec, a)
    return all(_nonnegative(t, part) for t, part in zip(spec.factors, spec.split(g.coords)))


def leq_oracle(spec: ParasemifieldSpec, a: Elementish, b: Elementish, cap: int = DEFAULT_MAX_VERTICES) -> bool:
    """
    a <= b iff b - a is lexicographically nonnegative under every chain extension of every factor.

    Raises:
        TooLarge: If a factor has more than `cap` vertices.
    """
    g = _coerce(spec, b) - _coerce(spec, a)
    for tree, part in zip(spec.factors, spec.split(g.coords)):
        for order in linear_extensions(tree.parents, cap):
            leading = next((part[v] for v in order if part[v]), 0)
            if leading < 0:
                return False
    return True


def _join_subtree(tree: RootedTree, a: Sequence[int], b: Sequence[int], v: int, out: List[int]) -> None:
    if a[v] != b[v]:
        winner = a if a[v] > b[v] else b
        for w in tree.subtrees[v]:
            out[w] = winner[w]
        return
    out[v] = a[v]
    for c in tree.children[v]:
        _join_subtree(tree, a, b, c, out)


def join(spec: ParasemifieldSpec, a: Elementish, b: Elementish) -> TreeElement:
    a, b = _coerce(spec, a), _coerce(spec, b)
    coords: List[int] = []
    for tree, pa, pb in zip(spec.factors, spec.split(a.coords), spec.split(b.coords)):
        out = [0] * tree.vertex_count
        _join_subtree(tree, pa, pb, 0, out)
        coords.extend(out)
    return TreeElement(spec, tuple(coords))


def meet(spec: ParasemifieldSpec, a: Elementish, b: Elementish) -> TreeElement:
    return -join(spec, -_coerce(spec, a), -_coerce(spec, b))


def join_meet(spec: ParasemifieldSpec, a: Elementish, b: Elementish) -> Tuple[TreeElement, TreeElement]:
    return join(spec, a, b), meet(spec, a, b)


def q_membership(spec: ParasemifieldSpec, a: Elementish) -> bool:
    """Membership in Q_S, which for idempotent S is {a <= 1_S}."""
    return leq(spec, a, identity(spec))


def chain_extensions(tree: RootedTree, cap: int = DEFAULT_MAX_VERTICES) -> List[Tuple[int, ...]]:
    return linear_extensions(tree.parents, cap)


# --- Generator tuples ---

@dataclass(frozen=True)
class GeneratorTuple:
    """
    A generating tuple X written over a multiplicative basis Y.

    Attributes:
        spec: The parasemifield.
        basis: m x k matrix; column i is y_i in vertex coordinates.
        exponents: k x n matrix A with x_j = Σ_i a_ij·y_i.
    """

    spec: ParasemifieldSpec
    basis: IntMatrix
    exponents: IntMatrix

    def __post_init__(self):
        if self.basis.nrows != self.spec.vertex_count:
            raise DimensionMismatch(f"basis has {self.basis.nrows} rows, the spec has {self.spec.vertex_count} vertices")
        if self.basis.ncols != self.exponents.nrows:
            raise DimensionMismatch(f"{self.basis.ncols} basis elements but {self.exponents.nrows} exponent rows")

    @classmethod
    def from_vertex_matrix(cls, spec: ParasemifieldSpec, matrix: IntMatrix) -> "GeneratorTuple":
        return cls(spec, IntMatrix.identity(spec.vertex_count), matrix)

    @classmethod
    def from_doc(cls, doc: GeneratorTupleDoc) -> "GeneratorTuple":
        spec = ParasemifieldSpec.from_doc(doc.spec)
        if doc.matrix is None:
            return canonical_generators(spec)
        cols = doc.cols if doc.cols is not None else (len(doc.matrix[0]) if doc.matrix else None)
        if cols is None:
            raise InputError("a tuple over the trivial parasemifield needs an explicit cols")
        return cls.from_vertex_matrix(spec, IntMatrix.from_rows(doc.matrix, cols))

    @property
    def length(self) -> int:
        return self.exponents.ncols

    @cached_property
    def matrix(self) -> IntMatrix:
        """The generators in vertex coordinates, one column each."""
        return self.basis @ self.exponents

    def generator(self, j: int) -> TreeElement:
        return TreeElement(self.spec, self.matrix.column(j))

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "basis": self.basis.to_list(),
            "exponents": self.exponents.to_list(),
            "matrix": self.matrix.to_list(),
        }


def canonical_generators(spec: ParasemifieldSpec) -> GeneratorTuple:
    """(e_w, -e_w) for every vertex; the trivial parasemifield gets (1_S, 1_S)."""
    m = spec.vertex_count
    if m == 0:
        columns: List[IntVector] = [(), ()]
    else:
        columns = []
        for w in range(m):
            unit = tuple(int(i == w) for i in range(m))
            columns.extend([unit, tuple(-x for x in unit)])
    basis = IntMatrix.from_columns(columns, m)
    return GeneratorTuple.from_vertex_matrix(spec, basis)


def negative_cone(spec: ParasemifieldSpec) -> MonoidExpr:
    """{g : g <= 0} as a product of tree cones."""
    return Product(tuple(TreeCone(t.parents) for t in spec.factors))


def chain_extension_cone(spec: ParasemifieldSpec, cap: int = DEFAULT_MAX_VERTICES) -> MonoidExpr:
    """The negative cone written as an intersection of lex cones over all chain extensions."""
    return Product(tuple(
        Intersect(tuple(
            Preimage(permutation_matrix(order), Lex(t.vertex_count))
            for order in chain_extensions(t, cap)
        ))
        for t in spec.factors
    ))


def associated_monoid(x: GeneratorTuple) -> MonoidExpr:
    """
    C_X(S) = {α in N_0^n : Σ α_j·x_j <= 1_S}.

    Built as Orthant(n) ∩ Preimage(vertex matrix, negative cone).
    """
    return Intersect((Orthant(x.length), Preimage(x.matrix, negative_cone(x.spec))))


def chain_extension_monoid(x: GeneratorTuple, cap: int = DEFAULT_MAX_VERTICES) -> MonoidExpr:
    """C_X(S) with the negative cone replaced by its chain-extension form."""
    return Intersect((Orthant(x.length), Preimage(x.matrix, chain_extension_cone(x.spec, cap))))


def _over_canonical(x: GeneratorTuple) -> GeneratorTuple:
    """Re-expresses a vertex-basis tuple over the canonical tuple with nonnegative exponents."""
    m = x.spec.vertex_count
    canonical = canonical_generators(x.spec)
    if m == 0:
        exponents = IntMatrix.zeros(2, x.length)
    else:
        rows = []
        for w in range(m):
            row = x.matrix.rows[w]
            rows.append(tuple(max(v, 0) for v in row))
            rows.append(tuple(max(-v, 0) for v in row))
        exponents = IntMatrix.from_rows(rows, x.length)
    return GeneratorTuple(x.spec, canonical.matrix, exponents)


def embedify(x: GeneratorTuple) -> GeneratorTuple:
    """
    Rewrites the tuple so that its exponent map is injective.

    While some column j0 of the exponent matrix depends on the others, y_1 is
    appended to the basis again, a_{2,j0} grows by one and the new row is the
    unit vector at j0. Since y_1 + y_2 = 0 the generators themselves do not
    change.

    Raises:
        NoInversePair: If basis elements 1 and 2 are not mutually inverse.
    """
    if x.basis == IntMatrix.identity(x.spec.vertex_count):
        x = _over_canonical(x)
    if x.basis.ncols < 2 or any(a + b for a, b in zip(x.basis.column(0), x.basis.column(1))):
        raise NoInversePair("the first two basis elements must be mutually inverse")
    if any(v < 0 for row in x.exponents.rows for v in row):
        raise InputError("exponents over the basis must be nonnegative")

    basis_columns = x.basis.columns()
    rows = [list(r) for r in x.exponents.rows]
    n = x.length
    current = IntMatrix.from_rows(rows, n)
    while rank(current) < n:
        r = rank(current)
        j0 = next(j for j in range(n) if rank(current.delete_column(j)) == r)
        rows[1][j0] += 1
        rows.append([int(j == j0) for j in range(n)])
        basis_columns.append(basis_columns[0])
        current = IntMatrix.from_rows(rows, n)
        logger.debug(f"Doubled y_1 to free column {j0}; exponent rank is now {rank(current)}")
    return GeneratorTuple(x.spec, IntMatrix.from_columns(basis_columns, x.spec.vertex_count), current)


def embedded_associated_monoid(x: GeneratorTuple) -> MonoidExpr:
    """C_X(S) as Orthant(n) ∩ ν^{-1}(C_Y(S)) for the injective exponent map ν of the embedded tuple."""
    y = embedify(x)
    basis_tuple = GeneratorTuple.from_vertex_matrix(y.spec, y.basis)
    return Intersect((Orthant(y.length), Preimage(y.exponents, associated_monoid(basis_tuple))))


def duplicate_generator(x: GeneratorTuple, j: int) -> GeneratorTuple:
    """Appends a copy of x_j to the tuple."""
    if not 0 <= j < x.length:
        raise InputError(f"generator index {j} out of range for a tuple of length {x.length}")
    rows = [row + (row[j],) for row in x.exponents.rows]
    return GeneratorTuple(x.spec, x.basis, IntMatrix.from_rows(rows, x.length + 1))


def duplicated_monoid(x: GeneratorTuple, j: int) -> MonoidExpr:
    """C_X' for X' = duplicate_generator(X, j), written as a preimage of C_X under a_j + a_{n+1}."""
    n = x.length
    rows = [[int(c == i) + int(i == j and c == n) for c in range(n + 1)] for i in range(n)]
    return Intersect((Orthant(n + 1), Preimage(IntMatrix.from_rows(rows, n + 1), associated_monoid(x))))
