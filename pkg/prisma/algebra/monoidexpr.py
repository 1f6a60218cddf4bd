# Monoid Expressions
"""
An algebra of describable submonoids of Z^n.

Leaves are finitely generated monoids, lexicographic negative cones
(`Lex(n)`: zero or first nonzero coordinate negative), orthants, full
lattices and rooted-tree negative cones. Inner nodes intersect, take
products, pull back along integer maps and restrict to rational subspaces.

Every expression compiles to a `PieceUnion`: a finite union of locally
closed polyhedral cones, each given by equations, strict and non-strict
inequalities, plus optional membership filters for finitely generated
monoids that are not saturated. Closures, spans, purity probes and
prismality certificates are computed from that normal form.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import ClassVar, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from prisma.algebra.cone import Cone
from prisma.algebra.exactlin import (
    IntMatrix,
    IntVector,
    Subspace,
    dot,
    fourier_motzkin_feasible,
    image_subspace,
    lattice_coordinates,
    primitive,
    rank,
    row_hnf,
    sign_normalized,
    vec,
)
from prisma.algebra.hilbert import (
    AffineMonoid,
    SaturatedMonoid,
    Verdict,
    hilbert_basis,
    is_saturated,
    membership,
)
from prisma.core.errors import (
    CertificateUnavailable,
    DimensionMismatch,
    InputError,
    PrismaError,
    PurityRequired,
    TooLarge,
    UnsupportedShape,
    check_dim,
)
from prisma.core.schemas import (
    ExprDoc,
    FinGenDoc,
    IntersectDoc,
    LatticeDoc,
    LexDoc,
    OrthantDoc,
    PreimageDoc,
    ProductDoc,
    RestrictDoc,
    TreeConeDoc,
    validate_document,
)

logger = logging.getLogger(__name__)

PIECES = "pieces"
CLOSURE_BASIC = "closure-basic"
DEFAULT_BUDGET = 200_000
DEFAULT_MAX_VERTICES = 8
MAX_TREE_PIECES = 4096

PRISMAL = "prismal"
ALMOST_PRISMAL = "almost_prismal"


def _units(n: int) -> List[IntVector]:
    return list(IntMatrix.identity(n).rows)


# --- Rooted trees (shared with treegroup) ---

def validate_parents(parents: Sequence[int]) -> Tuple[int, ...]:
    """Checks the parent-list encoding of a rooted tree: root first, parents precede children."""
    parents = tuple(int(p) for p in parents)
    if not parents or parents[0] != -1:
        raise InputError(f"a rooted tree needs parents[0] = -1, got {list(parents)}")
    for i, p in enumerate(parents[1:], start=1):
        if not 0 <= p < i:
            raise InputError(f"vertex {i} has parent {p}; parents must precede their children")
    return parents


def tree_children(parents: Sequence[int]) -> List[List[int]]:
    children: List[List[int]] = [[] for _ in parents]
    for v, p in enumerate(parents):
        if p >= 0:
            children[p].append(v)
    return children


def linear_extensions(parents: Sequence[int], cap: int = DEFAULT_MAX_VERTICES) -> List[Tuple[int, ...]]:
    """
    All chain extensions of a rooted tree, root first, in lexicographic order.

    A vertex may only appear after its parent, so each extension lists the
    vertices from greatest to least.

    Raises:
        TooLarge: If the tree has more than `cap` vertices.
    """
    if len(parents) > cap:
        raise TooLarge(f"chain extensions of a {len(parents)}-vertex tree exceed the cap of {cap}")
    children = tree_children(parents)
    extensions: List[Tuple[int, ...]] = []

    def extend(prefix: List[int], available: frozenset) -> None:
        if not available:
            extensions.append(tuple(prefix))
            return
        for v in sorted(available):
            extend(prefix + [v], (available - {v}) | frozenset(children[v]))

    extend([], frozenset({0}))
    return extensions


def permutation_matrix(order: Sequence[int]) -> IntMatrix:
    """Rows e_{order[0]}, e_{order[1]}, ...; maps g to (g_{order[0]}, g_{order[1]}, ...)."""
    n = len(order)
    return IntMatrix.from_rows(([int(j == v) for j in range(n)] for v in order), n)


# --- Pieces ---

def _clean(rows: Iterable[Sequence[int]], sign_free: bool, keep_zero: bool) -> Tuple[IntVector, ...]:
    out = set()
    for row in rows:
        row = primitive(row)
        if not any(row) and not keep_zero:
            continue
        out.add(sign_normalized(row) if sign_free else row)
    return tuple(sorted(out))


@dataclass(frozen=True)
class Piece:
    """The locally closed cone {x : E·x = 0, S·x > 0, N·x >= 0}."""

    equations: Tuple[IntVector, ...] = ()
    strict: Tuple[IntVector, ...] = ()
    nonstrict: Tuple[IntVector, ...] = ()

    @classmethod
    def of(cls, equations=(), strict=(), nonstrict=()) -> "Piece":
        return cls(
            _clean(equations, True, False),
            _clean(strict, False, True),
            _clean(nonstrict, False, False),
        )

    def meet(self, other: "Piece") -> "Piece":
        return Piece.of(
            self.equations + other.equations,
            self.strict + other.strict,
            self.nonstrict + other.nonstrict,
        )

    def pull_back(self, matrix: IntMatrix) -> "Piece":
        """Substitutes x -> M·x: every row a becomes a·M."""
        columns = matrix.columns()

        def row_times(rows):
            return [tuple(dot(a, c) for c in columns) for a in rows]

        return Piece.of(row_times(self.equations), row_times(self.strict), row_times(self.nonstrict))

    def embed(self, offset: int, total: int) -> "Piece":
        def pad(rows):
            return [(0,) * offset + a + (0,) * (total - offset - len(a)) for a in rows]

        return Piece(tuple(pad(self.equations)), tuple(pad(self.strict)), tuple(pad(self.nonstrict)))

    def contains(self, alpha: Sequence[int]) -> bool:
        return (
            all(dot(a, alpha) == 0 for a in self.equations)
            and all(dot(a, alpha) > 0 for a in self.strict)
            and all(dot(a, alpha) >= 0 for a in self.nonstrict)
        )

    def is_feasible(self, n: int) -> bool:
        return fourier_motzkin_feasible(self.equations, self.strict, self.nonstrict, n)

    def closure_cone(self, n: int) -> Cone:
        """The topological closure; valid for nonempty pieces."""
        return Cone.from_constraints(self.equations, self.strict + self.nonstrict, n)

    def to_dict(self) -> dict:
        return {
            "equations": [list(a) for a in self.equations],
            "strict": [list(a) for a in self.strict],
            "nonstrict": [list(a) for a in self.nonstrict],
        }


def _prune(pieces: Iterable[Piece], n: int) -> Tuple[Piece, ...]:
    kept: List[Piece] = []
    seen = set()
    for p in pieces:
        if p in seen:
            continue
        seen.add(p)
        if p.is_feasible(n):
            kept.append(p)
    return tuple(kept)


@dataclass(frozen=True)
class PieceUnion:
    """
    The compiled normal form of an expression.

    Its lattice points are those lying in some piece and passing every filter.
    """

    ambient_dim: int
    pieces: Tuple[Piece, ...]
    filters: Tuple[AffineMonoid, ...] = ()

    def contains_polyhedral(self, alpha: Sequence[int]) -> bool:
        return any(p.contains(alpha) for p in self.pieces)

    def verdict(self, alpha: Sequence[int], budget: int = DEFAULT_BUDGET) -> Verdict:
        if not self.contains_polyhedral(alpha):
            return Verdict.NO
        result = Verdict.YES
        for f in self.filters:
            v = membership(f, alpha, budget).verdict
            if v is Verdict.NO:
                return Verdict.NO
            if v is Verdict.UNKNOWN:
                result = Verdict.UNKNOWN
        return result

    def closure_cone(self) -> Cone:
        """cl conv of the union: the Minkowski sum of the piece closures."""
        rays: List[IntVector] = []
        lineality: List[IntVector] = []
        for p in self.pieces:
            c = p.closure_cone(self.ambient_dim)
            rays.extend(c.rays)
            lineality.extend(c.lineality.basis.rows)
        return Cone.from_generators(rays, self.ambient_dim, lineality)

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "pieces": [p.to_dict() for p in self.pieces],
            "filters": [f.to_dict() for f in self.filters],
        }


# --- Expression nodes ---

class MonoidExpr:
    """Base class of expression nodes; concrete nodes are frozen dataclasses."""

    kind: ClassVar[str] = ""

    @property
    def ambient_dim(self) -> int:
        raise NotImplementedError

    def children(self) -> Tuple["MonoidExpr", ...]:
        return ()

    def compile_node(self) -> PieceUnion:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


def _check_leaf_dim(dim: int) -> None:
    if dim < 0:
        raise InputError(f"ambient dimension must be nonnegative, got {dim}")


@dataclass(frozen=True)
class FinGen(MonoidExpr):
    kind: ClassVar[str] = "fingen"
    monoid: AffineMonoid

    @classmethod
    def of(cls, gens: Iterable[Sequence[int]], dim: Optional[int] = None) -> "FinGen":
        gens = [vec(g) for g in gens]
        if dim is None:
            if not gens:
                raise InputError("an empty generator list needs an explicit dimension")
            dim = len(gens[0])
        return cls(AffineMonoid.of(gens, dim))

    @property
    def ambient_dim(self) -> int:
        return self.monoid.ambient_dim

    def compile_node(self) -> PieceUnion:
        n = self.ambient_dim
        if is_saturated(self.monoid):
            c = self.monoid.cone
            return PieceUnion(n, (Piece.of(c.equations.rows, (), c.inequalities),))
        logger.debug(f"Finitely generated monoid {list(self.monoid.gens)} is not saturated; compiling as a filter")
        return PieceUnion(n, (Piece(),), (self.monoid,))

    def to_json(self) -> dict:
        return {"type": "fingen", "gens": [list(g) for g in self.monoid.gens], "dim": self.ambient_dim}


@dataclass(frozen=True)
class Lex(MonoidExpr):
    kind: ClassVar[str] = "lex"
    dim: int

    def __post_init__(self):
        _check_leaf_dim(self.dim)

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def compile_node(self) -> PieceUnion:
        units = _units(self.dim)
        pieces = [Piece.of(units)]
        for i in range(self.dim):
            pieces.append(Piece.of(units[:i], [tuple(-x for x in units[i])]))
        return PieceUnion(self.dim, tuple(pieces))

    def to_json(self) -> dict:
        return {"type": "lex", "dim": self.dim}


@dataclass(frozen=True)
class Orthant(MonoidExpr):
    kind: ClassVar[str] = "orthant"
    dim: int

    def __post_init__(self):
        _check_leaf_dim(self.dim)

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def compile_node(self) -> PieceUnion:
        return PieceUnion(self.dim, (Piece.of((), (), _units(self.dim)),))

    def to_json(self) -> dict:
        return {"type": "orthant", "dim": self.dim}


@dataclass(frozen=True)
class FullLattice(MonoidExpr):
    kind: ClassVar[str] = "lattice"
    dim: int

    def __post_init__(self):
        _check_leaf_dim(self.dim)

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def compile_node(self) -> PieceUnion:
        return PieceUnion(self.dim, (Piece(),))

    def to_json(self) -> dict:
        return {"type": "lattice", "dim": self.dim}


@dataclass(frozen=True)
class TreeCone(MonoidExpr):
    """{g : g <= 0} in the lattice-ordered group of one rooted tree."""

    kind: ClassVar[str] = "treecone"
    parents: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parents", validate_parents(self.parents))

    @property
    def ambient_dim(self) -> int:
        return len(self.parents)

    def compile_node(self) -> PieceUnion:
        """
        One piece per way the zero pattern can end: a leaf contributes the single
        piece g_v <= 0, so a star compiles to two pieces. A vertex multiplies
        the piece counts of its non-leaf children, which stays exponential for
        trees with many branching children.

        Raises:
            TooLarge: If a subtree needs more than `MAX_TREE_PIECES` pieces.
        """
        n = self.ambient_dim
        units = _units(n)
        children = tree_children(self.parents)

        # g|subtree(v) <= 0 iff g_v < 0, or g_v = 0 and every child subtree is <= 0.
        def subtree(v: int) -> List[Piece]:
            negative = tuple(-x for x in units[v])
            if not children[v]:
                return [Piece.of((), (), [negative])]
            below = [subtree(c) for c in children[v]]
            count = 1
            for pieces in below:
                count *= len(pieces)
            if count >= MAX_TREE_PIECES:
                raise TooLarge(f"the tree cone below vertex {v} needs {count + 1} pieces; the cap is {MAX_TREE_PIECES}")
            pieces = [Piece.of((), [negative])]
            for combo in product(*below):
                merged = Piece.of([units[v]])
                for p in combo:
                    merged = merged.meet(p)
                pieces.append(merged)
            return pieces

        return PieceUnion(n, tuple(subtree(0)))

    def to_json(self) -> dict:
        return {"type": "treecone", "parents": list(self.parents)}


@dataclass(frozen=True)
class Intersect(MonoidExpr):
    kind: ClassVar[str] = "intersect"
    args: Tuple[MonoidExpr, ...]

    def __post_init__(self):
        if not self.args:
            raise InputError("an intersection needs at least one argument")
        n = self.args[0].ambient_dim
        for a in self.args[1:]:
            check_dim(n, a.ambient_dim, "intersection argument")

    @classmethod
    def of(cls, *args: MonoidExpr) -> "Intersect":
        return cls(tuple(args))

    @property
    def ambient_dim(self) -> int:
        return self.args[0].ambient_dim

    def children(self) -> Tuple[MonoidExpr, ...]:
        return self.args

    def compile_node(self) -> PieceUnion:
        n = self.ambient_dim
        compiled = [compile(a) for a in self.args]
        pieces = compiled[0].pieces
        for other in compiled[1:]:
            pieces = _prune((p.meet(q) for p in pieces for q in other.pieces), n)
        filters = tuple(dict.fromkeys(f for c in compiled for f in c.filters))
        return PieceUnion(n, pieces, filters)

    def to_json(self) -> dict:
        return {"type": "intersect", "args": [a.to_json() for a in self.args]}


def _require_polyhedral(union: PieceUnion, where: str) -> None:
    if union.filters:
        raise UnsupportedShape(f"a non-saturated finitely generated monoid cannot appear under {where}")


@dataclass(frozen=True)
class Product(MonoidExpr):
    kind: ClassVar[str] = "product"
    args: Tuple[MonoidExpr, ...]

    @classmethod
    def of(cls, *args: MonoidExpr) -> "Product":
        return cls(tuple(args))

    @property
    def ambient_dim(self) -> int:
        return sum(a.ambient_dim for a in self.args)

    def children(self) -> Tuple[MonoidExpr, ...]:
        return self.args

    def compile_node(self) -> PieceUnion:
        total = self.ambient_dim
        blocks = []
        offset = 0
        for a in self.args:
            union = compile(a)
            _require_polyhedral(union, "a product")
            blocks.append([p.embed(offset, total) for p in union.pieces])
            offset += a.ambient_dim
        pieces = []
        for combo in product(*blocks):
            merged = Piece()
            for p in combo:
                merged = merged.meet(p)
            pieces.append(merged)
        return PieceUnion(total, tuple(dict.fromkeys(pieces)))

    def to_json(self) -> dict:
        return {"type": "product", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class Preimage(MonoidExpr):
    """{x in Z^ncols : M·x in arg}."""

    kind: ClassVar[str] = "preimage"
    matrix: IntMatrix
    arg: MonoidExpr

    def __post_init__(self):
        if self.matrix.nrows != self.arg.ambient_dim:
            raise DimensionMismatch(
                f"a map into Z^{self.matrix.nrows} cannot pull back a monoid in Z^{self.arg.ambient_dim}"
            )

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], arg: MonoidExpr, cols: Optional[int] = None) -> "Preimage":
        return cls(IntMatrix.from_rows(rows, cols), arg)

    @property
    def ambient_dim(self) -> int:
        return self.matrix.ncols

    def children(self) -> Tuple[MonoidExpr, ...]:
        return (self.arg,)

    def compile_node(self) -> PieceUnion:
        union = compile(self.arg)
        _require_polyhedral(union, "a preimage")
        n = self.ambient_dim
        return PieceUnion(n, _prune((p.pull_back(self.matrix) for p in union.pieces), n))

    def to_json(self) -> dict:
        return {"type": "preimage", "matrix": self.matrix.to_list(), "cols": self.matrix.ncols, "arg": self.arg.to_json()}


@dataclass(frozen=True)
class Restrict(MonoidExpr):
    kind: ClassVar[str] = "restrict"
    arg: MonoidExpr
    subspace: Subspace

    def __post_init__(self):
        check_dim(self.arg.ambient_dim, self.subspace.ambient_dim, "restriction subspace")

    @classmethod
    def of(cls, arg: MonoidExpr, vectors: Iterable[Sequence[int]]) -> "Restrict":
        return cls(arg, Subspace.span_of(vectors, arg.ambient_dim))

    @property
    def ambient_dim(self) -> int:
        return self.arg.ambient_dim

    def children(self) -> Tuple[MonoidExpr, ...]:
        return (self.arg,)

    def compile_node(self) -> PieceUnion:
        union = compile(self.arg)
        n = self.ambient_dim
        extra = Piece.of(self.subspace.equations.rows)
        return PieceUnion(n, _prune((p.meet(extra) for p in union.pieces), n), union.filters)

    def to_json(self) -> dict:
        return {"type": "restrict", "subspace": self.subspace.to_list(), "arg": self.arg.to_json()}


# --- Compilation and queries ---

@lru_cache(maxsize=1024)
def compile(e: MonoidExpr) -> PieceUnion:
    """
    Compiles an expression into its piece-union normal form.

    Raises:
        UnsupportedShape: When a non-saturated finitely generated monoid sits
            below a product or a preimage.
    """
    union = e.compile_node()
    logger.debug(f"Compiled {e.kind} node in Z^{e.ambient_dim}: {len(union.pieces)} pieces, {len(union.filters)} filters")
    return union


def member_verdict(e: MonoidExpr, alpha: Sequence[int], budget: int = DEFAULT_BUDGET) -> Verdict:
    check_dim(e.ambient_dim, len(alpha), "point")
    return compile(e).verdict(vec(alpha), budget)


def member(e: MonoidExpr, alpha: Sequence[int], budget: int = DEFAULT_BUDGET) -> bool:
    """
    Exact membership of alpha in e.

    Raises:
        TooLarge: If a membership filter cannot decide within the budget.
    """
    verdict = member_verdict(e, alpha, budget)
    if verdict is Verdict.UNKNOWN:
        raise TooLarge(f"membership of {list(alpha)} undecided within {budget} search states")
    return verdict is Verdict.YES


def span(e: MonoidExpr) -> Subspace:
    """The linear span of the monoid: the sum of the spans of its nonempty pieces."""
    if isinstance(e, FinGen):
        return Subspace.span_of(e.monoid.gens, e.ambient_dim)
    union = compile(e)
    if union.filters:
        raise UnsupportedShape("span is only computed for polyhedrally compilable expressions")
    vectors: List[IntVector] = []
    for p in union.pieces:
        c = p.closure_cone(e.ambient_dim)
        vectors.extend(c.rays)
        vectors.extend(c.lineality.basis.rows)
    return Subspace.span_of(vectors, e.ambient_dim)


def closure(e: MonoidExpr, route: str = PIECES) -> SaturatedMonoid:
    """
    The closure Z^n ∩ cl(conv(e)) as a saturated monoid.

    Args:
        e: The expression.
        route: "pieces" sums the closed hulls of the compiled pieces;
            "closure-basic" intersects the closures of the arguments of an
            intersection of pure monoids, each restricted to the span of the
            intersection.

    Raises:
        UnsupportedShape: If the expression does not compile polyhedrally.
        PurityRequired: If the closure passes through a monoid not certified pure.
    """
    if route == CLOSURE_BASIC:
        return _closure_basic(e, Subspace.full(e.ambient_dim))
    if route != PIECES:
        raise InputError(f"unknown closure route {route!r}")
    if isinstance(e, FinGen):
        return e.monoid.saturation
    union = compile(e)
    if union.filters:
        raise PurityRequired("the closure of an intersection with a non-saturated finitely generated monoid needs it to be pure")
    return hilbert_basis(union.closure_cone())


def closure_in_subspace(e: MonoidExpr, v: Subspace, route: str = PIECES) -> SaturatedMonoid:
    """The closure of e ∩ V."""
    check_dim(e.ambient_dim, v.ambient_dim, "subspace")
    if route == CLOSURE_BASIC:
        return _closure_basic(e, v)
    return closure(Restrict(e, v), route)


def _closure_basic(e: MonoidExpr, v: Subspace) -> SaturatedMonoid:
    if not isinstance(e, Intersect):
        raise UnsupportedShape(f"the closure-basic route applies to intersections, not {e.kind} nodes")
    impure = [i for i, a in enumerate(e.args) if not is_certified_pure(a)]
    if impure:
        raise PurityRequired(f"intersection arguments {impure} are not certified pure")
    w = span(Restrict(e, v))
    result: Optional[SaturatedMonoid] = None
    for a in e.args:
        part = closure(Restrict(a, w))
        result = part if result is None else result.intersect(part)
    return result


def is_certified_pure(e: MonoidExpr, budget: int = DEFAULT_BUDGET) -> bool:
    """Structural purity: leaves are pure, and every closed operation preserves purity."""
    if isinstance(e, (Lex, Orthant, FullLattice, TreeCone)):
        return True
    if isinstance(e, FinGen):
        return is_saturated(e.monoid, budget)
    return all(is_certified_pure(c, budget) for c in e.children())


# --- Purity probe ---

@dataclass(frozen=True)
class PurityReport:
    """`pure` is None when a candidate could not be decided within the membership budget."""

    pure: Optional[bool]
    checked: int
    counterexample: Optional[IntVector] = None
    multiplier: Optional[int] = None
    undecided: int = 0

    def to_dict(self) -> dict:
        payload = {"pure": self.pure, "checked": self.checked, "undecided": self.undecided}
        if self.counterexample is not None:
            payload["counterexample"] = list(self.counterexample)
            payload["multiplier"] = self.multiplier
        return payload


def box_points(n: int, low: int, high: int) -> Iterator[IntVector]:
    return product(range(low, high + 1), repeat=n)


def purity_probe(
    e: MonoidExpr,
    box_bound: int,
    multipliers: Sequence[int] = (2, 3),
    nonnegative: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> PurityReport:
    """
    Searches a box for α outside e with kα inside e for some multiplier k.

    Args:
        e: The expression.
        box_bound: Half-width B of the box [-B, B]^n, or [0, B]^n when `nonnegative`.
        multipliers: The values of k to try.
        nonnegative: Restrict the box to the nonnegative orthant.
        budget: Search budget for membership filters.

    Returns:
        The first violation found in box order; otherwise a passing report, or
        one with `pure` None if some candidate stayed undecided.
    """
    union = compile(e)
    low = 0 if nonnegative else -box_bound
    checked = 0
    undecided = 0
    for alpha in box_points(e.ambient_dim, low, box_bound):
        if not any(alpha):
            continue
        checked += 1
        verdict = union.verdict(alpha, budget)
        if verdict is Verdict.YES:
            continue
        for k in multipliers:
            scaled = union.verdict(tuple(k * x for x in alpha), budget)
            if scaled is Verdict.NO:
                continue
            if verdict is Verdict.NO and scaled is Verdict.YES:
                logger.info(f"Purity check found {list(alpha)} outside the monoid with {k}x inside")
                return PurityReport(False, checked, alpha, k, undecided)
            undecided += 1
    if undecided:
        logger.warning(f"Purity check left {undecided} candidates undecided within a budget of {budget}")
        return PurityReport(None, checked, undecided=undecided)
    return PurityReport(True, checked)


# --- Prismality certificates ---

@dataclass(frozen=True, eq=False)
class Certificate:
    """One node of a prismality derivation."""

    rule: str
    claim: str
    expr: MonoidExpr
    children: Tuple["Certificate", ...] = ()
    obligations: Tuple[str, ...] = ()
    maps: Dict[str, IntMatrix] = field(default_factory=dict)

    def walk(self) -> Iterator["Certificate"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def to_dict(self) -> dict:
        payload = {
            "rule": self.rule,
            "claim": self.claim,
            "node": self.expr.kind,
            "ambient_dim": self.expr.ambient_dim,
            "obligations": list(self.obligations),
            "children": [c.to_dict() for c in self.children],
        }
        if self.maps:
            payload["maps"] = {name: m.to_list() for name, m in sorted(self.maps.items())}
        return payload


def _weakest(claims: Iterable[str]) -> str:
    return PRISMAL if all(c == PRISMAL for c in claims) else ALMOST_PRISMAL


def _image_factorization(pi: IntMatrix) -> Tuple[IntMatrix, IntMatrix, Subspace]:
    """Writes π = ν·π' with π' onto Z^d and ν an embedding onto the saturated image lattice."""
    image = image_subspace(pi, Subspace.full(pi.ncols))
    basis = image.basis
    nu = basis.transpose()
    columns = [lattice_coordinates(basis, pi.column(j)) for j in range(pi.ncols)]
    factor = IntMatrix.from_columns(columns, image.dim)
    return factor, nu, image


def prismality_certificate(
    e: MonoidExpr,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """
    Builds a derivation showing that e is prismal (or almost prismal).

    Raises:
        CertificateUnavailable: When a node has no applicable rule.
        TooLarge: When a tree cone exceeds `max_vertices`.
    """
    def build(node: MonoidExpr) -> Certificate:
        return prismality_certificate(node, max_vertices, budget)

    if isinstance(e, Lex):
        return Certificate("lex", PRISMAL, e, obligations=("pure: scaling keeps the sign of the first nonzero coordinate",))
    if isinstance(e, Orthant):
        return Certificate("orthant", PRISMAL, e, obligations=("pure: finitely generated and saturated",))
    if isinstance(e, FullLattice):
        return Certificate("lattice", PRISMAL, e, obligations=("pure: the whole lattice",))
    if isinstance(e, FinGen):
        if is_saturated(e.monoid, budget):
            return Certificate("fingen", PRISMAL, e, obligations=("finitely generated", "pure: equals its saturation"))
        return Certificate("fingen", ALMOST_PRISMAL, e, obligations=("finitely generated",))
    if isinstance(e, TreeCone):
        m = e.ambient_dim
        kids = tuple(
            build(Preimage(permutation_matrix(order), Lex(m)))
            for order in linear_extensions(e.parents, max_vertices)
        )
        return Certificate("chain-intersection", PRISMAL, e, kids,
                           obligations=("equals the intersection of the lex cones of its chain extensions",))
    if isinstance(e, Intersect):
        kids = tuple(build(a) for a in e.args)
        return Certificate("intersection", _weakest(k.claim for k in kids), e, kids,
                           obligations=("pure when every argument is pure",))
    if isinstance(e, Product):
        kids = tuple(build(a) for a in e.args)
        weak = [i for i, k in enumerate(kids) if k.claim != PRISMAL]
        if weak:
            raise CertificateUnavailable(f"cartesian products need prismal factors; factors {weak} are only almost prismal")
        return Certificate("cartesian", PRISMAL, e, kids)
    if isinstance(e, Restrict):
        kid = build(e.arg)
        return Certificate("restriction", kid.claim, e, (kid,), obligations=("pure: sections of pure monoids are pure",))
    if isinstance(e, Preimage):
        kid = build(e.arg)
        pi = e.matrix
        if rank(pi) == pi.nrows:
            return Certificate("epimorphism-preimage", kid.claim, e, (kid,),
                               obligations=("rank equals the target dimension", "pure: preimages of pure monoids are pure"))
        factor, nu, image = _image_factorization(pi)
        inner = Preimage(nu, e.arg)
        restricted = Certificate("restriction", kid.claim, Restrict(e.arg, image), (kid,))
        embedded = Certificate("embedding", kid.claim, inner, (restricted,),
                               obligations=("injective with saturated image",), maps={"embedding": nu})
        epi = Certificate("epimorphism-preimage", kid.claim, Preimage(factor, inner), (embedded,),
                          obligations=("rank equals the target dimension",))
        return Certificate("image-factorization", kid.claim, e, (epi,), maps={"factor": factor, "embedding": nu})
    raise CertificateUnavailable(f"no prismality rule for {type(e).__name__} nodes")


_RULES = {
    "lex": Lex,
    "orthant": Orthant,
    "lattice": FullLattice,
    "fingen": FinGen,
    "chain-intersection": TreeCone,
    "intersection": Intersect,
    "cartesian": Product,
    "restriction": Restrict,
    "epimorphism-preimage": Preimage,
    "embedding": Preimage,
    "image-factorization": Preimage,
}


def check_certificate(cert: Certificate, budget: int = DEFAULT_BUDGET) -> List[str]:
    """
    Validates every node of a derivation against its rule.

    Returns:
        A list of problems, each prefixed by the node's path; empty when valid.
    """
    problems: List[str] = []
    _check_node(cert, "$", problems, budget)
    return problems


def _check_node(cert: Certificate, path: str, problems: List[str], budget: int) -> None:
    def need(condition: bool, message: str) -> None:
        if not condition:
            problems.append(f"{path}: {message}")

    e = cert.expr
    expected = _RULES.get(cert.rule)
    if expected is None or not isinstance(e, expected):
        problems.append(f"{path}: rule {cert.rule!r} does not apply to a {e.kind} node")
        return
    kids = cert.children
    kid_exprs = tuple(k.expr for k in kids)
    rule = cert.rule

    if rule in ("lex", "orthant", "lattice"):
        need(not kids, "a leaf rule has no premises")
        need(cert.claim == PRISMAL, "base monoids are prismal")
    elif rule == "fingen":
        need(not kids, "a leaf rule has no premises")
        if cert.claim == PRISMAL:
            need(is_saturated(e.monoid, budget), "claims prismal but the monoid is not saturated")
    elif rule == "chain-intersection":
        m = e.ambient_dim
        expected_kids = tuple(
            Preimage(permutation_matrix(order), Lex(m)) for order in linear_extensions(e.parents, len(e.parents))
        )
        need(kid_exprs == expected_kids, "premises must be the lex cones of all chain extensions")
        need(all(k.claim == PRISMAL for k in kids), "every chain-extension cone must be prismal")
    elif rule in ("intersection", "cartesian"):
        need(kid_exprs == e.args, "premises must be the arguments in order")
        if rule == "cartesian":
            need(all(k.claim == PRISMAL for k in kids), "factors of a product must be prismal")
        need(cert.claim == _weakest(k.claim for k in kids) or cert.claim == ALMOST_PRISMAL,
             "claim is stronger than the premises allow")
    elif rule == "restriction":
        need(kid_exprs == (e.arg,), "premise must be the restricted monoid")
        need(len(kids) == 1 and (cert.claim == ALMOST_PRISMAL or kids[0].claim == PRISMAL),
             "claim is stronger than the premise allows")
    elif rule == "epimorphism-preimage":
        need(rank(e.matrix) == e.matrix.nrows, "the map is not an epimorphism")
        need(kid_exprs == (e.arg,), "premise must be the pulled-back monoid")
        need(len(kids) == 1 and (cert.claim == ALMOST_PRISMAL or kids[0].claim == PRISMAL),
             "claim is stronger than the premise allows")
    elif rule == "embedding":
        nu = e.matrix
        need(rank(nu) == nu.ncols, "the embedding is not injective")
        image = image_subspace(nu, Subspace.full(nu.ncols))
        need(row_hnf(nu.columns(), nu.nrows) == image.basis, "the embedding's image lattice is not saturated")
        need(kid_exprs == (Restrict(e.arg, image),), "premise must be the section by the image")
        need(len(kids) == 1 and (cert.claim == ALMOST_PRISMAL or kids[0].claim == PRISMAL),
             "claim is stronger than the premise allows")
    elif rule == "image-factorization":
        factor, nu = cert.maps.get("factor"), cert.maps.get("embedding")
        need(factor is not None and nu is not None, "factorization maps are missing")
        if factor is not None and nu is not None:
            need(nu.ncols == factor.nrows and nu @ factor == e.matrix, "the factors do not compose to the map")
            need(kid_exprs == (Preimage(factor, Preimage(nu, e.arg)),), "premise must pull back through both factors")
        need(len(kids) == 1 and (cert.claim == ALMOST_PRISMAL or kids[0].claim == PRISMAL),
             "claim is stronger than the premise allows")

    for i, k in enumerate(kids):
        _check_node(k, f"{path}.children[{i}]", problems, budget)


# --- JSON ---

def expr_from_json(data: object) -> MonoidExpr:
    """
    Parses the shared expression document format.

    Raises:
        InputError: With the JSON path of the offending node.
    """
    doc = validate_document(ExprDoc, data)
    return _from_doc(doc, "$")


def expr_from_doc(doc, path: str = "$") -> MonoidExpr:
    """Builds an expression from an already validated document."""
    return _from_doc(doc, path)


def _from_doc(doc, path: str) -> MonoidExpr:
    try:
        if isinstance(doc, FinGenDoc):
            return FinGen.of(doc.gens, doc.dim)
        if isinstance(doc, LexDoc):
            return Lex(doc.dim)
        if isinstance(doc, OrthantDoc):
            return Orthant(doc.dim)
        if isinstance(doc, LatticeDoc):
            return FullLattice(doc.dim)
        if isinstance(doc, TreeConeDoc):
            return TreeCone(tuple(doc.parents))
        if isinstance(doc, IntersectDoc):
            return Intersect(tuple(_from_doc(a, f"{path}.args[{i}]") for i, a in enumerate(doc.args)))
        if isinstance(doc, ProductDoc):
            return Product(tuple(_from_doc(a, f"{path}.args[{i}]") for i, a in enumerate(doc.args)))
        if isinstance(doc, PreimageDoc):
            arg = _from_doc(doc.arg, f"{path}.arg")
            cols = doc.cols if doc.cols is not None else (len(doc.matrix[0]) if doc.matrix else None)
            if cols is None:
                raise InputError("a preimage under a map with no rows needs an explicit cols")
            return Preimage(IntMatrix.from_rows(doc.matrix, cols), arg)
        if isinstance(doc, RestrictDoc):
            arg = _from_doc(doc.arg, f"{path}.arg")
            return Restrict.of(arg, doc.subspace)
    except PrismaError as e:
        if e.path is None:
            e.path = path
        raise
    raise InputError(f"unknown expression node {type(doc).__name__}", path=path)


def expr_to_json(e: MonoidExpr) -> dict:
    return e.to_json()
