# Exact Integer Linear Algebra
"""
Arbitrary-precision integer and rational linear algebra.

Vectors and matrices are Python integers throughout (with `fractions.Fraction`
where a rational result is unavoidable), so no computation can overflow. The
normal forms, ranks, rational solves and inverses run in sympy's
`DomainMatrix` over ZZ and QQ. The module provides:
- `IntMatrix` and the `IntVector` tuple alias used across the package.
- Row Hermite and Smith normal forms with their unimodular transforms.
- Integer kernels and lattice saturation.
- `Subspace`, a rational subspace stored by its canonical saturated basis.
- Exact Fourier-Motzkin feasibility for homogeneous systems with strict
  inequalities.

All values are immutable; all functions are pure.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix, normalforms
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from prisma.core.errors import DimensionMismatch, InputError

logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]


# --- Vector helpers ---

def vec(values: Iterable[int]) -> IntVector:
    return tuple(int(v) for v in values)


def zero_vector(n: int) -> IntVector:
    return (0,) * n


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def add(a: Sequence[int], b: Sequence[int]) -> IntVector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> IntVector:
    return tuple(x - y for x, y in zip(a, b))


def scale(k: int, a: Sequence[int]) -> IntVector:
    return tuple(k * x for x in a)


def is_zero(a: Sequence[int]) -> bool:
    return not any(a)


def content(a: Sequence[int]) -> int:
    """The gcd of the entries; 0 for the zero vector."""
    return reduce(gcd, (abs(x) for x in a), 0)


def primitive(a: Sequence[int]) -> IntVector:
    """Divides out the content. The zero vector is returned unchanged."""
    g = content(a)
    if g <= 1:
        return tuple(a)
    return tuple(x // g for x in a)


def sign_normalized(a: Sequence[int]) -> IntVector:
    """Flips the sign so that the first nonzero entry is positive."""
    for x in a:
        if x:
            return tuple(a) if x > 0 else tuple(-y for y in a)
    return tuple(a)


def scale_to_integers(values: Sequence[Fraction]) -> IntVector:
    """Clears denominators of a rational vector and returns its primitive part."""
    denominator = reduce(lambda acc, f: acc * f.denominator // gcd(acc, f.denominator), values, 1)
    return primitive(tuple(int(f * denominator) for f in values))


# --- Matrices ---

@dataclass(frozen=True)
class IntMatrix:
    """An integer matrix stored by rows; `ncols` is kept so empty matrices have a shape."""

    rows: Tuple[IntVector, ...]
    ncols: int

    def __post_init__(self):
        for row in self.rows:
            if len(row) != self.ncols:
                raise DimensionMismatch(f"matrix row of length {len(row)} in a matrix with {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], ncols: Optional[int] = None) -> "IntMatrix":
        materialized = tuple(vec(r) for r in rows)
        if ncols is None:
            if not materialized:
                raise InputError("cannot infer the column count of an empty matrix")
            ncols = len(materialized[0])
        return cls(materialized, ncols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        return cls.from_rows(([c[i] for c in columns] for i in range(nrows)), len(columns))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(tuple((0,) * ncols for _ in range(nrows)), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> IntVector:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> List[IntVector]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(self.columns()), self.nrows)

    def apply(self, v: Sequence[int]) -> IntVector:
        """Returns M·v."""
        if len(v) != self.ncols:
            raise DimensionMismatch(f"cannot apply a {self.nrows}x{self.ncols} matrix to a vector of length {len(v)}")
        return tuple(dot(row, v) for row in self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        cols = other.columns()
        return IntMatrix(tuple(tuple(dot(row, c) for c in cols) for row in self.rows), other.ncols)

    def stack(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.ncols:
            raise DimensionMismatch(f"cannot stack matrices with {self.ncols} and {other.ncols} columns")
        return IntMatrix(self.rows + other.rows, self.ncols)

    def delete_column(self, j: int) -> "IntMatrix":
        return IntMatrix(tuple(row[:j] + row[j + 1:] for row in self.rows), self.ncols - 1)

    def to_list(self) -> List[List[int]]:
        return [list(r) for r in self.rows]


# --- Normal forms ---
#
# The reductions themselves run in sympy's DomainMatrix over ZZ and QQ;
# this layer converts to and from IntMatrix and fixes the conventions.

def _domain_matrix(m: IntMatrix, domain=ZZ) -> DomainMatrix:
    return DomainMatrix([[domain(x) for x in row] for row in m.rows], (m.nrows, m.ncols), domain)


def _int_matrix(dm: DomainMatrix) -> IntMatrix:
    return IntMatrix(tuple(tuple(int(x) for x in row) for row in dm.to_list()), dm.shape[1])


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def row_hnf(rows: Iterable[Sequence[int]], ncols: int) -> IntMatrix:
    """
    The nonzero rows of the Hermite form: the canonical basis of the lattice the rows span.

    sympy reduces columns (pivots at the bottom, reduction to the right), so
    the rows go in with their coordinates reversed and the basis comes back
    reversed in both directions.
    """
    m = IntMatrix.from_rows(rows, ncols)
    if not any(any(r) for r in m.rows):
        return IntMatrix((), ncols)
    flipped = DomainMatrix([[ZZ(x) for x in reversed(r)] for r in m.rows], (m.nrows, ncols), ZZ)
    h = _int_matrix(normalforms.hermite_normal_form(flipped.transpose()))
    basis = (tuple(reversed(c)) for c in reversed(h.columns()))
    return IntMatrix(tuple(b for b in basis if any(b)), ncols)


def smith_normal_form(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Computes the Smith normal form D of M with unimodular U and V such that U·M·V = D.

    The diagonal entries are nonnegative and each divides the next.

    Args:
        m: Any integer matrix.

    Returns:
        The triple (D, U, V).
    """
    if m.nrows == 0 or m.ncols == 0:
        return IntMatrix.zeros(m.nrows, m.ncols), IntMatrix.identity(m.nrows), IntMatrix.identity(m.ncols)
    d, u, v = (_int_matrix(x) for x in normalforms.smith_normal_decomp(_domain_matrix(m)))
    flips = [i for i in range(min(m.nrows, m.ncols)) if d.rows[i][i] < 0]
    if flips:
        d = IntMatrix(tuple(scale(-1, r) if i in flips else r for i, r in enumerate(d.rows)), d.ncols)
        u = IntMatrix(tuple(scale(-1, r) if i in flips else r for i, r in enumerate(u.rows)), u.ncols)
    return d, u, v


def _smith_rank(d: IntMatrix) -> int:
    return sum(1 for i in range(min(d.nrows, d.ncols)) if d.rows[i][i])


def hermite_normal_form(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix]:
    """
    Computes the row Hermite normal form H of M together with a unimodular U.

    U·M = H, pivots of H are positive and move strictly right going down,
    entries above a pivot are reduced into [0, pivot), and zero rows sit at
    the bottom.

    sympy returns no transform, so U is rebuilt from the Smith decomposition
    S·M·T = D: each Hermite row h lifts to z·S with z_j = (h·T)_j / d_j, and
    the rows of S past the rank span the left kernel.

    Args:
        m: Any integer matrix.

    Returns:
        The pair (H, U).
    """
    basis = row_hnf(m.rows, m.ncols)
    r = basis.nrows
    h = basis.stack(IntMatrix.zeros(m.nrows - r, m.ncols))
    if r == 0:
        return h, IntMatrix.identity(m.nrows)
    d, s, t = smith_normal_form(m)
    s_t, t_t = s.transpose(), t.transpose()
    lifted = []
    for row in basis.rows:
        y = t_t.apply(row)
        z = tuple(y[j] // d.rows[j][j] for j in range(r)) + (0,) * (m.nrows - r)
        lifted.append(s_t.apply(z))
    return h, IntMatrix(tuple(lifted) + s.rows[r:], m.nrows)


def invariant_factors(m: IntMatrix) -> List[int]:
    """The nonzero diagonal entries of the Smith form."""
    if m.nrows == 0 or m.ncols == 0:
        return []
    return [abs(int(f)) for f in normalforms.invariant_factors(_domain_matrix(m)) if f]


# --- Ranks, kernels, saturation ---

def rank(m: IntMatrix) -> int:
    """Rank over Q."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return _domain_matrix(m, QQ).rank()


def kernel_lattice(m: IntMatrix) -> IntMatrix:
    """
    Returns the canonical basis of {x in Z^ncols : M·x = 0}.

    The columns of V past the rank in U·M·V = D span the kernel; they are
    then put into Hermite form, so equal kernels give equal outputs.
    """
    d, _, v = smith_normal_form(m)
    return row_hnf(v.columns()[_smith_rank(d):], m.ncols)


def saturate_lattice(generators: IntMatrix) -> IntMatrix:
    """Returns the canonical basis of span(L) ∩ Z^n, the saturation of the group generated by L."""
    normals = kernel_lattice(generators)
    return kernel_lattice(normals)


def solve_rational(basis: IntMatrix, v: Sequence[int]) -> Optional[Tuple[Fraction, ...]]:
    """
    Finds coefficients c with c·basis = v over Q.

    Returns:
        A coefficient tuple (unique when the rows are independent), or None if v
        is not in the row span.
    """
    if len(v) != basis.ncols:
        raise DimensionMismatch(f"vector of length {len(v)} against a basis of width {basis.ncols}")
    k = basis.nrows
    if basis.ncols == 0:
        return (Fraction(0),) * k
    # Augmented system basis^T · c = v, one equation per coordinate.
    system = DomainMatrix(
        [[QQ(basis.rows[i][j]) for i in range(k)] + [QQ(v[j])] for j in range(basis.ncols)],
        (basis.ncols, k + 1),
        QQ,
    )
    reduced, pivots = system.rref()
    if k in pivots:
        return None
    rows = reduced.to_list()
    solution = [Fraction(0)] * k
    for row_index, col in enumerate(pivots):
        solution[col] = _fraction(rows[row_index][k])
    return tuple(solution)


def lattice_coordinates(basis: IntMatrix, v: Sequence[int]) -> Optional[IntVector]:
    """Integer coefficients of v in the basis, or None if v is not in the lattice."""
    coeffs = solve_rational(basis, v)
    if coeffs is None or any(c.denominator != 1 for c in coeffs):
        return None
    return tuple(int(c) for c in coeffs)


def combine(coefficients: Sequence[int], rows: Sequence[Sequence[int]], n: int) -> IntVector:
    """Returns Σ c_i·row_i in Z^n."""
    total = [0] * n
    for c, row in zip(coefficients, rows):
        if c:
            for j, x in enumerate(row):
                total[j] += c * x
    return tuple(total)


def inverse_rational(m: IntMatrix) -> List[List[Fraction]]:
    """The inverse of a square nonsingular matrix over Q."""
    if m.nrows != m.ncols:
        raise DimensionMismatch(f"cannot invert a {m.nrows}x{m.ncols} matrix")
    if m.nrows == 0:
        return []
    try:
        inverse = _domain_matrix(m, QQ).inv()
    except DMNonInvertibleMatrixError:
        raise InputError("matrix is singular")
    return [[_fraction(x) for x in row] for row in inverse.to_list()]


# --- Subspaces ---

@dataclass(frozen=True)
class Subspace:
    """
    A subspace of R^n defined over Q, stored by the Hermite basis of V ∩ Z^n.

    The basis rows are primitive and the representation is unique, so `==`
    decides equality of subspaces.
    """

    ambient_dim: int
    basis: IntMatrix

    @classmethod
    def span_of(cls, vectors: Iterable[Sequence[int]], ambient_dim: int) -> "Subspace":
        gens = IntMatrix.from_rows(vectors, ambient_dim)
        return cls(ambient_dim, saturate_lattice(gens))

    @classmethod
    def from_equations(cls, equations: Iterable[Sequence[int]], ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, kernel_lattice(IntMatrix.from_rows(equations, ambient_dim)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, IntMatrix.identity(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, IntMatrix((), n))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @cached_property
    def equations(self) -> IntMatrix:
        """Integer normals: V = {x : e·x = 0 for every row e}."""
        return kernel_lattice(self.basis)

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(f"vector of length {len(v)} tested against a subspace of R^{self.ambient_dim}")
        return all(dot(e, v) == 0 for e in self.equations.rows)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis.rows)

    def to_list(self) -> List[List[int]]:
        return self.basis.to_list()


def _require_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"subspaces of R^{a.ambient_dim} and R^{b.ambient_dim}")


def intersect_subspaces(a: Subspace, b: Subspace) -> Subspace:
    _require_same_ambient(a, b)
    return Subspace(a.ambient_dim, kernel_lattice(a.equations.stack(b.equations)))


def sum_subspaces(a: Subspace, b: Subspace) -> Subspace:
    _require_same_ambient(a, b)
    return Subspace.span_of(a.basis.rows + b.basis.rows, a.ambient_dim)


def preimage_subspace(pi: IntMatrix, w: Subspace) -> Subspace:
    """{x : π·x ∈ W} for π: Z^ncols → Z^nrows."""
    if pi.nrows != w.ambient_dim:
        raise DimensionMismatch(f"map into Z^{pi.nrows} cannot pull back a subspace of R^{w.ambient_dim}")
    return Subspace(pi.ncols, kernel_lattice(w.equations @ pi))


def image_subspace(pi: IntMatrix, v: Subspace) -> Subspace:
    if pi.ncols != v.ambient_dim:
        raise DimensionMismatch(f"map from Z^{pi.ncols} cannot push forward a subspace of R^{v.ambient_dim}")
    return Subspace.span_of((pi.apply(b) for b in v.basis.rows), pi.nrows)


_SUBSPACE_OPS = {
    "intersect": intersect_subspaces,
    "sum": sum_subspaces,
    "preimage": preimage_subspace,
    "image": image_subspace,
}


def subspace_calculus(op: str, *args) -> Subspace:
    """Dispatches one of intersect(a, b), sum(a, b), preimage(π, W), image(π, V)."""
    try:
        fn = _SUBSPACE_OPS[op]
    except KeyError:
        raise InputError(f"unknown subspace operation {op!r}; expected one of {sorted(_SUBSPACE_OPS)}")
    return fn(*args)


# --- Fourier-Motzkin ---

def fourier_motzkin_feasible(
    equations: Sequence[Sequence[int]],
    strict: Sequence[Sequence[int]],
    nonstrict: Sequence[Sequence[int]],
    n: int,
) -> bool:
    """
    Decides whether {x in Q^n : E·x = 0, S·x > 0, N·x >= 0} is nonempty.

    Equations are eliminated by restricting to their integer kernel; the
    remaining variables are eliminated one at a time, where a combined
    inequality is strict iff one of its two parents is. A homogeneous system
    always admits x = 0, so only the strict rows can make it infeasible.
    """
    kernel = kernel_lattice(IntMatrix.from_rows(equations, n))
    k = kernel.nrows
    rows = {}

    def push(coeffs: IntVector, is_strict: bool) -> bool:
        coeffs = primitive(coeffs)
        if not any(coeffs):
            return not is_strict
        rows[coeffs] = rows.get(coeffs, False) or is_strict
        return True

    for a, is_strict in [(r, True) for r in strict] + [(r, False) for r in nonstrict]:
        if not push(kernel.apply(a), is_strict):
            return False

    for var in reversed(range(k)):
        current = list(rows.items())
        rows = {}
        positive = [(c, s) for c, s in current if c[var] > 0]
        negative = [(c, s) for c, s in current if c[var] < 0]
        for c, s in current:
            if c[var] == 0 and not push(c, s):
                return False
        for p, ps in positive:
            for q, qs in negative:
                combined = tuple(-q[var] * x + p[var] * y for x, y in zip(p, q))
                if not push(combined, ps or qs):
                    return False
        logger.debug(f"Fourier-Motzkin eliminated variable {var}: {len(rows)} rows remain")
    return True
