# Verification Service
"""
This service runs the property suites that check the toolkit against the
statements it implements.

Each suite is a list of independent units (a random trial, or one rooted
tree). Units are sharded across worker processes and their results merged
back in unit order, so a fixed seed always yields the same report.
"""

import asyncio
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from prisma.algebra.cone import RELATIVE_INTERIOR, Cone, intersect
from prisma.algebra.exactlin import IntMatrix, IntVector, Subspace, add, sub, vec
from prisma.algebra.facedecomp import decompose, verify_decomposition
from prisma.algebra.grothendieck import (
    MonoidPresentation,
    class_is_zero,
    group_completion,
    is_trivial,
    permuted,
    with_idempotence,
)
from prisma.algebra.hilbert import hilbert_basis, membership
from prisma.algebra.monoidexpr import (
    CLOSURE_BASIC,
    FinGen,
    FullLattice,
    Intersect,
    Lex,
    MonoidExpr,
    Orthant,
    Preimage,
    Product,
    Restrict,
    TreeCone,
    box_points,
    check_certificate,
    closure,
    closure_in_subspace,
    member,
    prismality_certificate,
    purity_probe,
)
from prisma.algebra.treegroup import (
    GeneratorTuple,
    ParasemifieldSpec,
    RootedTree,
    associated_monoid,
    canonical_generators,
    chain_extension_monoid,
    embedded_associated_monoid,
    identity,
    join,
    leq,
    leq_oracle,
    q_membership,
)
from prisma.core.config import settings
from prisma.core.errors import InputError
from prisma.core.schemas import PropertyOut, SuiteReportOut

logger = logging.getLogger(__name__)

TREE_PAIR_CAP = 20_000


@dataclass(frozen=True)
class SuiteOptions:
    """Run options; None means the suite's own default."""

    seed: int = 7
    box: Optional[int] = None
    trials: Optional[int] = None
    max_vertices: Optional[int] = None
    dim: Optional[int] = None
    multipliers: Tuple[int, ...] = (2, 3)
    max_pairs: int = 400
    budget: int = 200_000
    workers: int = 1


@dataclass(frozen=True)
class Suite:
    name: str
    cites: str
    units: Callable[[SuiteOptions], List[Any]]
    run_unit: Callable[[SuiteOptions, Any], List[PropertyOut]]
    box: int = 6
    trials: int = 30
    max_vertices: int = 5

    def resolve(self, options: SuiteOptions) -> SuiteOptions:
        return replace(
            options,
            box=self.box if options.box is None else options.box,
            trials=self.trials if options.trials is None else options.trials,
            max_vertices=self.max_vertices if options.max_vertices is None else options.max_vertices,
        )


def prop(name: str, checked: int, witness: Any = None, **detail) -> PropertyOut:
    return PropertyOut(name=name, passed=witness is None, checked=checked, witness=witness, detail=detail)


def unit_rng(options: SuiteOptions, unit: Any) -> random.Random:
    return random.Random(f"{options.seed}:{unit}")


# --- Random instances ---

def rooted_trees(max_vertices: int) -> List[Tuple[int, ...]]:
    """Every parent list with parents[i] < i, up to `max_vertices` vertices."""
    trees: List[Tuple[int, ...]] = []
    for m in range(1, max_vertices + 1):
        for tail in product(*[range(i) for i in range(1, m)]):
            trees.append((-1,) + tuple(tail))
    return trees


def random_vector(rng: random.Random, n: int, low: int, high: int) -> IntVector:
    return tuple(rng.randint(low, high) for _ in range(n))


def random_pure_fingen(rng: random.Random, n: int, low: int = -2, high: int = 3) -> FinGen:
    gens = [random_vector(rng, n, low, high) for _ in range(n + 1)]
    return FinGen.of(hilbert_basis(Cone.from_generators(gens, n)).generators(), n)


def random_subspace(rng: random.Random, n: int) -> Subspace:
    k = rng.randint(1, n)
    return Subspace.span_of([random_vector(rng, n, -2, 2) for _ in range(k)], n)


def random_expression(rng: random.Random, n: int) -> MonoidExpr:
    """A small mixed expression in Z^n over lex, orthant and tree leaves."""
    matrix = IntMatrix.from_rows([random_vector(rng, n, -2, 2) for _ in range(n)], n)
    choice = rng.randrange(4)
    if choice == 0:
        return Intersect((Orthant(n), Preimage(matrix, Lex(n))))
    if choice == 1:
        return Preimage(matrix, TreeCone((-1,) + tuple(rng.randrange(i) for i in range(1, n))))
    if choice == 2:
        return Restrict(Lex(n), random_subspace(rng, n))
    return Product((Lex(1), Preimage(IntMatrix.from_rows([random_vector(rng, n - 1, -2, 2)], n - 1), Lex(1))))


def semantic_member(e: MonoidExpr, alpha: Sequence[int]) -> bool:
    """Membership straight from the definition of each node, without compiling."""
    alpha = vec(alpha)
    if isinstance(e, Lex):
        return next((x for x in alpha if x), 0) <= 0
    if isinstance(e, Orthant):
        return all(x >= 0 for x in alpha)
    if isinstance(e, FullLattice):
        return True
    if isinstance(e, TreeCone):
        spec = ParasemifieldSpec((RootedTree(e.parents),))
        return q_membership(spec, alpha)
    if isinstance(e, FinGen):
        return membership(e.monoid, alpha).is_member
    if isinstance(e, Intersect):
        return all(semantic_member(a, alpha) for a in e.args)
    if isinstance(e, Product):
        offset = 0
        for a in e.args:
            if not semantic_member(a, alpha[offset:offset + a.ambient_dim]):
                return False
            offset += a.ambient_dim
        return True
    if isinstance(e, Preimage):
        return semantic_member(e.arg, e.matrix.apply(alpha))
    if isinstance(e, Restrict):
        return e.subspace.contains(alpha) and semantic_member(e.arg, alpha)
    raise InputError(f"no semantics for {type(e).__name__}")


def remark_monoids() -> Tuple[MonoidExpr, MonoidExpr]:
    """Two pure monoids in N² whose closures meet on the diagonal while they meet only in 0."""
    c = Intersect((Orthant(2), Preimage.of([[1, -1], [1, 0]], Lex(2))))
    d = Intersect((Orthant(2), Preimage.of([[-1, 1], [0, 1]], Lex(2))))
    return c, d


def _trial_units(options: SuiteOptions) -> List[int]:
    return list(range(options.trials))


def _tree_units(options: SuiteOptions) -> List[Tuple[int, ...]]:
    return rooted_trees(options.max_vertices)


def _single_unit(options: SuiteOptions) -> List[int]:
    return [0]


def _trial_dim(rng: random.Random, options: SuiteOptions) -> int:
    return options.dim if options.dim is not None else rng.choice((2, 3))


def _dim_trial_units(options: SuiteOptions) -> List[Tuple[int, int]]:
    """`trials` units in each of dims 2 and 3, or in `--dim` alone."""
    dims = (options.dim,) if options.dim is not None else (2, 3)
    return [(d, t) for d in dims for t in range(options.trials)]


# --- Suites ---

def _remark(options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    c, d = remark_monoids()
    together = closure(Intersect((c, d)))
    apart = closure(c).intersect(closure(d))
    return [
        prop("closure-of-intersection-is-zero", 1, None if together.is_zero else together.to_dict(),
             closure_of_intersection=together.to_dict()),
        prop("intersection-of-closures-is-diagonal", 1,
             None if apart.to_dict() == {"lineality": [], "hilbert_basis": [[1, 1]]} else apart.to_dict(),
             intersection_of_closures=apart.to_dict()),
        prop("both-pure", 2, next((p.to_dict() for p in (purity_probe(c, 4), purity_probe(d, 4)) if not p.pure), None)),
    ]


def _closure_basic(options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    rng = unit_rng(options, unit)
    n = _trial_dim(rng, options)
    a, b = random_pure_fingen(rng, n), random_pure_fingen(rng, n)
    v = random_subspace(rng, n)
    e = Intersect((a, b))
    left = closure_in_subspace(e, v)
    right = closure_in_subspace(e, v, CLOSURE_BASIC)
    witness, checked = None, 0
    for p in box_points(n, -options.box, options.box):
        checked += 1
        if left.contains(p) != right.contains(p):
            witness = {"a": list(map(list, a.monoid.gens)), "b": list(map(list, b.monoid.gens)),
                       "subspace": v.to_list(), "point": list(p)}
            break
    return [prop("closure-through-span", checked, witness)]


def _convex(options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    rng = unit_rng(options, unit)
    n = _trial_dim(rng, options)
    box = list(box_points(n, -options.box, options.box))
    results = []

    c = random_pure_fingen(rng, n)
    hull = closure(c)
    bad = next((list(p) for p in box if member(c, p, options.budget) != hull.contains(p)), None)
    results.append(prop("pure-equals-hull-points", len(box), bad))

    k = Cone.from_generators([random_vector(rng, n, 0, 4) for _ in range(n + 1)], n)
    l_ = Cone.from_generators([random_vector(rng, n, 0, 4) for _ in range(n + 1)], n)
    both = intersect(k, l_)
    checked, bad = 0, None
    if k.dim == l_.dim == both.dim:
        for p in box:
            checked += 1
            lhs = both.contains(p, RELATIVE_INTERIOR)
            rhs = k.contains(p, RELATIVE_INTERIOR) and l_.contains(p, RELATIVE_INTERIOR)
            if lhs != rhs:
                bad = {"k": k.to_dict(), "l": l_.to_dict(), "point": list(p)}
                break
    results.append(prop("relative-interior-of-intersection", checked, bad))

    e = random_expression(rng, n)
    bad = next((list(p) for p in box if member(e, p) != semantic_member(e, p)), None)
    results.append(prop("compiled-membership", len(box), bad, node=e.kind))

    v = random_subspace(rng, n)
    section = closure_in_subspace(e, v)
    bad = next((list(p) for p in box if v.contains(p) and member(e, p) and not section.contains(p)), None)
    if bad is None:
        bad = next((list(h) for h in section.hilbert_basis if not v.contains(h)), None)
    results.append(prop("closure-contains-section", len(box), bad))
    return results


def _tree_order(options: SuiteOptions, unit: Tuple[int, ...]) -> List[PropertyOut]:
    rng = unit_rng(options, unit)
    spec = ParasemifieldSpec((RootedTree(unit),))
    m = spec.vertex_count
    points = list(box_points(m, -options.box, options.box))
    if len(points) ** 2 <= TREE_PAIR_CAP:
        pairs = [(a, b) for a in points for b in points]
    else:
        pairs = [(rng.choice(points), rng.choice(points)) for _ in range(TREE_PAIR_CAP)]
    bad = next(({"a": list(a), "b": list(b)} for a, b in pairs
                if leq(spec, a, b) != leq_oracle(spec, a, b, options.max_vertices)), None)
    results = [prop("leq-matches-chain-extensions", len(pairs), bad, vertices=m)]

    law_pairs = pairs[: min(len(pairs), 200)]
    bad = None
    for a, b in law_pairs:
        j = join(spec, a, b)
        c = rng.choice(points)
        laws = (
            j == join(spec, b, a),
            join(spec, a, a).coords == tuple(a),
            join(spec, j, c) == join(spec, a, join(spec, b, c)),
            leq(spec, a, b) == (j.coords == tuple(b)),
            leq(spec, a, j.coords) and leq(spec, b, j.coords),
        )
        if not all(laws):
            bad = {"a": list(a), "b": list(b), "c": list(c), "laws": list(laws)}
            break
    results.append(prop("lattice-laws", len(law_pairs), bad))

    bad, checked = None, 0
    if m <= 3:
        upper = list(box_points(m, -3, 3))
        for a, b in law_pairs[:20]:
            j = join(spec, a, b).coords
            for c in upper:
                checked += 1
                if leq(spec, a, c) and leq(spec, b, c) and leq(spec, c, j) and tuple(c) != j:
                    bad = {"a": list(a), "b": list(b), "c": list(c)}
                    break
            if bad:
                break
    results.append(prop("least-upper-bound", checked, bad))
    return results


def _chain_intersection(options: SuiteOptions, unit: Tuple[int, ...]) -> List[PropertyOut]:
    spec = ParasemifieldSpec((RootedTree(unit),))
    x = canonical_generators(spec)
    direct, oracle = associated_monoid(x), chain_extension_monoid(x, options.max_vertices)
    checked, bad = 0, None
    for alpha in box_points(x.length, 0, options.box):
        checked += 1
        if member(direct, alpha) != member(oracle, alpha):
            bad = {"tree": list(unit), "alpha": list(alpha)}
            break
    return [prop("canonical-monoid-is-chain-intersection", checked, bad)]


def _random_tuple(rng: random.Random, spec: ParasemifieldSpec) -> GeneratorTuple:
    n = rng.randint(1, 3)
    rows = [random_vector(rng, n, -2, 2) for _ in range(spec.vertex_count)]
    return GeneratorTuple.from_vertex_matrix(spec, IntMatrix.from_rows(rows, n))


def _pure_cx(options: SuiteOptions, unit: Tuple[int, ...]) -> List[PropertyOut]:
    rng = unit_rng(options, unit)
    spec = ParasemifieldSpec((RootedTree(unit),))
    results = []
    for label, x in (("canonical", canonical_generators(spec)), ("random", _random_tuple(rng, spec))):
        report = purity_probe(associated_monoid(x), options.box, options.multipliers, nonnegative=True, budget=options.budget)
        witness = None if report.pure else {"tree": list(unit), "matrix": x.matrix.to_list(), **report.to_dict()}
        results.append(prop(f"{label}-tuple-pure", report.checked, witness))
    y = _random_tuple(rng, spec)
    direct, embedded = associated_monoid(y), embedded_associated_monoid(y)
    bad, checked = None, 0
    for alpha in box_points(y.length, 0, 3):
        checked += 1
        if member(direct, alpha) != member(embedded, alpha):
            bad = {"tree": list(unit), "matrix": y.matrix.to_list(), "alpha": list(alpha)}
            break
    results.append(prop("embedded-form-agrees", checked, bad))
    return results


def _root_extraction(options: SuiteOptions, unit: Tuple[int, ...]) -> List[PropertyOut]:
    rng = unit_rng(options, unit)
    spec = ParasemifieldSpec((RootedTree(unit),))
    m = spec.vertex_count
    samples = [random_vector(rng, m, -3, 3) for _ in range(options.trials)]
    bad, checked = None, 0
    for a in samples:
        for k in (2, 3, 4):
            checked += 1
            if q_membership(spec, tuple(k * x for x in a)) and not q_membership(spec, a):
                bad = {"tree": list(unit), "a": list(a), "power": k}
                break
        if bad:
            break
    one = identity(spec)
    return [
        prop("root-extraction", checked, bad),
        prop("identity-idempotent", 1, None if join(spec, one, one) == one else {"tree": list(unit)}),
    ]


def _face_decomposition(options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    rng = unit_rng(options, unit)
    if unit == -1:
        e, _ = remark_monoids()
    else:
        n = _trial_dim(rng, options)
        gens = [random_vector(rng, n, 0, 4) for _ in range(n + 1)]
        e = FinGen.of(hilbert_basis(Cone.from_generators(gens, n)).generators(), n)
    pieces = decompose(e)
    report = verify_decomposition(pieces, options.box, options.seed, options.max_pairs,
                                  multipliers=options.multipliers, budget=options.budget)
    out = []
    for p in report.properties:
        witness = p.witness if p.witness is None else {"instance": e.to_json(), **p.witness}
        out.append(prop(p.name, p.checked, witness))
    return out


def _face_units(options: SuiteOptions) -> List[int]:
    return [-1] + _trial_units(options)


def _certificates(options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    if isinstance(unit, tuple):
        spec = ParasemifieldSpec((RootedTree(unit),))
        rng = unit_rng(options, unit)
        exprs = [associated_monoid(canonical_generators(spec)), embedded_associated_monoid(_random_tuple(rng, spec))]
    else:
        exprs = [
            Product((Lex(2), Lex(1))),
            Preimage.of([[1, 1, 0], [0, 1, -1]], Lex(2)),
            Preimage.of([[1], [1]], Lex(2)),
            Preimage.of([[2, 0], [0, 1], [1, 1]], Product((Lex(1), Lex(2)))),
            Restrict.of(Lex(3), [[1, 0, 1], [0, 1, 0]]),
            Intersect((Orthant(2), Preimage.of([[1, -1], [1, 0]], Lex(2)))),
        ]
    bad = None
    for e in exprs:
        problems = check_certificate(prismality_certificate(e, options.max_vertices, options.budget), options.budget)
        if problems:
            bad = {"expr": e.to_json(), "problems": problems}
            break
    return [prop("certificates-check", len(exprs), bad)]


def _certificate_units(options: SuiteOptions) -> List[Any]:
    return ["fixed"] + rooted_trees(options.max_vertices)


def _grothendieck(options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    if unit == -1:
        idem = MonoidPresentation.of(1, [([1], [2])])
        torsion = group_completion(MonoidPresentation.of(2, [([2, 0], [0, 2])]))
        swap = MonoidPresentation.of(2, [([1, 0], [1, 1]), ([0, 1], [1, 1])])
        return [
            prop("idempotent-generator-trivial", 1, None if is_trivial(idem) else idem.to_json()),
            prop("two-torsion", 1, None if (torsion.free_rank, torsion.torsion) == (1, (2,)) else torsion.to_dict()),
            prop("absorbing-pair-trivial", 1, None if is_trivial(swap) else swap.to_json()),
        ]
    rng = unit_rng(options, unit)
    g = rng.randint(1, 4)
    relations = [(random_vector(rng, g, 0, 3), random_vector(rng, g, 0, 3)) for _ in range(rng.randint(0, 3))]
    p = MonoidPresentation.of(g, relations)
    results = [prop("idempotent-augmentation-trivial", 1, None if is_trivial(with_idempotence(p)) else p.to_json())]

    us = [random_vector(rng, g, 0, 3) for _ in range(6)]
    zero = [u for u in us if class_is_zero(p, u)]
    bad = next(({"u": list(u), "v": list(v)} for u in zero for v in zero if not class_is_zero(p, add(u, v))), None)
    results.append(prop("zero-classes-closed", len(zero) ** 2, bad))

    perm = list(range(g))
    rng.shuffle(perm)
    before, after = group_completion(p), group_completion(permuted(p, perm))
    same = (before.free_rank, before.torsion) == (after.free_rank, after.torsion)
    results.append(prop("order-independent", 1, None if same else {"presentation": p.to_json(), "perm": perm}))
    return results


def _grothendieck_units(options: SuiteOptions) -> List[int]:
    return [-1] + _trial_units(options)


def _hilbert_oracle(options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    rng = unit_rng(options, unit)
    n, _ = unit
    gens = [random_vector(rng, n, 0, 5) for _ in range(rng.randint(1, n + 1))]
    cone = Cone.from_generators(gens, n)
    basis = hilbert_basis(cone).hilbert_basis
    points = sorted((p for p in box_points(n, 0, options.box) if cone.contains(p)), key=lambda p: (sum(p), p))
    inside = set(points)
    reached = set()
    bad = None
    for p in points:
        rests = [sub(p, h) for h in basis]
        if not any(p) or any(not any(q) or q in reached for q in rests):
            reached.add(p)
        else:
            bad = {"gens": [list(g) for g in gens], "point": list(p)}
            break
    results = [prop("basis-generates-box", len(points), bad)]

    bad = None
    for h in basis:
        if h in inside and any(q != h and any(q) and sub(h, q) in inside for q in points):
            bad = {"gens": [list(g) for g in gens], "element": list(h)}
            break
    results.append(prop("basis-irreducible", len(basis), bad))
    return results


SUITES: Dict[str, Suite] = {s.name: s for s in (
    Suite("remark-1-5", "closures of pure monoids need not commute with intersection", _single_unit, _remark),
    Suite("closure-basic", "closure of C ∩ D ∩ V through W = span(C ∩ D ∩ V)", _trial_units, _closure_basic),
    Suite("convex-identities", "lattice points and relative interiors of pure monoids and cones",
          _trial_units, _convex, box=3),
    Suite("tree-order", "tree order as the intersection of chain-extension lex orders", _tree_units, _tree_order,
          box=2, max_vertices=5),
    Suite("chain-intersection", "canonical associated monoid as an intersection over chain extensions",
          _tree_units, _chain_intersection, box=3, max_vertices=4),
    Suite("pure-cx", "associated monoids are pure", _tree_units, _pure_cx, box=2, max_vertices=4),
    Suite("root-extraction", "n·a in Q_S implies a in Q_S", _tree_units, _root_extraction, max_vertices=5),
    Suite("face-decomposition", "decomposition of a monoid by relatively open faces", _face_units,
          _face_decomposition, box=8),
    Suite("prismality-certificates", "prismality is preserved by intersection, product, preimage and restriction",
          _certificate_units, _certificates, max_vertices=4),
    Suite("grothendieck-idempotent", "additive idempotence forces a trivial completion", _grothendieck_units,
          _grothendieck, trials=20),
    Suite("hilbert-oracle", "Hilbert bases regenerate the lattice points of a cone", _dim_trial_units,
          _hilbert_oracle, box=8, trials=50),
)}


def _run_unit(name: str, options: SuiteOptions, unit: Any) -> List[PropertyOut]:
    return SUITES[name].run_unit(options, unit)


def _merge(name: str, suite: Suite, options: SuiteOptions, shards: List[List[PropertyOut]]) -> SuiteReportOut:
    merged: Dict[str, PropertyOut] = {}
    for shard in shards:
        for p in shard:
            seen = merged.get(p.name)
            if seen is None:
                merged[p.name] = p.model_copy(deep=True)
                continue
            seen.checked += p.checked
            if seen.passed and not p.passed:
                seen.passed, seen.witness = False, p.witness
            for key, value in p.detail.items():
                if isinstance(value, int) and isinstance(seen.detail.get(key), int):
                    seen.detail[key] += value
                else:
                    seen.detail.setdefault(key, value)
    properties = list(merged.values())
    return SuiteReportOut(
        suite=name,
        cites=suite.cites,
        passed=all(p.passed for p in properties),
        seed=options.seed,
        properties=properties,
    )


class VerificationService:
    """Runs named suites and produces `SuiteReportOut` documents."""

    @property
    def suite_names(self) -> List[str]:
        return sorted(SUITES)

    async def run_suite(self, name: str, options: SuiteOptions) -> SuiteReportOut:
        """
        Runs one suite.

        Args:
            name: A key of `SUITES`.
            options: Run options; unset fields fall back to the suite defaults.

        Raises:
            InputError: For an unknown suite name.
        """
        suite = SUITES.get(name)
        if suite is None:
            raise InputError(f"unknown suite {name!r}; expected one of {self.suite_names}")
        options = suite.resolve(options)
        units = suite.units(options)
        logger.info(f"Running suite {name} over {len(units)} units with {options.workers} workers (seed={options.seed})")
        if options.workers <= 1:
            shards = [_run_unit(name, options, u) for u in units]
        else:
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=options.workers) as pool:
                shards = await asyncio.gather(*[loop.run_in_executor(pool, _run_unit, name, options, u) for u in units])
        report = _merge(name, suite, options, list(shards))
        if report.passed:
            logger.info(f"Suite {name} passed")
        else:
            failed = [p.name for p in report.properties if not p.passed]
            logger.warning(f"Suite {name} failed properties: {failed}")
        return report

    def run(self, name: str, options: SuiteOptions) -> SuiteReportOut:
        return asyncio.run(self.run_suite(name, options))


def default_options(**overrides) -> SuiteOptions:
    """Suite options seeded from the global settings."""
    base = SuiteOptions(
        seed=settings.DEFAULT_SEED,
        multipliers=tuple(settings.multipliers),
        max_pairs=settings.MAX_PAIR_SAMPLES,
        budget=settings.MEMBERSHIP_BUDGET,
        workers=settings.VERIFY_WORKERS,
    )
    return replace(base, **{k: v for k, v in overrides.items() if v is not None})


# Create a single, global instance of the VerificationService.
verification_service = VerificationService()
