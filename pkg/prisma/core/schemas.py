# Document Schemas
"""
Pydantic models for every JSON document the toolkit reads or writes.

Input documents are validated here before any algebra runs; a validation
failure becomes an `InputError` whose `path` points at the offending field
(e.g. `$.args[1].matrix`).
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, model_validator

from prisma.core.errors import InputError

IntRows = List[List[int]]


# --- Monoid expressions ---

class FinGenDoc(BaseModel):
    """A finitely generated monoid given by its generators."""
    type: Literal["fingen"]
    gens: IntRows = Field(description="Generators, one integer vector each.")
    dim: Optional[int] = Field(default=None, ge=0, description="Ambient dimension; required when gens is empty.")

    @model_validator(mode="after")
    def check_dim(self):
        if self.dim is None and not self.gens:
            raise ValueError("an empty generator list needs an explicit dim")
        return self


class LexDoc(BaseModel):
    """Vectors whose first nonzero coordinate is negative, plus zero."""
    type: Literal["lex"]
    dim: int = Field(ge=0)


class OrthantDoc(BaseModel):
    type: Literal["orthant"]
    dim: int = Field(ge=0)


class LatticeDoc(BaseModel):
    type: Literal["lattice"]
    dim: int = Field(ge=0)


class TreeConeDoc(BaseModel):
    """The negative cone of a rooted-tree lattice-ordered group."""
    type: Literal["treecone"]
    parents: List[int] = Field(description="parents[0] = -1 for the root, parents[i] < i otherwise.")


class IntersectDoc(BaseModel):
    type: Literal["intersect"]
    args: List["ExprDoc"] = Field(min_length=1)


class ProductDoc(BaseModel):
    type: Literal["product"]
    args: List["ExprDoc"]


class PreimageDoc(BaseModel):
    type: Literal["preimage"]
    matrix: IntRows = Field(description="Integer map Z^ncols -> Z^nrows applied to column vectors.")
    cols: Optional[int] = Field(default=None, ge=0, description="Column count; required when the matrix has no rows.")
    arg: "ExprDoc"


class RestrictDoc(BaseModel):
    type: Literal["restrict"]
    subspace: IntRows = Field(description="Vectors spanning the subspace.")
    arg: "ExprDoc"


ExprDoc = Annotated[
    Union[FinGenDoc, LexDoc, OrthantDoc, LatticeDoc, TreeConeDoc, IntersectDoc, ProductDoc, PreimageDoc, RestrictDoc],
    Field(discriminator="type"),
]

for _model in (IntersectDoc, ProductDoc, PreimageDoc, RestrictDoc):
    _model.model_rebuild()


# --- Geometry inputs ---

class ConeDoc(BaseModel):
    """Either a ray description or an inequality description of a cone."""
    dim: int = Field(ge=0)
    rays: Optional[IntRows] = None
    lineality: IntRows = Field(default_factory=list)
    inequalities: Optional[IntRows] = None
    equations: IntRows = Field(default_factory=list)

    @model_validator(mode="after")
    def check_one_description(self):
        if (self.rays is None) == (self.inequalities is None):
            raise ValueError("give exactly one of rays or inequalities")
        return self


class SubspaceDoc(BaseModel):
    dim: int = Field(ge=0)
    basis: IntRows = Field(default_factory=list, description="Vectors spanning the subspace.")


# --- Tree groups ---

class TreeDoc(BaseModel):
    parents: List[int]


class TreeSpecDoc(BaseModel):
    """A finite product of rooted-tree groups; an empty factor list is the trivial one."""
    factors: List[TreeDoc] = Field(default_factory=list)


class GeneratorTupleDoc(BaseModel):
    """A generating tuple; omit the matrix for the canonical tuple."""
    spec: TreeSpecDoc
    matrix: Optional[IntRows] = Field(default=None, description="Vertex-basis matrix: one row per vertex, one column per generator.")
    cols: Optional[int] = Field(default=None, ge=0)


# --- Monoid presentations ---

class PresentationDoc(BaseModel):
    generators: int = Field(ge=0)
    relations: List[Tuple[List[int], List[int]]] = Field(default_factory=list)


# --- Command inputs ---

class ExprInput(BaseModel):
    expr: ExprDoc
    route: Literal["pieces", "closure-basic"] = "pieces"


class SubspaceExprInput(BaseModel):
    expr: ExprDoc
    subspace: SubspaceDoc
    route: Literal["pieces", "closure-basic"] = "pieces"


class MemberInput(BaseModel):
    expr: ExprDoc
    point: List[int]


class ConeInput(BaseModel):
    cone: ConeDoc


class SaturateInput(BaseModel):
    gens: IntRows
    dim: Optional[int] = Field(default=None, ge=0)


class TreePairInput(BaseModel):
    spec: TreeSpecDoc
    a: List[int]
    b: List[int]


class TreeTupleInput(BaseModel):
    generators: GeneratorTupleDoc
    embed: bool = Field(default=False, description="Re-express the tuple injectively before building the monoid.")


class GrothendieckInput(BaseModel):
    presentation: PresentationDoc
    element: Optional[List[int]] = None


class JobOptions(BaseModel):
    """Options of one command run; every field except `workers` is part of the cache key."""
    box: Optional[int] = Field(default=None, ge=0, description="Sampling box bound; None means the command default.")
    multipliers: List[int] = Field(default_factory=lambda: [2, 3], description="Multipliers k for purity checks.")
    seed: int = Field(default=7, description="Seed of every randomized step.")
    max_vertices: Optional[int] = Field(default=None, ge=1, description="Cap on tree factors for chain-extension oracles.")
    trials: Optional[int] = Field(default=None, ge=1)
    dim: Optional[int] = Field(default=None, ge=1)
    budget: int = Field(default=200_000, ge=1, description="Membership search budget.")
    max_pairs: int = Field(default=400, ge=1)
    workers: int = Field(default=1, ge=1, exclude=True)


# --- Outputs ---

class SaturatedMonoidOut(BaseModel):
    lineality: IntRows
    hilbert_basis: IntRows


class ErrorOut(BaseModel):
    error: str
    message: str
    path: Optional[str] = None
    witness: Any = None
    exit_code: int


class PropertyOut(BaseModel):
    """One checked property of a verification suite."""
    name: str
    passed: bool
    checked: int = 0
    witness: Any = None
    detail: Dict[str, Any] = Field(default_factory=dict)


class SuiteReportOut(BaseModel):
    suite: str
    cites: str
    passed: bool
    seed: int
    properties: List[PropertyOut]


# --- Validation helpers ---

def _error_path(error: ValidationError) -> str:
    loc = error.errors()[0].get("loc", ()) if error.errors() else ()
    path = "$"
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def validate_document(model: Any, data: Any) -> Any:
    """
    Validates a decoded JSON document against a model or annotated type.

    Raises:
        InputError: With the JSON path of the first failing field.
    """
    try:
        if isinstance(model, type) and issubclass(model, BaseModel):
            return model.model_validate(data)
        return TypeAdapter(model).validate_python(data)
    except ValidationError as e:
        first = e.errors()[0]["msg"] if e.errors() else str(e)
        raise InputError(f"invalid document: {first}", path=_error_path(e))
