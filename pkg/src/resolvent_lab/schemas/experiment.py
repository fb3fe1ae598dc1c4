"""Experiment configuration documents, one model per subcommand.

Every model forbids unknown keys. Coordinates may be integers or "p/q" strings, which keeps
exact rational arithmetic; floats switch the affected computation to floating point.
"""

from typing import Annotated, ClassVar, Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from ..models.lattice import Potential
from ..models.symplectic import FieldVector, Subspace, SymplecticSpace
from ..services import dynamics

Coordinate = int | str | float


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class StandardSpaceSpec(_Strict):
    """ℝ^{2n} with the canonical form on coordinate pairs."""

    standard: int = Field(ge=1)

    def build(self) -> SymplecticSpace:
        return SymplecticSpace.standard(self.standard)


class MatrixSpaceSpec(_Strict):
    dim: int = Field(ge=1)
    form: list[list[Coordinate]]

    @model_validator(mode="after")
    def _square(self) -> "MatrixSpaceSpec":
        if len(self.form) != self.dim or any(len(row) != self.dim for row in self.form):
            raise ValueError(f"form must be a {self.dim}x{self.dim} matrix")
        return self

    def build(self) -> SymplecticSpace:
        return SymplecticSpace.from_matrix(self.form)


SpaceSpec = StandardSpaceSpec | MatrixSpaceSpec


class ZeroPotentialSpec(_Strict):
    kind: Literal["zero"]

    def build(self) -> Potential:
        return dynamics.zero_potential()


class BumpPotentialSpec(_Strict):
    kind: Literal["bump"]
    amplitude: float = -1.0
    radius: float = Field(default=2.0, gt=0)

    def build(self) -> Potential:
        return dynamics.bump_potential(self.amplitude, self.radius)


class HermiteGaussianPotentialSpec(_Strict):
    kind: Literal["hermite-gaussian"]
    order: int = Field(default=1, ge=0)
    scale: float = 1.0

    def build(self) -> Potential:
        return dynamics.hermite_gaussian_potential(self.order, self.scale)


class SampledPotentialSpec(_Strict):
    kind: Literal["sampled"]
    grid: list[float] = Field(min_length=4)
    values: list[float] = Field(min_length=4)

    def build(self) -> Potential:
        return dynamics.sampled_potential(self.grid, self.values)


PotentialSpec = Annotated[
    ZeroPotentialSpec | BumpPotentialSpec | HermiteGaussianPotentialSpec | SampledPotentialSpec,
    Field(discriminator="kind"),
]


class OutputSpec(_Strict):
    report: str = "report.json"
    table: str = "report.txt"
    series_dir: str = "series"


class _Experiment(_Strict):
    seed: int | None = Field(default=None, ge=0)
    tolerances: dict[str, float] = Field(default_factory=dict)
    outputs: OutputSpec = Field(default_factory=OutputSpec)

    randomized: ClassVar[bool] = False

    def needs_seed(self) -> bool:
        return self.randomized

    @field_validator("tolerances")
    @classmethod
    def _known_tolerances(cls, value: dict[str, float]) -> dict[str, float]:
        known = {
            "rank_rtol",
            "merge_tol",
            "oracle_tol",
            "quad_epsabs",
            "quad_epsrel",
            "ground_state_residual",
            "sparse_tol",
        }
        unknown = set(value) - known
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        return value


class RelationsConfig(_Experiment):
    command: Literal["relations"]
    space: SpaceSpec = Field(default_factory=lambda: StandardSpaceSpec(standard=2))
    instances: int = Field(default=200, ge=1)
    include_complex: bool = True
    randomized: ClassVar[bool] = True


class VonNeumannSpec(_Strict):
    base: float = 1.0
    target: float = 1.5
    order: int = Field(default=30, ge=0)
    cutoff: int = Field(default=64, ge=2)


class RepConfig(_Experiment):
    command: Literal["rep"]
    lambdas: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0, 5.0])
    norm_cutoff: int = Field(default=129, ge=2)
    weyl_cutoffs: list[int] = Field(default_factory=lambda: [64, 128])
    hs_cutoffs: list[int] = Field(default_factory=lambda: [128, 256])
    von_neumann: VonNeumannSpec = Field(default_factory=VonNeumannSpec)

    @field_validator("weyl_cutoffs", "hs_cutoffs")
    @classmethod
    def _pair(cls, value: list[int]) -> list[int]:
        if len(value) != 2 or value[0] >= value[1] or value[0] < 2:
            raise ValueError("need two increasing cutoffs")
        return value

    @field_validator("hs_cutoffs")
    @classmethod
    def _halvable(cls, value: list[int]) -> list[int]:
        # the compact-ideal check also evaluates at half the smaller cutoff
        if value[0] < 4:
            raise ValueError("smaller HS cutoff must be at least 4")
        return value


class LaplaceConfig(_Experiment):
    command: Literal["laplace"]
    lambdas: list[float] = Field(default_factory=lambda: [1.0, -1.0, 2.0, -2.0])
    cutoff: int = Field(default=128, ge=2)
    direction: list[Coordinate] = Field(default_factory=lambda: [1, 0])


class QuasifreeConfig(_Experiment):
    command: Literal["quasifree"]
    directions: int = Field(default=20, ge=1)
    max_chain: int = Field(default=2, ge=1)
    one_mode_cutoff: int = Field(default=256, ge=2)
    two_mode_cutoff: int = Field(default=48, ge=2)
    allowance: float = Field(default=1e-5, gt=0)
    one_mode_lambda_range: tuple[float, float] = (0.5, 2.0)
    two_mode_lambda_range: tuple[float, float] = (1.0, 2.0)
    randomized: ClassVar[bool] = True

    @field_validator("one_mode_lambda_range", "two_mode_lambda_range")
    @classmethod
    def _range(cls, value: tuple[float, float]) -> tuple[float, float]:
        if not 0 < value[0] <= value[1]:
            raise ValueError("lambda range must satisfy 0 < low <= high")
        return value


class DiracConfig(_Experiment):
    command: Literal["dirac"]
    space: SpaceSpec = Field(default_factory=lambda: StandardSpaceSpec(standard=2))
    constraints: list[list[Coordinate]] = Field(default_factory=lambda: [[1, 0, 0, 0], [0, 0, 1, 0]])
    lambdas: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    mu: float = 1.0
    step: float = Field(default=1e-3, gt=0)
    derivative_cutoff: int = Field(default=64, ge=2)
    positivity_samples: int = Field(default=100, ge=0)
    randomized: ClassVar[bool] = True

    @field_validator("mu")
    @classmethod
    def _nonzero(cls, value: float) -> float:
        if value == 0:
            raise ValueError("mu must be nonzero")
        return value


def _default_cocycle_potentials() -> list:
    return [HermiteGaussianPotentialSpec(kind="hermite-gaussian", order=k) for k in (1, 2, 3)]


class DysonSpec(_Strict):
    cutoff: int = Field(default=16, ge=2)
    t: float = 1.0
    order: int = Field(default=20, ge=0)
    couplings: list[float] = Field(default_factory=lambda: [0.1, 0.2, 0.3])


class FiniteVolumeSpec(_Strict):
    n0: int = Field(default=1, ge=0)
    v_norm: float = Field(default=1.0, ge=0)
    t: float = 0.1
    terms: list[int] = Field(default_factory=lambda: [4, 8, 12, 16, 20])


class HermiteSpec(_Strict):
    count: int = Field(default=24, ge=2)
    t: float = 1.0
    potential: PotentialSpec = Field(default_factory=lambda: BumpPotentialSpec(kind="bump"))
    max_norm_index: int = Field(default=20, ge=0)


class CocycleConfig(_Experiment):
    command: Literal["cocycle"]
    times: list[float] = Field(default_factory=lambda: [0.5, 1.0])
    potentials: list[PotentialSpec] = Field(default_factory=_default_cocycle_potentials)
    dyson: DysonSpec = Field(default_factory=DysonSpec)
    finite_volume: FiniteVolumeSpec = Field(default_factory=FiniteVolumeSpec)
    hermite: HermiteSpec = Field(default_factory=HermiteSpec)


class LatticeConfig(_Experiment):
    command: Literal["lattice"]
    potential: PotentialSpec = Field(default_factory=lambda: BumpPotentialSpec(kind="bump"))
    sites: int = Field(default=3, ge=1)
    cutoff: int = Field(default=12, ge=2)
    mus: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0, 5.0])
    scales: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])

    @field_validator("mus")
    @classmethod
    def _positive(cls, value: list[float]) -> list[float]:
        if any(mu <= 0 for mu in value):
            raise ValueError("every mu must be positive")
        return value


class DecomposeConfig(_Experiment):
    command: Literal["decompose"]
    space: SpaceSpec
    regular: list[list[Coordinate]] = Field(default_factory=list)
    trivial: list[list[Coordinate]] = Field(default_factory=list)
    random_forms: int = Field(default=0, ge=0)
    max_random_dim: int = Field(default=8, ge=2)

    def build_subspaces(self, space: SymplecticSpace) -> tuple[Subspace, Subspace]:
        regular = Subspace.span([space.vector(*row) for row in self.regular])
        trivial = Subspace.span([space.vector(*row) for row in self.trivial])
        return regular, trivial

    def needs_seed(self) -> bool:
        return self.random_forms > 0


ExperimentConfig = Annotated[
    RelationsConfig
    | RepConfig
    | LaplaceConfig
    | QuasifreeConfig
    | DiracConfig
    | CocycleConfig
    | LatticeConfig
    | DecomposeConfig,
    Field(discriminator="command"),
]

experiment_adapter: TypeAdapter = TypeAdapter(ExperimentConfig)

COMMANDS = ("relations", "rep", "laplace", "quasifree", "dirac", "cocycle", "lattice", "decompose")


def parse_config(document: str | bytes) -> BaseModel:
    return experiment_adapter.validate_json(document)


def field_vectors(space: SymplecticSpace, rows: list[list[Coordinate]]) -> list[FieldVector]:
    return [space.vector(*row) for row in rows]
