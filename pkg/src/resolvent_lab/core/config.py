from dataclasses import dataclass, replace

from pydantic import ConfigDict
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    model_config = ConfigDict(env_file=".env", extra="ignore")

    PROJECT_NAME: str = "Resolvent Lab"
    ENVIRONMENT: str = "development"
    DEBUG: bool = False
    LOG_DIR: str = "logs"

    # Linear algebra
    DENSE_DIMENSION_LIMIT: int = 4096
    RANK_RTOL: float = 1e-10
    SPARSE_TOL: float = 1e-10

    # Rewriting
    MERGE_TOL: float = 1e-12
    DEGREE_CAP: int = 12
    REWRITE_BUDGET: int = 5000

    # Numeric oracle
    COMPRESSION_FRACTION: float = 0.25
    ORACLE_TOL: float = 1e-6
    ORACLE_MAX_CUTOFF: int = 128

    # Quadrature
    QUAD_EPSABS: float = 1e-10
    QUAD_EPSREL: float = 1e-10
    MAX_CHAIN_LENGTH: int = 4
    QUASIFREE_AXIS_TOL: float = 1e-8
    GL_NODES: int = 16

    # Eigensolvers
    GROUND_STATE_RESIDUAL: float = 1e-8

    TIME_BUDGET_SECONDS: float = 600.0


settings = Settings()


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds resolved for a single run."""

    rank_rtol: float
    merge_tol: float
    oracle_tol: float
    quad_epsabs: float
    quad_epsrel: float
    ground_state_residual: float
    sparse_tol: float

    @classmethod
    def from_settings(cls, source: Settings | None = None) -> "Tolerances":
        source = source or settings
        return cls(
            rank_rtol=source.RANK_RTOL,
            merge_tol=source.MERGE_TOL,
            oracle_tol=source.ORACLE_TOL,
            quad_epsabs=source.QUAD_EPSABS,
            quad_epsrel=source.QUAD_EPSREL,
            ground_state_residual=source.GROUND_STATE_RESIDUAL,
            sparse_tol=source.SPARSE_TOL,
        )

    def scaled(self, factor: float) -> "Tolerances":
        if factor <= 0:
            raise ValueError(f"Tolerance scale must be positive, got {factor}")
        return replace(
            self,
            oracle_tol=self.oracle_tol * factor,
            quad_epsabs=self.quad_epsabs * factor,
            quad_epsrel=self.quad_epsrel * factor,
            ground_state_residual=self.ground_state_residual * factor,
            sparse_tol=self.sparse_tol * factor,
        )

    def with_overrides(self, overrides: dict[str, float]) -> "Tolerances":
        unknown = set(overrides) - set(self.__dataclass_fields__)
        if unknown:
            raise ValueError(f"Unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **overrides)
