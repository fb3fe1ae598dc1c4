from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..core.errors import DimensionBudgetExceeded, FourierClosureError

RealFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Potential:
    """Real interaction potential V with sup norm ‖V‖ and, when known, its Fourier transform Ṽ.

    Ṽ(w) = (2π)^{-1/2} ∫ V(x) e^{-iwx} dx.
    """

    name: str
    v: RealFunction
    sup_norm: float
    kind: Literal["closed-form", "sampled"] = "closed-form"
    v_hat: Callable[[np.ndarray], np.ndarray] | None = None
    support_radius: float | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x: np.ndarray | float) -> np.ndarray:
        return np.asarray(self.v(np.asarray(x, dtype=float)), dtype=float)

    @property
    def has_fourier(self) -> bool:
        return self.v_hat is not None

    def fourier(self, w: np.ndarray | float) -> np.ndarray:
        if self.v_hat is None:
            raise FourierClosureError(f"Potential '{self.name}' ({self.kind}) has no Fourier transform")
        return np.asarray(self.v_hat(np.asarray(w, dtype=float)), dtype=complex)

    def require_zero_mean(self, tol: float = 1e-12) -> None:
        """Cocycle kernels need Ṽ(0) = 0, i.e. ∫ V = 0."""
        value = abs(complex(self.fourier(0.0)))
        if value > tol:
            raise FourierClosureError(f"Potential '{self.name}' has Ṽ(0) = {value:.3e}; ∫V must vanish")

    def scaled(self, factor: float) -> Potential:
        v, v_hat = self.v, self.v_hat
        return Potential(
            name=f"{factor:g}·{self.name}",
            v=lambda x: factor * v(x),
            sup_norm=abs(factor) * self.sup_norm,
            kind=self.kind,
            v_hat=None if v_hat is None else (lambda w: factor * v_hat(w)),
            support_radius=self.support_radius,
            params={**self.params, "scale": factor * self.params.get("scale", 1.0)},
        )


@dataclass(frozen=True)
class LatticeModel:
    """Oscillator chain on sites 0..sites−1 with ``cutoff`` levels per site and nearest-neighbour V."""

    sites: int
    cutoff: int
    potential: Potential
    dimension_limit: int = 1_000_000

    def __post_init__(self) -> None:
        if self.sites < 1:
            raise ValueError(f"Lattice needs at least one site, got {self.sites}")
        if self.cutoff < 2:
            raise ValueError(f"Cutoff must be at least 2, got {self.cutoff}")
        if self.dimension(self.sites) > self.dimension_limit:
            raise DimensionBudgetExceeded(
                f"{self.cutoff}^{self.sites} exceeds the solver budget {self.dimension_limit}"
            )

    def dimension(self, sites: int) -> int:
        return self.cutoff**sites

    def region(self, sites: int) -> range:
        """Λ_k: the first k sites."""
        if not 1 <= sites <= self.sites:
            raise ValueError(f"Region of {sites} sites is not inside a lattice of {self.sites}")
        return range(sites)


@dataclass(frozen=True, eq=False)
class GroundStateResult:
    energy: float
    vector: np.ndarray
    gap: float
    residual: float
    dimension: int
    solver: Literal["dense", "lanczos"]
