from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .symplectic import Subspace, SymplecticSpace


@dataclass(frozen=True, eq=False)
class QuasifreeCovariance:
    """⟨e_i|e_j⟩_ω on the coordinate basis; ⟨f|g⟩_ω = f̄ᵀ·matrix·g."""

    space: SymplecticSpace
    matrix: np.ndarray

    def two_point(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(np.conj(f) @ self.matrix @ g)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True)
class DiracConstraintSet:
    """First-class constraint subspace C with σ(C, C) = 0."""

    space: SymplecticSpace
    constraints: Subspace


class Undetermined(Enum):
    """Dirac state value fixed only by the choice of Hahn–Banach extension."""

    UNDETERMINED = "undetermined"

    def __repr__(self) -> str:
        return "UNDETERMINED"


UNDETERMINED = Undetermined.UNDETERMINED


@dataclass(frozen=True)
class QuadratureValue:
    value: complex
    error: float
