from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .symplectic import FieldVector, SymplecticSpace


@dataclass(frozen=True, eq=False)
class TruncatedRep:
    """Fock representation truncated to ``cutoff`` levels per mode.

    ``q_ops[l]`` is Q_l = φ(p_l) and ``p_ops[l]`` is P_l = φ(q_l); the vacuum Ω₀ is basis state 0.
    """

    space: SymplecticSpace
    basis: tuple[FieldVector, ...]
    cutoff: int
    coefficient_map: np.ndarray
    q_ops: tuple[scipy.sparse.csr_matrix, ...]
    p_ops: tuple[scipy.sparse.csr_matrix, ...]

    @property
    def modes(self) -> int:
        return len(self.q_ops)

    @property
    def dimension(self) -> int:
        return self.cutoff**self.modes

    def mode_coefficients(self, f: FieldVector) -> tuple[np.ndarray, np.ndarray]:
        """(x_l, y_l) with f = Σ x_l q_l + y_l p_l."""
        c = self.coefficient_map @ f.as_array()
        return c[0::2], c[1::2]


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix on the truncated space, tagged with the truncation it came from."""

    data: np.ndarray
    cutoff: int
    modes: int
    label: str = field(default="")

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def adjoint(self) -> OperatorMatrix:
        return OperatorMatrix(self.data.conj().T, self.cutoff, self.modes, f"{self.label}†")

    def norm(self) -> float:
        return float(np.linalg.norm(self.data, 2))

    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.data, "fro"))

    def __matmul__(self, other: OperatorMatrix) -> OperatorMatrix:
        return OperatorMatrix(self.data @ other.data, self.cutoff, self.modes)

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        return OperatorMatrix(self.data - other.data, self.cutoff, self.modes)

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        return OperatorMatrix(self.data + other.data, self.cutoff, self.modes)
