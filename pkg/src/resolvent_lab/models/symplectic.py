from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..core.config import settings
from ..core.errors import DegenerateFormError, DependentVectorsError, DimensionMismatch, OddDimensionError
from ..utils import linalg
from ..utils.linalg import Scalar


@dataclass(frozen=True)
class FieldVector:
    """Test function f ∈ X, given by its coordinates in the space's coordinate basis."""

    coords: tuple[Scalar, ...]

    @classmethod
    def of(cls, values: Iterable) -> FieldVector:
        return cls(tuple(linalg.to_scalar(v) for v in values))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def exact(self) -> bool:
        return linalg.is_exact(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords], dtype=float)

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact:
            return all(c == 0 for c in self.coords)
        return bool(np.max(np.abs(self.as_array()), initial=0.0) <= tol)

    def _check(self, other: FieldVector) -> None:
        if other.dim != self.dim:
            raise DimensionMismatch(f"Vectors of dimension {self.dim} and {other.dim}")

    def __add__(self, other: FieldVector) -> FieldVector:
        self._check(other)
        return FieldVector(tuple(a + b for a, b in zip(self.coords, other.coords, strict=True)))

    def __sub__(self, other: FieldVector) -> FieldVector:
        self._check(other)
        return FieldVector(tuple(a - b for a, b in zip(self.coords, other.coords, strict=True)))

    def __neg__(self) -> FieldVector:
        return FieldVector(tuple(-a for a in self.coords))

    def __rmul__(self, scalar) -> FieldVector:
        scalar = linalg.to_scalar(scalar)
        return FieldVector(tuple(scalar * a for a in self.coords))

    def __repr__(self) -> str:
        return f"FieldVector({', '.join(str(c) for c in self.coords)})"


@dataclass(frozen=True)
class SymplecticSpace:
    """Finite-dimensional real space with a nondegenerate antisymmetric form σ."""

    form: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self) -> None:
        dim = len(self.form)
        if dim == 0 or any(len(row) != dim for row in self.form):
            raise DimensionMismatch("Form must be a nonempty square matrix")
        if self.exact:
            antisymmetric = all(self.form[i][j] == -self.form[j][i] for i in range(dim) for j in range(dim))
        else:
            matrix = linalg.to_array(self.form)
            antisymmetric = bool(np.max(np.abs(matrix + matrix.T)) <= 1e-12)
        if not antisymmetric:
            raise DegenerateFormError("Form is not antisymmetric")
        if dim % 2:
            raise OddDimensionError(f"Form on an odd dimension ({dim}) is always degenerate; no symplectic basis exists")
        if linalg.rank(self.form, settings.RANK_RTOL) < dim:
            raise DegenerateFormError("Form is singular")

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence]) -> SymplecticSpace:
        return cls(tuple(tuple(linalg.to_scalar(v) for v in row) for row in matrix))

    @classmethod
    def standard(cls, modes: int) -> SymplecticSpace:
        """ℝ^{2n} with σ(e_{2l-1}, e_{2l}) = 1 on each coordinate pair."""
        dim = 2 * modes
        rows = [[Fraction(0)] * dim for _ in range(dim)]
        for l in range(modes):
            rows[2 * l][2 * l + 1] = Fraction(1)
            rows[2 * l + 1][2 * l] = Fraction(-1)
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dim(self) -> int:
        return len(self.form)

    @property
    def modes(self) -> int:
        return self.dim // 2

    @property
    def exact(self) -> bool:
        return linalg.rows_exact(self.form)

    def form_array(self) -> np.ndarray:
        return linalg.to_array(self.form)

    def vector(self, *coords) -> FieldVector:
        vec = FieldVector.of(coords)
        self.check(vec)
        return vec

    def unit(self, index: int) -> FieldVector:
        one, zero = (Fraction(1), Fraction(0)) if self.exact else (1.0, 0.0)
        return FieldVector(tuple(one if i == index else zero for i in range(self.dim)))

    def zero(self) -> FieldVector:
        return FieldVector(tuple(Fraction(0) for _ in range(self.dim)))

    def check(self, *vectors: FieldVector) -> None:
        for vec in vectors:
            if vec.dim != self.dim:
                raise DimensionMismatch(f"Vector of dimension {vec.dim} in a space of dimension {self.dim}")


@dataclass(frozen=True)
class Subspace:
    """Span of linearly independent field vectors."""

    basis: tuple[FieldVector, ...]

    def __post_init__(self) -> None:
        dims = {v.dim for v in self.basis}
        if len(dims) > 1:
            raise DimensionMismatch("Basis vectors of different dimensions")
        if self.basis and not linalg.independent([v.coords for v in self.basis], settings.RANK_RTOL):
            raise DependentVectorsError("Subspace basis is linearly dependent")

    @classmethod
    def span(cls, vectors: Iterable[FieldVector]) -> Subspace:
        """Subspace spanned by possibly dependent vectors."""
        vectors = [v for v in vectors]
        basis = linalg.extract_basis([v.coords for v in vectors], settings.RANK_RTOL)
        return cls(tuple(FieldVector(b) for b in basis))

    @classmethod
    def whole(cls, space: SymplecticSpace) -> Subspace:
        return cls(tuple(space.unit(i) for i in range(space.dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def rows(self) -> list[tuple[Scalar, ...]]:
        return [v.coords for v in self.basis]

    def contains(self, vector: FieldVector) -> bool:
        return linalg.in_span(vector.coords, self.rows(), settings.RANK_RTOL)

    def contains_subspace(self, other: Subspace) -> bool:
        return all(self.contains(v) for v in other.basis)

    def __len__(self) -> int:
        return len(self.basis)
