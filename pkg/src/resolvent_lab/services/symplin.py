"""Symplectic linear algebra: σ, symplectic bases, complements and the regularity decomposition.

Bases are returned in the order q₁, p₁, …, q_n, p_n with σ(p_i, q_j) = δ_ij.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..core.config import settings
from ..core.errors import (
    DegenerateFormError,
    DependentVectorsError,
    InconsistentRegularityData,
    NonIsotropicError,
    OddDimensionError,
)
from ..models.symplectic import FieldVector, Subspace, SymplecticSpace
from ..utils import linalg
from ..utils.linalg import Scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegularityDecomposition:
    q: Subspace
    reg: Subspace
    sing: Subspace

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.q.dim, self.reg.dim, self.sing.dim


def sigma(space: SymplecticSpace, f: FieldVector, g: FieldVector) -> Scalar:
    """σ(f, g) = fᵀ·form·g."""
    space.check(f, g)
    return linalg.bilinear(f.coords, space.form, g.coords)


def _is_zero(value: Scalar, scale: float = 1.0) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= settings.RANK_RTOL * max(scale, 1.0)


def _scale(value: Scalar, vec: FieldVector) -> FieldVector:
    return FieldVector(tuple(value * c for c in vec.coords))


def _project(space: SymplecticSpace, v: FieldVector, qs: list[FieldVector], ps: list[FieldVector]) -> FieldVector:
    """v_S(v) = Σ σ(v, q_i) p_i + σ(p_i, v) q_i, the component of v in S = span{q_i, p_i}."""
    result = FieldVector(tuple(0 * c for c in v.coords))
    for q, p in zip(qs, ps, strict=True):
        result = result + _scale(sigma(space, v, q), p) + _scale(sigma(space, p, v), q)
    return result


def gram_matrix(space: SymplecticSpace, vectors: Sequence[FieldVector]) -> list[list[Scalar]]:
    return [[sigma(space, a, b) for b in vectors] for a in vectors]


def canonical_gram(modes: int, exact: bool = True) -> list[list[Scalar]]:
    """Gram matrix of q₁, p₁, … under σ(p_i, q_i) = 1."""
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    gram = [[zero] * (2 * modes) for _ in range(2 * modes)]
    for l in range(modes):
        gram[2 * l + 1][2 * l] = one
        gram[2 * l][2 * l + 1] = -one
    return gram


def gram_defect(space: SymplecticSpace, basis: Sequence[FieldVector]) -> float:
    """Max deviation of the basis Gram matrix from canonical form (0 means exact)."""
    gram = np.array(gram_matrix(space, basis), dtype=float)
    target = np.array(canonical_gram(len(basis) // 2, exact=False), dtype=float)
    return float(np.max(np.abs(gram - target), initial=0.0))


def symplectic_basis(space: SymplecticSpace) -> list[FieldVector]:
    """Minimal-index construction: p = e_m − v_S(e_m) for the smallest m outside S, then q from the smallest l with σ(p, e_l) ≠ 0."""
    if space.dim % 2:
        raise OddDimensionError(f"No symplectic basis in odd dimension {space.dim}")
    qs: list[FieldVector] = []
    ps: list[FieldVector] = []
    units = [space.unit(i) for i in range(space.dim)]
    while 2 * len(qs) < space.dim:
        span = [v.coords for pair in zip(qs, ps, strict=True) for v in pair]
        m = next(i for i, e in enumerate(units) if not linalg.in_span(e.coords, span, settings.RANK_RTOL))
        p = units[m] - _project(space, units[m], qs, ps)
        pairings = [sigma(space, p, e) for e in units]
        scale = max(abs(float(x)) for x in pairings)
        l = next((i for i, x in enumerate(pairings) if not _is_zero(x, scale)), None)
        if l is None:
            raise DegenerateFormError(f"Vector {p} is σ-orthogonal to the whole space")
        q_tilde = units[l] - _project(space, units[l], qs, ps)
        q = _scale(1 / sigma(space, p, q_tilde), q_tilde)
        logger.debug(f"Basis pair {len(qs) + 1}: pivot e_{m + 1}, partner e_{l + 1}")
        qs.append(q)
        ps.append(p)
    return [v for pair in zip(qs, ps, strict=True) for v in pair]


def complete_to_symplectic(space: SymplecticSpace, isotropic: Sequence[FieldVector]) -> list[FieldVector]:
    """Conjugates p₁, …, p_k for σ-null independent q₁, …, q_k.

    Each p_j solves the linear system σ(p, q_j) = 1, σ(p, q_i) = 0 (i ≠ j), σ(p, p_i) = 0 (i < j).
    """
    space.check(*isotropic)
    rows = [q.coords for q in isotropic]
    if rows and not linalg.independent(rows, settings.RANK_RTOL):
        raise DependentVectorsError("Isotropic input vectors are linearly dependent")
    for i, a in enumerate(isotropic):
        for b in isotropic[i + 1 :]:
            value = sigma(space, a, b)
            if not _is_zero(value):
                raise NonIsotropicError(f"σ({a}, {b}) = {value} ≠ 0")

    def annihilator_row(v: FieldVector) -> tuple[Scalar, ...]:
        # σ(p, v) = pᵀ·form·v, so the constraint row is (form·v)ᵀ
        return linalg.mat_vec(space.form, v.coords)

    exact = space.exact and all(q.exact for q in isotropic)
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    conjugates: list[FieldVector] = []
    for j in range(len(isotropic)):
        constraints = [annihilator_row(q) for q in isotropic] + [annihilator_row(p) for p in conjugates]
        rhs = [one if i == j else zero for i in range(len(isotropic))] + [zero] * len(conjugates)
        solution = linalg.solve(constraints, rhs, space.dim, settings.RANK_RTOL)
        conjugates.append(FieldVector(solution))
    return conjugates


def symplectic_complement(space: SymplecticSpace, s: Subspace) -> Subspace:
    """S^⊥ = {f : σ(f, s) = 0 for all s ∈ S}."""
    space.check(*s.basis)
    rows = [linalg.mat_vec(space.form, v.coords) for v in s.basis]
    return Subspace(tuple(FieldVector(v) for v in linalg.nullspace(rows, space.dim, settings.RANK_RTOL)))


def intersection(space: SymplecticSpace, a: Subspace, b: Subspace) -> Subspace:
    vectors = linalg.intersect(a.rows(), b.rows(), space.dim, settings.RANK_RTOL)
    return Subspace(tuple(FieldVector(v) for v in vectors))


def is_symplectic_subspace(space: SymplecticSpace, s: Subspace) -> bool:
    if not s.dim:
        return True
    gram = gram_matrix(space, s.basis)
    return linalg.rank(gram, settings.RANK_RTOL) == s.dim


def regularity_decomposition(space: SymplecticSpace, x_r: Subspace, x_t: Subspace) -> RegularityDecomposition:
    """X = Q ⊕ (Q^⊥ ∩ X_R) ⊕ (Q^⊥ ∩ X_R^⊥) with Q spanned by X_T and its conjugates."""
    space.check(*x_r.basis, *x_t.basis)
    if not x_r.contains_subspace(x_t):
        raise InconsistentRegularityData("X_T is not contained in X_R")
    for t in x_t.basis:
        for r in x_r.basis:
            if not _is_zero(sigma(space, t, r)):
                raise InconsistentRegularityData(f"σ(X_T, X_R) ≠ 0 at ({t}, {r})")
    x_r_perp = symplectic_complement(space, x_r)
    radical = intersection(space, x_r, x_r_perp)
    if radical.dim != x_t.dim:
        raise InconsistentRegularityData(f"X_R ∩ X_R^⊥ has dimension {radical.dim}, expected dim X_T = {x_t.dim}")

    conjugates = complete_to_symplectic(space, list(x_t.basis))
    q = Subspace(tuple(v for pair in zip(x_t.basis, conjugates, strict=True) for v in pair))
    q_perp = symplectic_complement(space, q)
    reg = intersection(space, q_perp, x_r)
    sing = intersection(space, q_perp, x_r_perp)
    logger.debug(f"Regularity decomposition dims Q={q.dim} reg={reg.dim} sing={sing.dim}")
    return RegularityDecomposition(q=q, reg=reg, sing=sing)


def decomposition_defects(space: SymplecticSpace, parts: Sequence[Subspace]) -> tuple[int, float]:
    """(rank of all bases stacked, max |σ| between distinct parts)."""
    stacked = [v.coords for part in parts for v in part.basis]
    total_rank = linalg.rank(stacked, settings.RANK_RTOL)
    worst = 0.0
    for i, a in enumerate(parts):
        for b in parts[i + 1 :]:
            for u in a.basis:
                for v in b.basis:
                    worst = max(worst, abs(float(sigma(space, u, v))))
    return total_rank, worst


def split(space: SymplecticSpace, s: Subspace, vector: FieldVector) -> tuple[FieldVector, FieldVector]:
    """Decompose a vector along X = S ⊕ S^⊥ for nondegenerate S."""
    complement = symplectic_complement(space, s)
    basis = [*s.basis, *complement.basis]
    columns = [tuple(v.coords[r] for v in basis) for r in range(space.dim)]
    coeffs = linalg.solve(columns, vector.coords, len(basis), settings.RANK_RTOL)
    k = s.dim
    zero = space.zero()
    s_part = FieldVector(linalg.combine(coeffs[:k], [v.coords for v in s.basis])) if k else zero
    rest = complement.basis
    perp_part = FieldVector(linalg.combine(coeffs[k:], [v.coords for v in rest])) if rest else zero
    return s_part, perp_part


def basis_matrix(basis: Sequence[FieldVector]) -> np.ndarray:
    """Columns q₁, p₁, … as a float matrix."""
    return np.column_stack([v.as_array() for v in basis])
