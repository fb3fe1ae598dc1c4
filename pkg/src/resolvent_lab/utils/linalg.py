"""Exact (sympy) and floating-point (numpy/scipy) linear algebra over coordinate rows.

Matrices are passed around as sequences of rows. A computation runs exactly when every
entry is a ``Fraction``; otherwise it falls back to floats with a relative rank tolerance
measured against the largest singular value.
"""

import logging
from collections.abc import Sequence
from fractions import Fraction
from numbers import Rational

import numpy as np
import scipy.linalg
import sympy

logger = logging.getLogger(__name__)

Scalar = Fraction | float
Rows = Sequence[Sequence[Scalar]]


def to_scalar(value) -> Scalar:
    """Coerce ints, Fractions and "p/q" strings to Fraction, everything else to float."""
    if isinstance(value, bool):
        raise TypeError("Booleans are not coordinates")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return Fraction(value)
    return float(value)


def is_exact(values: Sequence[Scalar]) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def rows_exact(rows: Rows) -> bool:
    return all(is_exact(row) for row in rows)


def zero_like(values: Sequence[Scalar]) -> Scalar:
    return Fraction(0) if is_exact(values) else 0.0


def to_sympy(rows: Rows) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rows])


def from_sympy_vector(vec: sympy.Matrix) -> tuple[Fraction, ...]:
    return tuple(to_scalar(sympy.Rational(v)) for v in vec)


def to_array(rows: Rows, ncols: int = 0) -> np.ndarray:
    if not rows:
        return np.zeros((0, ncols))
    return np.array([[float(v) for v in row] for row in rows], dtype=float)


def rank(rows: Rows, rtol: float) -> int:
    if not rows:
        return 0
    if rows_exact(rows):
        return to_sympy(rows).rank()
    matrix = to_array(rows)
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular.size == 0 or singular[0] == 0.0:
        return 0
    return int(np.linalg.matrix_rank(matrix, tol=rtol * singular[0]))


def _identity(ncols: int) -> list[tuple[Scalar, ...]]:
    return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]


def nullspace(rows: Rows, ncols: int, rtol: float) -> list[tuple[Scalar, ...]]:
    """Basis of {x : rows·x = 0}."""
    if not rows:
        return _identity(ncols)
    if rows_exact(rows):
        return [from_sympy_vector(v) for v in to_sympy(rows).nullspace()]
    matrix = to_array(rows, ncols)
    if not np.any(matrix):
        return _identity(ncols)
    basis = scipy.linalg.null_space(matrix, rcond=rtol)
    return [tuple(float(x) for x in basis[:, k]) for k in range(basis.shape[1])]


def solve(rows: Rows, rhs: Sequence[Scalar], ncols: int, rtol: float) -> tuple[Scalar, ...]:
    """One solution of rows·x = rhs: free parameters set to zero (exact) or minimum norm (float)."""
    if rows_exact(rows) and is_exact(rhs):
        matrix = to_sympy(rows)
        target = sympy.Matrix([sympy.Rational(v.numerator, v.denominator) for v in rhs])
        try:
            solution, params = matrix.gauss_jordan_solve(target)
        except ValueError as exc:
            raise ValueError("Linear system is inconsistent") from exc
        if params.shape[0]:
            solution = solution.subs({p: 0 for p in params})
        return from_sympy_vector(solution)
    matrix = to_array(rows, ncols)
    target = np.array([float(v) for v in rhs])
    solution, *_ = np.linalg.lstsq(matrix, target, rcond=None)
    if np.linalg.norm(matrix @ solution - target) > 1e3 * rtol * max(1.0, float(np.linalg.norm(target))):
        raise ValueError("Linear system is inconsistent")
    return tuple(float(x) for x in solution)


def independent(vectors: Rows, rtol: float) -> bool:
    return rank(vectors, rtol) == len(vectors)


def in_span(vector: Sequence[Scalar], basis: Rows, rtol: float) -> bool:
    if not basis:
        return rank([vector], rtol) == 0
    return rank([*basis, vector], rtol) == rank(basis, rtol)


def extract_basis(vectors: Rows, rtol: float) -> list[tuple[Scalar, ...]]:
    """Greedy maximal independent subset, in input order."""
    basis: list[tuple[Scalar, ...]] = []
    for v in vectors:
        if independent([*basis, v], rtol):
            basis.append(tuple(v))
    return basis


def combine(coeffs: Sequence[Scalar], vectors: Rows) -> tuple[Scalar, ...]:
    """Σ coeffs[i]·vectors[i]."""
    ncols = len(vectors[0])
    start = zero_like([*coeffs, *[x for v in vectors for x in v]])
    return tuple(sum((coeffs[i] * vectors[i][r] for i in range(len(vectors))), start=start) for r in range(ncols))


def intersect(first: Rows, second: Rows, ncols: int, rtol: float) -> list[tuple[Scalar, ...]]:
    """Basis of span(first) ∩ span(second), from the kernel of [A | -B]."""
    if not first or not second:
        return []
    columns = [*first, *[tuple(-v for v in row) for row in second]]
    block = [tuple(col[r] for col in columns) for r in range(ncols)]
    kernel = nullspace(block, len(columns), rtol)
    k = len(first)
    return extract_basis([combine(coeffs[:k], first) for coeffs in kernel], rtol)


def bilinear(left: Sequence[Scalar], form: Rows, right: Sequence[Scalar]) -> Scalar:
    """leftᵀ·form·right, exact when every input is."""
    total = zero_like([*left, *right, *[x for row in form for x in row]])
    for i, li in enumerate(left):
        if li == 0:
            continue
        row = form[i]
        for j, rj in enumerate(right):
            if row[j] != 0 and rj != 0:
                total += li * row[j] * rj
    return total


def mat_vec(matrix: Rows, vector: Sequence[Scalar]) -> tuple[Scalar, ...]:
    start = zero_like([*vector, *[x for row in matrix for x in row]])
    return tuple(sum((row[j] * vector[j] for j in range(len(vector))), start=start) for row in matrix)
