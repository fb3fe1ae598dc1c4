"""Truncated multi-mode Fock representation: fields, resolvents, Weyl operators, Laplace transforms.

Identities that involve unbounded fields are only asserted on low-level compressions, the
span of oscillator levels below a fraction of the cutoff in every mode.
"""

import logging
import struct
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from ..core.config import Tolerances, settings
from ..core.errors import DimensionBudgetExceeded, InvalidBasisError, InvalidGeneratorError, QuadratureError, SolverError
from ..models.algebra import ResolventGenerator, ResolventPoly
from ..models.representation import OperatorMatrix, TruncatedRep
from ..models.symplectic import FieldVector, SymplecticSpace
from . import symplin

logger = logging.getLogger(__name__)

DUMP_HEADER = struct.Struct("<IIII")


@dataclass(frozen=True)
class LaplaceResult:
    matrix: OperatorMatrix
    error: float
    horizon: float


@lru_cache(maxsize=64)
def ladder(cutoff: int) -> scipy.sparse.csr_matrix:
    """Annihilation operator a with a|n⟩ = √n |n−1⟩ on levels 0..cutoff−1."""
    return scipy.sparse.diags(np.sqrt(np.arange(1, cutoff, dtype=float)), 1, format="csr")


@lru_cache(maxsize=64)
def single_mode_fields(cutoff: int) -> tuple[scipy.sparse.csr_matrix, scipy.sparse.csr_matrix]:
    """(Q, P) on one truncated mode, shared read-only across reps."""
    a = ladder(cutoff)
    q = ((a + a.T) / np.sqrt(2.0)).astype(complex)
    p = (1j * (a.T - a) / np.sqrt(2.0)).astype(complex)
    return q.tocsr(), p.tocsr()


def _embed(op: scipy.sparse.spmatrix, mode: int, modes: int, cutoff: int) -> scipy.sparse.csr_matrix:
    left = scipy.sparse.identity(cutoff**mode, format="csr")
    right = scipy.sparse.identity(cutoff ** (modes - mode - 1), format="csr")
    return scipy.sparse.kron(scipy.sparse.kron(left, op), right, format="csr")


def build_rep(space: SymplecticSpace, basis: Sequence[FieldVector] | None = None, cutoff: int = 32) -> TruncatedRep:
    """Fock representation π₀ w.r.t. a symplectic basis q₁, p₁, …, truncated at ``cutoff`` levels per mode."""
    if cutoff < 2:
        raise ValueError(f"Cutoff must be at least 2, got {cutoff}")
    basis = list(basis) if basis is not None else symplin.symplectic_basis(space)
    space.check(*basis)
    if len(basis) != space.dim or symplin.gram_defect(space, basis) > 1e-10:
        raise InvalidBasisError("Basis is not a symplectic basis of the space")
    coefficient_map = np.linalg.inv(symplin.basis_matrix(basis))
    modes = space.modes
    q1, p1 = single_mode_fields(cutoff)
    q_ops = tuple(_embed(q1, l, modes, cutoff) for l in range(modes))
    p_ops = tuple(_embed(p1, l, modes, cutoff) for l in range(modes))
    logger.debug(f"Built Fock representation: modes={modes}, cutoff={cutoff}, dimension={cutoff**modes}")
    return TruncatedRep(space, tuple(basis), cutoff, coefficient_map, q_ops, p_ops)


def _check_dense(rep: TruncatedRep) -> None:
    if rep.dimension > settings.DENSE_DIMENSION_LIMIT:
        raise DimensionBudgetExceeded(
            f"Dimension {rep.dimension} exceeds the dense limit {settings.DENSE_DIMENSION_LIMIT}; use resolvent_solve"
        )


def _wrap(rep: TruncatedRep, data: np.ndarray, label: str = "") -> OperatorMatrix:
    return OperatorMatrix(data, rep.cutoff, rep.modes, label)


def field_operator(rep: TruncatedRep, f: FieldVector) -> scipy.sparse.csr_matrix:
    """φ(f) = Σ x_l P_l + y_l Q_l as a sparse matrix."""
    rep.space.check(f)
    x, y = rep.mode_coefficients(f)
    result = scipy.sparse.csr_matrix((rep.dimension, rep.dimension), dtype=complex)
    for l in range(rep.modes):
        if x[l]:
            result = result + x[l] * rep.p_ops[l]
        if y[l]:
            result = result + y[l] * rep.q_ops[l]
    return result


def field_matrix(rep: TruncatedRep, f: FieldVector) -> OperatorMatrix:
    _check_dense(rep)
    return _wrap(rep, field_operator(rep, f).toarray(), f"φ{f}")


def vacuum(rep: TruncatedRep) -> np.ndarray:
    psi = np.zeros(rep.dimension, dtype=complex)
    psi[0] = 1.0
    return psi


def _check_z(z: complex) -> complex:
    z = complex(z)
    if z.real == 0.0:
        raise InvalidGeneratorError(f"Spectral parameter {z} lies on the imaginary axis")
    return z


def resolvent_matrix(rep: TruncatedRep, z: complex, f: FieldVector) -> OperatorMatrix:
    """R(z, f) = (iz𝟙 − φ(f))⁻¹ by dense LU."""
    z = _check_z(z)
    _check_dense(rep)
    system = 1j * z * np.eye(rep.dimension) - field_operator(rep, f).toarray()
    try:
        result = scipy.linalg.solve(system, np.eye(rep.dimension, dtype=complex))
    except scipy.linalg.LinAlgError as exc:
        logger.error(f"Resolvent solve failed at z={z}: {exc}")
        raise SolverError(f"Resolvent solve failed at z={z}") from exc
    return _wrap(rep, result, f"R({z}, {f})")


def resolvent_solve(rep: TruncatedRep, z: complex, f: FieldVector, rhs: np.ndarray, tol: float | None = None) -> np.ndarray:
    """R(z, f)·rhs without forming the matrix; sparse LU above the dense limit."""
    z = _check_z(z)
    tol = settings.SPARSE_TOL if tol is None else tol
    system = (1j * z * scipy.sparse.identity(rep.dimension, format="csc")) - field_operator(rep, f).tocsc()
    solution = scipy.sparse.linalg.spsolve(system, rhs)
    residual = float(np.linalg.norm(system @ solution - rhs))
    if residual > tol * max(1.0, float(np.linalg.norm(rhs))):
        raise SolverError(f"Sparse resolvent residual {residual:.3e} above {tol:.1e}")
    return solution


def weyl_matrix(rep: TruncatedRep, f: FieldVector) -> OperatorMatrix:
    """W(f) = exp(iφ(f)) through the Hermitian eigendecomposition of φ(f)."""
    phi = field_matrix(rep, f).data
    values, vectors = scipy.linalg.eigh(phi)
    return _wrap(rep, (vectors * np.exp(1j * values)) @ vectors.conj().T, f"W{f}")


def laplace_resolvent(
    rep: TruncatedRep, lam: float, f: FieldVector, tolerances: Tolerances | None = None, levels: int | None = None
) -> LaplaceResult:
    """R(λ, f) = −iσ ∫₀^∞ e^{−|λ|s} W(−σ s f) ds with σ = sign λ, by adaptive Gauss–Kronrod on [0, T].

    Each node evaluates ``weyl_matrix``; T is chosen so that e^{−|λ|T} < 1e-12. With ``levels``
    only the low-level block is integrated and the entries outside it are left zero, so the result
    is meant for comparison under ``compressed_norm`` with the same ``levels``.
    """
    if lam == 0:
        raise InvalidGeneratorError("Laplace transform needs λ ≠ 0")
    tolerances = tolerances or Tolerances.from_settings()
    sign = 1.0 if lam > 0 else -1.0
    rate = abs(lam)
    horizon = -np.log(1e-12) / rate
    idx = low_level_indices(rep, levels) if levels is not None else np.arange(rep.dimension)
    block = np.ix_(idx, idx)

    def integrand(s: float) -> np.ndarray:
        w = weyl_matrix(rep, (-sign * s) * f).data[block]
        values = np.exp(-rate * s) * w.ravel()
        return np.concatenate([values.real, values.imag])

    stacked, error = scipy.integrate.quad_vec(
        integrand, 0.0, horizon, epsabs=tolerances.quad_epsabs, epsrel=tolerances.quad_epsrel, limit=4000
    )
    if not np.isfinite(error) or error > 1e-6:
        raise QuadratureError(f"Laplace quadrature for λ={lam} did not converge", float(error))
    size = idx.size * idx.size
    result = np.zeros((rep.dimension, rep.dimension), dtype=complex)
    result[block] = (-1j * sign * (stacked[:size] + 1j * stacked[size:])).reshape(idx.size, idx.size)
    logger.debug(f"Laplace transform λ={lam}: horizon={horizon:.2f}, error={error:.2e}, block={idx.size}")
    return LaplaceResult(_wrap(rep, result, f"L({lam}, {f})"), float(error), float(horizon))


def regular_limit_defect(rep: TruncatedRep, lam: float, f: FieldVector, psi: np.ndarray) -> float:
    """‖iλR(λ, f)Ψ − Ψ‖, which tends to 0 as λ → ∞ in a regular representation."""
    image = resolvent_solve(rep, lam, f, psi.astype(complex))
    return float(np.linalg.norm(1j * lam * image - psi))


def compact_product_hs(rep: TruncatedRep, pairs: Sequence[tuple[float, FieldVector, float, FieldVector]]) -> float:
    """Hilbert–Schmidt norm of ∏ R(λ_i, p_i) R(μ_i, q_i)."""
    product = np.eye(rep.dimension, dtype=complex)
    for lam, p, mu, q in pairs:
        product = product @ resolvent_matrix(rep, lam, p).data @ resolvent_matrix(rep, mu, q).data
    return float(np.linalg.norm(product, "fro"))


def generator_matrix(rep: TruncatedRep, gen: ResolventGenerator) -> np.ndarray:
    return resolvent_matrix(rep, gen.z, FieldVector(gen.f)).data


def poly_matrix(rep: TruncatedRep, p: ResolventPoly) -> OperatorMatrix:
    """π(p) as a dense matrix; each distinct generator is inverted once."""
    cache: dict[ResolventGenerator, np.ndarray] = {}
    total = np.zeros((rep.dimension, rep.dimension), dtype=complex)
    for term in p.terms:
        block = np.eye(rep.dimension, dtype=complex)
        for gen in term.factors:
            if gen not in cache:
                cache[gen] = generator_matrix(rep, gen)
            block = block @ cache[gen]
        total += term.coeff * block
    return _wrap(rep, total, "π(p)")


def evaluate_state(rep: TruncatedRep, psi: np.ndarray, p: ResolventPoly) -> complex:
    """⟨Ψ, π(p)Ψ⟩, applying the factors of each monomial right to left."""
    factorizations: dict[ResolventGenerator, tuple] = {}
    psi = psi.astype(complex)
    value = 0.0 + 0.0j
    dense = rep.dimension <= settings.DENSE_DIMENSION_LIMIT
    for term in p.terms:
        vec = psi
        for gen in reversed(term.factors):
            if not dense:
                vec = resolvent_solve(rep, gen.z, FieldVector(gen.f), vec)
                continue
            if gen not in factorizations:
                system = 1j * gen.z * np.eye(rep.dimension) - field_operator(rep, FieldVector(gen.f)).toarray()
                factorizations[gen] = scipy.linalg.lu_factor(system)
            vec = scipy.linalg.lu_solve(factorizations[gen], vec)
        value += term.coeff * np.vdot(psi, vec)
    return complex(value)


def low_level_indices(rep: TruncatedRep, levels: int | None = None) -> np.ndarray:
    """Indices of product states with every mode occupation below ``levels``."""
    levels = levels or max(1, int(rep.cutoff * settings.COMPRESSION_FRACTION))
    grids = np.indices((rep.cutoff,) * rep.modes).reshape(rep.modes, -1)
    mask = np.all(grids < levels, axis=0)
    return np.flatnonzero(mask)


def low_level_projector(rep: TruncatedRep, levels: int | None = None) -> np.ndarray:
    projector = np.zeros((rep.dimension, rep.dimension))
    idx = low_level_indices(rep, levels)
    projector[idx, idx] = 1.0
    return projector


def compress(rep: TruncatedRep, matrix: OperatorMatrix | np.ndarray, levels: int | None = None) -> np.ndarray:
    data = matrix.data if isinstance(matrix, OperatorMatrix) else matrix
    idx = low_level_indices(rep, levels)
    return data[np.ix_(idx, idx)]


def compressed_norm(rep: TruncatedRep, matrix: OperatorMatrix | np.ndarray, levels: int | None = None) -> float:
    block = compress(rep, matrix, levels)
    return float(np.linalg.norm(block, 2)) if block.size else 0.0


def canonical_commutator_defect(rep: TruncatedRep, levels: int | None = None) -> float:
    """max_l ‖[Q_l, P_l] − i𝟙‖ on the low-level compression."""
    worst = 0.0
    identity = np.eye(rep.dimension)
    for q, p in zip(rep.q_ops, rep.p_ops, strict=True):
        comm = (q @ p - p @ q).toarray() - 1j * identity
        worst = max(worst, compressed_norm(rep, comm, levels))
    return worst


def weyl_relation_defect(rep: TruncatedRep, f: FieldVector, h: FieldVector, levels: int | None = None) -> float:
    """Compressed ‖W(f)W(h) − e^{−iσ(f,h)/2} W(f+h)‖."""
    phase = np.exp(-0.5j * float(symplin.sigma(rep.space, f, h)))
    diff = weyl_matrix(rep, f).data @ weyl_matrix(rep, h).data - phase * weyl_matrix(rep, f + h).data
    return compressed_norm(rep, diff, levels)


def weyl_adjoint_defect(
    rep: TruncatedRep, f: FieldVector, lam: float, h: FieldVector, levels: int | None = None
) -> float:
    """Compressed ‖W(f)R(λ, h)W(f)* − R(λ + iσ(h, f), h)‖."""
    w = weyl_matrix(rep, f).data
    lhs = w @ resolvent_matrix(rep, lam, h).data @ w.conj().T
    rhs = resolvent_matrix(rep, lam + 1j * float(symplin.sigma(rep.space, h, f)), h).data
    return compressed_norm(rep, lhs - rhs, levels)


def oracle_cutoffs(modes: int) -> tuple[int, int]:
    """Two cutoffs, the larger within the dense budget, used for refinement checks."""
    upper = int(np.floor(settings.DENSE_DIMENSION_LIMIT ** (1.0 / modes) + 1e-9))
    upper = min(upper, settings.ORACLE_MAX_CUTOFF)
    return max(2, upper // 2), upper


def dump_matrix(path: str | Path, matrix: OperatorMatrix) -> Path:
    """Debug dump: '<IIII' header (rows, cols, cutoff, modes) then row-major little-endian complex128."""
    path = Path(path)
    data = np.ascontiguousarray(matrix.data, dtype="<c16")
    rows, cols = data.shape
    with path.open("wb") as handle:
        handle.write(DUMP_HEADER.pack(rows, cols, matrix.cutoff, matrix.modes))
        handle.write(data.tobytes(order="C"))
    logger.debug(f"Dumped {rows}x{cols} matrix to {path}")
    return path


def load_matrix(path: str | Path) -> OperatorMatrix:
    raw = Path(path).read_bytes()
    rows, cols, cutoff, modes = DUMP_HEADER.unpack_from(raw)
    data = np.frombuffer(raw, dtype="<c16", offset=DUMP_HEADER.size).reshape(rows, cols)
    return OperatorMatrix(data.copy(), cutoff, modes, "loaded")
