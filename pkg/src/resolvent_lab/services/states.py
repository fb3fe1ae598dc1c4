"""Quasifree states from a covariance, Fock covariances, and Dirac constraint states."""

import logging
from collections.abc import Sequence

import numpy as np
import scipy.integrate
import scipy.linalg

from ..core.config import Tolerances, settings
from ..core.errors import ChainTooLongError, InvalidConstraintSet, InvalidCovarianceError, InvalidGeneratorError, QuadratureError
from ..models.algebra import Monomial, ResolventPoly
from ..models.representation import TruncatedRep
from ..models.states import UNDETERMINED, DiracConstraintSet, QuadratureValue, QuasifreeCovariance, Undetermined
from ..models.symplectic import FieldVector, Subspace, SymplecticSpace
from . import fockrep, symplin

logger = logging.getLogger(__name__)

# ⟨·|·⟩ of the Fock vacuum on one mode, coordinates (x, y) for f = x·q + y·p
FOCK_MODE_COVARIANCE = np.array([[0.5, -0.5j], [0.5j, 0.5]])


def covariance_from_matrix(space: SymplecticSpace, matrix: np.ndarray | Sequence, tol: float = 1e-12) -> QuasifreeCovariance:
    """Validate ⟨f|g⟩ − ⟨g|f⟩ = iσ(f, g) on basis pairs and positivity of the Hermitian part."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (space.dim, space.dim):
        raise InvalidCovarianceError(f"Covariance shape {matrix.shape} does not match dimension {space.dim}")
    scale = max(1.0, float(np.max(np.abs(matrix))))
    defect = float(np.max(np.abs(matrix - matrix.T - 1j * space.form_array())))
    if defect > tol * scale:
        raise InvalidCovarianceError(f"⟨f|g⟩ − ⟨g|f⟩ deviates from iσ(f, g) by {defect:.3e}")
    hermitian = 0.5 * (matrix + matrix.conj().T)
    lowest = float(np.min(scipy.linalg.eigvalsh(hermitian)))
    if lowest < -tol * scale:
        raise InvalidCovarianceError(f"Hermitian part is not positive semi-definite (eigenvalue {lowest:.3e})")
    return QuasifreeCovariance(space, matrix)


def fock_covariance(space: SymplecticSpace, basis: Sequence[FieldVector] | None = None) -> QuasifreeCovariance:
    """Covariance of the Fock vacuum: block-diagonal across modes in basis coordinates."""
    basis = list(basis) if basis is not None else symplin.symplectic_basis(space)
    to_modes = np.linalg.inv(symplin.basis_matrix(basis))
    block = scipy.linalg.block_diag(*[FOCK_MODE_COVARIANCE] * space.modes)
    return covariance_from_matrix(space, to_modes.T @ block @ to_modes, tol=1e-10)


def two_point(cov: QuasifreeCovariance, f: FieldVector, g: FieldVector) -> complex:
    return cov.two_point(f.as_array(), g.as_array())


def quasifree_weyl_value(cov: QuasifreeCovariance, f: FieldVector) -> complex:
    """ω(δ_f) = exp(−½⟨f|f⟩_ω)."""
    return complex(np.exp(-0.5 * two_point(cov, f, f)))


def _orient(chain: Sequence[tuple[float, FieldVector]]) -> tuple[float, list[tuple[float, FieldVector]]]:
    """R(λ, f) = −R(−λ, −f), so every λ can be made positive at the cost of a sign."""
    sign = 1.0
    oriented = []
    for lam, f in chain:
        if lam == 0:
            raise InvalidGeneratorError("Chain entries need λ ≠ 0")
        if lam < 0:
            sign = -sign
            oriented.append((-lam, -f))
        else:
            oriented.append((lam, f))
    return sign, oriented


def quasifree_resolvent_value(
    cov: QuasifreeCovariance,
    chain: Sequence[tuple[float, FieldVector]],
    tolerances: Tolerances | None = None,
    max_length: int | None = None,
) -> QuadratureValue:
    """ω(R(λ₁, f₁) ⋯ R(λ_n, f_n)) by iterated adaptive quadrature over the positive orthant."""
    tolerances = tolerances or Tolerances.from_settings()
    max_length = max_length or settings.MAX_CHAIN_LENGTH
    if len(chain) > max_length:
        raise ChainTooLongError(f"Chain of length {len(chain)} exceeds the maximum {max_length}")
    if not chain:
        return QuadratureValue(1.0 + 0.0j, 0.0)
    sign, oriented = _orient(chain)
    n = len(oriented)
    lams = np.array([lam for lam, _ in oriented])
    vectors = [f.as_array() for _, f in oriented]
    gram = np.array([[cov.two_point(a, b) for b in vectors] for a in vectors])
    upper = np.triu(gram, 1)
    diagonal = 0.5 * np.diag(gram)
    horizons = (12.0 + 6.0 * cov.norm) / lams
    # per-axis target, tightened along with the global quadrature tolerance
    axis_tol = settings.QUASIFREE_AXIS_TOL * tolerances.quad_epsabs / settings.QUAD_EPSABS

    def exponent(ts: np.ndarray) -> complex:
        return -(lams @ ts) - ts @ upper @ ts - diagonal @ (ts * ts)

    def integrate(prefix: tuple[float, ...]) -> np.ndarray:
        k = len(prefix)
        if k == n:
            value = np.exp(exponent(np.array(prefix)))
            return np.array([value.real, value.imag])

        def inner(t: float) -> np.ndarray:
            return integrate(prefix + (t,))

        result, _ = scipy.integrate.quad_vec(
            inner, 0.0, horizons[k], epsabs=axis_tol, epsrel=axis_tol
        )
        return result

    def outer(t: float) -> np.ndarray:
        return integrate((t,))

    stacked, error = scipy.integrate.quad_vec(
        outer, 0.0, horizons[0], epsabs=axis_tol, epsrel=axis_tol
    )
    # mass beyond the horizons, bounded by the exponential factor alone
    tail = sum(np.exp(-lams[k] * horizons[k]) / np.prod(lams) for k in range(n))
    total_error = float(error + tail)
    if not np.isfinite(stacked).all() or total_error > 1e-4:
        raise QuadratureError("Quasifree resolvent quadrature did not converge", total_error)
    value = sign * (-1j) ** n * complex(stacked[0], stacked[1])
    logger.debug(f"Quasifree value for chain of length {n}: {value} ± {total_error:.2e}")
    return QuadratureValue(value, total_error)


def fock_expectation(rep: TruncatedRep, chain: Sequence[tuple[float, FieldVector]]) -> complex:
    """⟨Ω₀, R(λ₁, f₁) ⋯ R(λ_n, f_n) Ω₀⟩ in the truncated Fock representation, by sparse solves right to left."""
    omega = fockrep.vacuum(rep)
    vec = omega
    for lam, f in reversed(chain):
        vec = fockrep.resolvent_solve(rep, lam, f, vec)
    return complex(np.vdot(omega, vec))


def constraint_set(space: SymplecticSpace, vectors: Sequence[FieldVector]) -> DiracConstraintSet:
    """Constraint subspace C; Dirac states exist iff σ(C, C) = 0."""
    subspace = Subspace.span(vectors)
    if not subspace.dim:
        raise InvalidConstraintSet("Constraint subspace must be nonzero")
    for i, a in enumerate(subspace.basis):
        for b in subspace.basis[i + 1 :]:
            if abs(float(symplin.sigma(space, a, b))) > settings.RANK_RTOL:
                raise InvalidConstraintSet(f"σ({a}, {b}) ≠ 0: constraints are not first class")
    return DiracConstraintSet(space, subspace)


def _pairs_with_constraints(c: DiracConstraintSet, f: FieldVector) -> bool:
    return any(abs(float(symplin.sigma(c.space, f, v))) > settings.RANK_RTOL for v in c.constraints.basis)


def dirac_state_value(c: DiracConstraintSet, m: Monomial, space: SymplecticSpace) -> complex | Undetermined:
    """Value of any Dirac state on a monomial, or UNDETERMINED where the extension is not unique.

    0 if some factor has σ(f_k, C) ≠ 0; ∏ 1/(iλ_k)·coeff if every f_k lies in C.
    """
    if c.space != space:
        raise InvalidConstraintSet("Constraint set belongs to a different space")
    factors = [(gen, FieldVector(gen.f)) for gen in m.factors]
    for gen, _ in factors:
        if gen.z.imag != 0.0:
            raise InvalidGeneratorError("Dirac state values need real spectral parameters")
    if any(_pairs_with_constraints(c, f) for _, f in factors):
        return 0.0 + 0.0j
    if all(f.is_zero(1e-12) or c.constraints.contains(f) for _, f in factors):
        value = complex(m.coeff)
        for gen, _ in factors:
            value *= 1.0 / (1j * gen.z.real)
        return value
    return UNDETERMINED


def dirac_poly_value(c: DiracConstraintSet, p: ResolventPoly, space: SymplecticSpace) -> complex | Undetermined:
    total = 0.0 + 0.0j
    for term in p.terms:
        value = dirac_state_value(c, term, space)
        if value is UNDETERMINED:
            return UNDETERMINED
        total += value
    return total


def dirac_derivative_check(rep: TruncatedRep, mu: float, g: FieldVector, h: float = 1e-3) -> float:
    """‖i(R(μ+h, g) − R(μ−h, g))/(2h) − R(μ, g)²‖, which is O(h²)."""
    if mu == 0:
        raise InvalidGeneratorError("μ must be nonzero")
    if abs(h) >= abs(mu):
        raise ValueError("Step must be smaller than |μ|")
    plus = fockrep.resolvent_matrix(rep, mu + h, g).data
    minus = fockrep.resolvent_matrix(rep, mu - h, g).data
    center = fockrep.resolvent_matrix(rep, mu, g).data
    return float(np.linalg.norm(1j * (plus - minus) / (2 * h) - center @ center, 2))


def richardson_ratio(rep: TruncatedRep, mu: float, g: FieldVector, h: float = 1e-2) -> float:
    """Defect ratio between steps h and h/2; close to 4 for a second-order difference."""
    return dirac_derivative_check(rep, mu, g, h) / dirac_derivative_check(rep, mu, g, h / 2)
