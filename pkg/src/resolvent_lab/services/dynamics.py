"""Interacting dynamics and ground states.

Covers the interaction-picture cocycle of a one-particle potential (kernel, Hilbert–Schmidt norm,
Dyson series), the nearest-neighbour oscillator chain with its ground-state sequence and the
regularity bounds on it, and the Hermite matrix elements of the time-averaged potential.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.interpolate
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
import scipy.special
from numpy.polynomial import hermite as hermite_poly

from ..core.config import Tolerances, settings
from ..core.errors import DimensionBudgetExceeded, FourierClosureError, SolverError
from ..models.lattice import GroundStateResult, LatticeModel, Potential
from ..models.representation import OperatorMatrix, TruncatedRep
from ..models.symplectic import FieldVector
from ..utils import hermite, quadrature
from . import fockrep

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------


def zero_potential() -> Potential:
    return Potential(
        name="zero",
        v=lambda x: np.zeros_like(x, dtype=float),
        sup_norm=0.0,
        v_hat=lambda w: np.zeros_like(w, dtype=complex),
        support_radius=0.0,
    )


def _bump(x: np.ndarray, amplitude: float, radius: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.atleast_1d(x / radius)
    inside = np.abs(y) < 1.0
    out = np.zeros_like(y)
    out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - y[inside] ** 2))
    return out.reshape(x.shape)


def bump_potential(amplitude: float = -1.0, radius: float = 2.0) -> Potential:
    """A·exp(1 − 1/(1 − (x/r)²)) on |x| < r; negative amplitude is attractive. ‖V‖ = |A|."""
    if radius <= 0:
        raise ValueError(f"Bump radius must be positive, got {radius}")

    def v_hat(w: np.ndarray) -> np.ndarray:
        # even V: Ṽ(w) = (2/√(2π)) ∫₀^r V(x) cos(wx) dx
        w = np.asarray(w, dtype=float)
        values = [
            scipy.integrate.quad(lambda x: float(_bump(x, amplitude, radius)), 0.0, radius, weight="cos", wvar=k)[0]
            for k in w.ravel()
        ]
        return (2.0 / SQRT_2PI) * np.array(values, dtype=complex).reshape(w.shape)

    return Potential(
        name=f"bump(A={amplitude:g}, r={radius:g})",
        v=lambda x: _bump(x, amplitude, radius),
        sup_norm=abs(amplitude),
        v_hat=v_hat,
        support_radius=radius,
        params={"amplitude": amplitude, "radius": radius},
    )


def hermite_gaussian_potential(order: int = 1, scale: float = 1.0) -> Potential:
    """Ṽ(w) = s·(iw)^k e^{-w²}, so V(x) = (s/√2)(−½)^k H_k(x/2) e^{-x²/4}.

    Ṽ(0) = 0 for k ≥ 1, which places V in the zero-mean class used by cocycle kernels.
    """
    if order < 0:
        raise ValueError(f"Order must be nonnegative, got {order}")
    coeffs = np.zeros(order + 1)
    coeffs[order] = 1.0

    def v(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return scale / math.sqrt(2.0) * (-0.5) ** order * hermite_poly.hermval(x / 2.0, coeffs) * np.exp(-x * x / 4.0)

    def v_hat(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return scale * (1j * w) ** order * np.exp(-w * w)

    grid = np.linspace(-40.0, 40.0, 40001)
    return Potential(
        name=f"hermite-gaussian(k={order}, s={scale:g})",
        v=v,
        sup_norm=float(np.max(np.abs(v(grid)))),
        v_hat=v_hat,
        params={"order": order, "scale": scale},
    )


def derivative_gaussian_potential(scale: float = 1.0) -> Potential:
    """V(x) = −s·x/(2√2)·e^{-x²/4}, with Ṽ(w) = i·s·w·e^{-w²} and ‖V‖ = s·e^{-1/2}/2."""
    return hermite_gaussian_potential(1, scale)


def sampled_potential(grid: Sequence[float], values: Sequence[float], name: str = "sampled") -> Potential:
    """Cubic spline through samples, zero outside the grid. No Fourier transform is attached."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.size < 4 or grid.shape != values.shape:
        raise ValueError("Sampled potential needs matching 1-D grid and values with at least 4 points")
    if not np.all(np.diff(grid) > 0):
        raise ValueError("Sample grid must be strictly increasing")
    spline = scipy.interpolate.CubicSpline(grid, values)

    def v(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where((x >= grid[0]) & (x <= grid[-1]), spline(np.clip(x, grid[0], grid[-1])), 0.0)

    fine = np.linspace(grid[0], grid[-1], 20 * grid.size)
    return Potential(
        name=name,
        v=v,
        sup_norm=float(np.max(np.abs(spline(fine)))),
        kind="sampled",
        support_radius=float(max(abs(grid[0]), abs(grid[-1]))),
        params={"points": int(grid.size)},
    )


def scaled(potential: Potential, factor: float) -> Potential:
    return potential.scaled(factor)


# ---------------------------------------------------------------------------
# Cocycle kernel and Hilbert–Schmidt norm
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CocycleKernel:
    """Momentum-space kernel of ∫₀ᵗ V_s ds for the free evolution e^{isP²}."""

    potential: Potential
    t: float

    def __call__(self, u: np.ndarray | float, v: np.ndarray | float) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        x = (u - v) * (u + v)
        safe = np.where(x == 0.0, 1.0, x)
        # (1 − e^{itx})/x, with limit −it on the diagonals u = ±v
        factor = np.where(x == 0.0, -1j * self.t, -np.expm1(1j * self.t * x) / safe)
        return (1j / SQRT_2PI) * factor * self.potential.fourier(u - v)


def cocycle_kernel(potential: Potential, t: float) -> CocycleKernel:
    potential.require_zero_mean()
    return CocycleKernel(potential, float(t))


@dataclass(frozen=True)
class CocycleNorm:
    value: float
    error: float
    divergent: bool = False


def cocycle_hs_norm_sq(potential: Potential, t: float, tolerances: Tolerances | None = None) -> CocycleNorm:
    """‖∫₀ᵗ V_s ds‖₂² = |t| ∫ |Ṽ(w)|²/(2|w|) dw.

    The integrand is not integrable at w = 0 unless Ṽ(0) = 0; that case is reported as divergent.
    """
    tolerances = tolerances or Tolerances.from_settings()
    if abs(complex(potential.fourier(0.0))) > 1e-12:
        logger.warning(f"Cocycle norm of '{potential.name}' diverges: Ṽ(0) ≠ 0")
        return CocycleNorm(math.inf, math.inf, divergent=True)
    if t == 0:
        return CocycleNorm(0.0, 0.0)

    def density(w: float) -> float:
        return float(abs(complex(potential.fourier(w))) ** 2) / (2.0 * abs(w))

    total, error = 0.0, 0.0
    for lower, upper in ((-np.inf, 0.0), (0.0, np.inf)):
        value, err = scipy.integrate.quad(
            density, lower, upper, epsabs=tolerances.quad_epsabs, epsrel=tolerances.quad_epsrel, limit=400
        )
        total += value
        error += err
    return CocycleNorm(abs(t) * total, abs(t) * error)


def cocycle_hs_norm_sq_grid(
    potential: Potential, t: float, w_extent: float = 6.0, s_extent: float = 500.0, order: int | None = None
) -> float:
    """∬ |k(u, v)|² du dv on a grid in w = u − v, s = u + v, with the 1/s² tail added in closed form.

    Independent of the closed form used by ``cocycle_hs_norm_sq``; the two are compared as oracles.
    """
    kernel = cocycle_kernel(potential, t)
    if t == 0:
        return 0.0
    order = order or settings.GL_NODES
    w_rule = quadrature.panel_rule(0.0, w_extent, 24, order)
    s_panels = int(math.ceil(s_extent * abs(t) * w_extent / math.pi)) + 1
    s_rule = quadrature.panel_rule(0.0, s_extent, s_panels, order)
    inner = np.empty(w_rule.nodes.size)
    for i, w in enumerate(w_rule.nodes):
        u = 0.5 * (s_rule.nodes + w)
        v = 0.5 * (s_rule.nodes - w)
        values = np.abs(kernel(u, v)) ** 2
        # ∫_S^∞ |1 − e^{iαs}|²/s² ds ≈ 2/S
        tail = abs(complex(potential.fourier(w))) ** 2 / (2.0 * math.pi * w * w) * 2.0 / s_extent
        inner[i] = quadrature.integrate(s_rule, values) + tail
    # four symmetric quadrants, Jacobian ½
    return float(2.0 * quadrature.integrate(w_rule, inner))


# ---------------------------------------------------------------------------
# Dyson series for Γ(t) = e^{itH} e^{-itH₀}
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DysonResult:
    matrix: OperatorMatrix
    order: int
    tail: float
    quadrature_error: float
    flagged: bool


def _check_hermitian(matrix: np.ndarray, label: str) -> None:
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if matrix.size and float(np.max(np.abs(matrix - matrix.conj().T))) > 1e-10 * scale:
        raise ValueError(f"{label} is not Hermitian")


def dyson_tail_bound(t: float, v_norm: float, order: int) -> float:
    """Σ_{n>K} (|t|‖V‖)ⁿ/n! = e^x·P(K+1, x) with x = |t|‖V‖."""
    x = abs(t) * v_norm
    if x == 0:
        return 0.0
    return float(math.exp(x) * scipy.special.gammainc(order + 1, x))


def _dyson_partial_sum(energies: np.ndarray, v_eigen: np.ndarray, t: float, order: int, panels: int) -> np.ndarray:
    rule = quadrature.panel_rule(0.0, t, panels, settings.GL_NODES)
    gaps = energies[:, None] - energies[None, :]
    v_nodes = v_eigen[None, :, :] * np.exp(1j * rule.nodes[:, None, None] * gaps[None, :, :])
    dim = energies.size
    identity = np.eye(dim, dtype=complex)
    running = np.broadcast_to(identity, v_nodes.shape)
    total = identity.copy()
    for n in range(1, order + 1):
        running, end = quadrature.cumulative_integral(rule, np.matmul(running, v_nodes))
        total = total + (1j**n) * end
    return total


def dyson_cocycle(
    rep: TruncatedRep,
    h0: OperatorMatrix,
    v_op: OperatorMatrix,
    t: float,
    order: int,
    tolerance: float | None = None,
) -> DysonResult:
    """Partial sum Σ_{n≤K} iⁿ ∫_{0<t₁<⋯<t_n<t} V_{t₁}⋯V_{t_n} with V_s = e^{isH₀}Ve^{-isH₀}.

    Time-ordered integrals are nested Gauss–Legendre panels, worked in the eigenbasis of H₀; the
    quadrature error is the change under panel doubling.
    """
    if order < 0:
        raise ValueError(f"Dyson order must be nonnegative, got {order}")
    tolerance = settings.ORACLE_TOL if tolerance is None else tolerance
    _check_hermitian(h0.data, "H₀")
    _check_hermitian(v_op.data, "V")
    energies, vectors = scipy.linalg.eigh(h0.data)
    v_eigen = vectors.conj().T @ v_op.data @ vectors
    v_norm = v_op.norm()
    spread = float(energies[-1] - energies[0]) if energies.size else 0.0
    panels = max(1, int(math.ceil(abs(t) * (spread + v_norm) / 2.0)))

    coarse = _dyson_partial_sum(energies, v_eigen, t, order, panels)
    fine = _dyson_partial_sum(energies, v_eigen, t, order, 2 * panels)
    quad_error = float(np.linalg.norm(fine - coarse, 2))
    tail = dyson_tail_bound(t, v_norm, order)
    flagged = tail > tolerance
    if flagged:
        logger.warning(f"Dyson tail bound {tail:.3e} at order {order} exceeds {tolerance:.1e} (|t|·‖V‖={abs(t) * v_norm:.3f})")
    gamma = vectors @ fine @ vectors.conj().T
    logger.debug(f"Dyson cocycle t={t}, K={order}: panels={panels}, quadrature error={quad_error:.2e}, tail={tail:.2e}")
    return DysonResult(OperatorMatrix(gamma, rep.cutoff, rep.modes, f"Γ({t})"), order, tail, quad_error, flagged)


def _unitary_group(matrix: np.ndarray, t: float) -> np.ndarray:
    energies, vectors = scipy.linalg.eigh(matrix)
    return (vectors * np.exp(1j * t * energies)) @ vectors.conj().T


def exact_cocycle(rep: TruncatedRep, h0: OperatorMatrix, v_op: OperatorMatrix, t: float) -> OperatorMatrix:
    """e^{it(H₀+V)} e^{-itH₀} by spectral calculus."""
    gamma = _unitary_group(h0.data + v_op.data, t) @ _unitary_group(h0.data, -t)
    return OperatorMatrix(gamma, rep.cutoff, rep.modes, f"Γexact({t})")


def dyson_continuity_bound(v1_norm: float, v2_norm: float, diff_norm: float, t: float) -> float:
    """‖Γ_{V₁}(t) − Γ_{V₂}(t)‖ ≤ ‖V₁−V₂‖ (e^{|t|(‖V₁‖+‖V₂‖)} − 1)/(‖V₁‖+‖V₂‖)."""
    total = v1_norm + v2_norm
    if total == 0:
        return diff_norm * abs(t)
    return diff_norm * math.expm1(abs(t) * total) / total


# ---------------------------------------------------------------------------
# One-mode operators
# ---------------------------------------------------------------------------


def harmonic_hamiltonian(rep: TruncatedRep, truncated_products: bool = False) -> OperatorMatrix:
    """Σ_l (P_l² + Q_l²).

    By default the exact oscillator spectrum 2n+1 is placed on the diagonal; with
    ``truncated_products`` the squares of the truncated fields are used instead, which differs
    only on the top level of each mode.
    """
    if truncated_products:
        total = scipy.sparse.csr_matrix((rep.dimension, rep.dimension), dtype=complex)
        for q, p in zip(rep.q_ops, rep.p_ops, strict=True):
            total = total + q @ q + p @ p
        return OperatorMatrix(total.toarray(), rep.cutoff, rep.modes, "H")
    occupations = np.indices((rep.cutoff,) * rep.modes).reshape(rep.modes, -1).sum(axis=0)
    return OperatorMatrix(np.diag(2.0 * occupations + rep.modes).astype(complex), rep.cutoff, rep.modes, "H")


def potential_operator(rep: TruncatedRep, potential: Potential, mode: int = 0, scale: float = math.sqrt(2.0)) -> OperatorMatrix:
    """V(scale·Q_mode) through the eigendecomposition of the truncated position operator."""
    q = rep.q_ops[mode].toarray()
    values, vectors = scipy.linalg.eigh(q)
    data = (vectors * potential(scale * values)) @ vectors.conj().T
    return OperatorMatrix(data, rep.cutoff, rep.modes, f"V[{potential.name}]")


def evolved_resolvent(rep: TruncatedRep, h: OperatorMatrix, t: float, z: complex, f: FieldVector) -> OperatorMatrix:
    """e^{itH} R(z, f) e^{-itH}."""
    _check_hermitian(h.data, "H")
    u = _unitary_group(h.data, t)
    r = fockrep.resolvent_matrix(rep, z, f).data
    return OperatorMatrix(u @ r @ u.conj().T, rep.cutoff, rep.modes, f"α_{t}(R({z}, {f}))")


def resolvent_hs_norm(h: OperatorMatrix, mu: float) -> float:
    """‖(μ + H)⁻¹‖₂ for Hermitian H bounded below by −μ."""
    energies = scipy.linalg.eigvalsh(h.data)
    if np.any(mu + energies <= 0):
        raise ValueError(f"μ={mu} does not lie below the spectrum of −H")
    return float(np.sqrt(np.sum(1.0 / (mu + energies) ** 2)))


@dataclass(frozen=True, eq=False)
class InvertedSpectrum:
    eigenvalues: np.ndarray
    spacing_counts: np.ndarray
    spacing_edges: np.ndarray


def inverted_oscillator_spectrum(cutoff: int, bins: int = 40) -> InvertedSpectrum:
    """Eigenvalues of the truncated P² − Q² and a histogram of their spacings.

    The truncated spectrum spreads symmetrically and densely as the cutoff grows; it is a
    sanity display only.
    """
    q, p = fockrep.single_mode_fields(cutoff)
    energies = scipy.linalg.eigvalsh((p @ p - q @ q).toarray())
    counts, edges = np.histogram(np.diff(energies), bins=bins)
    return InvertedSpectrum(energies, counts, edges)


# ---------------------------------------------------------------------------
# Oscillator chain
# ---------------------------------------------------------------------------


def _region_length(model: LatticeModel, region: range | int) -> int:
    if isinstance(region, int):
        return len(model.region(region))
    if region.step != 1 or len(region) == 0 or region.start < 0 or region.stop > model.sites:
        raise ValueError(f"Region {region} is not a contiguous interval of the lattice")
    return len(region)


def _bond_block(model: LatticeModel) -> np.ndarray:
    """V(Q_l − Q_{l+1}) on two neighbouring sites."""
    q = fockrep.single_mode_fields(model.cutoff)[0].toarray().real
    identity = np.eye(model.cutoff)
    difference = np.kron(q, identity) - np.kron(identity, q)
    values, vectors = scipy.linalg.eigh(difference)
    return (vectors * model.potential(values)) @ vectors.T


def _assemble(model: LatticeModel, sites: int) -> scipy.sparse.csr_matrix:
    n = model.cutoff
    occupations = np.indices((n,) * sites).reshape(sites, -1).sum(axis=0)
    hamiltonian = scipy.sparse.diags(2.0 * occupations + sites, format="csr")
    if sites > 1 and model.potential.sup_norm > 0:
        bond = scipy.sparse.csr_matrix(_bond_block(model))
        for l in range(sites - 1):
            left = scipy.sparse.identity(n**l, format="csr")
            right = scipy.sparse.identity(n ** (sites - l - 2), format="csr")
            hamiltonian = hamiltonian + scipy.sparse.kron(scipy.sparse.kron(left, bond), right, format="csr")
    return hamiltonian.tocsr()


def lattice_hamiltonian(model: LatticeModel, region: range | int) -> OperatorMatrix:
    """H_Λ = Σ_{l∈Λ}(P_l² + Q_l²) + Σ_{l,l+1∈Λ} V(Q_l − Q_{l+1}) as a dense matrix."""
    sites = _region_length(model, region)
    dim = model.dimension(sites)
    if dim > settings.DENSE_DIMENSION_LIMIT:
        raise DimensionBudgetExceeded(
            f"Dimension {dim} exceeds the dense limit {settings.DENSE_DIMENSION_LIMIT}; use lattice_hamiltonian_sparse"
        )
    return OperatorMatrix(_assemble(model, sites).toarray(), model.cutoff, sites, f"H[{sites}]")


def lattice_hamiltonian_sparse(model: LatticeModel, region: range | int) -> scipy.sparse.csr_matrix:
    return _assemble(model, _region_length(model, region))


def ground_state(model: LatticeModel, region: range | int, tolerances: Tolerances | None = None) -> GroundStateResult:
    """Lowest eigenpair of H_Λ; dense below the dense limit, Lanczos above it."""
    tolerances = tolerances or Tolerances.from_settings()
    sites = _region_length(model, region)
    hamiltonian = _assemble(model, sites)
    dim = hamiltonian.shape[0]
    if dim <= settings.DENSE_DIMENSION_LIMIT:
        energies, vectors = scipy.linalg.eigh(hamiltonian.toarray(), subset_by_index=[0, min(1, dim - 1)])
        solver = "dense"
    else:
        try:
            energies, vectors = scipy.sparse.linalg.eigsh(hamiltonian, k=2, which="SA")
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            logger.error(f"Lanczos did not converge for {sites} sites at cutoff {model.cutoff}")
            raise SolverError(f"Lanczos did not converge for dimension {dim}") from exc
        order = np.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]
        solver = "lanczos"
    energy = float(energies[0])
    vector = vectors[:, 0]
    vector = vector * np.exp(-1j * np.angle(vector[np.argmax(np.abs(vector))]))
    residual = float(np.linalg.norm(hamiltonian @ vector - energy * vector))
    scale = float(abs(hamiltonian).sum(axis=1).max())
    if residual > tolerances.ground_state_residual * max(1.0, scale):
        raise SolverError(f"Ground-state residual {residual:.3e} above {tolerances.ground_state_residual:.1e}·‖H‖")
    gap = float(energies[1] - energies[0]) if energies.size > 1 else math.inf
    logger.debug(f"Ground state of {sites} sites (dim {dim}, {solver}): E={energy:.10f}, gap={gap:.4f}")
    return GroundStateResult(energy, vector, gap, residual, dim, solver)


@dataclass(frozen=True)
class SandwichResult:
    lower: float
    value: float
    upper: float
    holds: bool


def sandwich_check(
    model: LatticeModel, n: int, m: int, mu: float, tolerances: Tolerances | None = None
) -> SandwichResult:
    """ω_n((μ + H̃_m)⁻¹) against (μ + 4‖V‖)⁻¹ below and μ⁻¹ above.

    H̃_m = H_m − E_m acts on the first m sites of the n-site ground state Ω_n.
    """
    tolerances = tolerances or Tolerances.from_settings()
    if mu <= 0:
        raise ValueError(f"μ must be positive, got {mu}")
    if not 1 <= m < n <= model.sites:
        raise ValueError(f"Need 1 ≤ m < n ≤ {model.sites}, got m={m}, n={n}")
    outer = ground_state(model, n, tolerances)
    inner = lattice_hamiltonian(model, m)
    energies, vectors = scipy.linalg.eigh(inner.data)
    psi = outer.vector.reshape(model.dimension(m), model.dimension(n - m))
    weights = np.sum(np.abs(vectors.conj().T @ psi) ** 2, axis=1)
    value = float(np.sum(weights / (mu + energies - energies[0])))
    lower = 1.0 / (mu + 4.0 * model.potential.sup_norm)
    upper = 1.0 / mu
    slack = 10.0 * outer.residual + 1e-12
    holds = lower - slack <= value <= upper + slack
    if not holds:
        logger.warning(f"Sandwich bound violated: {lower:.6f} ≤ {value:.6f} ≤ {upper:.6f} fails (n={n}, m={m}, μ={mu})")
    return SandwichResult(lower, value, upper, holds)


@dataclass(frozen=True)
class SuperadditivityResult:
    value: float
    bound: float
    holds: bool


def energy_superadditivity_check(
    model: LatticeModel, m: int, n: int, tolerances: Tolerances | None = None
) -> SuperadditivityResult:
    """E_m + E_{n∖m} − E_n ≥ −2‖V‖, with n∖m the last n − m sites of Λ_n."""
    if not 1 <= m < n <= model.sites:
        raise ValueError(f"Need 1 ≤ m < n ≤ {model.sites}, got m={m}, n={n}")
    first = ground_state(model, m, tolerances)
    rest = ground_state(model, range(m, n), tolerances)
    whole = ground_state(model, n, tolerances)
    value = first.energy + rest.energy - whole.energy
    bound = -2.0 * model.potential.sup_norm
    holds = value >= bound - 10.0 * (first.residual + rest.residual + whole.residual) - 1e-12
    return SuperadditivityResult(value, bound, holds)


# ---------------------------------------------------------------------------
# Hermite matrix elements
# ---------------------------------------------------------------------------


def hermite_function_table(count: int, x: np.ndarray | float) -> np.ndarray:
    return hermite.hermite_functions(count, x)


def weighted_norm_sq(n: int) -> float:
    return hermite.weighted_norm_sq(n)


def _potential_elements(potential: Potential, count: int, nodes: int) -> np.ndarray:
    """(Φ_m, V(√2 Q) Φ_n) for m, n < count."""
    if potential.support_radius is not None:
        half_width = potential.support_radius / math.sqrt(2.0)
        if half_width == 0:
            return np.zeros((count, count))
        rule = quadrature.panel_rule(-half_width, half_width, max(8, nodes // 8), 16)
        x, w = rule.nodes, rule.weights
    else:
        x, w = hermite.gauss_hermite(nodes)
    table = hermite.hermite_functions(count, x)
    weighted = table * (w * potential(math.sqrt(2.0) * x))[None, :]
    return weighted @ table.T


def k_constant(potential: Potential, samples: int = 4001) -> float:
    """K = ‖V(√2Q)e^{Q²}‖ = sup |V(√2x)|e^{x²}, finite only for compact support."""
    if potential.support_radius is None:
        return math.inf
    half_width = potential.support_radius / math.sqrt(2.0)
    x = np.linspace(-half_width, half_width, samples)
    return float(np.max(np.abs(potential(math.sqrt(2.0) * x)) * np.exp(x * x), initial=0.0))


def hermite_bound_table(count: int, t: float, k: float) -> np.ndarray:
    """Upper bounds for |C_mn|: K/(m^¼n^¼|m−n|), K/n^{5/4} and K/m^{5/4} on the edges, |t|K/√n and |t|K on the diagonal."""
    m = np.arange(count)[:, None].astype(float)
    n = np.arange(count)[None, :].astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        bounds = k / ((m * n) ** 0.25 * np.abs(m - n))
        bounds = np.where((m == 0) & (n > 0), k / n**1.25, bounds)
        bounds = np.where((n == 0) & (m > 0), k / m**1.25, bounds)
        bounds = np.where((m == n) & (m > 0), abs(t) * k / np.sqrt(m), bounds)
    bounds[0, 0] = abs(t) * k
    return bounds


@dataclass(frozen=True, eq=False)
class HermiteElements:
    matrix: np.ndarray
    potential_elements: np.ndarray
    k_constant: float
    quadrature_discrepancy: float
    degraded: bool


def hermite_matrix_elements(potential: Potential, t: float, count: int) -> HermiteElements:
    """C_mn = (e^{2it(m−n)} − 1)/(2i(m−n))·(Φ_m, V(√2Q)Φ_n), with t in place of the fraction when m = n."""
    if count < 2:
        raise ValueError(f"Need at least two Hermite functions, got {count}")
    nodes = max(160, 4 * count)
    elements = _potential_elements(potential, count, nodes)
    refined = _potential_elements(potential, count, nodes + 64)
    discrepancy = float(np.max(np.abs(refined - elements)))
    degraded = discrepancy > 1e-8 * max(1.0, potential.sup_norm)
    if degraded:
        logger.warning(f"Hermite quadrature degraded at {count} functions: discrepancy {discrepancy:.2e}")
    diff = np.arange(count)[:, None] - np.arange(count)[None, :]
    safe = np.where(diff == 0, 1, diff)
    fraction = np.where(diff == 0, t, np.expm1(2j * t * diff) / (2j * safe))
    return HermiteElements(fraction * refined, refined, k_constant(potential), discrepancy, degraded)


def schur_bound(matrix: np.ndarray) -> float:
    """√(max column sum · max row sum) of |D_mn|, an upper bound for ‖D‖."""
    absolute = np.abs(matrix)
    return float(np.sqrt(absolute.sum(axis=0).max() * absolute.sum(axis=1).max()))


# ---------------------------------------------------------------------------
# Finite-volume commutator series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteVolumeBound:
    term: float
    tail: float
    ratio: float
    divergent: bool


def finite_volume_commutator_bound(n0: int, n: int, v_norm: float, r0_norm: float, t: float) -> FiniteVolumeBound:
    """n-th term (|t|ⁿ/n!)·4ⁿ(n₀+1)⋯(n₀+n)‖V‖ⁿ‖R₀‖ and the summed tail over terms n+1, n+2, ….

    The terms are C(n₀+n, n)·rⁿ with r = 4|t|‖V‖; the tail is a negative-binomial survival
    function, finite only for r < 1.
    """
    if n0 < 0 or n < 0:
        raise ValueError(f"Need n₀, n ≥ 0, got n₀={n0}, n={n}")
    ratio = 4.0 * abs(t) * v_norm
    if ratio == 0:
        return FiniteVolumeBound(r0_norm if n == 0 else 0.0, 0.0, 0.0, False)
    term = float(scipy.special.comb(n0 + n, n, exact=False) * ratio**n * r0_norm)
    if ratio >= 1.0:
        logger.warning(f"Commutator series diverges: 4|t|‖V‖ = {ratio:.3f} ≥ 1")
        return FiniteVolumeBound(term, math.inf, ratio, True)
    tail = float(scipy.special.betainc(n + 1, n0 + 1, ratio) / (1.0 - ratio) ** (n0 + 1) * r0_norm)
    return FiniteVolumeBound(term, tail, ratio, False)
