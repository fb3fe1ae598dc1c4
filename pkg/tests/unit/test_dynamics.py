"""
Unit tests for potentials, the interaction cocycle, the oscillator chain and Hermite matrix elements.
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from resolvent_lab.core.errors import DimensionBudgetExceeded, FourierClosureError
from resolvent_lab.models.lattice import LatticeModel
from resolvent_lab.services import dynamics, fockrep


@pytest.fixture
def free_chain() -> LatticeModel:
    return LatticeModel(sites=3, cutoff=6, potential=dynamics.zero_potential())


@pytest.mark.unit
class TestPotentials:
    """Closed-form, compactly supported and sampled potentials."""

    def test_derivative_gaussian_sup_norm(self):
        potential = dynamics.derivative_gaussian_potential()
        assert potential.sup_norm == pytest.approx(math.exp(-0.5) / 2.0, rel=1e-5)

    def test_hermite_gaussian_fourier_convention(self):
        potential = dynamics.hermite_gaussian_potential(1)
        w = 1.3
        sine, _ = scipy.integrate.quad(lambda x: float(potential(x)) * math.sin(w * x), -40.0, 40.0, limit=200)
        assert complex(potential.fourier(w)) == pytest.approx(-1j * sine / math.sqrt(2.0 * math.pi), abs=1e-9)

    def test_bump_support(self):
        bump = dynamics.bump_potential(amplitude=-2.0, radius=1.5)
        assert float(bump(0.0)) == pytest.approx(-2.0)
        assert float(bump(1.5)) == 0.0
        assert bump.sup_norm == 2.0

    def test_bump_mean_is_nonzero(self):
        with pytest.raises(FourierClosureError):
            dynamics.bump_potential().require_zero_mean()

    def test_sampled_potential_has_no_fourier(self):
        grid = np.linspace(-1.0, 1.0, 9)
        potential = dynamics.sampled_potential(grid, 1.0 - grid**2)
        assert float(potential(0.0)) == pytest.approx(1.0)
        assert float(potential(2.0)) == 0.0
        with pytest.raises(FourierClosureError):
            potential.fourier(0.0)

    def test_sampled_grid_must_increase(self):
        with pytest.raises(ValueError):
            dynamics.sampled_potential([0.0, 2.0, 1.0, 3.0], [0.0, 0.0, 0.0, 0.0])

    def test_scaling(self):
        potential = dynamics.hermite_gaussian_potential(2, 1.0).scaled(3.0)
        assert potential.params["scale"] == 3.0
        assert complex(potential.fourier(1.0)) == pytest.approx(3.0 * (1j) ** 2 * math.exp(-1.0))


@pytest.mark.unit
class TestCocycle:
    """Kernel and Hilbert–Schmidt norm of ∫₀ᵗ V_s ds."""

    @pytest.mark.parametrize(
        "order,scale,t",
        [(1, 1.0, 2.0), (2, 2.0, 1.0), (3, 1.0, -0.5)],
    )
    def test_known_norms(self, order, scale, t):
        potential = dynamics.hermite_gaussian_potential(order, scale)
        expected = abs(t) * math.gamma(order) / 2 ** (order + 1) * scale**2
        assert dynamics.cocycle_hs_norm_sq(potential, t).value == pytest.approx(expected, rel=1e-8)

    def test_nonzero_mean_diverges(self):
        result = dynamics.cocycle_hs_norm_sq(dynamics.bump_potential(), 1.0)
        assert result.divergent
        assert math.isinf(result.value)

    def test_zero_time(self):
        assert dynamics.cocycle_hs_norm_sq(dynamics.derivative_gaussian_potential(), 0.0).value == 0.0

    def test_kernel_on_antidiagonal(self):
        t = 0.7
        kernel = dynamics.cocycle_kernel(dynamics.derivative_gaussian_potential(), t)
        expected = t / math.sqrt(2.0 * math.pi) * 2j * math.exp(-4.0)
        assert complex(kernel(1.0, -1.0)) == pytest.approx(expected)
        assert complex(kernel(0.5, 0.5)) == 0.0

    def test_kernel_needs_zero_mean(self):
        with pytest.raises(FourierClosureError):
            dynamics.cocycle_kernel(dynamics.bump_potential(), 1.0)


@pytest.mark.unit
class TestDyson:
    """Partial sums of the Dyson series against the exact cocycle."""

    def test_tail_bound(self):
        assert dynamics.dyson_tail_bound(1.0, 1.0, 0) == pytest.approx(math.e - 1.0)
        assert dynamics.dyson_tail_bound(2.0, 0.0, 3) == 0.0

    def test_partial_sum_matches_exact(self, plane):
        rep = fockrep.build_rep(plane, cutoff=8)
        h0 = dynamics.harmonic_hamiltonian(rep)
        v_op = dynamics.potential_operator(rep, dynamics.derivative_gaussian_potential())
        result = dynamics.dyson_cocycle(rep, h0, v_op, 0.5, order=12)
        exact = dynamics.exact_cocycle(rep, h0, v_op, 0.5)
        assert not result.flagged
        assert (result.matrix - exact).norm() < 1e-8

    def test_low_order_is_flagged(self, plane):
        rep = fockrep.build_rep(plane, cutoff=8)
        h0 = dynamics.harmonic_hamiltonian(rep)
        v_op = dynamics.potential_operator(rep, dynamics.bump_potential(amplitude=-3.0))
        assert dynamics.dyson_cocycle(rep, h0, v_op, 1.0, order=1).flagged

    def test_negative_order_is_rejected(self, plane):
        rep = fockrep.build_rep(plane, cutoff=4)
        h0 = dynamics.harmonic_hamiltonian(rep)
        with pytest.raises(ValueError):
            dynamics.dyson_cocycle(rep, h0, h0, 1.0, order=-1)

    def test_continuity_bound_without_potentials(self):
        assert dynamics.dyson_continuity_bound(0.0, 0.0, 0.5, -2.0) == 1.0


@pytest.mark.unit
class TestOneModeOperators:
    """Harmonic Hamiltonian, its resolvent and the inverted oscillator."""

    def test_harmonic_spectrum(self, rep32):
        rep, _, _ = rep32
        diagonal = np.diag(dynamics.harmonic_hamiltonian(rep).data).real
        assert np.array_equal(diagonal[:4], [1.0, 3.0, 5.0, 7.0])

    def test_truncated_products_differ_on_top_level_only(self, rep32):
        rep, _, _ = rep32
        exact = dynamics.harmonic_hamiltonian(rep).data
        products = dynamics.harmonic_hamiltonian(rep, truncated_products=True).data
        assert np.allclose(exact[:-1, :-1], products[:-1, :-1])
        assert not np.isclose(exact[-1, -1], products[-1, -1])

    def test_resolvent_hs_norm(self, rep32):
        rep, _, _ = rep32
        h = dynamics.harmonic_hamiltonian(rep)
        expected = math.sqrt(sum(1.0 / (2 * n + 2) ** 2 for n in range(rep.cutoff)))
        assert dynamics.resolvent_hs_norm(h, 1.0) == pytest.approx(expected)
        with pytest.raises(ValueError):
            dynamics.resolvent_hs_norm(h, -1.0)

    def test_inverted_spectrum_is_symmetric(self):
        spectrum = dynamics.inverted_oscillator_spectrum(40, bins=10)
        assert np.allclose(spectrum.eigenvalues, -spectrum.eigenvalues[::-1], atol=1e-8)
        assert spectrum.spacing_counts.sum() == 39


@pytest.mark.unit
class TestOscillatorChain:
    """Ground states and the regularity bounds on them."""

    def test_free_ground_state(self, free_chain):
        result = dynamics.ground_state(free_chain, 2)
        assert result.energy == pytest.approx(2.0)
        assert result.gap == pytest.approx(2.0)
        assert result.solver == "dense"

    def test_region_must_be_contiguous(self, free_chain):
        with pytest.raises(ValueError):
            dynamics.ground_state(free_chain, range(0, 3, 2))

    def test_solver_budget(self):
        with pytest.raises(DimensionBudgetExceeded):
            LatticeModel(sites=3, cutoff=200, potential=dynamics.zero_potential())

    def test_free_superadditivity_is_exact(self, free_chain):
        result = dynamics.energy_superadditivity_check(free_chain, 1, 3)
        assert result.value == pytest.approx(0.0, abs=1e-10)
        assert result.holds

    def test_free_sandwich_is_tight(self, free_chain):
        result = dynamics.sandwich_check(free_chain, 2, 1, 2.0)
        assert result.value == pytest.approx(0.5)
        assert result.holds

    def test_sandwich_with_bump(self):
        model = LatticeModel(sites=2, cutoff=10, potential=dynamics.bump_potential())
        result = dynamics.sandwich_check(model, 2, 1, 1.0)
        assert result.lower == pytest.approx(1.0 / 5.0)
        assert result.holds

    def test_sandwich_parameters(self, free_chain):
        with pytest.raises(ValueError):
            dynamics.sandwich_check(free_chain, 2, 2, 1.0)
        with pytest.raises(ValueError):
            dynamics.sandwich_check(free_chain, 2, 1, 0.0)


@pytest.mark.unit
class TestHermiteElements:
    """C_mn for compactly supported potentials."""

    def test_diagonal_carries_time(self):
        result = dynamics.hermite_matrix_elements(dynamics.bump_potential(), 0.3, 6)
        assert np.allclose(np.diag(result.matrix), 0.3 * np.diag(result.potential_elements))
        assert np.allclose(result.potential_elements, result.potential_elements.T)

    def test_k_constant(self):
        assert math.isinf(dynamics.k_constant(dynamics.derivative_gaussian_potential()))
        assert dynamics.k_constant(dynamics.bump_potential()) >= 1.0

    def test_needs_two_functions(self):
        with pytest.raises(ValueError):
            dynamics.hermite_matrix_elements(dynamics.bump_potential(), 1.0, 1)

    def test_schur_bound_dominates_norm(self, rng):
        matrix = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        assert dynamics.schur_bound(matrix) >= np.linalg.norm(matrix, 2)


@pytest.mark.unit
class TestFiniteVolume:
    """Negative-binomial terms and tails of the commutator series."""

    def test_tail_matches_direct_sum(self):
        bound = dynamics.finite_volume_commutator_bound(2, 3, 1.0, 1.0, 0.1)
        direct = sum(scipy.special.comb(2 + k, k) * 0.4**k for k in range(4, 400))
        assert bound.tail == pytest.approx(direct, rel=1e-10)
        assert bound.term == pytest.approx(scipy.special.comb(5, 3) * 0.4**3)

    def test_divergent_ratio(self):
        bound = dynamics.finite_volume_commutator_bound(1, 2, 1.0, 1.0, 0.5)
        assert bound.divergent
        assert math.isinf(bound.tail)

    def test_no_potential(self):
        bound = dynamics.finite_volume_commutator_bound(3, 0, 0.0, 2.0, 1.0)
        assert bound.term == 2.0 and bound.tail == 0.0
