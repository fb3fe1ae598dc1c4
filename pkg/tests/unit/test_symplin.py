"""
Unit tests for symplectic linear algebra.
Tests bases, complements, conjugate completion and the regularity decomposition.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from resolvent_lab.core.errors import (
    DegenerateFormError,
    DependentVectorsError,
    InconsistentRegularityData,
    NonIsotropicError,
    OddDimensionError,
)
from resolvent_lab.models.symplectic import Subspace, SymplecticSpace
from resolvent_lab.services import symplin


def random_form(seed: int, dim: int) -> SymplecticSpace | None:
    gen = np.random.default_rng(seed)
    upper = np.triu(gen.integers(-3, 4, size=(dim, dim)), 1)
    try:
        return SymplecticSpace.from_matrix((upper - upper.T).tolist())
    except DegenerateFormError:
        return None


@pytest.mark.unit
class TestSpaces:
    """Construction and validation of symplectic spaces."""

    def test_standard_form(self, plane):
        assert plane.dim == 2
        assert plane.modes == 1
        assert symplin.sigma(plane, plane.unit(0), plane.unit(1)) == 1

    def test_odd_dimension_is_rejected(self):
        with pytest.raises(OddDimensionError):
            SymplecticSpace.from_matrix([[0, 1, 0], [-1, 0, 1], [0, -1, 0]])

    def test_singular_form_is_rejected(self):
        with pytest.raises(DegenerateFormError):
            SymplecticSpace.from_matrix([[0, 0], [0, 0]])

    def test_non_antisymmetric_form_is_rejected(self):
        with pytest.raises(DegenerateFormError):
            SymplecticSpace.from_matrix([[0, 1], [1, 0]])


@pytest.mark.unit
class TestSymplecticBasis:
    """Minimal-index basis construction."""

    def test_standard_plane_basis(self, plane):
        q, p = symplin.symplectic_basis(plane)
        assert p == plane.unit(0)
        assert q == plane.unit(1)
        assert symplin.sigma(plane, p, q) == 1

    def test_gram_is_canonical_in_exact_mode(self, space4):
        basis = symplin.symplectic_basis(space4)
        assert symplin.gram_matrix(space4, basis) == symplin.canonical_gram(2)
        assert all(v.exact for v in basis)

    def test_float_form_within_tolerance(self):
        space = SymplecticSpace.from_matrix([[0.0, 2.5], [-2.5, 0.0]])
        basis = symplin.symplectic_basis(space)
        assert symplin.gram_defect(space, basis) <= 1e-10

    @pytest.mark.property
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([2, 4, 6, 8]))
    def test_random_integer_forms_are_exactly_canonical(self, seed, dim):
        space = random_form(seed, dim)
        if space is None:
            return
        basis = symplin.symplectic_basis(space)
        assert symplin.gram_matrix(space, basis) == symplin.canonical_gram(space.modes)


@pytest.mark.unit
class TestComplements:
    """S^⊥, intersections and direct-sum splitting."""

    def test_complement_of_whole_space_is_zero(self, space4):
        assert symplin.symplectic_complement(space4, Subspace.whole(space4)).dim == 0

    def test_complement_of_a_mode(self, space4):
        mode = Subspace.span([space4.unit(0), space4.unit(1)])
        complement = symplin.symplectic_complement(space4, mode)
        assert complement.dim == 2
        for v in complement.basis:
            for s in mode.basis:
                assert symplin.sigma(space4, v, s) == 0

    def test_symplectic_subspace_detection(self, space4):
        assert symplin.is_symplectic_subspace(space4, Subspace.span([space4.unit(0), space4.unit(1)]))
        assert not symplin.is_symplectic_subspace(space4, Subspace.span([space4.unit(0), space4.unit(2)]))

    def test_split_reassembles(self, space4):
        mode = Subspace.span([space4.unit(0), space4.unit(1)])
        vector = space4.vector(1, 2, 3, "1/2")
        s_part, perp_part = symplin.split(space4, mode, vector)
        assert s_part + perp_part == vector
        assert s_part == space4.vector(1, 2, 0, 0)


@pytest.mark.unit
class TestConjugates:
    """complete_to_symplectic on isotropic families."""

    def test_conjugates_pair_with_inputs(self, space4):
        isotropic = [space4.unit(0), space4.unit(2)]
        conjugates = symplin.complete_to_symplectic(space4, isotropic)
        for j, p in enumerate(conjugates):
            for i, q in enumerate(isotropic):
                assert symplin.sigma(space4, p, q) == (1 if i == j else 0)
        assert symplin.sigma(space4, conjugates[0], conjugates[1]) == 0

    def test_non_isotropic_input_raises(self, space4):
        with pytest.raises(NonIsotropicError):
            symplin.complete_to_symplectic(space4, [space4.unit(0), space4.unit(1)])

    def test_dependent_input_raises(self, space4):
        with pytest.raises(DependentVectorsError):
            symplin.complete_to_symplectic(space4, [space4.unit(0), 2 * space4.unit(0)])


@pytest.mark.unit
class TestRegularityDecomposition:
    """X = Q ⊕ reg ⊕ sing."""

    def test_fully_regular(self, space4):
        result = symplin.regularity_decomposition(space4, Subspace.whole(space4), Subspace(()))
        assert result.dims == (0, 4, 0)

    def test_single_trivial_direction(self, space4):
        line = Subspace.span([space4.unit(0)])
        result = symplin.regularity_decomposition(space4, line, line)
        assert result.dims == (2, 0, 2)
        assert result.sing.contains(space4.unit(2))
        assert result.sing.contains(space4.unit(3))

    def test_mixed_example(self, space4):
        x_r = Subspace.span([space4.unit(0), space4.unit(1), space4.unit(2)])
        x_t = Subspace.span([space4.unit(2)])
        result = symplin.regularity_decomposition(space4, x_r, x_t)
        assert result.dims == (2, 2, 0)
        rank, worst = symplin.decomposition_defects(space4, [result.q, result.reg, result.sing])
        assert rank == 4
        assert worst == 0.0

    def test_pairing_with_regular_part_raises(self, space4):
        x_r = Subspace.span([space4.unit(0), space4.unit(1)])
        with pytest.raises(InconsistentRegularityData):
            symplin.regularity_decomposition(space4, x_r, Subspace.span([space4.unit(0)]))

    def test_trivial_outside_regular_raises(self, space4):
        with pytest.raises(InconsistentRegularityData):
            symplin.regularity_decomposition(space4, Subspace.span([space4.unit(0)]), Subspace.span([space4.unit(2)]))

    def test_basis_entries_are_fractions(self, space4):
        line = Subspace.span([space4.unit(0)])
        result = symplin.regularity_decomposition(space4, line, line)
        assert all(isinstance(c, Fraction) for v in result.q.basis for c in v.coords)


@pytest.mark.unit
class TestRandomRegularityDecomposition:
    """Admissible regularity data drawn over random integer forms."""

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        modes=st.integers(1, 3),
        trivial=st.integers(0, 3),
        regular=st.integers(0, 3),
        shear=st.integers(-2, 2),
    )
    def test_parts_are_complementary_and_orthogonal(self, seed, modes, trivial, regular, shear):
        assume(1 <= trivial + regular <= modes)
        space = random_form(seed, 2 * modes)
        assume(space is not None)
        basis = symplin.symplectic_basis(space)
        qs, ps = basis[0::2], basis[1::2]
        x_t = qs[:trivial]
        pairs = [v for l in range(trivial, trivial + regular) for v in (qs[l], ps[l])]
        # keep the spanning set of X_R off the adapted basis
        if x_t:
            pairs = [v + shear * x_t[0] for v in pairs]
        x_r = Subspace.span([*x_t, *pairs])
        result = symplin.regularity_decomposition(space, x_r, Subspace.span(x_t) if x_t else Subspace(()))

        assert result.dims == (2 * trivial, 2 * regular, 2 * (modes - trivial - regular))
        assert sum(result.dims) == space.dim
        rank, worst = symplin.decomposition_defects(space, [result.q, result.reg, result.sing])
        assert rank == space.dim
        assert worst == 0.0
        for part in (result.q, result.reg, result.sing):
            assert symplin.is_symplectic_subspace(space, part)
        assert x_r.contains_subspace(result.reg)
