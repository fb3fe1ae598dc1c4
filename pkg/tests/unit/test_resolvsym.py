"""
Unit tests for the symbolic resolvent algebra.
Tests polynomial arithmetic, rewriting, *-operations, automorphisms and the identity oracle.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resolvent_lab.core.errors import InvalidGeneratorError, NonSymplecticMapError, OutOfDiskError
from resolvent_lab.models.algebra import ResolventGenerator, ResolventPoly, Verdict
from resolvent_lab.models.symplectic import SymplecticSpace
from resolvent_lab.services import fockrep, resolvsym, symplin


@pytest.mark.unit
class TestPolynomials:
    """Merging and arithmetic on ResolventPoly."""

    def test_generator_on_imaginary_axis_is_rejected(self, plane):
        with pytest.raises(InvalidGeneratorError):
            ResolventGenerator.of(2j, plane.unit(0))

    def test_like_terms_merge(self, plane):
        x = ResolventPoly.generator(1.0, plane.unit(0))
        assert len(x + x) == 1
        assert (x + x).terms[0].coeff == 2.0

    def test_cancellation_gives_zero(self, plane):
        x = ResolventPoly.generator(1.0, plane.unit(0))
        assert (x - x).is_zero

    def test_product_degree(self, plane):
        x = ResolventPoly.generator(1.0, plane.unit(0))
        y = ResolventPoly.generator(2.0, plane.unit(1))
        assert (x * y * x).degree == 3
        assert (x**0).terms[0].degree == 0

    def test_generator_norm(self, plane):
        assert resolvsym.generator_norm(ResolventGenerator.of(complex(-4.0, 3.0), plane.unit(0))) == 0.25


@pytest.mark.unit
class TestSimplify:
    """Defining relations rewritten to zero."""

    def test_zero_vector_becomes_scalar(self, plane):
        result = resolvsym.simplify(
            ResolventPoly.generator(2.0, plane.zero()) - ResolventPoly.identity(-0.5j), plane
        )
        assert result.poly.is_zero
        assert result.fully_normalized

    @pytest.mark.parametrize("lam,mu", [(1.0, 2.0), (-1.5, 0.5), (3.0, -2.0)])
    def test_resolvent_identity(self, plane, lam, mu):
        f = plane.vector(1, 2)
        x, y = ResolventPoly.generator(lam, f), ResolventPoly.generator(mu, f)
        relation = x - y - (1j * (mu - lam)) * (x * y)
        assert resolvsym.simplify(relation, plane).poly.is_zero

    def test_homogeneity(self, plane):
        f = plane.vector(1, -1)
        relation = 3 * ResolventPoly.generator(3.0, 3 * f) - ResolventPoly.generator(1.0, f)
        assert resolvsym.simplify(relation, plane).poly.is_zero

    def test_involution(self, plane):
        f = plane.vector(2, 1)
        relation = resolvsym.adjoint(ResolventPoly.generator(1.5, f)) - ResolventPoly.generator(-1.5, f)
        assert resolvsym.simplify(relation, plane).poly.is_zero

    def test_adjoint_product(self, plane):
        f = plane.vector(1, 1)
        lam = 0.75
        x = ResolventPoly.generator(lam, f)
        relation = x - resolvsym.adjoint(x) + (2j * lam) * (x * resolvsym.adjoint(x))
        assert resolvsym.simplify(relation, plane).poly.is_zero

    def test_commuting_fields(self, space4):
        x = ResolventPoly.generator(1.0, space4.unit(0))
        y = ResolventPoly.generator(2.0, space4.unit(2))
        assert resolvsym.simplify(resolvsym.commutator(x, y), space4).poly.is_zero

    def test_relation_instances_reduce_for_tame_relations(self, space4):
        relations = resolvsym.relation_instances(space4, 1.0, 2.0, space4.vector(1, 0, 1, 0), space4.vector(0, 1, 0, 2))
        for name in ("identity", "involution", "homogeneity", "resolvent", "adjoint_product", "commutation", "sum"):
            assert resolvsym.simplify(relations[name], space4).poly.is_zero, name

    def test_sum_relation_folds_with_rescaled_generators(self, plane):
        # f + g = (3, 1) normalizes to a different leading coordinate than f and g
        relations = resolvsym.relation_instances(plane, 0.5, 1.0, plane.vector(2, 1), plane.vector(1, 0))
        result = resolvsym.simplify(relations["sum"], plane)
        assert result.poly.is_zero
        assert result.fully_normalized

    @settings(max_examples=30, deadline=None)
    @given(
        lam=st.sampled_from([0.5, 1.0, 2.0, -1.5]),
        mu=st.sampled_from([0.25, 1.0, 3.0, -0.75]),
        f=st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(any),
        g=st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(any),
    )
    def test_every_relation_reduces_to_zero(self, lam, mu, f, g):
        plane = SymplecticSpace.standard(1)
        f, g = plane.vector(*f), plane.vector(*g)
        relations = resolvsym.relation_instances(plane, lam, mu, f, g)
        relations.update(
            {f"complex_{k}": v for k, v in resolvsym.complex_relation_instances(plane, complex(lam, 0.5), complex(mu, -0.25), f, g).items()}
        )
        for name, relation in relations.items():
            assert resolvsym.simplify(relation, plane).poly.is_zero, name

    def test_sum_relation_skipped_when_parameters_cancel(self, plane):
        relations = resolvsym.relation_instances(plane, 1.0, -1.0, plane.unit(0), plane.unit(1))
        assert "sum" not in relations

    def test_nonpositive_budget_is_rejected(self, plane):
        with pytest.raises(ValueError):
            resolvsym.simplify(ResolventPoly.generator(1.0, plane.unit(0)), plane, budget=0)


@pytest.mark.unit
class TestStarOperations:
    """Adjoint and von Neumann expansion."""

    def test_adjoint_reverses_and_conjugates(self, plane):
        x = ResolventPoly.generator(1.0, plane.unit(0), coeff=2j)
        y = ResolventPoly.generator(complex(2.0, 1.0), plane.unit(1))
        star = resolvsym.adjoint(x * y)
        (term,) = star.terms
        assert term.coeff == -2j
        assert term.factors[0].z == complex(-2.0, 1.0)
        assert term.factors[1].z == complex(-1.0, 0.0)

    def test_adjoint_is_an_involution(self, plane):
        p = ResolventPoly.generator(1.0, plane.unit(0), coeff=1 + 2j) * ResolventPoly.generator(-3.0, plane.unit(1))
        assert resolvsym.adjoint(resolvsym.adjoint(p)).structurally_equal(p)

    def test_von_neumann_remainder(self, plane):
        gen = ResolventGenerator.of(1.5, plane.unit(0))
        poly, remainder = resolvsym.von_neumann_expand(gen, 1.0, 30)
        assert poly.degree == 31
        assert remainder == pytest.approx(0.5**31 / 0.5)

    def test_von_neumann_outside_disk(self, plane):
        with pytest.raises(OutOfDiskError):
            resolvsym.von_neumann_expand(ResolventGenerator.of(2.5, plane.unit(0)), 1.0, 5)

    def test_von_neumann_matches_truncated_resolvent(self, rep32):
        rep, q, _ = rep32
        poly, remainder = resolvsym.von_neumann_expand(ResolventGenerator.of(1.5, q), 1.0, 30)
        diff = (fockrep.poly_matrix(rep, poly) - fockrep.resolvent_matrix(rep, 1.5, q)).norm()
        assert diff <= remainder


@pytest.mark.unit
class TestAutomorphisms:
    """Symplectic and shift automorphisms."""

    def test_rotation_is_symplectic(self, plane):
        assert resolvsym.is_symplectic_map(plane, [[0, 1], [-1, 0]])
        assert not resolvsym.is_symplectic_map(plane, [[2, 0], [0, 1]])

    def test_non_symplectic_map_raises(self, plane):
        with pytest.raises(NonSymplecticMapError):
            resolvsym.apply_symplectic_automorphism(ResolventPoly.generator(1.0, plane.unit(0)), [[2, 0], [0, 1]], plane)

    def test_symplectic_map_moves_test_function(self, plane):
        image = resolvsym.apply_symplectic_automorphism(ResolventPoly.generator(1.0, plane.unit(0)), [[0, 1], [-1, 0]], plane)
        (term,) = image.terms
        assert term.factors[0].f == (0.0, -1.0)

    def test_shift_adds_imaginary_part(self, plane):
        image = resolvsym.apply_shift_automorphism(ResolventPoly.generator(1.0, plane.vector(2, 0)), [0.5, 3])
        assert image.terms[0].factors[0].z == complex(1.0, 1.0)

    def test_weyl_shift_covector_pairs_through_sigma(self, rep32):
        rep, q, p = rep32
        covector = resolvsym.weyl_shift_covector(rep.space, p)
        shifted = resolvsym.apply_shift_automorphism(ResolventPoly.generator(2.0, q), covector)
        z = shifted.terms[0].factors[0].z
        assert z == complex(2.0, float(symplin.sigma(rep.space, q, p)))


@pytest.mark.unit
class TestIdentityOracle:
    """check_identity verdicts."""

    def test_symbolic_proof(self, plane):
        f = plane.unit(0)
        x, y = ResolventPoly.generator(1.0, f), ResolventPoly.generator(2.0, f)
        result = resolvsym.check_identity(x - y, 1j * (x * y), plane)
        assert result.verdict == Verdict.PROVED

    @pytest.mark.slow
    def test_noncommuting_resolvents_are_refuted(self, plane):
        q, p = symplin.symplectic_basis(plane)
        x, y = ResolventPoly.generator(1.0, q), ResolventPoly.generator(1.0, p)
        result = resolvsym.check_identity(x * y, y * x, plane, resolvsym.OracleConfig(cutoffs=(32, 64)))
        assert result.verdict == Verdict.REFUTED
        assert result.cutoffs == (32, 64)

    def test_true_identity_left_unreduced_is_confirmed(self, plane):
        q = plane.unit(0)
        r1, r2, r3 = (ResolventPoly.generator(lam, q) for lam in (1.0, 2.0, 3.0))
        # a single rewrite step leaves the partial-fraction identity unresolved
        cfg = resolvsym.OracleConfig(budget=1, cutoffs=(16, 32))
        result = resolvsym.check_identity(r1 * r2 * r3, -0.5 * r1 + r2 - 0.5 * r3, plane, cfg)
        assert result.verdict == Verdict.NUMERICALLY_CONFIRMED
        assert max(result.residuals) < 1e-6

    @pytest.mark.parametrize(
        "r_small, r_large, expected",
        [
            (1.28e-10, 1.30e-10, Verdict.NUMERICALLY_CONFIRMED),
            (1e-9, 1e-12, Verdict.NUMERICALLY_CONFIRMED),
            (1.6e-4, 6.1e-7, Verdict.INCONCLUSIVE),
            (1e-7, 5e-7, Verdict.INCONCLUSIVE),
            (1e-2, 9e-3, Verdict.REFUTED),
            (1e-2, 1e-3, Verdict.INCONCLUSIVE),
        ],
    )
    def test_oracle_verdict(self, r_small, r_large, expected):
        assert resolvsym.oracle_verdict(r_small, r_large, 1e-6) == expected

    def test_oracle_cutoffs_respect_dense_budget(self):
        assert fockrep.oracle_cutoffs(1) == (64, 128)
        assert fockrep.oracle_cutoffs(2) == (32, 64)
        assert fockrep.oracle_cutoffs(3) == (8, 16)
