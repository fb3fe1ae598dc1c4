"""
Unit tests for the quadrature and Hermite helpers.
"""

import math

import numpy as np
import pytest

from resolvent_lab.utils import hermite, quadrature


@pytest.mark.unit
class TestPanelRules:
    """Composite Gauss–Legendre rules."""

    def test_integrates_polynomials_exactly(self):
        rule = quadrature.panel_rule(0.0, 2.0, 3, 8)
        assert quadrature.integrate(rule, rule.nodes**5) == pytest.approx(2.0**6 / 6.0, rel=1e-13)

    def test_cumulative_integral_of_cosine(self):
        rule = quadrature.panel_rule(0.0, math.pi, 4, 16)
        running, total = quadrature.cumulative_integral(rule, np.cos(rule.nodes))
        assert np.allclose(running, np.sin(rule.nodes), atol=1e-12)
        assert total == pytest.approx(0.0, abs=1e-12)

    def test_cumulative_integral_keeps_trailing_axes(self):
        rule = quadrature.panel_rule(0.0, 1.0, 2, 6)
        values = np.stack([np.ones_like(rule.nodes), rule.nodes], axis=1)
        running, total = quadrature.cumulative_integral(rule, values)
        assert running.shape == values.shape
        assert np.allclose(total, [1.0, 0.5])

    def test_invalid_rule(self):
        with pytest.raises(ValueError):
            quadrature.panel_rule(0.0, 1.0, 0)


@pytest.mark.unit
class TestHermiteFunctions:
    """Recurrence, orthonormality and weighted norms."""

    def test_orthonormal(self):
        x, w = hermite.gauss_hermite(80)
        table = hermite.hermite_functions(12, x)
        gram = (table * w[None, :]) @ table.T
        assert np.allclose(gram, np.eye(12), atol=1e-10)

    def test_ground_state(self):
        assert hermite.hermite_functions(1, 0.0)[0, 0] == pytest.approx(math.pi**-0.25)

    def test_empty_table(self):
        assert hermite.hermite_functions(0, [0.0, 1.0]).shape == (0, 2)

    @pytest.mark.parametrize("n", [0, 1, 5, 20])
    def test_weighted_norm_closed_form_matches_quadrature(self, n):
        assert hermite.weighted_norm_sq(n) == pytest.approx(hermite.weighted_norm_sq_quadrature(n), rel=1e-10)

    def test_weighted_norm_values(self):
        assert hermite.weighted_norm_sq(0) == pytest.approx(1.0 / math.sqrt(2.0))
        assert hermite.weighted_norm_sq(1) == pytest.approx(0.5 / math.sqrt(2.0))
