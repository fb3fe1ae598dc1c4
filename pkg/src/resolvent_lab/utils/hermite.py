"""Hermite functions by the three-term recurrence and Gauss–Hermite rules in log-stable form."""

from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite


def hermite_functions(count: int, x: np.ndarray | float) -> np.ndarray:
    """Φ_0..Φ_{count−1} at x, shape (count, len(x)); orthonormal in L²(ℝ)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = np.zeros((count, x.size))
    if count == 0:
        return table
    table[0] = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if count > 1:
        table[1] = np.sqrt(2.0) * x * table[0]
    for n in range(1, count - 1):
        table[n + 1] = np.sqrt(2.0 / (n + 1)) * x * table[n] - np.sqrt(n / (n + 1)) * table[n - 1]
    return table


@lru_cache(maxsize=16)
def gauss_hermite(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ∫ g(x) dx with g decaying like e^{−x²}; the weight e^{x²} is folded in."""
    nodes, weights = hermite.hermgauss(order)
    return nodes, np.exp(np.log(weights) + nodes * nodes)


def weighted_norm_sq(n: int) -> float:
    """‖e^{−Q²/2}Φ_n‖² = (1/√2)·(2n)!/(2^{2n}(n!)²), as a running product."""
    value = 1.0 / np.sqrt(2.0)
    for k in range(1, n + 1):
        value *= (2 * k - 1) / (2 * k)
    return value


def weighted_norm_sq_quadrature(n: int) -> float:
    """∫ e^{−x²}Φ_n(x)² dx, exact with a Gauss–Hermite rule after substituting y = √2·x."""
    nodes, weights = hermite.hermgauss(n + 8)
    phi = hermite_functions(n + 1, nodes / np.sqrt(2.0))[n]
    return float(np.sum(weights * phi * phi * np.exp(0.5 * nodes * nodes)) / np.sqrt(2.0))
