"""Composite Gauss–Legendre panels with cumulative (indefinite) integration on the nodes."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre


@dataclass(frozen=True)
class PanelRule:
    """Nodes of ``panels`` equal panels on [a, b], ``order`` Gauss points each.

    ``cumulative[j, k]`` integrates the interpolant of panel values from the panel start to node j.
    """

    nodes: np.ndarray
    weights: np.ndarray
    cumulative: np.ndarray
    panels: int
    order: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.panels, self.order


@lru_cache(maxsize=32)
def _reference(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x, w = legendre.leggauss(order)
    vander = legendre.legvander(x, order - 1)
    antiderivatives = np.zeros((order + 1, order))
    for i in range(order):
        unit = np.zeros(order)
        unit[i] = 1.0
        antiderivatives[:, i] = legendre.legint(unit, lbnd=-1.0)
    integration = legendre.legvander(x, order) @ antiderivatives @ np.linalg.inv(vander)
    return x, w, integration


def panel_rule(a: float, b: float, panels: int, order: int = 16) -> PanelRule:
    if panels < 1 or order < 2:
        raise ValueError(f"Need at least one panel and two nodes, got panels={panels}, order={order}")
    x, w, integration = _reference(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    cumulative = half[:, None, None] * integration[None, :, :]
    return PanelRule(nodes, weights, cumulative, panels, order)


def cumulative_integral(rule: PanelRule, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Running integral ∫_a^{node} of sampled values (first axis indexes nodes).

    Returns the running values at every node and the total over [a, b].
    """
    panels, order = rule.shape
    blocks = values.reshape((panels, order) + values.shape[1:])
    within = np.einsum("pjk,pk...->pj...", rule.cumulative, blocks)
    totals = np.einsum("pk,pk...->p...", rule.weights.reshape(panels, order), blocks)
    offsets = np.concatenate([np.zeros((1,) + totals.shape[1:], dtype=totals.dtype), np.cumsum(totals, axis=0)[:-1]])
    running = within + offsets[:, None, ...]
    return running.reshape(values.shape), totals.sum(axis=0)


def integrate(rule: PanelRule, values: np.ndarray) -> np.ndarray:
    return np.tensordot(rule.weights, values, axes=(0, 0))
