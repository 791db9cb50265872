"""Composite quadrature weights on uniform nodes."""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter


def trapezoid_weights(n_nodes: int, step: float) -> np.ndarray:
    if n_nodes < 2:
        raise InvalidParameter("trapezoid rule needs at least 2 nodes")
    w = np.full(n_nodes, step)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def simpson_weights(n_nodes: int, step: float) -> np.ndarray:
    """Composite Simpson rule; requires an odd node count."""
    if n_nodes < 3 or n_nodes % 2 == 0:
        raise InvalidParameter(f"Simpson rule needs an odd node count >= 3, got {n_nodes}")
    w = np.ones(n_nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (step / 3.0)


def odd_node_count(span: float, max_step: float, minimum: int = 3) -> int:
    """Smallest odd node count putting uniform nodes at most max_step apart."""
    if span < 0 or max_step <= 0:
        raise InvalidParameter("span must be non-negative and max_step positive")
    n = max(int(np.ceil(span / max_step)) + 1, minimum)
    return n if n % 2 == 1 else n + 1
