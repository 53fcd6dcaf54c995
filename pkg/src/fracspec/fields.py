"""Standard test fields sampled on tensor-product grids."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .grid import Grid1D


def radius_squared(grids: Sequence[Grid1D]) -> np.ndarray:
    """Tensor of |x|^2 = x_1^2 + ... + x_n^2 over the product grid."""
    if len(grids) == 0:
        raise ValueError("need at least one grid")
    n = len(grids)
    total = None
    for ax, g in enumerate(grids):
        shape = [1] * n
        shape[ax] = g.N
        term = (g.x * g.x).reshape(shape)
        total = term if total is None else total + term
    return total


def gaussian_field(grids: Sequence[Grid1D]) -> np.ndarray:
    """exp(-|x|^2) sampled on the product grid."""
    return np.exp(-radius_squared(grids))


def lorentzian_field(grids: Sequence[Grid1D], r: float = 1.0) -> np.ndarray:
    """(1 + |x|^2)**-r sampled on the product grid."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r!r}")
    return (1.0 + radius_squared(grids)) ** (-float(r))
