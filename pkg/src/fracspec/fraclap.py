"""Linear fractional Laplacian on tensor-product collocation grids.

The per-axis second-derivative matrices diagonalize as P Lambda P^-1 with
nonpositive spectra, so the n-dimensional operator acts mode by mode: move
the sample tensor into the eigenbasis along every axis, multiply entrywise
by the fractional power of the (negated, scale-divided) eigenvalue sums,
and move back.  The power tensor has exactly one zero entry, the product of
the per-axis constant modes, which annihilates constant fields exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .eigen import SpectralFactor, factorize
from .errors import NumericalContractError
from .grid import build_diff_matrices, make_grid
from .tensor_ops import eigen_sum_tensor, hadamard_pow_neg, mode_product


@dataclass(frozen=True)
class FracLapOperator:
    """Immutable fractional Laplacian of order ``s`` on a fixed grid.

    ``pow_tensor`` caches the entrywise ``s`` power of the negated
    eigenvalue-sum tensor, scale division included, so repeated applies
    cost only mode products.
    """

    factors: tuple[SpectralFactor, ...]
    scales: tuple[float, ...]
    s: float
    pow_tensor: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.N for f in self.factors)


def build_axis_factors(dims: Sequence[int]) -> tuple[SpectralFactor, ...]:
    """Eigen-factorize the unscaled second-derivative matrix per axis.

    The angular matrices depend only on the node count, so physical scales
    enter later through the eigenvalue division.
    """
    factors = []
    for N in dims:
        grid = make_grid(int(N), 1.0)
        dm = build_diff_matrices(grid)
        factors.append(factorize(dm.Dxx))
    return tuple(factors)


def build_fraclap(
    factors: Sequence[SpectralFactor],
    scales: Sequence[float],
    s: float,
) -> FracLapOperator:
    """Assemble the operator of order s in (0, 1), strict at both ends."""
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie strictly inside (0, 1), got {s!r}")
    factors = tuple(factors)
    scales = tuple(float(L) for L in scales)
    if len(factors) != len(scales):
        raise ValueError(
            f"{len(factors)} factors but {len(scales)} scales"
        )
    if not factors:
        raise ValueError("at least one dimension required")
    if any(L <= 0 for L in scales):
        raise ValueError(f"scales must be positive, got {scales!r}")
    lam = eigen_sum_tensor([f.lam for f in factors], scales)
    pow_tensor = hadamard_pow_neg(lam, s)
    zeros = int(np.count_nonzero(pow_tensor == 0.0))
    if zeros != 1:
        raise NumericalContractError(
            f"power tensor must vanish on exactly one mode, found {zeros}"
        )
    pow_tensor.flags.writeable = False
    return FracLapOperator(factors=factors, scales=scales, s=s, pow_tensor=pow_tensor)


def to_eigenbasis(factors: Sequence[SpectralFactor], U: np.ndarray) -> np.ndarray:
    """Mode-multiply the inverse eigenvector matrix along every axis."""
    for axis, f in enumerate(factors):
        U = mode_product(f.Pinv, U, axis)
    return U


def from_eigenbasis(factors: Sequence[SpectralFactor], U: np.ndarray) -> np.ndarray:
    """Mode-multiply the eigenvector matrix along every axis."""
    for axis, f in enumerate(factors):
        U = mode_product(f.P, U, axis)
    return U


def apply_fraclap(op: FracLapOperator, U: np.ndarray) -> np.ndarray:
    """Evaluate the operator on a sample tensor of matching shape."""
    U = np.asarray(U, dtype=float)
    if U.shape != op.shape:
        raise ValueError(f"field shape {U.shape} does not match grid {op.shape}")
    tilde = to_eigenbasis(op.factors, U)
    return from_eigenbasis(op.factors, op.pow_tensor * tilde)
