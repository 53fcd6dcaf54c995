"""Eigen-factorization of the second-derivative matrix.

The even-extension second-derivative matrix has one eigenvalue at zero
(constants differentiate to zero) and N-1 strictly negative ones.  The raw
dense eigensolve returns the zero mode only to rounding, so the smallest
magnitude eigenvalue is snapped to exactly 0 and its eigenvector replaced by
the exact constant mode with unit Euclidean norm.  Fractional powers of the
spectrum then never see a spurious sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonRealSpectrum, PositiveEigenvalue, SingularEigenvectors, SingularMatrix

# imaginary parts above this (relative to the spectral radius) cannot be
# dismissed as rounding of a real spectrum
_IMAG_TOL = 1e-6


@dataclass(frozen=True)
class SpectralFactor:
    """Diagonalization ``Dxx = P @ diag(lam) @ Pinv`` with a repaired kernel.

    ``lam`` is sorted ascending, so ``lam[zero_index]`` is the exact 0 at the
    end and every other entry is strictly negative.  Column ``zero_index`` of
    ``P`` is the constant vector with entries ``N**-0.5``.  ``raw_zero_lambda``
    keeps the eigenvalue the solver originally reported for the kernel mode,
    purely as a diagnostic of solver noise.
    """

    N: int
    P: np.ndarray
    Pinv: np.ndarray
    lam: np.ndarray
    zero_index: int
    raw_zero_lambda: float


def factorize(Dxx: np.ndarray) -> SpectralFactor:
    """Diagonalize a second-derivative matrix and repair its kernel mode.

    Raises
    ------
    NonRealSpectrum
        if any eigenvalue has an imaginary part above 1e-6 of the largest
        eigenvalue magnitude.
    PositiveEigenvalue
        if an eigenvalue other than the snapped kernel mode is positive.
    SingularEigenvectors
        if the eigenvector matrix cannot be inverted.
    """
    Dxx = np.asarray(Dxx, dtype=float)
    if Dxx.ndim != 2 or Dxx.shape[0] != Dxx.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {Dxx.shape}")
    n = Dxx.shape[0]
    w, v = np.linalg.eig(Dxx)
    if np.iscomplexobj(w):
        scale = float(np.max(np.abs(w)))
        worst = float(np.max(np.abs(w.imag)))
        if worst > _IMAG_TOL * scale:
            raise NonRealSpectrum(
                f"largest imaginary eigenvalue part {worst:.3e} exceeds {_IMAG_TOL:g} * {scale:.3e}"
            )
        w = w.real
        v = v.real
    order = np.argsort(w)
    w = w[order].copy()
    v = v[:, order].copy()
    zi = int(np.argmin(np.abs(w)))
    raw_zero = float(w[zi])
    w[zi] = 0.0
    if np.any(w > 0.0):
        worst = float(np.max(w))
        raise PositiveEigenvalue(f"positive eigenvalue {worst:.6e} after kernel repair")
    v[:, zi] = n ** -0.5
    try:
        pinv = np.linalg.solve(v, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise SingularEigenvectors(f"eigenvector matrix is singular: {exc}") from None
    w.flags.writeable = False
    v.flags.writeable = False
    pinv.flags.writeable = False
    return SpectralFactor(N=n, P=v, Pinv=pinv, lam=w, zero_index=zi, raw_zero_lambda=raw_zero)


def condition_number(P: np.ndarray) -> float:
    """Spectral-norm condition number, largest over smallest singular value."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {P.shape}")
    sv = np.linalg.svd(P, compute_uv=False)
    if sv[-1] == 0.0:
        raise SingularMatrix("smallest singular value is exactly zero")
    return float(sv[0] / sv[-1])
