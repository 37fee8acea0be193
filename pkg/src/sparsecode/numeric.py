"""
Dense complex linear-algebra and transform kernels.

Everything here is a thin, contract-checked layer over numpy's LAPACK and
pocketfft bindings. Rank decisions use a tolerance relative to the largest
singular value.
"""
from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-8
HERMITIAN_TOL = 1e-10


class NumericalError(ArithmeticError):
    """A decomposition failed to converge or produced non-finite output."""


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"matrix of shape {m.shape} has non-finite entries")
    return m


def svd(m):
    """
    Thin singular value decomposition.

    Returns
    -------
    u : ndarray, shape (rows, k)
    s : ndarray, shape (k,)
        Nonnegative, descending.
    vh : ndarray, shape (k, cols)
    """
    m = _as_matrix(m)
    if m.size == 0:
        r, c = m.shape
        return np.zeros((r, 0), complex), np.zeros(0), np.zeros((0, c), complex)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {m.shape[0]}x{m.shape[1]} matrix") from exc
    return u, s, vh


def _rank(s: np.ndarray, tol: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def nullspace_basis(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the null space of `m`.

    Singular values at or below ``tol * s_max`` count as zero. A full
    column-rank input gives a ``(cols, 0)`` array.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = _as_matrix(m)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=complex)
    try:
        _, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {m.shape[0]}x{m.shape[1]} matrix") from exc
    r = _rank(s, tol)
    return vh[r:].conj().T


def pseudoinverse(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the same rank cutoff as `nullspace_basis`."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    u, s, vh = svd(m)
    r = _rank(s, tol)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def hermitian_top_eigpair(m):
    """
    Largest eigenvalue of a Hermitian matrix and a unit eigenvector for it.

    The input is symmetrized as ``(m + m^H) / 2`` before decomposition, which
    absorbs roundoff in matrices assembled from products like ``W W^H``.

    Raises
    ------
    ValueError
        If `m` is not square or departs from Hermitian by more than 1e-10
        (relative to ``max(1, ||m||_F)``).
    """
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    asym = np.linalg.norm(m - m.conj().T)
    if asym > HERMITIAN_TOL * max(1.0, np.linalg.norm(m)):
        raise ValueError(f"matrix is not Hermitian (||m - m^H||_F = {asym:.3e})")
    h = 0.5 * (m + m.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigh did not converge for {h.shape[0]}x{h.shape[0]} matrix") from exc
    return float(w[-1]), v[:, -1]


def dft(x) -> np.ndarray:
    """Unitary DFT along the last axis."""
    return np.fft.fft(np.asarray(x, dtype=np.complex128), norm="ortho")


def idft(x) -> np.ndarray:
    """Unitary inverse DFT along the last axis."""
    return np.fft.ifft(np.asarray(x, dtype=np.complex128), norm="ortho")
