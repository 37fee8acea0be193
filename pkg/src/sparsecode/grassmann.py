"""
Points on the complex Grassmann manifold G(nt, ns).

A point is stored as any nt x ns matrix with orthonormal columns. Nothing in
this package compares representatives directly; comparisons go through
`chordal_distance` or `subspace_projector`, which depend only on the span.
"""
from __future__ import annotations

import numpy as np

SEMI_UNITARY_TOL = 1e-10


def is_semi_unitary(m, tol: float = SEMI_UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[1] > m.shape[0]:
        return False
    gram = m.conj().T @ m
    return bool(np.linalg.norm(gram - np.eye(m.shape[1])) <= tol)


def check_semi_unitary(m, tol: float = SEMI_UNITARY_TOL) -> np.ndarray:
    """Return `m` as a complex array, raising ValueError unless m^H m = I."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected an nt x ns matrix, got shape {m.shape}")
    nt, ns = m.shape
    if ns > nt:
        raise ValueError(f"need ns <= nt, got {nt}x{ns}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    err = np.linalg.norm(m.conj().T @ m - np.eye(ns))
    if err > tol:
        raise ValueError(f"columns are not orthonormal (||m^H m - I||_F = {err:.3e})")
    return m


def chordal_distance(a, b) -> float:
    """
    Chordal distance ``sqrt(ns - ||a^H b||_F^2)`` between two subspaces.

    Evaluated as ``||a a^H - b b^H||_F / sqrt(2)``, which equals the expression
    above for semi-unitary inputs but does not lose half the significant
    digits to cancellation when the subspaces nearly coincide.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a @ a.conj().T - b @ b.conj().T
    return float(np.linalg.norm(diff) / np.sqrt(2.0))


def random_grassmann_point(nt: int, ns: int, rng=None) -> np.ndarray:
    """
    Draw a point uniformly (Haar) from G(nt, ns).

    `rng` may be a seed or a ``numpy.random.Generator``. The QR factor is
    phase-corrected so that the map from the Gaussian draw is well defined.
    """
    if not 1 <= ns <= nt:
        raise ValueError(f"need 1 <= ns <= nt, got nt={nt}, ns={ns}")
    rng = np.random.default_rng(rng)
    g = (rng.standard_normal((nt, ns)) + 1j * rng.standard_normal((nt, ns))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def subspace_projector(a) -> np.ndarray:
    """Orthogonal projector ``a a^H`` onto the column span of `a`."""
    a = np.asarray(a, dtype=np.complex128)
    return a @ a.conj().T
