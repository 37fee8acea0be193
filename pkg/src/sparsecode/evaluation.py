"""
Monte Carlo experiments: achievable rate under codebook selection, and
sparsification distortion on random Grassmann points.

Rates are in bits/s/Hz per subcarrier: the sum over the K subcarriers of
``log2 det(I + rho/ns W^H H_k^H H_k W)`` divided by K.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._mc import chunk_sizes, run_chunks, substream
from .codebook_io import Codebook
from .grassmann import random_grassmann_point
from .numeric import NumericalError
from .patterns import enumerate_patterns
from .sparsifier import spca_sparsify

_CHUNK = 500


def rayleigh_channels(nr: int, nt: int, size, rng) -> np.ndarray:
    """I.i.d. CN(0, 1) channel matrices of shape ``size + (nr, nt)``."""
    size = (size,) if np.isscalar(size) else tuple(size)
    shape = size + (nr, nt)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _gram_eigs(entries: np.ndarray, channels: np.ndarray) -> np.ndarray:
    # entries (n, nt, ns), channels (..., nr, nt) -> eigenvalues of
    # W^H H^H H W with shape (..., n, ns)
    hw = np.einsum("...rt,nts->...nrs", channels, entries)
    g = np.einsum("...nrs,...nru->...nsu", hw.conj(), hw)
    return np.clip(np.linalg.eigvalsh(g), 0.0, None)


def _rates_from_eigs(eigs: np.ndarray, rho) -> np.ndarray:
    # eigs (..., K, n, ns); rho scalar or (S,) -> (S?, ..., n)
    ns = eigs.shape[-1]
    rho = np.asarray(rho, dtype=float)
    x = np.log2(1.0 + rho.reshape(rho.shape + (1,) * eigs.ndim) / ns * eigs)
    return x.sum(axis=-1).mean(axis=-2)


def rate(w, channels, rho: float) -> float:
    """Achievable rate of precoder `w` averaged over the given channels.

    `channels` is one (nr, nt) matrix or a stack of K of them.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    h = np.asarray(channels, dtype=np.complex128)
    if h.ndim == 2:
        h = h[None]
    w = np.asarray(w, dtype=np.complex128)
    return float(_rates_from_eigs(_gram_eigs(w[None], h), rho)[0])


def select_index(codebook: Codebook, channels, rho: float) -> int:
    """0-based index of the rate-maximizing entry; lowest index on ties."""
    h = np.asarray(channels, dtype=np.complex128)
    if h.ndim == 2:
        h = h[None]
    r = _rates_from_eigs(_gram_eigs(codebook.stack(), h), rho)
    return int(np.argmax(r))


@dataclass(frozen=True)
class RateCurve:
    snr_db: np.ndarray
    mean: np.ndarray
    se: np.ndarray


@dataclass(frozen=True)
class RateConfig:
    nr: int = 32
    snr_db: tuple = tuple(range(-10, 31, 2))
    trials: int = 10_000
    k: int = 1
    seed: int = 0


def rate_experiment(cfg: RateConfig, dense: Codebook, sparse: Codebook, threads: int = 1):
    """
    Rate of the dense codebook and of its sparse counterpart under the
    dense codebook's feedback.

    For every trial and SNR point the index is chosen over `dense`; the
    sparse codebook is evaluated at that same index and never re-selected.

    Returns
    -------
    (RateCurve, RateCurve)
        Dense and sparse curves; ``se`` is the standard error of the mean.
    """
    if len(dense) != len(sparse):
        raise ValueError(f"codebook sizes differ: {len(dense)} vs {len(sparse)}")
    if (dense.nt, dense.ns) != (sparse.nt, sparse.ns):
        raise ValueError("codebook dimensions differ")
    if dense.ns > min(dense.nt, cfg.nr):
        raise ValueError(f"ns={dense.ns} exceeds min(nt, nr)")
    snr = np.asarray(cfg.snr_db, dtype=float)
    rho = 10.0 ** (snr / 10.0)
    cd, cs = dense.stack(), sparse.stack()

    def chunk(c, size):
        rng = substream(cfg.seed, 0x4A7E, c)
        h = rayleigh_channels(cfg.nr, dense.nt, (size, cfg.k), rng)
        rd = _rates_from_eigs(_gram_eigs(cd, h), rho)  # (S, size, n)
        rs = _rates_from_eigs(_gram_eigs(cs, h), rho)
        pick = np.argmax(rd, axis=-1)[..., None]
        a = np.take_along_axis(rd, pick, -1)[..., 0]
        b = np.take_along_axis(rs, pick, -1)[..., 0]
        return np.stack([a.sum(1), (a * a).sum(1), b.sum(1), (b * b).sum(1)])

    parts = run_chunks(chunk, chunk_sizes(cfg.trials, _CHUNK), threads)
    tot = np.sum(parts, axis=0)
    n = cfg.trials

    def curve(s1, s2):
        mean = s1 / n
        var = np.maximum(s2 / n - mean ** 2, 0.0) * n / max(n - 1, 1)
        return RateCurve(snr, mean, np.sqrt(var / n))

    return curve(tot[0], tot[1]), curve(tot[2], tot[3])


def snr_at_rate(curve: RateCurve, target: float) -> float:
    r = np.maximum.accumulate(np.asarray(curve.mean, dtype=float))
    if not r[0] <= target <= r[-1]:
        raise ValueError(f"target rate {target} outside curve range [{r[0]:.3f}, {r[-1]:.3f}]")
    return float(np.interp(target, r, curve.snr_db))


def snr_gap(curve_a: RateCurve, curve_b: RateCurve, target_rate: float) -> float:
    """Extra SNR (dB) curve b needs to reach `target_rate`, relative to curve a."""
    return snr_at_rate(curve_b, target_rate) - snr_at_rate(curve_a, target_rate)


def distortion(w, p) -> float:
    """Chordal-distance NMSE ``||P P^H - W W^H||_F^2 / (2 ns)``, in [0, 1]."""
    w = np.asarray(w)
    p = np.asarray(p)
    if w.shape != p.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {p.shape}")
    diff = p @ p.conj().T - w @ w.conj().T
    return float(np.linalg.norm(diff) ** 2 / (2 * w.shape[1]))


@dataclass(frozen=True)
class DistortionRow:
    nt: int
    ns: int
    mean: float
    se: float
    trials: int


def distortion_samples(nt: int, ns: int, trials: int, seed: int = 0, threads: int = 1) -> np.ndarray:
    """Per-trial SPCA distortion on `trials` Haar-random points of G(nt, ns).

    Every sample is checked against the identity distortion = d_c^2 / ns,
    with ``d_c^2`` taken in its overlap form ``ns - ||W^H P||_F^2`` so the
    two sides are computed independently.
    """
    patterns = enumerate_patterns(nt, ns)

    def chunk(c, size):
        rng = substream(seed, 0xD157, nt, ns, c)
        out = np.empty(size)
        for t in range(size):
            w = random_grassmann_point(nt, ns, rng)
            p = spca_sparsify(w, patterns).sparse
            e = distortion(w, p)
            d2 = ns - np.linalg.norm(w.conj().T @ p) ** 2
            if abs(e - d2 / ns) > 1e-12:
                raise NumericalError(f"distortion identity violated ({e!r} vs {d2 / ns!r})")
            out[t] = e
        return out

    return np.concatenate(run_chunks(chunk, chunk_sizes(trials, 100), threads))


def distortion_sweep(dims: Sequence[tuple], trials: int, seed: int = 0, threads: int = 1):
    """Mean SPCA distortion and its standard error for each (nt, ns)."""
    rows = []
    for nt, ns in dims:
        e = distortion_samples(nt, ns, trials, seed, threads)
        se = float(e.std(ddof=1) / np.sqrt(e.size)) if e.size > 1 else 0.0
        rows.append(DistortionRow(nt, ns, float(e.mean()), se, trials))
    return rows
