"""
Multi-stream DFT-s-OFDM transmitter and per-antenna PAPR statistics.

Chain per block: M-point DFT spreading of each stream, wideband precoding
of every occupied tone, contiguous tone mapping centred on DC of an
(N * L)-point grid (zero padding gives L-times oversampling), and an
(N * L)-point inverse DFT per antenna. All transforms are unitary, so the
chain preserves energy. No cyclic prefix: it repeats samples and cannot
change the PAPR.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._mc import chunk_sizes, run_chunks, substream
from .codebook_io import Codebook
from .numeric import dft, idft

MODULATIONS = {"qam4": 4, "qam16": 16, "qam64": 64}
CCDF_STEP_DB = 0.05
_CHUNK = 250


@dataclass(frozen=True)
class WaveformConfig:
    n_prb: int = 52
    fft_size: int = 1024
    oversample: int = 8
    modulation: str = "qam4"

    def __post_init__(self):
        if self.modulation not in MODULATIONS:
            raise ValueError(f"unknown modulation {self.modulation!r}")
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")
        if self.subcarriers > self.fft_size:
            raise ValueError(f"{self.subcarriers} subcarriers do not fit a {self.fft_size}-point FFT")

    @property
    def subcarriers(self) -> int:
        return 12 * self.n_prb

    @property
    def grid_size(self) -> int:
        return self.fft_size * self.oversample


@lru_cache(maxsize=None)
def qam_constellation(modulation: str) -> np.ndarray:
    """Unit-energy square QAM; ``points[label]`` is the Gray-mapped symbol.

    The high half of the label's bits selects the in-phase level, the low
    half the quadrature level, each Gray coded.
    """
    m = MODULATIONS[modulation]
    side = int(round(np.sqrt(m)))
    half = side.bit_length() - 1
    levels = 2 * np.arange(side) - (side - 1)
    gray = np.arange(side) ^ (np.arange(side) >> 1)
    level_of = np.empty(side)
    level_of[gray] = levels
    labels = np.arange(m)
    pts = level_of[labels >> half] + 1j * level_of[labels & (side - 1)]
    pts = pts / np.sqrt(2 * (side ** 2 - 1) / 3)
    pts.flags.writeable = False
    return pts


def modulate(count, modulation: str = "qam4", rng=None, bits=None) -> np.ndarray:
    """
    QAM symbols, either random (from `rng`) or mapped from `bits`.

    `count` may be an int or a shape. With `bits`, its length must be
    ``count * log2(M)`` and consecutive groups are read MSB first.
    """
    pts = qam_constellation(modulation)
    shape = (count,) if np.isscalar(count) else tuple(count)
    if bits is None:
        rng = np.random.default_rng(rng)
        return pts[rng.integers(len(pts), size=shape)]
    k = len(pts).bit_length() - 1
    b = np.asarray(bits, dtype=np.int64).reshape(shape + (k,))
    labels = b @ (1 << np.arange(k - 1, -1, -1))
    return pts[labels]


def tone_positions(cfg: WaveformConfig) -> np.ndarray:
    """Grid indices of the occupied tones, contiguous and centred on DC."""
    m = cfg.subcarriers
    return (np.arange(m) - m // 2) % cfg.grid_size


def _transmit(cfg, precoder, stream_symbols, spread):
    w = np.asarray(precoder, dtype=np.complex128)
    s = np.asarray(stream_symbols, dtype=np.complex128)
    nt, ns = w.shape
    if s.shape[-2:] != (ns, cfg.subcarriers):
        raise ValueError(f"expected (..., {ns}, {cfg.subcarriers}) stream symbols, got {s.shape}")
    f = dft(s) if spread else s
    tones = np.einsum("ij,...jk->...ik", w, f)
    grid = np.zeros(s.shape[:-2] + (nt, cfg.grid_size), dtype=complex)
    grid[..., tone_positions(cfg)] = tones
    return idft(grid)


def dfts_ofdm_symbol(cfg: WaveformConfig, precoder, stream_symbols) -> np.ndarray:
    """
    One DFT-s-OFDM block per antenna.

    Parameters
    ----------
    precoder : ndarray, shape (nt, ns)
    stream_symbols : ndarray, shape (..., ns, M)
        Leading axes batch independent blocks.

    Returns
    -------
    ndarray, shape (..., nt, N * L)
    """
    return _transmit(cfg, precoder, stream_symbols, spread=True)


def ofdm_symbol(cfg: WaveformConfig, precoder, stream_symbols) -> np.ndarray:
    """Same chain without DFT spreading (plain precoded OFDM), for comparison."""
    return _transmit(cfg, precoder, stream_symbols, spread=False)


def _papr_linear(x: np.ndarray) -> np.ndarray:
    p = np.abs(x) ** 2
    mean = p.mean(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(mean > 0, p.max(axis=-1) / mean, np.nan)


def papr_per_antenna(block) -> np.ndarray:
    """PAPR in dB of each row of an (nt, T) block; all-zero rows give NaN."""
    block = np.asarray(block)
    if block.ndim != 2:
        raise ValueError(f"expected an (nt, T) block, got shape {block.shape}")
    r = _papr_linear(block)
    if np.all(np.isnan(r)):
        raise ValueError("every antenna signal is identically zero")
    return 10 * np.log10(r)


def block_papr_db(blocks, agg: str = "mean") -> np.ndarray:
    """PAPR samples from a batch of (..., nt, T) blocks.

    ``agg="mean"`` averages the per-antenna ratios of each block in the
    linear domain (one sample per block); ``agg="pool"`` keeps one sample per
    active antenna.
    """
    r = _papr_linear(np.asarray(blocks))
    if agg == "mean":
        out = np.nanmean(r, axis=-1)
    elif agg == "pool":
        out = r[~np.isnan(r)]
    else:
        raise ValueError(f"unknown aggregation {agg!r}")
    return 10 * np.log10(out.ravel())


@dataclass(frozen=True)
class CcdfCurve:
    samples_db: np.ndarray

    def grid(self, upper: float | None = None) -> np.ndarray:
        top = self.samples_db.max() if upper is None else upper
        n = int(np.ceil(top / CCDF_STEP_DB)) + 2
        return np.round(np.arange(n) * CCDF_STEP_DB, 10)

    def ccdf(self, thresholds_db) -> np.ndarray:
        """P(PAPR > t) for each threshold."""
        s = np.sort(self.samples_db)
        t = np.asarray(thresholds_db, dtype=float)
        return 1.0 - np.searchsorted(s, t, side="right") / s.size

    @property
    def thresholds_db(self) -> np.ndarray:
        return self.grid()

    @property
    def probabilities(self) -> np.ndarray:
        return self.ccdf(self.thresholds_db)

    def papr_at(self, prob: float) -> float:
        """PAPR level exceeded with probability `prob`."""
        return float(np.quantile(self.samples_db, 1.0 - prob))


def papr_ccdf(cfg: WaveformConfig, codebook: Codebook, n_symbols: int, seed: int = 0,
              index: int | None = None, agg: str = "mean", threads: int = 1) -> CcdfCurve:
    """
    Empirical PAPR distribution of precoded DFT-s-OFDM.

    Each block draws fresh QAM symbols for every stream and a precoder from
    `codebook`: uniformly at random, or always entry `index` (0-based) if
    given. Randomness comes from per-chunk substreams of `seed`, so results
    do not depend on `threads`.
    """
    if n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    if index is not None and not 0 <= index < len(codebook):
        raise IndexError(f"codebook index {index} out of range")
    stack = codebook.stack()

    def chunk(c, size):
        rng = substream(seed, 0x5A, c)
        if index is None:
            idx = rng.integers(len(codebook), size=size)
        else:
            idx = np.full(size, index)
        sym = modulate((size, codebook.ns, cfg.subcarriers), cfg.modulation, rng)
        f = dft(sym)
        tones = np.einsum("bij,bjk->bik", stack[idx], f)
        grid = np.zeros((size, codebook.nt, cfg.grid_size), dtype=complex)
        grid[..., tone_positions(cfg)] = tones
        return block_papr_db(idft(grid), agg)

    parts = run_chunks(chunk, chunk_sizes(n_symbols, _CHUNK), threads)
    return CcdfCurve(np.concatenate(parts))
