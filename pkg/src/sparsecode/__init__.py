"""Sparsification of MIMO precoding codebooks for PAPR reduction."""

__version__ = "0.1.0"

from .codebook_io import Codebook, generate_packing, load, min_chordal_distance, nr_codebook_4x2, save
from .evaluation import (
    RateConfig,
    RateCurve,
    distortion,
    distortion_sweep,
    rate,
    rate_experiment,
    select_index,
    snr_gap,
)
from .grassmann import chordal_distance, random_grassmann_point, subspace_projector
from .patterns import SparsityPattern, count_patterns, enumerate_patterns
from .sparsifier import (
    Method,
    SparsifyReport,
    build_sparse_codebook,
    spca_block,
    spca_sparsify,
    try_exact,
)
from .waveform import CcdfCurve, WaveformConfig, dfts_ofdm_symbol, papr_ccdf, papr_per_antenna

__all__ = [
    "Codebook", "generate_packing", "load", "min_chordal_distance", "nr_codebook_4x2", "save",
    "RateConfig", "RateCurve", "distortion", "distortion_sweep", "rate", "rate_experiment",
    "select_index", "snr_gap",
    "chordal_distance", "random_grassmann_point", "subspace_projector",
    "SparsityPattern", "count_patterns", "enumerate_patterns",
    "Method", "SparsifyReport", "build_sparse_codebook", "spca_block", "spca_sparsify", "try_exact",
    "CcdfCurve", "WaveformConfig", "dfts_ofdm_symbol", "papr_ccdf", "papr_per_antenna",
]
