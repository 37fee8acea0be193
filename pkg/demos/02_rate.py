"""
Achievable rate before and after sparsification.

For the NR codebook every entry is sparsified exactly, so the two curves
coincide. For a random packing the SPCA fallback costs a small SNR offset.
"""
# %%
import numpy as np

from sparsecode import (
    RateConfig,
    build_sparse_codebook,
    generate_packing,
    nr_codebook_4x2,
    rate_experiment,
    snr_gap,
)

cfg = RateConfig(nr=32, trials=2000, seed=0)

# %% NR codebook: exact path everywhere.
dense = nr_codebook_4x2()
sparse, reports = build_sparse_codebook(dense)
print("methods:", [r.method.value for r in reports])
a, b = rate_experiment(cfg, dense, sparse)
print(" SNR   dense   sparse")
for s, x, y in zip(a.snr_db, a.mean, b.mean):
    print(f"{s:4.0f} {x:7.3f} {y:7.3f}")

# %% Packing codebook: SPCA path.
dense = generate_packing(4, 2, 8, iterations=5000, rng=3)
sparse, reports = build_sparse_codebook(dense)
print("methods:", sorted({r.method.value for r in reports}))
print("mean distortion:", np.mean([r.distortion for r in reports]))
a, b = rate_experiment(cfg, dense, sparse)
mid = 0.5 * (a.mean[0] + a.mean[-1])
print(f"SNR gap at {mid:.2f} b/s/Hz: {snr_gap(a, b, mid):.3f} dB")
