"""
PAPR of precoded DFT-s-OFDM with dense and sparse precoders.

A sparse precoder sends one DFT-spread stream per antenna, which keeps the
single-carrier envelope. A dense precoder adds two such streams on every
antenna and raises the peaks.
"""
# %%
from sparsecode import WaveformConfig, build_sparse_codebook, nr_codebook_4x2, papr_ccdf

cfg = WaveformConfig()  # 52 PRB, 1024-point FFT, 8x oversampling, QAM4
print(f"{cfg.subcarriers} subcarriers on a {cfg.grid_size}-point grid")

dense = nr_codebook_4x2()
sparse, _ = build_sparse_codebook(dense)

n = 5000  # the acceptance run uses 2e4 blocks
cd = papr_ccdf(cfg, dense, n, seed=1)
cs = papr_ccdf(cfg, sparse, n, seed=1)

# %%
print("threshold  CCDF dense  CCDF sparse")
for t in (5.0, 6.0, 7.0, 8.0, 9.0):
    print(f"{t:6.1f} dB  {cd.ccdf([t])[0]:10.4f}  {cs.ccdf([t])[0]:11.4f}")
pd, ps = cd.papr_at(1e-2), cs.papr_at(1e-2)
print(f"PAPR at CCDF 1e-2: dense {pd:.2f} dB, sparse {ps:.2f} dB, reduction {pd - ps:.2f} dB")
