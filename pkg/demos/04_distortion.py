"""
How far SPCA moves a random subspace.

sigma_e = ||P P^H - W W^H||^2 / (2 ns) measures the lost subspace energy. It
grows slowly with the number of antennas and peaks when the streams split
the antennas evenly.
"""
# %%
from sparsecode import distortion_sweep

trials = 500
print("ns = 2")
for row in distortion_sweep([(nt, 2) for nt in range(4, 9)], trials, seed=0):
    print(f"  nt={row.nt}: {row.mean:.4f} +/- {row.se:.4f}")

# %%
print("nt = 6")
for row in distortion_sweep([(6, ns) for ns in range(1, 7)], trials, seed=0):
    print(f"  ns={row.ns}: {row.mean:.4f} +/- {row.se:.4f}")
