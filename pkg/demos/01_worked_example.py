"""
Sparsifying one NR precoder exactly.

A 4x2 precoder from the NR uplink codebook drives every antenna with a mix of
both streams. Its column span also contains a matrix where each antenna
carries a single stream, and this script finds it.
"""
# %%
import numpy as np

from sparsecode import (
    SparsityPattern,
    chordal_distance,
    count_patterns,
    enumerate_patterns,
    nr_codebook_4x2,
    spca_sparsify,
    try_exact,
)

np.set_printoptions(precision=4, suppress=True)

w = nr_codebook_4x2()[6]  # TPMI 20
print("dense precoder W:\n", w)

# %% Valid sparsity patterns: each antenna belongs to exactly one stream.
print(f"{count_patterns(4, 2)} patterns for 4 antennas and 2 streams:")
for pat in enumerate_patterns(4, 2):
    print("  ", pat)

# %% The exact path searches for a unitary U with W U supported on the pattern.
pat = SparsityPattern.from_blocks([[0, 1], [2, 3]])
res = try_exact(w, pat)
print("feasible:", res.feasible)
print("U:\n", res.unitary)
print("sparse P = W U:\n", res.sparse)
print("chordal distance to W:", chordal_distance(w, res.sparse))

# %% A pattern the span cannot realize is rejected.
bad = SparsityPattern.from_blocks([[0, 2], [1, 3]])
print(f"pattern {bad} feasible:", try_exact(w, bad).feasible)

# %% SPCA reaches the same answer by maximizing the retained energy.
sp = spca_sparsify(w)
print(f"SPCA picks {sp.pattern} with objective {sp.objective:.6f} (max 2)")
