"""
Designing a codebook, saving it, and sparsifying it from the command line.
"""
# %%
import subprocess
import sys
import tempfile
from pathlib import Path

from sparsecode import generate_packing, load, min_chordal_distance, save

cb, history = generate_packing(4, 2, 8, iterations=3000, rng=1, return_history=True)
print(f"min chordal distance after 100 steps {history[99]:.3f}, after 3000 {history[-1]:.3f}")

# %%
tmp = Path(tempfile.mkdtemp())
save(cb, tmp / "pack.json")
back = load(tmp / "pack.json")
print("reloaded", len(back), "entries, min distance", round(min_chordal_distance(back), 6))

# %% The same pipeline through the CLI.
cmd = [sys.executable, "-m", "sparsecode.cli", "sparsify", "--input", str(tmp / "pack.json"),
       "--output", str(tmp / "sparse.json"), "--report", str(tmp / "report.json")]
print(subprocess.run(cmd, capture_output=True, text=True, check=True).stdout.strip())
print((tmp / "report.json").read_text()[:400])
