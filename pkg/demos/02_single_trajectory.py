"""One corrected trajectory with moderate feedback (lambda = 0.75 kappa).

Prints every stretch where feedback was active and where the logical
fidelity went after it switched off.

    python3 demos/02_single_trajectory.py [outdir]
"""

import sys

import numpy as np

from cqec.config import from_dict
from cqec.io import write_trajectory_csv
from cqec.plot import Series, write_svg
from cqec.trajectory import run_trajectory

out = sys.argv[1] if len(sys.argv) > 1 else "."
cfg = from_dict({"seed": 1}, preset="fig2")
r = run_trajectory(cfg)

lam = np.column_stack([r.column(f"lam{q}") for q in (1, 2, 3)])
on = lam.any(axis=1)
edges = np.flatnonzero(np.diff(on.astype(int)))
for start, stop in zip(edges[::2], edges[1::2]):
    q = int(np.argmax(lam[start + 1].astype(bool))) + 1
    print(f"t={r.times[start + 1]:.3f}: feedback on qubit {q} for {r.times[stop + 1] - r.times[start + 1]:.4f}, "
          f"fidelity afterwards {r.fidelity[min(stop + 5, len(on) - 1)]:.4f}")
print(f"final logical fidelity {r.final_fidelity:.4f} ({r.wall_time:.1f} s)")

write_trajectory_csv(f"{out}/trajectory.csv", r)
series = [Series("logical", r.times, r.fidelity)] + [
    Series(f"qubit {q}", r.times, r.column(f"F_q{q}")) for q in (1, 2, 3)]
print(write_svg(f"{out}/trajectory.svg", series, ylabel="fidelity"))
