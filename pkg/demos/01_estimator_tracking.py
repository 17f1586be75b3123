"""The estimator follows the syndromes of a state it knows nothing about.

The measured system starts in 0.6|000> + 0.8|111>, the estimator in |000>.
No feedback is applied.  Both see the same three measurement records, and
their syndrome means coincide for the whole run even though the encoded
amplitudes differ.

    python3 demos/01_estimator_tracking.py [outdir]
"""

import sys

import numpy as np

from cqec.config import SimConfig
from cqec.plot import Series, write_svg
from cqec.trajectory import run_trajectory

out = sys.argv[1] if len(sys.argv) > 1 else "."
cfg = SimConfig(controller="none", real_initial=[0.6, 0.8], T_gamma=1.0, seed=3)
r = run_trajectory(cfg)

gap = max(np.max(np.abs(r.column(f"{s}_R") - r.column(f"{s}_E"))) for s in ("sZZI", "sIZZ", "sZIZ"))
print(f"largest syndrome gap over the run: {gap:.1e}")
print(f"largest gap inside the integrator (every step): {max(r.diagnostics['syndrome_gap']):.1e}")

series = [Series("ZZI measured", r.times, r.column("sZZI_R")),
          Series("ZZI estimator", r.times, r.column("sZZI_E"))]
print(write_svg(f"{out}/tracking.svg", series, ylabel="<ZZI>", title="syndrome tracking without feedback"))
