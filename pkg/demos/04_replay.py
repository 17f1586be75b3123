"""Same noise, different feedback strengths.

The noise of every trajectory is addressed by (seed, trajectory index), so
changing lambda leaves the measurement noise bit-for-bit unchanged.  The
traces agree until the first correction, then each strength takes its own
path.

    python3 demos/04_replay.py [outdir] [trajectory]
"""

import sys

from cqec.cli import replay
from cqec.config import SimConfig
from cqec.plot import Series, write_svg

out = sys.argv[1] if len(sys.argv) > 1 else "."
index = int(sys.argv[2]) if len(sys.argv) > 2 else 0

runs = replay(SimConfig(T_gamma=1.0), [0.0, 0.75, 1.0, 1.25], index=index)
print("noise checksum", runs[0][1].dw_checksum[:16], "shared by all runs")
for lam, r in runs:
    print(f"lambda = {lam:4.2f} kappa: final fidelity {r.final_fidelity:.4f}, "
          f"corrections per qubit {r.events['corrections']}")
series = [Series(f"lambda={lam:g} kappa", r.times, r.fidelity) for lam, r in runs]
print(write_svg(f"{out}/replay.svg", series, ylabel="logical fidelity"))
