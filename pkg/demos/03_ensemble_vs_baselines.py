"""Ensemble-averaged protection against three reference curves.

A modest ensemble (N = 20 by default, pass a larger N to tighten the band)
is compared with ideal majority-vote correction and with unprotected
qubits.

    python3 demos/03_ensemble_vs_baselines.py [outdir] [N]
"""

import sys

import numpy as np

from cqec import baselines
from cqec.config import SimConfig
from cqec.ensemble import run_ensemble
from cqec.plot import Series, write_svg

out = sys.argv[1] if len(sys.argv) > 1 else "."
n = int(sys.argv[2]) if len(sys.argv) > 2 else 20

res = run_ensemble(SimConfig(n_trajectories=n), progress=lambda k, total: print(f"\r{k}/{total}", end=""))
print()
t = res.times
print(f"mean fidelity at t=1: {res.final_mean:.4f} +- {res.final_stderr:.4f}")
print(f"individual finals: median {np.median(res.final_fidelities):.4f}, "
      f"lowest {res.final_fidelities.min():.4f}")
for name, f in (("majority vote", baselines.f_dqec_analytic), ("one qubit", baselines.f_one_qubit),
                ("three bare qubits", baselines.f_three_qubit)):
    print(f"{name:>18s} at t=1: {float(f(1.0)):.4f}")

series = [
    Series(f"continuous (N={res.n_ok})", t, res.mean, res.stderr),
    Series("majority vote", t, baselines.f_dqec_analytic(t)),
    Series("one qubit", t, baselines.f_one_qubit(t)),
]
print(write_svg(f"{out}/ensemble.svg", series, ylabel="mean fidelity"))
