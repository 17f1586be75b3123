"""Ensembles of independent trajectories, aggregation and parameter sweeps."""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SWEEPABLE
from .sme import IntegrationError
from .trajectory import run_trajectory


@dataclass
class EnsembleResult:
    """Pointwise mean and standard error of the logical fidelity.

    ``failed`` lists ``(index, message)`` for excluded trajectories.
    ``diagnostics`` holds the worst value of each invariant over the
    surviving trajectories.
    """

    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_ok: int
    failed: list = field(default_factory=list)
    final_fidelities: np.ndarray = None
    diagnostics: dict = field(default_factory=dict)
    events: dict = field(default_factory=dict)
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def final_mean(self):
        return float(self.mean[-1])

    @property
    def final_stderr(self):
        return float(self.stderr[-1])

    def at(self, t):
        """Mean and stderr at the recorded time closest to ``t``."""
        i = int(np.argmin(np.abs(self.times - t)))
        return float(self.mean[i]), float(self.stderr[i])

    def summary(self):
        return {
            "n_trajectories": self.n_ok + len(self.failed),
            "n_ok": self.n_ok,
            "failed": [list(f) for f in self.failed],
            "final_mean_fidelity": self.final_mean,
            "final_stderr": self.final_stderr,
            "events": self.events,
            "diagnostics": self.diagnostics,
            "wall_time": self.wall_time,
            "config": self.config,
        }


def mean_stderr(traces):
    """Mean over axis 0 and standard error ``std(ddof=1) / sqrt(N)``; zero for N = 1."""
    traces = np.asarray(traces, dtype=float)
    n = traces.shape[0]
    if n == 0:
        raise ValueError("no traces to aggregate")
    mean = traces.mean(axis=0)
    if n == 1:
        return mean, np.zeros_like(mean)
    return mean, traces.std(axis=0, ddof=1) / np.sqrt(n)


_WORST = {
    "trace_error": max, "hermitian_error": max, "min_eigenvalue": min,
    "min_syndrome": min, "max_syndrome": max, "max_state_gap": max,
}


def _merge_diagnostics(diags):
    out = {}
    for key, pick in _WORST.items():
        vals = [float(d[key]) for d in diags if key in d]
        if vals:
            out[key] = pick(vals)
    for key in ("syndrome_gap", "zdev_gap"):
        arrs = [np.asarray(d[key]) for d in diags if key in d]
        if arrs:
            out[key] = np.max(arrs, axis=0).tolist()
    out["n_checkpoints"] = int(sum(d.get("n_checkpoints", 0) for d in diags))
    return out


def aggregate(results, failed=(), wall_time=0.0, config=None):
    """Combine :class:`~cqec.trajectory.TrajectoryResult` objects on a shared grid.

    Raises
    ------
    ValueError
        If the results are empty or their time grids differ.
    """
    results = sorted(results, key=lambda r: r.index)
    if not results:
        raise ValueError("no successful trajectories to aggregate")
    times = results[0].times
    for r in results[1:]:
        if r.times.shape != times.shape or not np.array_equal(r.times, times):
            raise ValueError(f"time grid of trajectory {r.index} differs from trajectory {results[0].index}")
    mean, stderr = mean_stderr([r.fidelity for r in results])
    det = np.sum([r.events["detections"] for r in results], axis=0)
    cor = np.sum([r.events["corrections"] for r in results], axis=0)
    return EnsembleResult(
        times=times.copy(),
        mean=mean,
        stderr=stderr,
        n_ok=len(results),
        failed=sorted(failed),
        final_fidelities=np.array([r.final_fidelity for r in results]),
        diagnostics=_merge_diagnostics([r.diagnostics for r in results]),
        events={"detections": det.tolist(), "corrections": cor.tolist()},
        wall_time=wall_time,
        config=config or {},
    )


class _Slim:
    # keeps only what aggregate needs, so long ensembles stay small in memory
    def __init__(self, r):
        self.index = r.index
        self.times = r.times
        self.fidelity = r.fidelity.copy()
        self.final_fidelity = r.final_fidelity
        self.events = r.events
        self.diagnostics = r.diagnostics


def run_ensemble(config, workers=1, keep=False, progress=None):
    """Run ``config.n_trajectories`` trajectories with indices ``0..N-1``.

    Each trajectory draws its own noise stream from ``(seed, index)``, so the
    result does not depend on ``workers``.  Trajectories that fail are
    excluded and reported in ``failed``.

    Parameters
    ----------
    config : SimConfig
    workers : int
        Threads to use; the compiled loop releases the GIL.
    keep : bool
        Also return the full per-trajectory results.
    progress : callable, optional
        Called as ``progress(done, total)`` after each trajectory.
    """
    start = time.perf_counter()
    n = config.n_trajectories
    done = []
    failed = []

    def one(i):
        try:
            return run_trajectory(config, index=i)
        except IntegrationError as exc:
            return (i, str(exc))

    if workers <= 1:
        outputs = map(one, range(n))
        pool = None
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        outputs = pool.map(one, range(n))
    full = []
    try:
        for k, out in enumerate(outputs):
            if isinstance(out, tuple):
                failed.append(out)
            else:
                done.append(_Slim(out))
                if keep:
                    full.append(out)
            if progress is not None:
                progress(k + 1, n)
    finally:
        if pool is not None:
            pool.shutdown()
    result = aggregate(done, failed, time.perf_counter() - start, config.to_dict())
    return (result, full) if keep else result


def sweep_configs(config):
    """Expand ``config.sweep`` into ``[(value, SimConfig), ...]``."""
    if config.sweep is None:
        return [(None, config)]
    param, values = config.sweep["param"], config.sweep["values"]
    if param not in SWEEPABLE:
        raise ValueError(f"cannot sweep {param!r}")
    return [(v, config.with_updates(**{param: v, "sweep": None})) for v in values]


def run_sweep(config, workers=1, progress=None):
    """One ensemble per sweep value; returns ``[(value, EnsembleResult), ...]``."""
    return [(v, run_ensemble(c, workers=workers, progress=progress)) for v, c in sweep_configs(config)]
