"""End-to-end acceptance gate.

Each test records one pass/fail line (printed in the terminal summary) and
then asserts.  Expect a runtime of about ten minutes on one core.
"""

import numpy as np
import pytest

from conftest import ACCEPTANCE, INVARIANTS
from cqec import baselines
from cqec.cli import replay
from cqec.code import LogicalState, encode
from cqec.config import SimConfig
from cqec.controllers import AhnController, NullController
from cqec.ensemble import run_ensemble
from cqec.quantum import expectation, realize, state_diagnostics
from cqec.sme import ChannelSet, real_step
from cqec.trajectory import run_trajectory

KAPPA = 800.0


def record(n, ok, text):
    ACCEPTANCE[n] = (bool(ok), text)
    assert ok, text


def collect(diag, where):
    INVARIANTS.append((where, diag))


@pytest.fixture(scope="module")
def headline():
    res = run_ensemble(SimConfig(kappa_over_gamma=KAPPA, lambda0_over_kappa=1.0, eta=1.0,
                                 n_trajectories=100, T_gamma=1.0, real_initial="111"))
    collect(res.diagnostics, "headline ensemble")
    return res


def test_c01_single_qubit_decay():
    dt, n = 1e-5, 200_000
    Z, X = realize("Z"), realize("X")
    ch = ChannelSet(np.zeros((2, 2)), [(X, 1.0)], [(Z, 0.0, 1.0)])
    rho = np.diag([1.0, 0.0]).astype(complex)
    err = 0.0
    marks = set(np.linspace(1, n, 100).round().astype(int))
    zero = np.zeros(1)
    for k in range(1, n + 1):
        rho, _ = real_step(rho, ch, None, zero, dt)
        err = max(err, abs(expectation(Z, rho) - np.exp(-2 * k * dt)))
        if k in marks:
            d = state_diagnostics(rho)
            d["min_syndrome"] = d["max_syndrome"] = 1.0
            collect(d, "single qubit, step %d" % k)
    # same limit through the three-qubit loop: every F_q column must follow F1
    cfg = SimConfig(kappa_over_gamma=0.0, controller="none", T_gamma=2.0, output_stride=100)
    r = run_trajectory(cfg)
    collect(r.diagnostics, "three-qubit kappa=0")
    fq = np.column_stack([r.column(f"F_q{q}") for q in (1, 2, 3)])
    err3 = np.max(np.abs(fq - baselines.f_one_qubit(r.times)[:, None]))
    record(1, err <= 1e-4 and err3 <= 1e-4,
           f"single-qubit decay: max |<Z> - e^(-2t)| = {err:.2e}, three-qubit F_q vs F1 {err3:.2e} (tol 1e-4)")


def test_c02_dqec_monte_carlo():
    grid = np.linspace(0.0, 3.0, 20)
    mc = baselines.mc_dqec_majority(grid, 1.0, n_samples=100_000, seed=2024)
    exact = baselines.f_dqec_analytic(grid)
    dev = np.abs(mc.values - exact)
    within = np.all(dev <= 3 * mc.stderr + (mc.stderr == 0) * 1e-15)
    t = np.random.default_rng(7).uniform(0, 10, 100)
    p = baselines.flip_probability(t, 1.0)
    ident = np.max(np.abs(baselines.f_dqec_analytic(t) - (1 - 3 * p**2 + 2 * p**3)))
    record(2, within and ident <= 1e-12,
           f"DQEC Monte Carlo within 3 stderr at all 20 points: {bool(within)}; identity error {ident:.1e}")


def test_c03_slaving_identity():
    psi = encode(LogicalState(0.6, 0.8))
    gaps = []
    for ctrl in (NullController(), AhnController(KAPPA)):
        for index in range(3):
            cfg = SimConfig(eta=1.0, T_gamma=0.1, controller="none")
            r = run_trajectory(cfg, controller=ctrl, initial_real=psi, initial_estimator=psi, index=index)
            assert r.meta["n_steps"] == 10_000
            collect(r.diagnostics, "slaving")
            gaps.append(r.diagnostics["max_state_gap"])
    record(3, max(gaps) <= 1e-10, f"slaving identity: max per-step state gap {max(gaps):.2e} over 1e4 steps (tol 1e-10)")


def _tracking(dt_gamma):
    cfg = SimConfig(kappa_over_gamma=KAPPA, controller="none", real_initial=[0.6, 0.8], T_gamma=1.0,
                    dt_gamma=dt_gamma)
    r = run_trajectory(cfg)
    collect(r.diagnostics, f"tracking dt={dt_gamma}")
    return r


def test_c04_syndrome_tracking():
    g1 = float(np.max(_tracking(1e-5).diagnostics["syndrome_gap"]))
    g2 = float(np.max(_tracking(5e-6).diagnostics["syndrome_gap"]))
    record(4, g1 <= 0.05 and g2 < g1,
           f"syndrome tracking: sup gap {g1:.2e} at dt=1e-5 (tol 0.05), {g2:.2e} at dt=5e-6 (must decrease)")


def test_c05_z_deviation_tracking():
    gaps = _tracking(1e-5).diagnostics["zdev_gap"]
    record(5, np.all(gaps <= 0.1), f"Z-deviation tracking: sup gaps {np.round(gaps, 15).tolist()} (tol 0.1 each)")


def test_c06_headline_fidelity(headline):
    m, s = headline.final_mean, headline.final_stderr
    record(6, m >= 0.99, f"headline fidelity at t=1: {m:.4f} +- {s:.4f} (need >= 0.99; N={headline.n_ok}, "
                         f"failed={len(headline.failed)})")


def test_c07_long_horizon():
    res = run_ensemble(SimConfig(kappa_over_gamma=KAPPA, lambda0_over_kappa=1.0, n_trajectories=50, T_gamma=10.0,
                                 checkpoints=100))
    collect(res.diagnostics, "long horizon")
    m, s = res.final_mean, res.final_stderr
    record(7, m >= 0.95, f"long horizon t=10: {m:.4f} +- {s:.4f} (need >= 0.95; N={res.n_ok})")


def test_c08_dqec_crossover(headline):
    f = baselines.f_dqec_analytic(1.0)
    m = headline.final_mean
    record(8, m - f >= 0.35, f"beats DQEC at t=1: {m:.4f} - {f:.6f} = {m - f:.4f} (need >= 0.35)")


def test_c09_delayed_correction():
    t_on, dt = 0.9, 1e-5
    res = run_ensemble(SimConfig(controller="delayed", t_on_gamma=t_on, n_trajectories=100, output_stride=1))
    collect(res.diagnostics, "delayed")
    i = int(round((t_on - dt) / dt))
    assert abs(res.times[i] - (t_on - dt)) < 1e-12
    before, bound = res.mean[i], baselines.f_three_qubit(t_on - dt) + 0.1
    m = res.final_mean
    record(9, m >= 0.9 and before <= bound,
           f"delayed correction: F(1) = {m:.4f} +- {res.final_stderr:.4f} (need >= 0.9), "
           f"F(t_on - dt) = {before:.4f} (need <= F3 + 0.1 = {bound:.4f})")


def test_c10_efficiency_robustness(headline):
    res = run_ensemble(SimConfig(eta=0.6, n_trajectories=100))
    collect(res.diagnostics, "eta=0.6")
    d = abs(res.final_mean - headline.final_mean)
    record(10, d <= 0.05, f"eta=0.6: {res.final_mean:.4f} vs eta=1: {headline.final_mean:.4f}, "
                          f"difference {d:.4f} (tol 0.05)")


def test_c11_replay_determinism():
    runs = replay(SimConfig(T_gamma=1.0), [0.75, 1.0, 1.25])
    for _, r in runs:
        collect(r.diagnostics, "replay")
    sums = {r.dw_checksum for _, r in runs}
    lam_on = [np.flatnonzero(r.rows[:, 14:17].any(axis=1)) for _, r in runs]
    first = min(int(x[0]) for x in lam_on if x.size)
    F = np.array([r.fidelity for _, r in runs])
    same_before = all(np.array_equal(F[0, :first], f[:first]) for f in F[1:])
    differ_after = all(np.max(np.abs(F[a, first:] - F[b, first:])) > 1e-6 for a, b in ((0, 1), (0, 2), (1, 2)))
    record(11, len(sums) == 1 and same_before and differ_after,
           f"replay: {len(sums)} distinct checksum(s), traces identical before the first flip at "
           f"t={runs[0][1].times[first]:.3f}: {same_before}, divergent after: {differ_after}")


def test_c13_detection_latency():
    t_inj = 0.3
    hits = 0
    for index in range(100):
        cfg = SimConfig(flip_injection=[2, t_inj], T_gamma=0.4, output_stride=10, checkpoints=10)
        r = run_trajectory(cfg, index=index)
        collect(r.diagnostics, "latency")
        window = (r.times >= t_inj) & (r.times <= t_inj + 50 / KAPPA)
        hits += bool(np.any(r.column("lam2")[window] > 0))
    record(13, hits >= 95, f"detection latency: lambda2 on within 50/kappa in {hits}/100 seeds (need >= 95)")


def test_c12_invariants():
    # runs last in this module: checks every diagnostic collected above
    assert INVARIANTS, "no integration runs recorded"
    worst = {
        "trace": max(d["trace_error"] for _, d in INVARIANTS),
        "herm": max(d["hermitian_error"] for _, d in INVARIANTS),
        "eig": min(d["min_eigenvalue"] for _, d in INVARIANTS),
        "syn_lo": min(d["min_syndrome"] for _, d in INVARIANTS),
        "syn_hi": max(d["max_syndrome"] for _, d in INVARIANTS),
    }
    few = [w for w, d in INVARIANTS if "n_checkpoints" in d and d["n_checkpoints"] < 10]
    ok = (worst["trace"] <= 1e-12 and worst["herm"] <= 1e-12 and worst["eig"] >= -1e-6
          and worst["syn_lo"] >= -1 - 1e-6 and worst["syn_hi"] <= 1 + 1e-6 and not few)
    record(12, ok, f"invariants over {len(INVARIANTS)} runs: trace err {worst['trace']:.1e}, herm err "
                   f"{worst['herm']:.1e}, min eig {worst['eig']:.1e}, syndromes in "
                   f"[{worst['syn_lo']:.6f}, {worst['syn_hi']:.6f}]")
