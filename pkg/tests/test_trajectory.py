import numpy as np
import pytest

from cqec.code import LogicalState, encode
from cqec.config import SimConfig
from cqec.controllers import AhnController, DelayedController, MBEZController, NullController
from cqec.trajectory import COLUMNS, run_trajectory, run_trajectory_reference

# an injected flip early on guarantees the feedback path is exercised
SHORT = dict(T_gamma=0.02, output_stride=50, flip_injection=[1, 0.005])


@pytest.mark.parametrize("integrator", ["kraus", "euler"])
@pytest.mark.parametrize("controller", [
    lambda: NullController(),
    lambda: MBEZController(800.0),
    lambda: AhnController(800.0),
    lambda: DelayedController(MBEZController(800.0), 0.01),
])
def test_kernel_matches_reference(integrator, controller):
    cfg = SimConfig( integrator=integrator, **SHORT)
    fast = run_trajectory(cfg, controller=controller())
    rows, rho_r, rho_e = run_trajectory_reference(cfg, controller=controller())
    assert np.max(np.abs(fast.rows[:, 1:] - rows[:, 1:])) < 1e-9
    assert np.max(np.abs(fast.final_real - rho_r)) < 1e-10
    assert np.max(np.abs(fast.final_estimator - rho_e)) < 1e-10


def test_feedback_is_exercised_in_the_cross_check():
    r = run_trajectory(SimConfig(**SHORT))
    assert sum(r.events["detections"]) > 0


def test_rows_and_columns():
    cfg = SimConfig(T_gamma=0.01, output_stride=100)
    r = run_trajectory(cfg)
    assert r.rows.shape == (11, len(COLUMNS))
    assert np.allclose(r.times, np.arange(11) * 1e-3)
    assert r.column("F_logical")[0] == 1.0


def test_determinism_and_index_addressing():
    cfg = SimConfig(T_gamma=0.01)
    a, b = run_trajectory(cfg, index=3), run_trajectory(cfg, index=3)
    assert np.array_equal(a.rows, b.rows) and a.dw_checksum == b.dw_checksum
    assert run_trajectory(cfg, index=4).dw_checksum != a.dw_checksum


def test_lambda_does_not_touch_the_noise():
    cfg = SimConfig(T_gamma=0.01)
    a = run_trajectory(cfg.with_updates(lambda0_over_kappa=0.5))
    b = run_trajectory(cfg.with_updates(lambda0_over_kappa=1.5))
    assert a.dw_checksum == b.dw_checksum


def test_identical_initial_states_stay_locked():
    cfg = SimConfig(T_gamma=0.02, controller="mbe_z")
    psi = encode(LogicalState(0.6, 0.8))
    r = run_trajectory(cfg, initial_real=psi, initial_estimator=psi)
    assert r.diagnostics["max_state_gap"] < 1e-10


def test_flip_injection_is_detected():
    cfg = SimConfig(T_gamma=0.02, flip_injection=[3, 0.01], output_stride=10)
    r = run_trajectory(cfg)
    t, lam3 = r.times, r.column("lam3")
    assert np.any(lam3[(t >= 0.01) & (t <= 0.01 + 50 / 800)] > 0)
