"""Paired measured-system / estimator trajectories with feedback."""

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernel
from .code import FEEDBACK_GENERATORS, QUBIT_Z, STABILIZERS, per_qubit_fidelity
from .config import reference_qubit_states
from .controllers import qubit_z, syndrome_means
from .noise import NoiseStream, checksum
from .quantum import projector, pure_state_fidelity, realize
from .sme import FeedbackHamiltonian, IntegrationError, bitflip_channels, estimator_step, real_step

COLUMNS = (
    "t", "F_logical", "F_q1", "F_q2", "F_q3",
    "sZZI_R", "sIZZ_R", "sZIZ_R", "sZZI_E", "sIZZ_E", "sZIZ_E",
    "dQ1", "dQ2", "dQ3", "lam1", "lam2", "lam3",
)


@dataclass
class TrajectoryResult:
    """Recorded time series of one trajectory (one row per output stride)."""

    index: int
    rows: np.ndarray
    diagnostics: dict
    events: dict
    dw_checksum: str
    final_real: np.ndarray
    final_estimator: np.ndarray
    wall_time: float = 0.0
    meta: dict = field(default_factory=dict)

    def column(self, name):
        return self.rows[:, COLUMNS.index(name)]

    @property
    def times(self):
        return self.rows[:, 0]

    @property
    def fidelity(self):
        return self.rows[:, 1]

    @property
    def final_fidelity(self):
        return self.meta["final_fidelity"]


def _as_density(state):
    state = np.asarray(state, dtype=complex)
    return projector(state) if state.ndim == 1 else state.copy()


def _reference_vector(state):
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return state / np.linalg.norm(state)
    w, v = np.linalg.eigh(state)
    return v[:, -1]


@lru_cache(maxsize=None)
def _operator_tables():
    def table(labels):
        forms = [kernel.monomial_form(realize(lab)) for lab in labels]
        return (np.array([p for p, _ in forms]), np.array([ph for _, ph in forms]))

    qz = np.array([np.real(np.diag(realize(z))) for z in QUBIT_Z])
    qpos = np.array([len(QUBIT_Z) - 1 - q for q in range(len(QUBIT_Z))], dtype=np.int64)
    return {
        "dec": table(("XII", "IXI", "IIX")),
        "meas": table(STABILIZERS),
        "fb": table(FEEDBACK_GENERATORS),
        "qz": qz,
        "qpos": qpos,
    }


def _checkpoints(n_steps, n):
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.linspace(1, n_steps, n).round().astype(np.int64))


def injection_step(config):
    if config.flip_injection is None:
        return -1, None
    q, t = config.flip_injection
    step = int(math.ceil(t / config.dt_gamma - 1e-6))
    return step, realize(("XII", "IXI", "IIX")[q - 1])


def run_trajectory(config, controller=None, initial_real=None, initial_estimator=None,
                   index=0, hamiltonian=None):
    """Integrate one paired trajectory with the compiled kernel.

    Parameters
    ----------
    config : SimConfig
    controller : controller object, optional
        Defaults to ``config.make_controller()``.
    initial_real, initial_estimator : array, optional
        State vectors or density matrices; default to the configured encoded
        state and |000>.
    index : int
        Trajectory index; selects the noise stream.
    hamiltonian : (8, 8) array, optional
        System Hamiltonian (zero by default).

    Raises
    ------
    IntegrationError
        If the state becomes non-finite.
    """
    start = time.perf_counter()
    psi_r, psi_e = config.initial_states()
    initial_real = psi_r if initial_real is None else initial_real
    initial_estimator = psi_e if initial_estimator is None else initial_estimator
    rho_r = _as_density(initial_real)
    rho_e = _as_density(initial_estimator)
    psi0 = _reference_vector(initial_real)
    controller = (controller or config.make_controller()).bind(rho_e)
    mode, lam0, eps, z0_e, on_step = controller.kernel_params(config.dt)

    tab = _operator_tables()
    n_steps = config.n_steps
    dw = NoiseStream(config.seed, config.dt).increments(index, n_steps, 3)
    H = np.zeros((8, 8), dtype=complex) if hamiltonian is None else np.asarray(hamiltonian, dtype=complex)
    inj_step, inj_op = injection_step(config)
    inj_perm = np.arange(8, dtype=np.int64) if inj_op is None else kernel.monomial_form(inj_op)[0]
    qref = np.array(reference_qubit_states(config.logical_state))
    z0_r = qubit_z(rho_r)
    z0_r[np.abs(z0_r) < 1e-12] = 0.0
    checkpoints = _checkpoints(n_steps, config.checkpoints)

    stride = config.output_stride
    rows = np.zeros((n_steps // stride + 1, len(COLUMNS)))
    diag = np.zeros(kernel.N_DIAG)
    events = np.zeros((2, 3), dtype=np.int64)
    status = kernel.integrate(
        rho_r, rho_e, dw, config.dt, H, bool(np.any(H)),
        tab["dec"][0], tab["dec"][1], np.full(3, config.gamma),
        tab["meas"][0], tab["meas"][1], np.full(3, config.kappa), np.full(3, config.eta),
        tab["fb"][0], tab["fb"][1], tab["qz"], tab["qpos"],
        kernel.SCHEME_KRAUS if config.integrator == "kraus" else kernel.SCHEME_EULER,
        mode, float(lam0), float(eps), np.asarray(z0_e, dtype=float), int(on_step), z0_r,
        inj_step, inj_perm,
        stride, psi0, qref, checkpoints,
        rows, diag, events,
    )
    if status < 0:
        raise IntegrationError(f"trajectory {index}: non-finite state at step {-status - 1}")
    rows[:, 0] = np.arange(rows.shape[0]) * stride * config.dt_gamma
    diagnostics = {
        "trace_error": diag[kernel.D_TRACE_ERR],
        "hermitian_error": diag[kernel.D_HERM_ERR],
        "min_eigenvalue": diag[kernel.D_MIN_EIG],
        "min_syndrome": diag[kernel.D_MIN_SYN],
        "max_syndrome": diag[kernel.D_MAX_SYN],
        "max_state_gap": diag[kernel.D_STATE_GAP],
        "syndrome_gap": diag[kernel.D_SYN_GAP:kernel.D_SYN_GAP + 3].copy(),
        "zdev_gap": diag[kernel.D_ZDEV_GAP:kernel.D_ZDEV_GAP + 3].copy(),
        "n_checkpoints": int(checkpoints.size),
    }
    return TrajectoryResult(
        index=index,
        rows=rows,
        diagnostics=diagnostics,
        events={"detections": events[0].tolist(), "corrections": events[1].tolist()},
        dw_checksum=checksum(dw),
        final_real=rho_r,
        final_estimator=rho_e,
        wall_time=time.perf_counter() - start,
        meta={"final_fidelity": pure_state_fidelity(psi0, rho_r), "n_steps": n_steps},
    )


def run_trajectory_reference(config, controller=None, initial_real=None, initial_estimator=None,
                             index=0, n_steps=None, hamiltonian=None, callback=None):
    """Same protocol as :func:`run_trajectory`, stepped in numpy with generic operators.

    Slow; meant for cross-checking the compiled loop on short horizons.
    ``callback(k, rho_r, rho_e)`` is called after every step if given.
    """
    psi_r, psi_e = config.initial_states()
    initial_real = psi_r if initial_real is None else initial_real
    initial_estimator = psi_e if initial_estimator is None else initial_estimator
    rho_r = _as_density(initial_real)
    rho_e = _as_density(initial_estimator)
    psi0 = _reference_vector(initial_real)
    controller = (controller or config.make_controller()).bind(rho_e)
    channels = bitflip_channels(config.gamma, config.kappa, config.eta, hamiltonian)
    n_steps = config.n_steps if n_steps is None else n_steps
    dw = NoiseStream(config.seed, config.dt).increments(index, n_steps, 3)
    inj_step, inj_op = injection_step(config)
    qref = reference_qubit_states(config.logical_state)
    stride = config.output_stride
    dt = config.dt

    def row(k, dq, lam):
        return np.concatenate([
            [k * config.dt_gamma, pure_state_fidelity(psi0, rho_r)],
            [per_qubit_fidelity(qref, rho_r, q) for q in (1, 2, 3)],
            syndrome_means(rho_r), syndrome_means(rho_e), dq, lam,
        ])

    lam = controller.decide(rho_e, 0.0)
    rows = [row(0, np.zeros(3), lam)]
    for k in range(n_steps):
        if k == inj_step:
            rho_r = inj_op @ rho_r @ inj_op
        F = FeedbackHamiltonian(tuple(lam))
        rho_r, frame = real_step(rho_r, channels, F, dw[k], dt, config.integrator)
        rho_e = estimator_step(rho_e, channels, F, frame["dQ"], dt, config.integrator)
        lam = controller.decide(rho_e, (k + 1) * dt)
        if callback is not None:
            callback(k, rho_r, rho_e)
        if (k + 1) % stride == 0:
            rows.append(row(k + 1, frame["dQ"], lam))
    return np.array(rows), rho_r, rho_e

