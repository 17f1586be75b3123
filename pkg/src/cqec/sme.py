"""Time steps for the measured system and its slaved estimator.

Two first-order schemes are provided.  ``"euler"`` is the plain
Euler-Maruyama update of the stochastic master equation.  ``"kraus"`` applies
the same generator as a completely positive map,

    rho' ~ M rho M^+ + dt sum_k gamma_k c_k rho c_k^+ + dt sum_i (1 - eta_i) kappa_i A_i rho A_i^+,
    M = I - (i H + sum_k gamma_k c_k^+ c_k / 2 + sum_i kappa_i A_i^+ A_i / 2) dt
          + sum_i sqrt(kappa_i eta_i) A_i dy_i,

driven by the output increment ``dy_i = sqrt(4 kappa_i eta_i) dQ_i``.  It agrees
with Euler-Maruyama to O(dt) but keeps the state positive, which Euler does
not at the step sizes used here (the diffusion factor on an unlikely
population is ``1 - 4 sqrt(kappa dt) z`` and turns negative for z near 3).
The estimator is driven by the very same ``dy``, which makes slaving exact.

These functions accept arbitrary operators and are written for clarity; the
trajectory loop in :mod:`cqec.kernel` implements the same updates for Pauli
operators and is checked against them.
"""

from dataclasses import dataclass, field

import numpy as np

from .code import COLLAPSE_OPS, FEEDBACK_GENERATORS, STABILIZERS
from .quantum import dag, dissipator, expectation, hermitize, innovation, normalize, realize

MAX_KAPPA_DT = 0.05
SCHEMES = ("kraus", "euler")


class IntegrationError(RuntimeError):
    """Raised when a step is unstable or violates the step-size guard."""


@dataclass
class ChannelSet:
    """System Hamiltonian, decoherence channels and measured observables.

    ``decoherence_ops`` holds ``(operator, rate)`` pairs and
    ``measurement_ops`` holds ``(operator, rate, efficiency)`` triples.
    ``labels`` optionally names the operators as Pauli strings.
    """

    hamiltonian: np.ndarray
    decoherence_ops: list = field(default_factory=list)
    measurement_ops: list = field(default_factory=list)
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.hamiltonian = np.asarray(self.hamiltonian, dtype=complex)
        dim = self.hamiltonian.shape[0]
        for op, rate in self.decoherence_ops:
            if np.shape(op) != (dim, dim):
                raise ValueError("decoherence operator dimension mismatch")
            if rate < 0:
                raise ValueError("decoherence rates must be non-negative")
        for op, rate, eff in self.measurement_ops:
            if np.shape(op) != (dim, dim):
                raise ValueError("measurement operator dimension mismatch")
            if rate < 0:
                raise ValueError("measurement rates must be non-negative")
            if not 0 < eff <= 1:
                raise ValueError("measurement efficiency must lie in (0, 1]")

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    @property
    def max_kappa(self):
        return max((k for _, k, _ in self.measurement_ops), default=0.0)


def bitflip_channels(gamma, kappa, eta=1.0, hamiltonian=None):
    """Channel set of the three-qubit code: X flips at ``gamma``, parity measurements at ``kappa``."""
    H = np.zeros((8, 8), dtype=complex) if hamiltonian is None else hamiltonian
    return ChannelSet(
        hamiltonian=H,
        decoherence_ops=[(realize(c), gamma) for c in COLLAPSE_OPS],
        measurement_ops=[(realize(a), kappa, eta) for a in STABILIZERS],
        labels={"decoherence": COLLAPSE_OPS, "measurement": STABILIZERS},
    )


@dataclass(frozen=True)
class FeedbackHamiltonian:
    lambdas: tuple = (0.0, 0.0, 0.0)
    generators: tuple = FEEDBACK_GENERATORS

    def matrix(self):
        F = np.zeros((2 ** len(self.generators[0]),) * 2, dtype=complex)
        for lam, g in zip(self.lambdas, self.generators):
            if lam:
                F += lam * realize(g)
        return F


@dataclass
class MeasurementFrame:
    t: float
    dW: np.ndarray
    dQ: np.ndarray
    real_syndrome_mean: np.ndarray
    estimator_syndrome_mean: np.ndarray = None


def measurement_record(mean, dW, kappa, eta, dt):
    """dQ = <A> dt + dW / sqrt(4 kappa eta)."""
    if kappa * eta <= 0:
        raise ValueError("kappa * eta must be positive")
    return mean * dt + dW / np.sqrt(4.0 * kappa * eta)


def _records(means, dW, channels, dt):
    # unmeasured channels (rate 0) carry no information and no noise
    return np.array([
        measurement_record(means[i], dW[i], kappa, eta, dt) if kappa > 0 else means[i] * dt
        for i, (_, kappa, eta) in enumerate(channels.measurement_ops)
    ])


def _check_step(channels, dt):
    if dt <= 0:
        raise IntegrationError("dt must be positive")
    if channels.max_kappa * dt > MAX_KAPPA_DT:
        raise IntegrationError(
            f"kappa*dt = {channels.max_kappa * dt:.3g} exceeds {MAX_KAPPA_DT}; reduce dt"
        )


def _drift(rho, channels, F):
    H = channels.hamiltonian + (F.matrix() if F is not None else 0)
    d = -1j * (H @ rho - rho @ H)
    for c, gamma in channels.decoherence_ops:
        if gamma:
            d = d + gamma * dissipator(c, rho)
    for A, kappa, _ in channels.measurement_ops:
        if kappa:
            d = d + kappa * dissipator(A, rho)
    return d


def _finish(rho):
    rho = normalize(hermitize(rho))
    if not np.all(np.isfinite(rho)):
        raise IntegrationError("non-finite density matrix entries")
    return rho


def _kraus(rho, channels, F, dQ, dt):
    H = channels.hamiltonian + (F.matrix() if F is not None else 0)
    dim = channels.dim
    G = 1j * H
    for c, gamma in channels.decoherence_ops:
        G = G + 0.5 * gamma * dag(c) @ c
    for A, kappa, _ in channels.measurement_ops:
        G = G + 0.5 * kappa * dag(A) @ A
    M = np.eye(dim) - G * dt
    for i, (A, kappa, eta) in enumerate(channels.measurement_ops):
        # output increment dy = sqrt(4 kappa eta) dQ
        M = M + 2.0 * kappa * eta * dQ[i] * A
    new = M @ rho @ dag(M)
    for c, gamma in channels.decoherence_ops:
        new = new + gamma * dt * c @ rho @ dag(c)
    for A, kappa, eta in channels.measurement_ops:
        new = new + (1.0 - eta) * kappa * dt * A @ rho @ dag(A)
    return _finish(new)


def _check_scheme(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def real_step(rho, channels, F, dW, dt, scheme="kraus"):
    """One step of the measured system.

    Returns the new state and a dict with the pre-step syndrome means and
    the records ``dQ`` of this step.
    """
    _check_step(channels, dt)
    _check_scheme(scheme)
    means = np.array([expectation(A, rho) for A, _, _ in channels.measurement_ops])
    dQ = _records(means, dW, channels, dt)
    if scheme == "kraus":
        return _kraus(rho, channels, F, dQ, dt), {"means": means, "dQ": dQ}
    new = rho + _drift(rho, channels, F) * dt
    for i, (A, kappa, eta) in enumerate(channels.measurement_ops):
        new = new + np.sqrt(kappa * eta) * innovation(A, rho) * dW[i]
    return _finish(new), {"means": means, "dQ": dQ}


def estimator_step(rho_e, channels, F, dQ, dt, scheme="kraus"):
    """One step of the estimator, driven by the measured records ``dQ``."""
    _check_step(channels, dt)
    _check_scheme(scheme)
    if scheme == "kraus":
        return _kraus(rho_e, channels, F, dQ, dt)
    new = rho_e + _drift(rho_e, channels, F) * dt
    for i, (A, kappa, eta) in enumerate(channels.measurement_ops):
        mean = expectation(A, rho_e)
        new = new + 2.0 * kappa * eta * (dQ[i] - mean * dt) * innovation(A, rho_e)
    return _finish(new)
