"""Feedback policies: estimator observations -> feedback strengths.

Controllers only ever see the estimator state.  Each controller has a
``decide(rho_e, t)`` method used by the reference integrator and a
``kernel_params(dt)`` method that hands the same policy to the compiled loop.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernel
from .code import QUBIT_Z, STABILIZERS
from .quantum import expectation, realize

_Z = [realize(z) for z in QUBIT_Z]
_S = [realize(s) for s in STABILIZERS]

MODES = ("none", "mbe_z", "ahn", "delayed")


@dataclass(frozen=True)
class ControllerConfig:
    mode: str = "mbe_z"
    lambda0: float = 800.0
    epsilon: float = 1.05
    t_on: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown controller mode {self.mode!r}; expected one of {MODES}")
        if self.lambda0 < 0:
            raise ValueError("lambda0 must be non-negative")
        if not 0 < self.epsilon < 2:
            raise ValueError("epsilon must lie in (0, 2)")
        if self.t_on < 0:
            raise ValueError("t_on must be non-negative")


def qubit_z(rho):
    return np.array([expectation(Z, rho) for Z in _Z])


def syndrome_means(rho):
    return np.array([expectation(S, rho) for S in _S])


def mbe_z_controller(rho_e, z0, cfg):
    """lambda0 on every qubit whose estimator <Z_q> moved by more than epsilon*|z0_q|."""
    z0 = np.asarray(z0, dtype=float)
    if np.any(z0 == 0):
        raise ValueError("degenerate reference: some <Z_q(0)> is zero")
    dev = np.abs(qubit_z(rho_e) - z0)
    return np.where(dev > cfg.epsilon * np.abs(z0), cfg.lambda0, 0.0)


def ahn_controller(syndromes_e, lam):
    s1, s2, s3 = syndromes_e
    return np.array([
        lam * (1 - s1) * (1 + s2) * (1 - s3),
        lam * (1 - s1) * (1 - s2) * (1 + s3),
        lam * (1 + s1) * (1 - s2) * (1 - s3),
    ])


def _started(t, t_on):
    return t >= t_on - 1e-12 * max(1.0, abs(t_on))


class NullController:
    def bind(self, rho_e0):
        return self

    def decide(self, rho_e, t):
        return np.zeros(3)

    def kernel_params(self, dt):
        return kernel.MODE_NONE, 0.0, 1.0, np.ones(3), 0


class MBEZController:
    """Switch ``lambda0`` on for each qubit whose estimator Z deviation exceeds epsilon.

    ``z0`` is the estimator's ``<Z_q>`` at t=0; :meth:`bind` captures it
    from the initial estimator state when not given.
    """

    def __init__(self, lambda0, epsilon=1.05, z0=None):
        self.cfg = ControllerConfig("mbe_z", lambda0, epsilon)
        self.z0 = None if z0 is None else np.asarray(z0, dtype=float)

    def bind(self, rho_e0):
        if self.z0 is not None:
            return self
        return MBEZController(self.cfg.lambda0, self.cfg.epsilon, qubit_z(rho_e0))

    def decide(self, rho_e, t):
        return mbe_z_controller(rho_e, self.z0, self.cfg)

    def kernel_params(self, dt):
        if self.z0 is None or np.any(self.z0 == 0):
            raise ValueError("MBE controller needs a nonzero z0 reference; call bind()")
        return kernel.MODE_MBE_Z, self.cfg.lambda0, self.cfg.epsilon, self.z0.copy(), 0


class AhnController:
    """Product-of-syndromes feedback evaluated on the estimator's conditional means."""

    def __init__(self, lam):
        self.lam = float(lam)

    def bind(self, rho_e0):
        return self

    def decide(self, rho_e, t):
        return ahn_controller(syndrome_means(rho_e), self.lam)

    def kernel_params(self, dt):
        return kernel.MODE_AHN, self.lam, 1.0, np.ones(3), 0


class DelayedController:
    """No feedback before ``t_on``; afterwards delegate to ``inner``."""

    def __init__(self, inner, t_on):
        if t_on < 0:
            raise ValueError("t_on must be non-negative")
        self.inner = inner
        self.t_on = float(t_on)

    def bind(self, rho_e0):
        return DelayedController(self.inner.bind(rho_e0), self.t_on)

    def decide(self, rho_e, t):
        return delayed_wrapper(self.inner, rho_e, t, self.t_on)

    def kernel_params(self, dt):
        mode, lam0, eps, z0, _ = self.inner.kernel_params(dt)
        return mode, lam0, eps, z0, int(math.ceil(self.t_on / dt - 1e-6))


def delayed_wrapper(inner, rho_e, t, t_on):
    if not _started(t, t_on):
        return np.zeros(3)
    return inner.decide(rho_e, t)


def make_controller(cfg):
    """Build a controller from a :class:`ControllerConfig`."""
    if cfg.mode == "none":
        return NullController()
    if cfg.mode == "mbe_z":
        ctrl = MBEZController(cfg.lambda0, cfg.epsilon)
    elif cfg.mode == "ahn":
        ctrl = AhnController(cfg.lambda0)
    else:
        return DelayedController(make_controller(replace(cfg, mode="mbe_z", t_on=0.0)), cfg.t_on)
    return DelayedController(ctrl, cfg.t_on) if cfg.t_on > 0 else ctrl
