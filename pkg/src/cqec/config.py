"""Simulation configuration, presets and JSON round-tripping.

Times are in units of 1/gamma and rates in units of gamma throughout the
user-facing configuration.  With ``gamma == 0`` every rate vanishes and the
time unit falls back to 1.
"""

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .code import LogicalState, encode
from .controllers import ControllerConfig, make_controller
from .sme import MAX_KAPPA_DT, SCHEMES

SWEEPABLE = ("kappa_over_gamma", "eta", "lambda0_over_kappa", "epsilon", "t_on_gamma")

_NAMED_STATES = {
    "000": (1.0, 0.0),
    "111": (0.0, 1.0),
    "plus": (1 / math.sqrt(2), 1 / math.sqrt(2)),
}


class ConfigError(ValueError):
    pass


@dataclass
class SimConfig:
    gamma: float = 1.0
    kappa_over_gamma: float = 800.0
    eta: float = 1.0
    lambda0_over_kappa: float = 1.0
    epsilon: float = 1.05
    dt_gamma: float = 1e-5
    T_gamma: float = 1.0
    seed: int = 0
    output_stride: int = 100
    controller: str = "mbe_z"
    t_on_gamma: float = 0.0
    real_initial: object = "111"
    flip_injection: object = None
    n_trajectories: int = 100
    sweep: object = None
    replay_lambdas: object = None
    checkpoints: int = 100
    integrator: str = "kraus"
    preset: object = None

    def __post_init__(self):
        self.validate()

    # derived quantities, internal time unit is 1/gamma scaled by gamma
    @property
    def kappa(self):
        return self.kappa_over_gamma * self.gamma

    @property
    def lambda0(self):
        return self.lambda0_over_kappa * self.kappa

    @property
    def time_unit(self):
        return 1.0 / self.gamma if self.gamma > 0 else 1.0

    @property
    def dt(self):
        return self.dt_gamma * self.time_unit

    @property
    def n_steps(self):
        return int(round(self.T_gamma / self.dt_gamma))

    @property
    def logical_state(self):
        ri = self.real_initial
        if isinstance(ri, str):
            a, b = _NAMED_STATES[ri]
        else:
            a, b = ri
            norm = math.hypot(a, b)
            a, b = a / norm, b / norm
        return LogicalState(a, b)

    @property
    def controller_config(self):
        return ControllerConfig(
            mode=self.controller,
            lambda0=self.lambda0,
            epsilon=self.epsilon,
            t_on=self.t_on_gamma * self.time_unit,
        )

    def make_controller(self):
        return make_controller(self.controller_config)

    def initial_states(self):
        """Real encoded state vector and the estimator's reset state |000>."""
        psi_r = encode(self.logical_state)
        psi_e = encode(LogicalState(1.0, 0.0))
        return psi_r, psi_e

    def validate(self):
        errs = []
        for name in ("gamma", "kappa_over_gamma", "lambda0_over_kappa"):
            if not getattr(self, name) >= 0:
                errs.append(f"{name}: must be non-negative")
        if not 0 < self.eta <= 1:
            errs.append("eta: must lie in (0, 1]")
        if not 0 < self.epsilon < 2:
            errs.append("epsilon: must lie in (0, 2)")
        if not self.dt_gamma > 0:
            errs.append("dt_gamma: must be positive")
        elif self.kappa_over_gamma * self.dt_gamma > MAX_KAPPA_DT:
            errs.append(f"dt_gamma: kappa*dt = {self.kappa_over_gamma * self.dt_gamma:.3g} exceeds {MAX_KAPPA_DT}")
        if not self.T_gamma > 0:
            errs.append("T_gamma: must be positive")
        elif self.dt_gamma > 0 and abs(self.T_gamma / self.dt_gamma - round(self.T_gamma / self.dt_gamma)) > 1e-6:
            errs.append("T_gamma: must be a whole number of steps")
        if not (isinstance(self.output_stride, int) and self.output_stride >= 1):
            errs.append("output_stride: must be an integer >= 1")
        if not (isinstance(self.n_trajectories, int) and self.n_trajectories >= 1):
            errs.append("n_trajectories: must be an integer >= 1")
        if not (isinstance(self.checkpoints, int) and self.checkpoints >= 0):
            errs.append("checkpoints: must be an integer >= 0")
        if not isinstance(self.seed, int) or self.seed < 0:
            errs.append("seed: must be a non-negative integer")
        try:
            ControllerConfig(self.controller, 0.0, 1.05)
        except ValueError as e:
            errs.append(f"controller: {e}")
        if self.integrator not in SCHEMES:
            errs.append(f"integrator: expected one of {SCHEMES}")
        if not 0 <= self.t_on_gamma <= max(self.T_gamma, 0):
            errs.append("t_on_gamma: must lie in [0, T_gamma]")
        ri = self.real_initial
        if isinstance(ri, str):
            if ri not in _NAMED_STATES:
                errs.append(f"real_initial: unknown state {ri!r}; use {sorted(_NAMED_STATES)} or [alpha, beta]")
        elif not (isinstance(ri, (list, tuple)) and len(ri) == 2 and math.hypot(*ri) > 0):
            errs.append("real_initial: expected a named state or [alpha, beta]")
        fi = self.flip_injection
        if fi is not None:
            if not (isinstance(fi, (list, tuple)) and len(fi) == 2 and fi[0] in (1, 2, 3)):
                errs.append("flip_injection: expected [qubit (1-3), time]")
            elif not 0 <= fi[1] < self.T_gamma:
                errs.append("flip_injection: time must lie in [0, T_gamma)")
        if self.sweep is not None:
            sw = self.sweep
            if not (isinstance(sw, dict) and sw.get("param") in SWEEPABLE and sw.get("values")):
                errs.append(f"sweep: expected {{'param': one of {SWEEPABLE}, 'values': [...]}}")
        if self.replay_lambdas is not None:
            if not (isinstance(self.replay_lambdas, (list, tuple)) and all(v >= 0 for v in self.replay_lambdas)):
                errs.append("replay_lambdas: expected a list of non-negative multiples of kappa")
        if errs:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(errs))

    def to_dict(self):
        d = asdict(self)
        for k in ("real_initial", "flip_injection", "replay_lambdas"):
            if isinstance(d[k], tuple):
                d[k] = list(d[k])
        return d

    def with_updates(self, **kw):
        return replace(self, **kw)


PRESETS = {
    "fig2": dict(kappa_over_gamma=800.0, lambda0_over_kappa=0.75, T_gamma=1.0,
                 real_initial="111", controller="mbe_z", n_trajectories=1),
    "fig3a": dict(kappa_over_gamma=800.0, lambda0_over_kappa=1.0, T_gamma=10.0,
                  real_initial="111", controller="mbe_z", n_trajectories=100),
    "fig3b": dict(kappa_over_gamma=800.0, T_gamma=10.0, real_initial="111", controller="mbe_z",
                  n_trajectories=100,
                  sweep={"param": "lambda0_over_kappa", "values": [0.5, 0.75, 1.0, 1.25, 1.5]}),
    "fig3c": dict(kappa_over_gamma=800.0, lambda0_over_kappa=1.0, T_gamma=10.0, real_initial="111",
                  controller="mbe_z", n_trajectories=100,
                  sweep={"param": "eta", "values": [1.0, 0.8, 0.6, 0.4]}),
    "fig4ab": dict(kappa_over_gamma=800.0, lambda0_over_kappa=1.0, T_gamma=1.0, real_initial="111",
                   controller="delayed", t_on_gamma=0.9, n_trajectories=100),
    "fig4cf": dict(kappa_over_gamma=800.0, T_gamma=1.0, real_initial="111", controller="mbe_z",
                   n_trajectories=1, replay_lambdas=[0.0, 0.75, 1.0, 1.25]),
}

_FIELDS = {f.name for f in fields(SimConfig)}


def from_dict(d, preset=None):
    """Build a config: defaults, then the named preset, then explicit keys."""
    d = dict(d or {})
    unknown = set(d) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {sorted(unknown)}")
    preset = preset or d.get("preset")
    merged = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        merged.update(PRESETS[preset])
        merged["preset"] = preset
    merged.update({k: v for k, v in d.items() if k != "preset"})
    return SimConfig(**merged)


def load(path, preset=None, overrides=()):
    with open(path) as fh:
        d = json.load(fh)
    return from_dict(apply_overrides(d, overrides), preset=preset)


def parse_override(text):
    """``key=value`` with a JSON value, falling back to a bare string."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def apply_overrides(d, overrides):
    d = dict(d)
    for item in overrides:
        k, v = parse_override(item)
        d[k] = v
    return d


def dumps(cfg):
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def echo_roundtrip(cfg):
    return from_dict(json.loads(dumps(cfg)))


def reference_qubit_states(ls):
    """Per-qubit reference for the measured system's F_q columns.

    The codeword carrying more weight fixes the reference bit (|0> on a tie).
    """
    bit = 1 if abs(ls.beta) > abs(ls.alpha) else 0
    v = np.zeros(2, dtype=complex)
    v[bit] = 1.0
    return [v.copy() for _ in range(3)]
