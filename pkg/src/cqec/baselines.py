"""Reference fidelity curves: unprotected qubits and discrete majority-vote correction.

All curves take times in units of 1/gamma when ``gamma == 1``.
"""

import itertools
from dataclasses import dataclass

import numpy as np

LABELS = ("dqec_analytic", "one_qubit", "three_qubit", "dqec_monte_carlo")


@dataclass
class BaselineCurve:
    times: np.ndarray
    values: np.ndarray
    label: str
    stderr: np.ndarray = None

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown baseline label {self.label!r}")
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)


def flip_probability(t, gamma):
    """Probability that a qubit flipped an odd number of times by ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    return 0.5 * (1.0 - np.exp(-2.0 * gamma * t))


def f_dqec_analytic(t, gamma=1.0):
    """Fidelity of ideal instantaneous majority-vote correction after time ``t``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = np.exp(-2.0 * gamma * np.asarray(t, dtype=float))
    if np.any(x > 1):
        raise ValueError("t must be non-negative")
    return 0.25 * (2.0 + 3.0 * x - x ** 3)


def f_one_qubit(t, gamma=1.0):
    """Fidelity of one unprotected qubit in a Z eigenstate."""
    return 1.0 - flip_probability(t, gamma)


def f_three_qubit(t, gamma=1.0):
    """Fidelity of |111> with no correction: all three qubits must survive."""
    return f_one_qubit(t, gamma) ** 3


def dqec_enumeration(p):
    """Majority-vote success probability by summing over the 8 net-flip patterns."""
    p = np.asarray(p, dtype=float)
    total = np.zeros_like(p)
    for pattern in itertools.product((0, 1), repeat=3):
        k = sum(pattern)
        if k <= 1:
            total = total + p ** k * (1 - p) ** (3 - k)
    return total


def mc_dqec_majority(t_grid, gamma=1.0, n_samples=100_000, seed=0):
    """Monte-Carlo estimate of the majority-vote fidelity on a time grid.

    Each sample draws three independent net-flip indicators with
    probability ``p(t)``; correction succeeds when at most one is set.

    Returns
    -------
    BaselineCurve
        ``values`` holds the success frequency and ``stderr`` its standard
        error ``sqrt(f (1 - f) / n)``.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    t_grid = np.asarray(t_grid, dtype=float)
    rng = np.random.default_rng(seed)
    p = flip_probability(t_grid, gamma)
    values = np.empty_like(t_grid)
    for i, pi in enumerate(p):
        flips = rng.random((n_samples, 3)) < pi
        values[i] = np.mean(flips.sum(axis=1) <= 1)
    stderr = np.sqrt(values * (1 - values) / n_samples)
    return BaselineCurve(t_grid, values, "dqec_monte_carlo", stderr)


def baseline_table(t_grid, gamma=1.0):
    """Columns ``t, F_DQEC, F1, F3`` stacked as a 2-D array."""
    t = np.asarray(t_grid, dtype=float)
    if t.size < 2:
        raise ValueError("the grid needs at least two points")
    return np.column_stack([t, f_dqec_analytic(t, gamma), f_one_qubit(t, gamma), f_three_qubit(t, gamma)])
