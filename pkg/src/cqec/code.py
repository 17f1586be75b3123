"""Three-qubit bit-flip repetition code."""

from dataclasses import dataclass

import numpy as np

from .quantum import basis_state, expectation, partial_trace_keep, pure_state_fidelity, realize

STABILIZERS = ("ZZI", "IZZ", "ZIZ")
COLLAPSE_OPS = ("XII", "IXI", "IIX")
FEEDBACK_GENERATORS = ("XII", "IXI", "IIX")
QUBIT_Z = ("ZII", "IZI", "IIZ")
CODEWORDS = ("000", "111")


@dataclass(frozen=True)
class LogicalState:
    alpha: complex = 1.0
    beta: complex = 0.0

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")


@dataclass(frozen=True)
class CodeSpec:
    stabilizers: tuple = STABILIZERS
    collapse_ops: tuple = COLLAPSE_OPS
    feedback_generators: tuple = FEEDBACK_GENERATORS
    codewords: tuple = CODEWORDS


def encode(ls):
    """alpha|000> + beta|111>."""
    return ls.alpha * basis_state("000") + ls.beta * basis_state("111")


def codespace_fidelity(initial, rho):
    return pure_state_fidelity(initial, rho)


def per_qubit_fidelity(initial_qubit_states, rho, q):
    """Overlap of qubit ``q``'s reduced state with its reference state.

    ``initial_qubit_states`` holds one normalized 2-vector per qubit.
    """
    if q not in (1, 2, 3):
        raise ValueError(f"qubit index {q} out of range 1..3")
    psi = np.asarray(initial_qubit_states[q - 1], dtype=complex)
    return pure_state_fidelity(psi, partial_trace_keep(rho, q))


def z_deviation(rho_e, q, z0_q):
    """|<Z_q> - z0_q| / |z0_q|; 2 means a complete flip."""
    if q not in (1, 2, 3):
        raise ValueError(f"qubit index {q} out of range 1..3")
    if z0_q == 0:
        raise ValueError("reference <Z_q(0)> is zero; deviation undefined")
    z = expectation(realize(QUBIT_Z[q - 1]), rho_e)
    return float(abs(z - z0_q) / abs(z0_q))


_DECODE = {(-1, 1): "XII", (-1, -1): "IXI", (1, -1): "IIX", (1, 1): None}


def dqec_syndrome_decode(m1, m2):
    """Correction for the (ZZI, IZZ) outcome pair, or ``None``."""
    if m1 not in (-1, 1) or m2 not in (-1, 1):
        raise ValueError(f"syndrome outcomes must be +1 or -1, got ({m1}, {m2})")
    return _DECODE[(int(m1), int(m2))]


def apply_correction(psi, correction):
    if correction is None:
        return np.asarray(psi, dtype=complex)
    return realize(correction) @ psi
