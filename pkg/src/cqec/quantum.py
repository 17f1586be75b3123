"""Dense linear algebra on small qubit registers.

Basis convention: qubit 1 is the most significant bit, so the computational
basis is ordered |000>, |001>, ..., |111> and the label "ZZI" reads
left-to-right as qubits 1, 2, 3.
"""

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_FLOOR = -1e-6


def _check_label(label):
    if not isinstance(label, str) or len(label) == 0:
        raise ValueError(f"Pauli label must be a non-empty string, got {label!r}")
    bad = set(label) - set(PAULI)
    if bad:
        raise ValueError(f"invalid Pauli symbol(s) {sorted(bad)} in {label!r}")


def realize(label):
    """Kronecker product of single-qubit Paulis, e.g. ``realize("ZZI")``."""
    _check_label(label)
    out = np.ones((1, 1), dtype=complex)
    for s in label:
        out = np.kron(out, PAULI[s])
    return out


def pauli_monomial(label):
    """Sparse form of a Pauli string as a signed permutation.

    Every Pauli string P has exactly one nonzero per row, so it is fully
    described by ``perm`` and ``phase`` with ``P[r, perm[r]] = phase[r]``.
    ``perm`` is an involution because P is its own inverse.
    """
    P = realize(label)
    perm = np.argmax(np.abs(P), axis=1)
    phase = P[np.arange(P.shape[0]), perm].copy()
    return perm.astype(np.int64), phase


def _check_pair(A, rho):
    A = np.asarray(A)
    rho = np.asarray(rho)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"operator must be square, got shape {A.shape}")
    if rho.shape[-2:] != A.shape:
        raise ValueError(f"dimension mismatch: operator {A.shape} vs state {rho.shape}")
    return A, rho


def dag(A):
    return np.conj(np.swapaxes(A, -1, -2))


def commutator(A, B):
    return A @ B - B @ A


def dissipator(A, rho):
    """Lindblad dissipator D[A]rho = A rho A^+ - (A^+A rho + rho A^+A)/2."""
    A, rho = _check_pair(A, rho)
    Ad = dag(A)
    AdA = Ad @ A
    return A @ rho @ Ad - 0.5 * (AdA @ rho + rho @ AdA)


def innovation(A, rho):
    """Measurement back-action H[A]rho = A rho + rho A^+ - rho tr(A rho + rho A^+)."""
    A, rho = _check_pair(A, rho)
    M = A @ rho + rho @ dag(A)
    return M - rho * np.trace(M, axis1=-2, axis2=-1)[..., None, None]


def expectation(A, rho):
    """Re tr(A rho)."""
    A, rho = _check_pair(A, rho)
    return np.real(np.trace(A @ rho, axis1=-2, axis2=-1))


def n_qubits(rho):
    dim = np.asarray(rho).shape[-1]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def partial_trace_keep(rho, q):
    """Reduced 2x2 state of qubit ``q`` (1-based, qubit 1 most significant)."""
    rho = np.asarray(rho)
    n = n_qubits(rho)
    if not 1 <= q <= n:
        raise ValueError(f"qubit index {q} out of range 1..{n}")
    t = rho.reshape((2,) * (2 * n))
    keep = q - 1
    # trace out every other qubit, highest axis pair first so indices stay valid
    for j in reversed(range(n)):
        if j == keep:
            continue
        nq = t.ndim // 2
        t = np.trace(t, axis1=j, axis2=j + nq)
        if j < keep:
            keep -= 1
    return t.reshape(2, 2)


def pure_state_fidelity(psi, rho):
    """<psi| rho |psi>, clamped to [0, 1]."""
    psi = np.asarray(psi, dtype=complex).ravel()
    rho = np.asarray(rho)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(f"dimension mismatch: state {psi.size} vs rho {rho.shape}")
    f = np.real(np.vdot(psi, rho @ psi))
    return float(min(1.0, max(0.0, f)))


def projector(psi):
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def basis_state(bits):
    """Computational basis vector for a bit string such as ``"011"``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def hermitize(rho):
    return 0.5 * (rho + dag(rho))


def normalize(rho):
    return rho / np.trace(rho, axis1=-2, axis2=-1)[..., None, None]


def state_diagnostics(rho):
    """Trace error, Hermiticity error and smallest eigenvalue of ``rho``."""
    rho = np.asarray(rho)
    return {
        "trace_error": float(np.max(np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0))),
        "hermitian_error": float(np.max(np.abs(rho - dag(rho)))),
        "min_eigenvalue": float(np.min(np.linalg.eigvalsh(hermitize(rho)))),
    }


def check_density_matrix(rho, eigen_floor=EIGEN_FLOOR):
    """Raise ``ValueError`` unless ``rho`` is a valid density matrix."""
    d = state_diagnostics(rho)
    if d["trace_error"] > TRACE_TOL:
        raise ValueError(f"trace deviates from 1 by {d['trace_error']:.3e}")
    if d["hermitian_error"] > HERMITIAN_TOL:
        raise ValueError(f"not Hermitian (error {d['hermitian_error']:.3e})")
    if d["min_eigenvalue"] < eigen_floor:
        raise ValueError(f"negative eigenvalue {d['min_eigenvalue']:.3e}")
    return d
