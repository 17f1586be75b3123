"""Compiled trajectory loop for Pauli-operator channel sets.

Every operator in the bit-flip problem is a Pauli string, i.e. a signed
permutation ``P[r, perm[r]] = phase[r]`` that is Hermitian and unitary.  With
that structure ``D[P]rho = P rho P - rho`` and
``H[P]rho = P rho + rho P - 2 <P> rho``, which the loop below evaluates
entry by entry without forming matrix products.

Each trajectory runs the same compiled code on its own arrays, so results do
not depend on how trajectories are batched or scheduled.
"""

import numpy as np
from numba import njit

MODE_NONE = 0
MODE_MBE_Z = 1
MODE_AHN = 2

SCHEME_EULER = 0
SCHEME_KRAUS = 1

# layout of the float diagnostics vector
D_TRACE_ERR = 0
D_HERM_ERR = 1
D_MIN_EIG = 2
D_MIN_SYN = 3
D_MAX_SYN = 4
D_STATE_GAP = 5
D_SYN_GAP = 6  # three entries
D_ZDEV_GAP = 9  # three entries
N_DIAG = 12

N_COLS = 17


def monomial_form(op, tol=1e-12):
    """Return ``(perm, phase)`` if ``op`` is a Hermitian unitary signed permutation."""
    op = np.asarray(op, dtype=complex)
    dim = op.shape[0]
    nz = np.abs(op) > tol
    if not np.all(nz.sum(axis=1) == 1):
        raise ValueError("operator is not a signed permutation")
    perm = np.argmax(nz, axis=1).astype(np.int64)
    phase = op[np.arange(dim), perm]
    if not np.allclose(op, op.conj().T, atol=tol) or not np.allclose(np.abs(phase), 1.0, atol=tol):
        raise ValueError("operator must be Hermitian and unitary")
    return perm, phase.astype(np.complex128)


@njit(cache=True, nogil=True)
def _mean(rho, perm, phase):
    s = 0.0
    for r in range(rho.shape[0]):
        s += (phase[r] * rho[perm[r], r]).real
    return s


@njit(cache=True, nogil=True)
def _diag_expect(rho, signs):
    s = 0.0
    for r in range(rho.shape[0]):
        s += signs[r] * rho[r, r].real
    return s


@njit(cache=True, nogil=True)
def _step(rho, out, dt, H, has_h, dec_perm, dec_phase, dec_rate,
          meas_perm, meas_phase, meas_rate, means, coef, fb_perm, fb_phase, lam):
    """Euler-Maruyama update of ``rho`` into ``out``; returns False on non-finite."""
    dim = rho.shape[0]
    n_dec = dec_rate.shape[0]
    n_meas = meas_rate.shape[0]
    n_fb = lam.shape[0]
    csum = 0.0
    for i in range(n_meas):
        csum += coef[i] * means[i]
    for r in range(dim):
        for c in range(dim):
            v = rho[r, c]
            drift = 0j
            if has_h:
                comm = 0j
                for k in range(dim):
                    comm += H[r, k] * rho[k, c] - rho[r, k] * H[k, c]
                drift += -1j * comm
            for k in range(n_dec):
                if dec_rate[k] != 0.0:
                    p = dec_perm[k]
                    ph = dec_phase[k]
                    drift += dec_rate[k] * (ph[r] * rho[p[r], p[c]] * ph[p[c]] - v)
            stoch = 0j
            for i in range(n_meas):
                p = meas_perm[i]
                ph = meas_phase[i]
                if meas_rate[i] != 0.0:
                    drift += meas_rate[i] * (ph[r] * rho[p[r], p[c]] * ph[p[c]] - v)
                stoch += coef[i] * (ph[r] * rho[p[r], c] + rho[r, p[c]] * ph[p[c]])
            stoch -= 2.0 * csum * v
            for q in range(n_fb):
                if lam[q] != 0.0:
                    p = fb_perm[q]
                    ph = fb_phase[q]
                    drift += -1j * lam[q] * (ph[r] * rho[p[r], c] - rho[r, p[c]] * ph[p[c]])
            out[r, c] = v + drift * dt + stoch
    # hermitize, then renormalize by the (real) trace
    for r in range(dim):
        for c in range(r + 1, dim):
            a = 0.5 * (out[r, c] + np.conj(out[c, r]))
            out[r, c] = a
            out[c, r] = np.conj(a)
        out[r, r] = out[r, r].real + 0j
    tr = 0.0
    for r in range(dim):
        tr += out[r, r].real
    if not np.isfinite(tr) or tr <= 0.0:
        return False
    for r in range(dim):
        for c in range(dim):
            out[r, c] = out[r, c] / tr
            if not (np.isfinite(out[r, c].real) and np.isfinite(out[r, c].imag)):
                return False
    return True


@njit(cache=True, nogil=True)
def _step_kraus(rho, out, M, dt, H, has_h, dec_perm, dec_phase, dec_rate,
                meas_perm, meas_phase, meas_rate, meas_eff, dy, fb_perm, fb_phase, lam):
    """Positivity-preserving first-order step driven by measurement outputs ``dy``.

    rho' = M rho M^+ + dt sum_k gamma_k c_k rho c_k + dt sum_i (1-eta_i) kappa_i A_i rho A_i,
    M = I - (i(H+F) + (sum gamma_k + sum kappa_i)/2) dt + sum_i sqrt(kappa_i eta_i) A_i dy_i,
    followed by hermitization and trace normalization.
    """
    dim = rho.shape[0]
    n_dec = dec_rate.shape[0]
    n_meas = meas_rate.shape[0]
    n_fb = lam.shape[0]
    half = 0.0
    for k in range(n_dec):
        half += 0.5 * dec_rate[k]
    for i in range(n_meas):
        half += 0.5 * meas_rate[i]
    for r in range(dim):
        for c in range(dim):
            M[r, c] = -1j * dt * H[r, c] if has_h else 0j
        M[r, r] += 1.0 - half * dt
    for i in range(n_meas):
        a = np.sqrt(meas_rate[i] * meas_eff[i]) * dy[i]
        p = meas_perm[i]
        ph = meas_phase[i]
        for r in range(dim):
            M[r, p[r]] += a * ph[r]
    for q in range(n_fb):
        if lam[q] != 0.0:
            p = fb_perm[q]
            ph = fb_phase[q]
            for r in range(dim):
                M[r, p[r]] += -1j * dt * lam[q] * ph[r]
    # out = M rho M^+
    tmp = np.empty_like(rho)
    for r in range(dim):
        for c in range(dim):
            s = 0j
            for k in range(dim):
                s += M[r, k] * rho[k, c]
            tmp[r, c] = s
    for r in range(dim):
        for c in range(dim):
            s = 0j
            for k in range(dim):
                s += tmp[r, k] * np.conj(M[c, k])
            out[r, c] = s
    for k in range(n_dec):
        if dec_rate[k] != 0.0:
            w = dec_rate[k] * dt
            p = dec_perm[k]
            ph = dec_phase[k]
            for r in range(dim):
                for c in range(dim):
                    out[r, c] += w * ph[r] * rho[p[r], p[c]] * np.conj(ph[c])
    for i in range(n_meas):
        w = (1.0 - meas_eff[i]) * meas_rate[i] * dt
        if w != 0.0:
            p = meas_perm[i]
            ph = meas_phase[i]
            for r in range(dim):
                for c in range(dim):
                    out[r, c] += w * ph[r] * rho[p[r], p[c]] * np.conj(ph[c])
    for r in range(dim):
        for c in range(r + 1, dim):
            a = 0.5 * (out[r, c] + np.conj(out[c, r]))
            out[r, c] = a
            out[c, r] = np.conj(a)
        out[r, r] = out[r, r].real + 0j
    tr = 0.0
    for r in range(dim):
        tr += out[r, r].real
    if not np.isfinite(tr) or tr <= 0.0:
        return False
    for r in range(dim):
        for c in range(dim):
            out[r, c] = out[r, c] / tr
            if not (np.isfinite(out[r, c].real) and np.isfinite(out[r, c].imag)):
                return False
    return True


@njit(cache=True, nogil=True)
def _qubit_fidelity(rho, pos, ref):
    """<ref| tr_rest(rho) |ref> for the qubit at bit position ``pos``."""
    dim = rho.shape[0]
    f = 0j
    for r in range(dim):
        a = (r >> pos) & 1
        for b in range(2):
            c = (r & ~(1 << pos)) | (b << pos)
            f += np.conj(ref[a]) * rho[r, c] * ref[b]
    return min(1.0, max(0.0, f.real))


@njit(cache=True, nogil=True)
def _pure_fidelity(rho, psi):
    dim = rho.shape[0]
    f = 0j
    for r in range(dim):
        for c in range(dim):
            f += np.conj(psi[r]) * rho[r, c] * psi[c]
    return min(1.0, max(0.0, f.real))


@njit(cache=True, nogil=True)
def _decide(mode, lam0, eps, z_e, z0_e, s_e, gated, out):
    n = out.shape[0]
    for q in range(n):
        out[q] = 0.0
    if gated or mode == MODE_NONE:
        return
    if mode == MODE_MBE_Z:
        for q in range(n):
            if abs(z_e[q] - z0_e[q]) > eps * abs(z0_e[q]):
                out[q] = lam0
    elif mode == MODE_AHN:
        s1, s2, s3 = s_e[0], s_e[1], s_e[2]
        out[0] = lam0 * (1.0 - s1) * (1.0 + s2) * (1.0 - s3)
        out[1] = lam0 * (1.0 - s1) * (1.0 - s2) * (1.0 + s3)
        out[2] = lam0 * (1.0 + s1) * (1.0 - s2) * (1.0 - s3)


@njit(cache=True, nogil=True)
def _record(rows, j, t, rho_r, psi0, qref, qpos, m_r, m_e, dq, lam):
    rows[j, 0] = t
    rows[j, 1] = _pure_fidelity(rho_r, psi0)
    for q in range(3):
        rows[j, 2 + q] = _qubit_fidelity(rho_r, qpos[q], qref[q])
    for i in range(3):
        rows[j, 5 + i] = m_r[i]
        rows[j, 8 + i] = m_e[i]
        rows[j, 11 + i] = dq[i]
        rows[j, 14 + i] = lam[i]


@njit(cache=True, nogil=True)
def _eig_floor(rho):
    return np.linalg.eigvalsh(rho)[0]


@njit(cache=True, nogil=True)
def integrate(rho_r, rho_e, dw, dt, H, has_h,
              dec_perm, dec_phase, dec_rate,
              meas_perm, meas_phase, meas_rate, meas_eff,
              fb_perm, fb_phase, qz, qpos, scheme,
              mode, lam0, eps, z0_e, on_step, z0_r,
              inj_step, inj_perm,
              stride, psi0, qref, checkpoints,
              rows, diag, events):
    """Integrate one paired trajectory in place.

    ``rho_r`` and ``rho_e`` are overwritten with the final states.  Returns
    the number of completed steps, or ``-(k+1)`` if step ``k`` failed.
    """
    n_steps = dw.shape[0]
    n_meas = meas_rate.shape[0]
    nq = qz.shape[0]
    buf_r = np.empty_like(rho_r)
    buf_e = np.empty_like(rho_e)
    m_r = np.empty(n_meas)
    m_e = np.empty(n_meas)
    c_r = np.empty(n_meas)
    c_e = np.empty(n_meas)
    dy = np.empty(n_meas)
    M = np.empty(rho_r.shape, dtype=np.complex128)
    dq = np.zeros(n_meas)
    lam = np.zeros(nq)
    z_e = np.empty(nq)
    detected = np.zeros(nq, dtype=np.bool_)
    sqrt_ke = np.empty(n_meas)
    inv_noise = np.zeros(n_meas)
    for i in range(n_meas):
        sqrt_ke[i] = np.sqrt(meas_rate[i] * meas_eff[i])
        # an unmeasured channel (rate 0) records its mean without noise
        if sqrt_ke[i] > 0.0:
            inv_noise[i] = 1.0 / (2.0 * sqrt_ke[i])

    diag[D_TRACE_ERR] = 0.0
    diag[D_HERM_ERR] = 0.0
    diag[D_MIN_EIG] = np.inf
    diag[D_MIN_SYN] = np.inf
    diag[D_MAX_SYN] = -np.inf
    for i in range(D_STATE_GAP, N_DIAG):
        diag[i] = 0.0

    for i in range(n_meas):
        m_r[i] = _mean(rho_r, meas_perm[i], meas_phase[i])
        m_e[i] = _mean(rho_e, meas_perm[i], meas_phase[i])
    for q in range(nq):
        z_e[q] = _diag_expect(rho_e, qz[q])
    _decide(mode, lam0, eps, z_e, z0_e, m_e, 0 < on_step, lam)
    _record(rows, 0, 0.0, rho_r, psi0, qref, qpos, m_r, m_e, dq, lam)
    next_cp = 0
    row = 1

    for k in range(n_steps):
        if k == inj_step:
            for r in range(rho_r.shape[0]):
                for c in range(rho_r.shape[1]):
                    buf_r[r, c] = rho_r[inj_perm[r], inj_perm[c]]
            rho_r[:, :] = buf_r
            for i in range(n_meas):
                m_r[i] = _mean(rho_r, meas_perm[i], meas_phase[i])

        for i in range(n_meas):
            dq[i] = m_r[i] * dt + dw[k, i] * inv_noise[i]
            c_r[i] = sqrt_ke[i] * dw[k, i]
            c_e[i] = 2.0 * meas_rate[i] * meas_eff[i] * (dq[i] - m_e[i] * dt)
            # both systems see the identical output increment
            dy[i] = 2.0 * sqrt_ke[i] * dq[i]

        if scheme == SCHEME_KRAUS:
            ok = _step_kraus(rho_r, buf_r, M, dt, H, has_h, dec_perm, dec_phase, dec_rate,
                             meas_perm, meas_phase, meas_rate, meas_eff, dy, fb_perm, fb_phase, lam)
            ok = ok and _step_kraus(rho_e, buf_e, M, dt, H, has_h, dec_perm, dec_phase, dec_rate,
                                    meas_perm, meas_phase, meas_rate, meas_eff, dy, fb_perm, fb_phase, lam)
        else:
            ok = _step(rho_r, buf_r, dt, H, has_h, dec_perm, dec_phase, dec_rate,
                       meas_perm, meas_phase, meas_rate, m_r, c_r, fb_perm, fb_phase, lam)
            ok = ok and _step(rho_e, buf_e, dt, H, has_h, dec_perm, dec_phase, dec_rate,
                              meas_perm, meas_phase, meas_rate, m_e, c_e, fb_perm, fb_phase, lam)
        if not ok:
            return -(k + 1)
        rho_r[:, :] = buf_r
        rho_e[:, :] = buf_e

        for i in range(n_meas):
            m_r[i] = _mean(rho_r, meas_perm[i], meas_phase[i])
            m_e[i] = _mean(rho_e, meas_perm[i], meas_phase[i])
            g = abs(m_r[i] - m_e[i])
            if g > diag[D_SYN_GAP + i]:
                diag[D_SYN_GAP + i] = g
            lo = min(m_r[i], m_e[i])
            hi = max(m_r[i], m_e[i])
            if lo < diag[D_MIN_SYN]:
                diag[D_MIN_SYN] = lo
            if hi > diag[D_MAX_SYN]:
                diag[D_MAX_SYN] = hi
        for q in range(nq):
            z_e[q] = _diag_expect(rho_e, qz[q])
            if z0_r[q] != 0.0:
                dev_r = abs(_diag_expect(rho_r, qz[q]) - z0_r[q]) / abs(z0_r[q])
                dev_e = abs(z_e[q] - z0_e[q]) / abs(z0_e[q])
                if abs(dev_r - dev_e) > diag[D_ZDEV_GAP + q]:
                    diag[D_ZDEV_GAP + q] = abs(dev_r - dev_e)
        gap = 0.0
        for r in range(rho_r.shape[0]):
            for c in range(rho_r.shape[1]):
                d = abs(rho_r[r, c] - rho_e[r, c])
                if d > gap:
                    gap = d
        if gap > diag[D_STATE_GAP]:
            diag[D_STATE_GAP] = gap

        prev_on = lam > 0.0
        _decide(mode, lam0, eps, z_e, z0_e, m_e, k + 1 < on_step, lam)
        for q in range(nq):
            if lam[q] > 0.0 and not prev_on[q]:
                events[1, q] += 1
            flipped = abs(z_e[q] - z0_e[q]) > eps * abs(z0_e[q])
            if flipped and not detected[q]:
                events[0, q] += 1
            detected[q] = flipped

        if next_cp < checkpoints.shape[0] and checkpoints[next_cp] == k + 1:
            next_cp += 1
            for rho in (rho_r, rho_e):
                tr = 0.0
                for r in range(rho.shape[0]):
                    tr += rho[r, r].real
                    for c in range(rho.shape[1]):
                        h = abs(rho[r, c] - np.conj(rho[c, r]))
                        if h > diag[D_HERM_ERR]:
                            diag[D_HERM_ERR] = h
                if abs(tr - 1.0) > diag[D_TRACE_ERR]:
                    diag[D_TRACE_ERR] = abs(tr - 1.0)
                e = _eig_floor(rho)
                if e < diag[D_MIN_EIG]:
                    diag[D_MIN_EIG] = e

        if (k + 1) % stride == 0:
            _record(rows, row, (k + 1) * dt, rho_r, psi0, qref, qpos, m_r, m_e, dq, lam)
            row += 1
    return n_steps
