"""Counter-based Wiener increments.

Each trajectory owns a Philox key derived from ``(seed, trajectory)``; the
Philox counter is the integration step.  One counter value yields four
64-bit words, which Box-Muller turns into four standard normals, one per
measurement channel (at most four channels).  A draw is therefore a pure
function of ``(seed, trajectory, channel, step)`` and never depends on how
many draws were consumed before it, on feedback, or on scheduling.

Normals are always produced in aligned blocks of ``BLOCK`` steps so that a
single random-access draw and a bulk draw run the identical floating point
code and agree bit for bit.
"""

import hashlib

import numpy as np

BLOCK = 4096
MAX_CHANNELS = 4
_MASK64 = (1 << 64) - 1


def _key(seed, trajectory):
    return np.array([seed & _MASK64, trajectory & _MASK64], dtype=np.uint64)


def _normals_block(seed, trajectory, block):
    bits = np.random.Philox(key=_key(seed, trajectory), counter=block * BLOCK)
    raw = bits.random_raw(MAX_CHANNELS * BLOCK).reshape(BLOCK, MAX_CHANNELS)
    # 53-bit uniforms on (0, 1]; the open lower end keeps log finite
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    phi = 2.0 * np.pi * u[:, 1::2]
    out = np.empty((BLOCK, MAX_CHANNELS))
    out[:, 0::2] = r * np.cos(phi)
    out[:, 1::2] = r * np.sin(phi)
    return out


class NoiseStream:
    """Deterministic Gaussian increments addressed by (trajectory, channel, step).

    Parameters
    ----------
    seed : int
        64-bit stream seed.
    dt : float
        Step size; increments have variance ``dt``.
    """

    def __init__(self, seed, dt):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.seed = int(seed)
        self.dt = float(dt)
        self._sqrt_dt = np.sqrt(self.dt)

    def wiener_increment(self, trajectory, channel, step):
        if not 0 <= channel < MAX_CHANNELS:
            raise ValueError(f"channel must be in [0, {MAX_CHANNELS})")
        block, offset = divmod(int(step), BLOCK)
        return float(_normals_block(self.seed, trajectory, block)[offset, channel] * self._sqrt_dt)

    def increments(self, trajectory, n_steps, n_channels=3, start=0):
        """Array of shape ``(n_steps, n_channels)`` for steps ``start .. start+n_steps-1``."""
        if not 0 < n_channels <= MAX_CHANNELS:
            raise ValueError(f"n_channels must be in 1..{MAX_CHANNELS}")
        first, last = start // BLOCK, (start + n_steps - 1) // BLOCK
        blocks = [_normals_block(self.seed, trajectory, b) for b in range(first, last + 1)]
        z = np.concatenate(blocks)[start - first * BLOCK:][:n_steps, :n_channels]
        return z * self._sqrt_dt


def checksum(dw):
    """SHA-256 hex digest of an increment array (C order, float64 bytes)."""
    return hashlib.sha256(np.ascontiguousarray(dw, dtype=np.float64).tobytes()).hexdigest()
