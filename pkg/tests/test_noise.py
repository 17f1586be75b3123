import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqec.noise import BLOCK, NoiseStream, checksum


def test_random_access_matches_bulk():
    ns = NoiseStream(7, 1e-5)
    bulk = ns.increments(3, 2 * BLOCK + 50)
    for step in (0, 1, BLOCK - 1, BLOCK, 2 * BLOCK + 49):
        for ch in range(3):
            assert ns.wiener_increment(3, ch, step) == bulk[step, ch]


@settings(max_examples=25)
@given(st.integers(0, 3 * BLOCK), st.integers(1, 2 * BLOCK))
def test_windows_are_slices_of_one_stream(start, n):
    ns = NoiseStream(11, 1e-4)
    full = ns.increments(0, start + n)
    assert np.array_equal(ns.increments(0, n, start=start), full[start:])


def test_streams_are_addressed_by_seed_and_trajectory():
    a = NoiseStream(1, 1e-5).increments(0, 100)
    assert np.array_equal(a, NoiseStream(1, 1e-5).increments(0, 100))
    assert not np.array_equal(a, NoiseStream(1, 1e-5).increments(1, 100))
    assert not np.array_equal(a, NoiseStream(2, 1e-5).increments(0, 100))


def test_channel_count_does_not_change_values():
    ns = NoiseStream(5, 1e-5)
    assert np.array_equal(ns.increments(2, 300, 1)[:, 0], ns.increments(2, 300, 3)[:, 0])


def test_moments_over_a_million_draws():
    dt = 1e-5
    dw = NoiseStream(0, dt).increments(0, 250_000, 4).ravel()
    assert dw.size == 10**6
    assert abs(dw.mean()) < 5 * np.sqrt(dt / dw.size)
    assert dw.var() / dt == pytest.approx(1.0, abs=5 * np.sqrt(2 / dw.size))
    # channels uncorrelated
    c = np.corrcoef(dw.reshape(-1, 4).T)
    assert np.max(np.abs(c - np.eye(4))) < 5e-3


def test_checksum_detects_any_change():
    dw = NoiseStream(0, 1e-5).increments(0, 10)
    c = checksum(dw)
    assert c == checksum(dw.copy())
    dw[3, 1] = np.nextafter(dw[3, 1], 1)
    assert checksum(dw) != c


def test_invalid_arguments():
    with pytest.raises(ValueError):
        NoiseStream(0, 0.0)
    with pytest.raises(ValueError):
        NoiseStream(0, 1e-5).wiener_increment(0, 4, 0)
