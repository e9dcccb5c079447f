import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpwus.channel import (
    TDLC_DELAYS,
    ChannelRealization,
    apply_channel,
    apply_channel_batch,
    awgn_for_snr,
    flat_channel,
    tdlc_profile,
    tdlc_realization,
    write_realization_csv,
)

FS = 512 * 30e3


def test_table_shape():
    assert TDLC_DELAYS.size == 24


def test_tiny_scaling_is_flat():
    r = tdlc_realization(1e-15, FS, 0)
    assert r.delays.tolist() == [0]
    assert r.energies == pytest.approx([1.0])


def test_profile_normalized_and_merged():
    delays, energies = tdlc_profile(300e-9, FS)
    assert np.all(np.diff(delays) > 0)
    assert energies.sum() == pytest.approx(1.0, abs=1e-12)
    # taps at 0.2099, 0.2219, 0.2329 and 0.2176 land on the same sample at 300 ns
    assert delays.size < 24


def test_tap_variance_monte_carlo():
    rng = np.random.default_rng(0)
    delays, energies = tdlc_profile(300e-9, FS)
    taps = np.array([tdlc_realization(300e-9, FS, rng).taps for _ in range(10_000)])
    var = np.mean(np.abs(taps) ** 2, axis=0)
    assert np.all(np.abs(var / energies - 1) < 0.05)


def test_energy_within_1p5_us():
    delays, energies = tdlc_profile(300e-9, FS)
    inside = energies[delays / FS <= 1.5e-6].sum()
    assert inside >= 0.98


def test_identity_and_shift():
    x = np.random.default_rng(1).standard_normal(20) + 0j
    assert np.array_equal(apply_channel(x, flat_channel()), x)
    r = ChannelRealization(np.ones(1, complex), np.array([3]), np.ones(1))
    y = apply_channel(x, r)
    assert y.size == 23 and np.allclose(y[3:], x) and np.allclose(y[:3], 0)


def test_two_taps_against_double_sum():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    r = ChannelRealization(np.array([0.3 - 0.2j, 1.1j]), np.array([1, 5]), np.array([0.5, 0.5]))
    y = apply_channel(x, r)
    want = np.zeros(35, complex)
    for n in range(35):
        for h, d in zip(r.taps, r.delays):
            if 0 <= n - d < 30:
                want[n] += h * x[n - d]
    assert np.abs(y - want).max() <= 1e-12
    yb = apply_channel_batch(x[None, :], r.taps[None, :], r.delays)
    assert np.abs(yb[0] - want).max() <= 1e-12


@given(st.integers(0, 10**6), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    r = tdlc_realization(300e-9, FS, rng)
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    lhs = apply_channel(a * x + b * y, r)
    rhs = a * apply_channel(x, r) + b * apply_channel(y, r)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, abs(a) + abs(b)) * 10


def test_awgn_plugin():
    p_s = 0.7
    for snr in (0.5, 1.0, 10.0):
        assert awgn_for_snr(snr, 144 * p_s, 144).n0 == pytest.approx(p_s / snr)
    assert awgn_for_snr(1e15, 144, 144).n0 < 1e-14
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            awgn_for_snr(bad, 144, 144)


def test_awgn_variance():
    spec = awgn_for_snr(2.0, 144, 144)
    z = spec.draw(np.random.default_rng(3), 1_000_000)
    assert abs(np.var(z) / spec.n0 - 1) < 0.01


def test_independent_seeds():
    a = tdlc_realization(300e-9, FS, 1).taps
    b = tdlc_realization(300e-9, FS, 2).taps
    assert not np.allclose(a, b)
    assert np.array_equal(a, tdlc_realization(300e-9, FS, 1).taps)


def test_realization_csv(tmp_path):
    r = tdlc_realization(300e-9, FS, 5)
    write_realization_csv(tmp_path / "h.csv", r)
    d = np.loadtxt(tmp_path / "h.csv", delimiter=",", skiprows=1)
    assert np.array_equal(d[:, 0].astype(int), r.delays)
    assert np.array_equal(d[:, 1] + 1j * d[:, 2], r.taps)
    assert np.array_equal(d[:, 3], r.energies)
