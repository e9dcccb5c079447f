"""Tapped-delay-line Rayleigh fading (TDL-C) and AWGN."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelRealization",
    "NoiseSpec",
    "TDLC_DELAYS",
    "TDLC_POWERS_DB",
    "apply_channel",
    "apply_channel_batch",
    "awgn_for_snr",
    "draw_taps",
    "flat_channel",
    "tdlc_profile",
    "tdlc_realization",
    "write_realization_csv",
]

# 3GPP TR 38.901 Table 7.7.2-3 (TDL-C): normalized delays and powers
TDLC_DELAYS = np.array([
    0.0, 0.2099, 0.2219, 0.2329, 0.2176, 0.6366, 0.6448, 0.6560, 0.6584, 0.7935,
    0.8213, 0.9336, 1.2285, 1.3083, 2.1704, 2.7105, 4.2589, 4.6003, 5.4902, 5.6077,
    6.3065, 6.6374, 7.0427, 8.6523,
])
TDLC_POWERS_DB = np.array([
    -4.4, -1.2, -3.5, -5.2, -2.5, 0.0, -2.2, -3.9, -7.4, -7.1,
    -10.7, -11.1, -5.1, -6.8, -8.7, -13.2, -13.9, -13.9, -15.8, -17.1,
    -16.0, -15.7, -21.6, -22.8,
])


@dataclass(frozen=True)
class ChannelRealization:
    """Tap gains ``h`` at integer sample ``delays`` with mean tap energies ``energies``."""

    taps: np.ndarray
    delays: np.ndarray
    energies: np.ndarray

    @property
    def total_energy(self):
        return float(np.sum(self.energies))

    @property
    def max_delay(self):
        return int(self.delays.max()) if self.delays.size else 0

    def impulse_response(self):
        h = np.zeros(self.max_delay + 1, dtype=complex)
        np.add.at(h, self.delays, self.taps)
        return h


@dataclass(frozen=True)
class NoiseSpec:
    n0: float
    snr: float

    def draw(self, rng, n):
        return np.sqrt(self.n0 / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def tdlc_profile(rms_delay_scaling, sample_rate, e_h=1.0):
    """Quantized TDL-C profile: ``(delays, energies)`` with merged equal-delay taps.

    Delays are ``round(normalized_delay * scaling * sample_rate)``; taps that
    land on the same sample have their powers added. Energies sum to ``e_h``.
    """
    if rms_delay_scaling < 0:
        raise ValueError("delay scaling must be >= 0")
    q = np.rint(TDLC_DELAYS * rms_delay_scaling * sample_rate).astype(int)
    p = 10.0 ** (TDLC_POWERS_DB / 10.0)
    delays = np.unique(q)
    energies = np.array([p[q == d].sum() for d in delays])
    return delays, e_h * energies / energies.sum()


def draw_taps(energies, rng):
    """Circular complex Gaussian gains with variances ``energies``."""
    e = np.asarray(energies, dtype=float)
    g = rng.standard_normal(e.size) + 1j * rng.standard_normal(e.size)
    return np.sqrt(e / 2) * g


def tdlc_realization(rms_delay_scaling, sample_rate, seed):
    """One block-fading TDL-C draw. ``seed`` may be an int or a ``Generator``."""
    if not rms_delay_scaling > 0:
        raise ValueError("delay scaling must be > 0")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    delays, energies = tdlc_profile(rms_delay_scaling, sample_rate)
    return ChannelRealization(draw_taps(energies, rng), delays, energies)


def flat_channel():
    return ChannelRealization(np.ones(1, complex), np.zeros(1, int), np.ones(1))


def apply_channel(signal, realization):
    """Linear convolution; output length is ``len(signal) + max_delay``."""
    x = np.asarray(signal, dtype=complex)
    return np.convolve(x, realization.impulse_response())


def apply_channel_batch(x, taps, delays):
    """Per-row convolution of ``x`` (trials x samples) with rows of ``taps``.

    Delays are shared; output has ``max(delays)`` extra samples.
    """
    x = np.asarray(x)
    T, N = x.shape
    dmax = int(np.max(delays)) if len(delays) else 0
    y = np.zeros((T, N + dmax), dtype=complex)
    for p, d in enumerate(delays):
        y[:, d : d + N] += taps[:, p : p + 1] * x
    return y


def awgn_for_snr(snr, p_w, n_alloc, e_h=1.0):
    """``N0 = e_h * p_w / (n_alloc * snr)`` with ``n_alloc = n_sc + 2*n_gb``."""
    if not snr > 0:
        raise ValueError("snr must be > 0")
    return NoiseSpec(n0=e_h * p_w / (n_alloc * snr), snr=snr)


def write_realization_csv(path, realization):
    r = realization
    data = np.column_stack([r.delays, r.taps.real, r.taps.imag, r.energies])
    np.savetxt(path, data, delimiter=",", header="delay_samples,re,im,E_p", comments="",
               fmt=["%d", "%.17g", "%.17g", "%.17g"])
