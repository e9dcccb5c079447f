"""Waveform diagnostics: envelope quality, comb power and average spectra."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .bits import bits_from_index, expected_bit_power, manchester_encode
from .precoder import SubcarrierFrame, dft_precode, generate_wus_symbol, modulation_symbols

__all__ = [
    "EnvelopeMetrics",
    "average_spectrum",
    "comb_levels",
    "comb_power_fraction",
    "envelope_metrics",
    "expected_d0_power",
    "oversampled_signal",
    "waveform_metrics",
    "window_offset",
    "write_metrics_json",
    "write_spectrum_csv",
]

MAX_ENUM_BITS = 12


@dataclass
class EnvelopeMetrics:
    """``on_ripple``: worst max/min envelope ratio over the central half of ON windows.
    ``off_leakage``: OFF-window energy over ON-window energy.
    ``on_energy_fraction``: energy share of every window (sums to 1).
    ``off_peak``: largest envelope over the central half of OFF windows
    relative to the mean envelope over the central half of ON windows
    (sidelobe level; 0 when there is no OFF window).
    """

    on_ripple: float
    off_leakage: float
    on_energy_fraction: list
    off_peak: float = 0.0

    def to_dict(self):
        return asdict(self)


def oversampled_signal(frame, config, oversample=1):
    """WUS body at ``t = n/oversample`` for ``n < n_fft*oversample`` (zero-padded IDFT)."""
    values = frame.values if isinstance(frame, SubcarrierFrame) else np.asarray(frame)
    n = config.n_fft * oversample
    full = np.zeros(n, dtype=complex)
    full[(np.arange(values.size) + config.f0) % n] = values
    return np.fft.ifft(full) * n


def window_offset(config, t_shift=0.0):
    """Start of the first OOK window in samples: pulse 0 sits at ``t_shift``."""
    return t_shift - config.n_fft / (2 * config.n_symb)


def envelope_metrics(signal, n_bit, coded, offset=0.0, period=None):
    """Envelope metrics of one OFDM body against its known bit pattern.

    ``signal`` holds ``period`` equally spaced samples (default its length)
    of one body; windows have length ``period/n_bit`` and the first starts
    at sample ``offset`` (fractional, circular).
    """
    env = np.abs(np.asarray(signal))
    n = env.size if period is None else period
    coded = np.asarray(coded).astype(bool)
    if coded.size != n_bit:
        raise ValueError("bit pattern length differs from n_bit")
    if not coded.any():
        raise ValueError("no ON window")
    width = n / n_bit
    pos = np.mod(np.arange(env.size) - offset, n)
    win = np.minimum((pos // width).astype(int), n_bit - 1)
    frac = pos / width - win
    energy = np.bincount(win, weights=env**2, minlength=n_bit)
    on_e = energy[coded].sum()
    off_e = energy[~coded].sum()
    central = (frac >= 0.25) & (frac < 0.75)
    on_central = central & coded[win]
    off_central = central & ~coded[win]
    on_mean = env[on_central].mean() if on_central.any() else 0.0
    off_peak = env[off_central].max() / on_mean if off_central.any() and on_mean > 0 else 0.0
    ripple = 1.0
    for w in np.flatnonzero(coded):
        sel = (win == w) & central
        vals = env[sel]
        if vals.size == 0:
            continue
        lo = vals.min()
        ripple = max(ripple, np.inf if lo == 0 else vals.max() / lo)
    total = energy.sum()
    return EnvelopeMetrics(
        on_ripple=float(ripple),
        off_leakage=float(off_e / on_e) if on_e > 0 else float("inf"),
        on_energy_fraction=(energy / total).tolist() if total > 0 else [0.0] * n_bit,
        off_peak=float(off_peak),
    )


def waveform_metrics(frame, config, coded, t_shift=0.0, oversample=4):
    """:func:`envelope_metrics` of a generated frame on its natural window grid."""
    s = oversampled_signal(frame, config, oversample)
    off = window_offset(config, t_shift) * oversample
    return envelope_metrics(s, config.n_bit, coded, off)


def comb_power_fraction(D0, n_bit):
    """Share of ``sum |D0|**2`` carried by ``k = 0, n_bit, 2*n_bit, ...``."""
    d = D0.values if isinstance(D0, SubcarrierFrame) else np.asarray(D0)
    p = np.abs(d) ** 2
    total = p.sum()
    if total == 0:
        raise ValueError("zero frame")
    return float(p[::n_bit].sum() / total)


def comb_levels(D0, n_bit):
    d = D0.values if isinstance(D0, SubcarrierFrame) else np.asarray(D0)
    return np.abs(d[::n_bit]) ** 2


def _ensemble(config, draws, rng):
    n_bo = config.n_bo
    if draws is None:
        if n_bo > MAX_ENUM_BITS:
            raise ValueError("too many info bits to enumerate; pass draws")
        return [bits_from_index(i, n_bo) for i in range(2**n_bo)]
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return list(rng.integers(0, 2, size=(draws, n_bo)).astype(np.uint8))


def average_spectrum(config, fdss, spreading, draws=None, rng=None, alternate_sign=False,
                     stage="final"):
    """Mean ``|X^W[k]|**2`` (or ``|D0[k]|**2`` with ``stage="preprocessed"``).

    Enumerates every info string unless ``draws`` is given. With
    ``alternate_sign`` half the symbols use ``-phi`` (per-symbol sign
    alternation) and both halves are averaged.
    """
    configs = [config, config.with_(phi=-config.phi)] if alternate_sign else [config]
    acc, count = 0.0, 0
    for info in _ensemble(config, draws, rng):
        for c in configs:
            if stage == "final":
                v = generate_wus_symbol(info, c, fdss, spreading).values
            else:
                v = dft_precode(modulation_symbols(info, c, spreading)).values
            acc = acc + np.abs(v) ** 2
            count += 1
    return acc / count


def expected_d0_power(r0, n_symb, n_bit, manchester=True):
    """``|R0[k]|**2 * E|B[k]|**2`` for uniform i.i.d. info bits (zero ramp)."""
    r0 = np.asarray(r0, dtype=complex)
    R0 = np.fft.fft(np.concatenate([r0, np.zeros(n_symb - r0.size)]))
    return np.abs(R0) ** 2 * expected_bit_power(np.arange(n_symb), n_bit, manchester)


def write_metrics_json(path, metrics):
    data = metrics.to_dict() if hasattr(metrics, "to_dict") else dict(metrics)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)


def write_spectrum_csv(path, power):
    p = np.asarray(power, dtype=float)
    np.savetxt(path, np.column_stack([np.arange(p.size), p]), delimiter=",",
               header="k,mean_power", comments="", fmt=["%d", "%.17g"])


def coded_for(info, config):
    """Coded bit pattern used for window labelling."""
    return manchester_encode(info) if config.manchester else np.asarray(info)
