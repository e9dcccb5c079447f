"""Full-band OFDM symbols: WUS placement, co-channel QPSK data, IFFT and CP."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .precoder import SubcarrierFrame

__all__ = [
    "AllocationError",
    "BandPlan",
    "TimeSignal",
    "assemble_symbol",
    "concat_symbols",
    "ofdm_demodulate",
    "ofdm_modulate",
    "qpsk_symbols",
    "read_binary",
    "write_binary",
    "write_csv",
]

BINARY_MAGIC = b"LPWUSIQ1"
_HEADER = struct.Struct("<8sIIdQ")  # 32 bytes


class AllocationError(ValueError):
    """WUS block (with guards) and data subcarriers overlap."""


@dataclass(frozen=True)
class BandPlan:
    """Subcarrier allocation of one OFDM symbol.

    Indices are signed baseband indices (placed modulo ``n_fft``). With the
    defaults the ``n_active`` subcarriers are centred on DC and every active
    subcarrier outside the WUS block ``[f0 - n_gb, f0 + n_sc + n_gb)``
    carries data. ``data`` overrides the data index set.
    """

    n_fft: int
    f0: int
    n_sc: int
    n_gb: int
    n_active: int = 0
    data: tuple | None = None

    @classmethod
    def for_config(cls, config, n_active=288, data=None):
        return cls(config.n_fft, config.f0, config.n_sc, config.n_gb, n_active, data)

    @property
    def wus_indices(self):
        return np.arange(self.f0, self.f0 + self.n_sc)

    @property
    def block_indices(self):
        return np.arange(self.f0 - self.n_gb, self.f0 + self.n_sc + self.n_gb)

    @property
    def data_indices(self):
        if self.data is not None:
            idx = np.asarray(self.data, dtype=int)
        else:
            active = np.arange(self.n_active) - self.n_active // 2
            idx = np.setdiff1d(active, self.block_indices)
        self._check(idx)
        return idx

    def _check(self, idx):
        block = np.mod(self.block_indices, self.n_fft)
        dat = np.mod(idx, self.n_fft)
        if len(np.unique(block)) != len(block):
            raise AllocationError("WUS block wraps onto itself")
        if np.intersect1d(block, dat).size or len(np.unique(dat)) != len(dat):
            raise AllocationError("data subcarriers collide with the WUS block")


@dataclass
class TimeSignal:
    """Sample buffer with per-symbol boundaries ``(start, cp_len, body_len)``."""

    samples: np.ndarray
    sample_rate: float
    boundaries: list = field(default_factory=list)

    def __post_init__(self):
        pos = 0
        for start, cp, body in self.boundaries:
            if start != pos:
                raise ValueError("symbol boundaries do not tile the buffer")
            pos += cp + body
        if self.boundaries and pos != len(self.samples):
            raise ValueError("symbol boundaries do not tile the buffer")

    def body(self, i):
        start, cp, n = self.boundaries[i]
        return self.samples[start + cp : start + cp + n]


def qpsk_symbols(n, rng, p_s=1.0):
    """``n`` QPSK symbols of power ``p_s``."""
    bits = rng.integers(0, 2, size=(2, n))
    return np.sqrt(p_s / 2) * ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1]))


def assemble_symbol(wus_frame, data_symbols, band_plan, config=None):
    """Length-``n_fft`` coefficient vector ``X`` of one OFDM symbol."""
    n_fft = band_plan.n_fft
    X = np.zeros(n_fft, dtype=complex)
    if wus_frame is not None:
        values = wus_frame.values if isinstance(wus_frame, SubcarrierFrame) else wus_frame
        values = np.asarray(values)
        if values.size != band_plan.n_sc:
            raise ValueError("WUS frame length differs from the band plan")
        X[np.mod(band_plan.wus_indices, n_fft)] = values
    if data_symbols is not None:
        idx = band_plan.data_indices
        data_symbols = np.asarray(data_symbols)
        if data_symbols.size != idx.size:
            raise ValueError(f"need {idx.size} data symbols, got {data_symbols.size}")
        X[np.mod(idx, n_fft)] = data_symbols
    return X


def ofdm_modulate(X, n_fft, n_cp):
    """CP plus the unnormalized inverse DFT of ``X``: ``n_cp + n_fft`` samples."""
    X = np.asarray(X, dtype=complex)
    if X.size != n_fft:
        raise ValueError("X must have n_fft entries")
    body = np.fft.ifft(X) * n_fft
    return np.concatenate([body[n_fft - n_cp :], body]) if n_cp else body


def ofdm_demodulate(samples, n_fft, n_cp, start=0):
    """Forward DFT of the body starting after the CP, scaled by ``1/n_fft``."""
    body = np.asarray(samples)[start + n_cp : start + n_cp + n_fft]
    return np.fft.fft(body) / n_fft


def concat_symbols(coeffs, n_fft, n_cp, sample_rate):
    """Modulate a sequence of coefficient vectors into one :class:`TimeSignal`."""
    parts, bounds, pos = [], [], 0
    for X in coeffs:
        s = ofdm_modulate(X, n_fft, n_cp)
        parts.append(s)
        bounds.append((pos, n_cp, n_fft))
        pos += s.size
    samples = np.concatenate(parts) if parts else np.zeros(0, complex)
    return TimeSignal(samples, sample_rate, bounds)


def write_csv(path, samples):
    s = np.asarray(samples, dtype=complex)
    data = np.column_stack([np.arange(s.size), s.real, s.imag])
    np.savetxt(path, data, delimiter=",", header="n,re,im", comments="",
               fmt=["%d", "%.17g", "%.17g"])


def write_binary(path, samples, n_fft, n_cp, sample_rate):
    """32-byte header then interleaved little-endian float64 ``re, im``."""
    s = np.asarray(samples, dtype=complex)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BINARY_MAGIC, n_fft, n_cp, float(sample_rate), s.size))
        fh.write(s.astype("<c16").tobytes())


def read_binary(path):
    """Inverse of :func:`write_binary`; returns ``(samples, n_fft, n_cp, sample_rate)``."""
    with open(path, "rb") as fh:
        magic, n_fft, n_cp, rate, count = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != BINARY_MAGIC:
            raise ValueError("not an lpwus sample file")
        samples = np.frombuffer(fh.read(16 * count), dtype="<c16").copy()
    if samples.size != count:
        raise ValueError("truncated sample file")
    return samples, n_fft, n_cp, rate
