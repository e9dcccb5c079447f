"""Low-power envelope-detection receiver.

Chain: complex-baseband low-pass (band-select role), magnitude, low-pass
smoothing, decimation to the ADC rate, per-symbol AGC, uniform quantizer,
and Manchester decisions by comparing window sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from . import kernels

__all__ = [
    "DetectionResult",
    "ReceiverConfig",
    "agc_quantize",
    "butterworth",
    "decide",
    "decision_offset",
    "detect_manchester",
    "draw_timing_offset",
    "envelope",
    "filter_delay",
    "filter_response",
    "receiver_front_end",
    "receiver_trace",
    "window_bounds",
]


@dataclass(frozen=True)
class ReceiverConfig:
    """Envelope receiver settings.

    Cutoffs are in Hz; ``None`` means half the WUS bandwidth ``n_sc*f_sc/2``.
    ``trim`` removes ``(left, right)`` ADC samples from every decision window
    (receiver-side concentration). ``tau_err`` is the maximum timing error
    in seconds. With ``align_timing`` the nominal decision start follows the
    transmitted window grid and the DC group delay of both filters, as a
    synchronized receiver would; otherwise it is the first body sample.
    """

    filter_order: int = 3
    bpf_cutoff: float | None = None
    lpf_cutoff: float | None = None
    adc_bits: int = 4
    downsample: int = 4
    tau_err: float = 0.0
    trim: tuple = (0, 0)
    align_timing: bool = True

    @classmethod
    def from_dict(cls, data):
        from dataclasses import fields

        from .config import ConfigError

        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown_key:{k}" for k in unknown])
        data = dict(data)
        if "trim" in data:
            data["trim"] = tuple(data["trim"])
        return cls(**data)

    def cutoffs(self, config):
        half_bw = config.n_sc * config.f_sc / 2
        return (
            self.bpf_cutoff if self.bpf_cutoff is not None else half_bw,
            self.lpf_cutoff if self.lpf_cutoff is not None else half_bw,
        )

    def check(self, config):
        errors = []
        if self.downsample < 1 or config.n_fft % self.downsample:
            errors.append("downsample_not_dividing_n_fft")
        if self.adc_bits < 1:
            errors.append("nonpositive_adc_bits")
        if self.filter_order < 1:
            errors.append("nonpositive_filter_order")
        if self.tau_err < 0:
            errors.append("negative_tau_err")
        nyq = config.sample_rate / 2
        for name, fc in zip(("bpf", "lpf"), self.cutoffs(config)):
            if not 0 < fc < nyq:
                errors.append(f"{name}_cutoff_out_of_range")
        if min(self.trim) < 0:
            errors.append("negative_trim")
        elif not errors:
            win = config.n_fft // self.downsample // config.n_bit
            if win - sum(self.trim) < 1:
                errors.append("window_below_one_sample")
        return errors


@dataclass
class DetectionResult:
    bits: np.ndarray
    window_sums: np.ndarray
    timing_offset: int


def butterworth(cutoff, sample_rate, order=3):
    """Digital Butterworth low-pass ``(b, a)`` by the bilinear transform with prewarping."""
    if not 0 < cutoff < sample_rate / 2:
        raise ValueError("cutoff must lie in (0, sample_rate/2)")
    # scipy's digital design prewarps the cutoff before the bilinear map
    b, a = sps.butter(order, cutoff, btype="low", fs=sample_rate)
    return b, a


def filter_response(b, a, freqs, sample_rate):
    """Complex response of ``b/a`` at ``freqs`` Hz."""
    z = np.exp(-2j * np.pi * np.asarray(freqs) / sample_rate)
    return np.polyval(b[::-1], z) / np.polyval(a[::-1], z)


def filter_delay(b, a):
    """Group delay at DC in samples."""
    return float(sps.group_delay((b, a), w=[0.0])[1][0])


def decision_offset(rx, config, t_shift=0.0):
    """Samples from the first body sample to the first decision window at the ADC input.

    Zero unless ``rx.align_timing``; then the window grid start of the
    transmitted pulses (pulse 0 at ``t_shift``) plus both filter delays.
    """
    if not rx.align_timing:
        return 0.0
    from .metrics import window_offset

    delay = sum(filter_delay(*butterworth(fc, config.sample_rate, rx.filter_order))
                for fc in rx.cutoffs(config))
    return window_offset(config, t_shift) + delay


def envelope(x):
    """Per-sample magnitude."""
    return np.abs(x)


def agc_quantize(env, bits=4, axis=-1):
    """Normalize by the maximum along ``axis`` and quantize mid-rise with ``2**bits`` levels.

    Returns ``(quantized, flagged)``; an all-zero input passes through as
    zeros with ``flagged`` set.
    """
    env = np.asarray(env, dtype=float)
    if np.any(env < 0):
        raise ValueError("envelope must be nonnegative")
    peak = env.max(axis=axis, keepdims=True)
    flagged = peak == 0
    x = env / np.where(flagged, 1.0, peak)
    levels = 2**bits
    q = (np.minimum(np.floor(x * levels), levels - 1) + 0.5) / levels
    q = np.where(flagged, 0.0, q)
    return q, np.squeeze(flagged, axis=axis)


def window_bounds(n_samples, n_bit, trim=(0, 0)):
    """``(start, stop)`` of each decision window inside a body of ``n_samples``."""
    win = n_samples // n_bit
    if win - trim[0] - trim[1] < 1:
        raise ValueError("decision window shorter than one sample")
    return [(w * win + trim[0], (w + 1) * win - trim[1]) for w in range(n_bit)]


def decide(window_sums):
    """Info bit ``n`` is 1 when window ``2n+1`` carries more energy than ``2n``; ties give 0."""
    s = np.asarray(window_sums)
    return (s[..., 1::2] > s[..., 0::2]).astype(np.uint8)


def detect_manchester(quantized, config, timing_offset=0, trim=(0, 0), body_start=0, downsample=4):
    """Decide the info bits of one OFDM symbol from ADC-rate samples.

    ``body_start`` is the nominal ADC index of the first body sample (CP
    already skipped); the receiver actually starts at
    ``body_start + timing_offset`` and reads ``n_fft/downsample`` samples.
    """
    q = np.asarray(quantized, dtype=float)
    n_body = config.n_fft // downsample
    start = body_start + int(timing_offset)
    if start < 0 or start + n_body > q.size:
        raise ValueError("timing offset moves the window outside the samples")
    seg = q[start : start + n_body]
    sums = np.array([seg[a:b].sum() for a, b in window_bounds(n_body, config.n_bit, trim)])
    return DetectionResult(decide(sums), sums, int(timing_offset))


def draw_timing_offset(tau_err, adc_rate, rng):
    """Uniform offset on ``[-tau_err, tau_err]`` rounded to ADC samples (positive: late)."""
    if tau_err < 0:
        raise ValueError("tau_err must be >= 0")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    tau = rng.uniform(-tau_err, tau_err)
    return int(np.rint(tau * adc_rate))


def receiver_front_end(y, rx, config):
    """Filter, envelope, smooth and decimate; returns ADC-rate envelope (pre-AGC).

    Smoothing-filter undershoot below zero is clipped, as an envelope ADC
    cannot represent it.
    """
    fb, fl = rx.cutoffs(config)
    b1, a1 = butterworth(fb, config.sample_rate, rx.filter_order)
    b2, a2 = butterworth(fl, config.sample_rate, rx.filter_order)
    x = sps.lfilter(b1, a1, y, axis=-1)
    e = sps.lfilter(b2, a2, envelope(x), axis=-1)
    return np.maximum(e[..., :: rx.downsample], 0.0)


def receiver_trace(y, rx, config, start, n_body_adc):
    """Every stage of the chain for one stream, as a dict of arrays (for CSV export)."""
    fb, fl = rx.cutoffs(config)
    b1, a1 = butterworth(fb, config.sample_rate, rx.filter_order)
    b2, a2 = butterworth(fl, config.sample_rate, rx.filter_order)
    bpf = sps.lfilter(b1, a1, y)
    env = envelope(bpf)
    lpf = sps.lfilter(b2, a2, env)
    adc = np.maximum(lpf[:: rx.downsample], 0.0)
    seg = adc[start : start + n_body_adc]
    q, _ = agc_quantize(seg, rx.adc_bits)
    return {"input": y, "bpf": bpf, "envelope": env, "lpf": lpf, "adc": adc, "quantized": q}


def window_sums_batch(y, rx, config, starts, n_body_adc):
    """Fused receiver for many streams; dispatches to the compiled kernel when present."""
    fb, fl = rx.cutoffs(config)
    b1, a1 = butterworth(fb, config.sample_rate, rx.filter_order)
    b2, a2 = butterworth(fl, config.sample_rate, rx.filter_order)
    return kernels.window_sums(
        np.ascontiguousarray(y, dtype=complex), b1, a1, b2, a2, rx.downsample,
        np.ascontiguousarray(starts, dtype=np.int64), n_body_adc, config.n_bit,
        rx.trim[0], rx.trim[1], rx.adc_bits,
    )
