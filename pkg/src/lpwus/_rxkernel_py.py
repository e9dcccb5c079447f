"""Pure numpy/scipy implementation of the fused receiver kernel."""

from __future__ import annotations

import numpy as np
from scipy import signal as sps


def window_sums(y, b1, a1, b2, a2, ds, starts, n_body, n_bit, trim_l, trim_r, adc_bits):
    """Decision-window sums for every stream (row) of ``y``.

    Per row: band-select filter ``(b1, a1)`` on the complex input, magnitude,
    smoothing filter ``(b2, a2)``, keep every ``ds``-th sample, take
    ``n_body`` ADC samples from ``starts[row]``, clip to ``>= 0``, normalize by
    the segment maximum, quantize mid-rise to ``2**adc_bits`` levels and sum
    each of the ``n_bit`` windows after trimming ``trim_l``/``trim_r``
    samples. Returns an array of shape ``(rows, n_bit)``.
    """
    y = np.asarray(y)
    starts = np.asarray(starts, dtype=np.int64)
    T = y.shape[0]
    need = int((starts.max() + n_body - 1) * ds + 1) if T else 0
    if need > y.shape[1] or (T and starts.min() < 0):
        raise ValueError("decision segment exceeds the received samples")
    x = sps.lfilter(b1, a1, y[:, :need], axis=1)
    e = sps.lfilter(b2, a2, np.abs(x), axis=1)
    adc = e[:, ::ds]
    seg = np.take_along_axis(adc, starts[:, None] + np.arange(n_body)[None, :], axis=1)
    seg = np.maximum(seg, 0.0)
    peak = seg.max(axis=1, keepdims=True)
    levels = 2**adc_bits
    safe = np.where(peak > 0, peak, 1.0)
    q = (np.minimum(np.floor(seg / safe * levels), levels - 1) + 0.5) / levels
    q = np.where(peak > 0, q, 0.0)
    win = n_body // n_bit
    q = q[:, : win * n_bit].reshape(T, n_bit, win)
    return q[:, :, trim_l : win - trim_r].sum(axis=2)
