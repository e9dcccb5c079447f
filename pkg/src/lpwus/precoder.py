"""DFT-s-OFDM generation path: precoding, spectrum extension, FDSS, normalization.

Also holds the pulse view of the same signal (the kernel ``h``, the pulses
``g_m`` and the OOK symbols ``O_l``) used by analysis and tests.

Transforms follow the unnormalized convention throughout: the forward DFT
is ``sum x[n] exp(-2j*pi*k*n/N)`` and the OFDM inverse is
``sum X[k] exp(+2j*pi*k*n/N)`` with no ``1/N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import as_bits, manchester_encode
from .config import validate
from .spreading import OverlaidSequence, overlaid_sequence, spread_bits, spread_bits_general

__all__ = [
    "SubcarrierFrame",
    "coded_bits_for",
    "dft_precode",
    "dirichlet_kernel",
    "effective_t_shift",
    "fd_postprocess",
    "fdss_window",
    "generate_wus_symbol",
    "kaiser_window",
    "modulation_symbols",
    "normalization_factor",
    "normalize",
    "ook_symbol",
    "pulse",
    "pulse_kernel",
    "pulse_kernel_at",
    "wus_time_signal",
]


@dataclass
class SubcarrierFrame:
    """Subcarrier coefficients of one OFDM symbol.

    ``stage`` is ``"preprocessed"`` for the ``n_symb`` DFT outputs ``D[k]``
    and ``"final"`` for the ``n_sc`` WUS coefficients ``X^W[k]``. A frame
    whose bits are all OFF is ``silent``: it carries no energy and ``eta``
    is 0 by convention.
    """

    values: np.ndarray
    stage: str = "final"
    eta: float = 1.0
    silent: bool = False

    def __len__(self):
        return len(self.values)

    @property
    def energy(self):
        return float(np.sum(np.abs(self.values) ** 2))


def dft_precode(d, n_x=None):
    """``D[k] = sum_m d[m] exp(-2j*pi*k*m/n_x)``."""
    d = np.asarray(d, dtype=complex)
    if n_x is not None and d.size != n_x:
        raise ValueError(f"expected {n_x} modulation symbols, got {d.size}")
    return SubcarrierFrame(np.fft.fft(d), stage="preprocessed")


def kaiser_window(n_sc, beta):
    """Real symmetric Kaiser window ``I0(beta*sqrt(1-((k-g)/g)**2))/I0(beta)``, ``g=(n_sc-1)/2``."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    # numpy's kaiser is exactly this expression
    return np.kaiser(n_sc, beta)


def fdss_window(fdss, config):
    """Complex FDSS window ``W[k] = exp(-2j*pi*t_shift*k/n_fft) * W_R[k]``."""
    n_sc = config.n_sc
    t_shift = fdss.t_shift
    if fdss.kind == "none":
        w_r = np.ones(n_sc, dtype=complex)
    elif fdss.kind == "kaiser":
        w_r = kaiser_window(n_sc, fdss.beta).astype(complex)
    elif fdss.kind == "explicit":
        w_r = np.asarray(fdss.coefficients, dtype=complex)
        if w_r.size != n_sc:
            raise ValueError("explicit FDSS length must equal n_sc")
    elif fdss.kind == "ls_equivalent":
        from .ls import ls_equivalent_fdss

        eq, _, _ = ls_equivalent_fdss(config.n_symb, n_sc, config.n_fft, config.l_shift)
        w_r = np.asarray(eq.coefficients, dtype=complex)
        t_shift = eq.t_shift
    else:
        raise ValueError(f"unknown FDSS kind {fdss.kind!r}")
    k = np.arange(n_sc)
    if t_shift:
        return np.exp(-2j * np.pi * t_shift * k / config.n_fft) * w_r
    return w_r


def effective_t_shift(fdss, config):
    """Time shift (samples) actually applied by :func:`fdss_window`."""
    if fdss.kind == "ls_equivalent":
        from .ls import ls_equivalent_fdss

        return ls_equivalent_fdss(config.n_symb, config.n_sc, config.n_fft, config.l_shift)[2]
    return fdss.t_shift


def fd_postprocess(D, w, l_shift, n_sc, eta=1.0):
    """``X[k] = eta * W[k] * D[(k + L) mod n_symb]`` for ``k < n_sc``."""
    values = D.values if isinstance(D, SubcarrierFrame) else np.asarray(D)
    n_symb = values.size
    if n_symb > n_sc:
        raise ValueError("n_symb must not exceed n_sc")
    idx = (np.arange(n_sc) + l_shift) % n_symb
    return SubcarrierFrame(eta * np.asarray(w) * values[idx], stage="final", eta=eta)


def normalization_factor(frame, p_s, n_sc, n_gb):
    """Scale making ``sum |X|**2 == p_s*(n_sc + 2*n_gb)``; 0 for an all-zero frame."""
    values = frame.values if isinstance(frame, SubcarrierFrame) else np.asarray(frame)
    energy = float(np.sum(np.abs(values) ** 2))
    if energy == 0.0:
        return 0.0
    return float(np.sqrt(p_s * (n_sc + 2 * n_gb) / energy))


def normalize(frame, config):
    """Apply :func:`normalization_factor` in place of the frame's current scale."""
    eta = normalization_factor(frame, config.p_s, config.n_sc, config.n_gb)
    return SubcarrierFrame(frame.values * eta, stage=frame.stage, eta=eta, silent=eta == 0.0)


def coded_bits_for(info_bits, config):
    """Line-code info bits when the config asks for Manchester."""
    b = as_bits(info_bits)
    coded = manchester_encode(b) if config.manchester else b
    if coded.size != config.n_bit:
        raise ValueError(f"expected {config.n_bo} info bits, got {b.size}")
    return coded


def modulation_symbols(info_bits, config, spreading):
    """Spread the coded bits into the ``n_symb`` DFT-s-OFDM input symbols."""
    coded = coded_bits_for(info_bits, config)
    if spreading.kind == "explicit":
        return spread_bits_general(coded, spreading.sequences, config.phi)
    r0 = overlaid_sequence(spreading, config.n_seg)
    return spread_bits(coded, OverlaidSequence(r0, config.phi))


def generate_wus_symbol(info_bits, config, fdss, spreading):
    """Full chain: line code, spread, precode, extend/shape, normalize."""
    validate(config, fdss, spreading)
    d = modulation_symbols(info_bits, config, spreading)
    D = dft_precode(d, config.n_symb)
    w = fdss_window(fdss, config)
    X = fd_postprocess(D, w, config.l_shift, config.n_sc)
    return normalize(X, config)


def wus_time_signal(frame, config, n=None):
    """``s^W[n] = exp(2j*pi*n*f0/n_fft) * sum_k X^W[k] exp(2j*pi*k*n/n_fft)``.

    Evaluated on ``n = 0..n_fft-1`` unless sample indices ``n`` are given
    (negative indices address the cyclic prefix).
    """
    values = frame.values if isinstance(frame, SubcarrierFrame) else np.asarray(frame)
    n_fft = config.n_fft
    if n is None:
        full = np.zeros(n_fft, dtype=complex)
        full[(np.arange(values.size) + config.f0) % n_fft] = values
        return np.fft.ifft(full) * n_fft
    n = np.asarray(n)
    k = np.arange(values.size) + config.f0
    return np.exp(2j * np.pi * np.outer(n, k) / n_fft) @ values


def pulse_kernel(w, n_fft):
    """``h[n] = sum_k W[k] exp(2j*pi*k*n/n_fft)`` for ``n = 0..n_fft-1``."""
    w = np.asarray(w, dtype=complex)
    padded = np.zeros(n_fft, dtype=complex)
    padded[: w.size] = w
    return np.fft.ifft(padded) * n_fft


def pulse_kernel_at(w, t, n_fft):
    """The kernel evaluated at arbitrary (fractional) sample positions ``t``."""
    w = np.asarray(w, dtype=complex)
    t = np.asarray(t, dtype=float)
    k = np.arange(w.size)
    return np.exp(2j * np.pi * np.multiply.outer(t, k) / n_fft) @ w


def dirichlet_kernel(n, n_sc, n_fft):
    """Closed form of the unshaped kernel; the removable points take value ``n_sc``."""
    n = np.asarray(n, dtype=float)
    den = np.sin(np.pi * n / n_fft)
    phase = np.exp(1j * np.pi * (n_sc - 1) * n / n_fft)
    singular = np.abs(den) < 1e-12
    safe = np.where(singular, 1.0, den)
    ratio = np.where(singular, 0.0, np.sin(np.pi * n_sc * n / n_fft) / safe)
    # at n = j*n_fft the ratio tends to n_sc*(-1)**(j*(n_sc-1))
    j = np.rint(n / n_fft)
    limit = n_sc * np.where((j * (n_sc - 1)) % 2 == 0, 1.0, -1.0)
    return phase * np.where(singular, limit, ratio)


def pulse(m, w, config, n=None):
    """``g_m[n] = exp(-2j*pi*L*m/n_symb) * h(n - m*n_fft/n_symb)``."""
    if n is None:
        n = np.arange(config.n_fft)
    shift = m * config.n_fft / config.n_symb
    phase = np.exp(-2j * np.pi * config.l_shift * m / config.n_symb)
    return phase * pulse_kernel_at(w, np.asarray(n) - shift, config.n_fft)


def ook_symbol(l, config, seq, w, n=None):
    """OOK symbol of coded bit ``l``: its ``n_seg`` pulses weighted by the spread sequence.

    ``seq`` is an :class:`OverlaidSequence`; the ramp runs over the full
    ``n_symb`` length so bit ``l`` sees ``exp(j*phi*(m + l*n_seg))*r0[m]``.
    """
    n_seg = config.n_seg
    r0 = np.asarray(seq.r0, dtype=complex)
    out = 0
    for m in range(n_seg):
        mm = m + l * n_seg
        coeff = np.exp(1j * seq.phi * mm) * r0[m]
        if coeff != 0:
            out = out + coeff * pulse(mm, w, config, n)
    if np.isscalar(out):
        size = config.n_fft if n is None else np.size(n)
        return np.zeros(size, dtype=complex)
    return out
