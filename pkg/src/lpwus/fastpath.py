"""Equivalent frequency-domain generation for common overlaid sequences.

With a common sequence ``r0`` and ramp ``phi`` the precoded coefficients
factor as ``D[k] = B(k - s) * R0(k - s)`` where ``s = phi*n_symb/(2*pi)``,
``B`` is the interpolated DFT of the bits and ``R0`` that of ``r0`` zero
padded to ``n_symb``. Everything except the ``n_bit``-point bits DFT can be
computed once per profile; :class:`FdProfile` holds that offline part.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass

import numpy as np

from .bits import as_bits, dft_coded_bits, dft_info_bits_manchester
from .config import validate
from .precoder import (
    SubcarrierFrame,
    coded_bits_for,
    fdss_window,
    generate_wus_symbol,
    normalize,
)
from .spreading import overlaid_sequence

__all__ = [
    "FdProfile",
    "UnsupportedSpreading",
    "bits_interpolated",
    "build_profile",
    "fast_coefficients",
    "interpolate_r0",
    "r0_closed_form_allones",
    "r0_interpolated",
]

log = logging.getLogger(__name__)

# tolerance for treating phi*n_symb/(2*pi) as an integer shift
SHIFT_TOL = 1e-9
# below this |sin| the closed forms switch to direct summation
SINGULAR_TOL = 1e-8


class UnsupportedSpreading(ValueError):
    """Per-bit distinct sequences have no common-sequence factorization."""


def r0_interpolated(r0, f, n_symb):
    """``R0(f) = sum_m r0[m] exp(-2j*pi*f*m/n_symb)`` at real ``f``."""
    r0 = np.asarray(r0, dtype=complex)
    f = np.asarray(f, dtype=float)
    m = np.arange(r0.size)
    return np.exp(-2j * np.pi * np.multiply.outer(f, m) / n_symb) @ r0


def bits_interpolated(coded, f):
    """``B(f) = sum_l b[l] exp(-2j*pi*f*l/n_bit)`` at real ``f``."""
    b = as_bits(coded).astype(float)
    f = np.asarray(f, dtype=float)
    l = np.arange(b.size)
    return np.exp(-2j * np.pi * np.multiply.outer(f, l) / b.size) @ b


def r0_closed_form_allones(f, n_bit, n_symb, alpha=1.0):
    """Interpolated DFT of an all-one ``r0`` of length ``n_symb/n_bit``.

    ``alpha * exp(-j*pi*f*(1/n_bit - 1/n_symb)) * sin(pi*f/n_bit)/sin(pi*f/n_symb)``
    with the value ``n_symb/n_bit`` (times the limit phase) where the
    denominator vanishes. Near those points the sum is evaluated directly.
    ``alpha`` is a global phase only.
    """
    f = np.atleast_1d(np.asarray(f, dtype=float))
    n_seg = n_symb // n_bit
    den = np.sin(np.pi * f / n_symb)
    near = np.abs(den) < SINGULAR_TOL
    safe = np.where(near, 1.0, den)
    out = (
        np.exp(-1j * np.pi * f * (1.0 / n_bit - 1.0 / n_symb))
        * np.sin(np.pi * f / n_bit)
        / safe
    )
    if np.any(near):
        out[near] = r0_interpolated(np.ones(n_seg), f[near], n_symb)
    out = alpha * out
    return out[0] if out.size == 1 else out


def interpolate_r0(R0_prime, k, n_bit, n_symb):
    """``R0[k]`` recovered from the ``n_seg``-point DFT ``R0'`` of ``r0``.

    On the comb ``k % n_bit == 0`` it is ``R0'[k/n_bit]``; elsewhere a
    periodic-sinc interpolation
    ``(1/n_seg) * sum_h R0'[h] * I[k - n_bit*h]`` with
    ``I[k] = exp(-j*pi*(n_seg-1)*k/n_symb) * sin(pi*k/n_bit)/sin(pi*k/n_symb)``.
    """
    R0_prime = np.asarray(R0_prime, dtype=complex)
    n_seg = R0_prime.size
    if n_seg * n_bit != n_symb:
        raise ValueError("len(R0_prime) * n_bit must equal n_symb")
    k = np.atleast_1d(np.asarray(k))
    out = np.empty(k.shape, dtype=complex)
    comb = (k % n_bit) == 0
    out[comb] = R0_prime[(k[comb] // n_bit) % n_seg]
    if np.any(~comb):
        kk = k[~comb][:, None] - n_bit * np.arange(n_seg)[None, :]
        kern = (
            np.exp(-1j * np.pi * (n_seg - 1) * kk / n_symb)
            * np.sin(np.pi * kk / n_bit)
            / np.sin(np.pi * kk / n_symb)
        )
        out[~comb] = kern @ R0_prime / n_seg
    return out[0] if out.size == 1 else out


@dataclass
class FdProfile:
    """Offline part of the fast path for one (config, FDSS, spreading) triple.

    ``shaping[k] = W[k] * R0(k + L - s)``. In the integer-shift branch the
    bits enter as ``B[(k + L - s) mod n_bit]`` (index table ``bit_index``);
    otherwise through the dense matrix ``bit_phasors`` with rows
    ``exp(-2j*pi*(k + L - s)*l/n_bit)``.
    """

    config: object
    shaping: np.ndarray
    shift: float
    integer_shift: bool
    bit_index: np.ndarray | None
    bit_phasors: np.ndarray | None
    fingerprint: str

    def bits_factor(self, coded):
        if self.integer_shift:
            return dft_coded_bits(coded)[self.bit_index]
        return self.bit_phasors @ as_bits(coded).astype(float)


def _fingerprint(config, fdss, spreading):
    payload = {
        "config": config.to_dict(),
        "fdss": [fdss.kind, fdss.beta, fdss.t_shift],
        "spreading": [spreading.kind, spreading.root, spreading.shift, spreading.seed,
                      spreading.n_lgp, spreading.n_rgp],
    }
    if fdss.coefficients is not None:
        payload["fdss"].append(np.asarray(fdss.coefficients, complex).view(float).tolist())
    blob = json.dumps(payload, sort_keys=True, default=float).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def build_profile(config, fdss, spreading):
    """Precompute the bit-independent shaping for the fast path."""
    validate(config, fdss, spreading)
    if not spreading.is_common:
        raise UnsupportedSpreading("fast path needs a common overlaid sequence")
    n_symb, n_bit = config.n_symb, config.n_bit
    r0 = overlaid_sequence(spreading, config.n_seg)
    w = fdss_window(fdss, config)
    s = config.phi * n_symb / (2 * np.pi)
    s_int = round(s)
    integer = abs(s - s_int) < SHIFT_TOL
    k = np.arange(config.n_sc)
    if integer:
        idx = (k + config.l_shift - s_int) % n_symb
        R0 = np.fft.fft(np.concatenate([r0, np.zeros(n_symb - r0.size)]))
        shaping = w * R0[idx]
        bit_index = idx % n_bit
        phasors = None
    else:
        f = k + config.l_shift - s
        shaping = w * r0_interpolated(r0, f, n_symb)
        bit_index = None
        phasors = np.exp(-2j * np.pi * np.outer(f, np.arange(n_bit)) / n_bit)
    return FdProfile(
        config=config,
        shaping=shaping,
        shift=s,
        integer_shift=integer,
        bit_index=bit_index,
        bit_phasors=phasors,
        fingerprint=_fingerprint(config, fdss, spreading),
    )


def fast_coefficients(info_bits, config, fdss, spreading, profile=None):
    """WUS coefficients via the two-layer factorization.

    Falls back to :func:`generate_wus_symbol` for per-bit sequences.
    """
    if profile is None:
        try:
            profile = build_profile(config, fdss, spreading)
        except UnsupportedSpreading:
            log.info("per-bit sequences: using the time-domain path")
            return generate_wus_symbol(info_bits, config, fdss, spreading)
    if profile.integer_shift and config.manchester:
        bfac = dft_info_bits_manchester(info_bits)[profile.bit_index]
    else:
        bfac = profile.bits_factor(coded_bits_for(info_bits, config))
    return normalize(SubcarrierFrame(profile.shaping * bfac, stage="final"), config)
