"""Least-squares rectangular OOK waveform.

The LS approximation of an ideal rectangular OOK signal under a bandwidth
limit is a large ``n_fft``-point DFT of the held bits, truncated to the
``n_sc`` outputs around DC. It also has a closed form and an exact
DFT-s-OFDM realization with an all-one sequence and a sin-ratio FDSS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import as_bits, dft_coded_bits
from .config import ConfigError, FdssSpec
from .precoder import SubcarrierFrame

__all__ = [
    "LsProfile",
    "ls_closed_form",
    "ls_direct",
    "ls_equivalent_fdss",
    "ls_phase",
    "ls_window",
]


@dataclass(frozen=True)
class LsProfile:
    """Dimensions of the LS waveform.

    ``center`` selects the middle-subcarrier convention: ``"floor"`` uses
    ``k_c = n_sc // 2`` (default), ``"ceil"`` uses ``(n_sc + 1) // 2``.
    """

    n_fft: int
    n_sc: int
    n_bit: int
    center: str = "floor"

    def __post_init__(self):
        errors = []
        if self.n_bit < 1 or self.n_fft % self.n_bit:
            errors.append("n_fft_not_divisible_by_n_bit")
        if self.center not in ("floor", "ceil"):
            errors.append("unknown_center")
        if errors:
            raise ConfigError(errors)

    @property
    def k_c(self):
        return self.n_sc // 2 if self.center == "floor" else (self.n_sc + 1) // 2

    @property
    def n_seg(self):
        """Hold length of each bit in the ``n_fft``-sample rectangular signal."""
        return self.n_fft // self.n_bit

    @classmethod
    def for_config(cls, config, center="floor"):
        return cls(config.n_fft, config.n_sc, config.n_bit, center)


def _check_bits(coded, profile):
    b = as_bits(coded)
    if b.size != profile.n_bit:
        raise ValueError(f"expected {profile.n_bit} coded bits, got {b.size}")
    return b


def ls_direct(coded, profile, outputs=None):
    """Truncated ``n_fft``-point DFT of the held bit signal.

    ``X[k] = sum_n b[n // n_seg] exp(-2j*pi*(k - k_c)*n/n_fft)`` for
    ``k < n_sc``, evaluated by direct summation at the retained outputs
    only. ``outputs`` overrides the retained baseband indices (used to
    demonstrate that taking the first ``n_sc`` outputs is wrong).
    """
    b = _check_bits(coded, profile)
    held = np.repeat(b, profile.n_seg).astype(float)
    if outputs is None:
        outputs = np.arange(profile.n_sc) - profile.k_c
    outputs = np.asarray(outputs)
    n = np.arange(profile.n_fft)
    # integer exponent reduced mod n_fft keeps the phasors exact
    expo = (np.outer(outputs, n)) % profile.n_fft
    return SubcarrierFrame(np.exp(-2j * np.pi * expo / profile.n_fft) @ held)


def ls_window(profile):
    """``W^LS[k] = exp(-j*pi*f*(n_seg-1)/n_fft) sin(pi*f/n_bit)/sin(pi*f/n_fft)``, ``f = k - k_c``.

    The middle subcarrier takes the limit value ``n_fft/n_bit``.
    """
    f = np.arange(profile.n_sc) - profile.k_c
    den = np.sin(np.pi * f / profile.n_fft)
    mid = f % profile.n_fft == 0
    ratio = np.sin(np.pi * f / profile.n_bit) / np.where(mid, 1.0, den)
    ratio = np.where(mid, profile.n_seg, ratio)
    return np.exp(-1j * np.pi * f * (profile.n_seg - 1) / profile.n_fft) * ratio


def ls_closed_form(coded, profile):
    """``X[k] = W^LS[k] * B[(k - k_c) mod n_bit]`` (unnormalized)."""
    b = _check_bits(coded, profile)
    B = dft_coded_bits(b)
    f = np.arange(profile.n_sc) - profile.k_c
    return SubcarrierFrame(ls_window(profile) * B[f % profile.n_bit])


def ls_phase(n_symb, n_sc, l_shift=0, center="floor"):
    """Ramp increment ``2*pi*(L + k_c)/n_symb`` of the LS-equivalent DFT-s-OFDM."""
    k_c = n_sc // 2 if center == "floor" else (n_sc + 1) // 2
    return 2 * np.pi * (l_shift + k_c) / n_symb


def ls_equivalent_fdss(n_symb, n_sc, n_fft, l_shift=0, center="floor"):
    """FDSS and ramp turning the main path (all-one sequence) into the LS waveform.

    Returns ``(fdss, phi, t_shift)``. ``fdss`` is an explicit spec whose
    coefficients are ``c * sin(pi*(k_c-k)/n_symb)/sin(pi*(k_c-k)/n_fft)``
    (value ``n_fft/n_symb`` at ``k_c``) with the global phase
    ``c = exp(j*pi*k_c*(1/n_symb - 1/n_fft))``; its ``t_shift`` is
    ``(n_fft - n_symb)/(2*n_symb)``.
    """
    if n_symb < 1 or n_symb > n_sc:
        raise ConfigError(["n_symb_exceeds_n_sc"])
    k_c = n_sc // 2 if center == "floor" else (n_sc + 1) // 2
    f = k_c - np.arange(n_sc)
    den = np.sin(np.pi * f / n_fft)
    mid = f % n_fft == 0
    ratio = np.sin(np.pi * f / n_symb) / np.where(mid, 1.0, den)
    ratio = np.where(mid, n_fft / n_symb, ratio)
    c = np.exp(1j * np.pi * k_c * (1.0 / n_symb - 1.0 / n_fft))
    t_shift = (n_fft - n_symb) / (2 * n_symb)
    fdss = FdssSpec(kind="explicit", coefficients=c * ratio, t_shift=t_shift)
    return fdss, ls_phase(n_symb, n_sc, l_shift, center), t_shift
