"""Bit-spreading (overlaid) sequences and the special phase-ramp values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import as_bits
from .config import ConfigError

__all__ = [
    "OverlaidSequence",
    "apply_guard_pulses",
    "flatten_phase",
    "guard_pulse_dimensioning",
    "overlaid_sequence",
    "random_overlaid",
    "spread_bits",
    "spread_bits_general",
    "zc_phase_increments",
    "zc_phase_increments_closed",
    "zc_sequence",
    "zero_dc_phase",
]

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class OverlaidSequence:
    """Common per-bit sequence ``r0`` plus the phase ramp increment ``phi``."""

    r0: np.ndarray
    phi: float = 0.0

    @property
    def n_seg(self):
        return len(self.r0)


def _wrap_pi(x):
    """Wrap angles to ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), TWO_PI)


def spread_bits(coded, seq):
    """``d[m] = b[m // n_seg] * exp(j*phi*m) * r0[m % n_seg]``."""
    b = as_bits(coded)
    r0 = np.asarray(seq.r0, dtype=complex)
    n_symb = b.size * r0.size
    m = np.arange(n_symb)
    return np.repeat(b, r0.size) * np.tile(r0, b.size) * np.exp(1j * seq.phi * m)


def spread_bits_general(coded, sequences, phi=0.0):
    """Spreading with a distinct sequence per coded bit (shape ``n_bit x n_seg``)."""
    b = as_bits(coded)
    seqs = np.asarray(sequences, dtype=complex)
    if seqs.shape[0] != b.size:
        raise ValueError(f"need {b.size} sequences, got {seqs.shape[0]}")
    d = (b[:, None] * seqs).ravel()
    return d * np.exp(1j * phi * np.arange(d.size))


def flatten_phase(n_sc, n_symb, l_shift=0):
    """Ramp increment that cancels coherent combining of neighbouring pulses.

    Returns ``pi*(2L + n_sc - 1)/n_symb`` wrapped to ``[0, 2*pi)``.
    """
    if n_symb < 1:
        raise ValueError("n_symb must be >= 1")
    return float(np.mod(np.pi * (2 * l_shift + n_sc - 1) / n_symb, TWO_PI))


def zero_dc_phase(k_null, lam, n_bit, n_symb):
    """Ramp increment placing a spectral null of the rectangular kernel at ``k_null``."""
    if lam == 0:
        raise ValueError("lambda must be a nonzero integer")
    return TWO_PI / n_symb * (k_null - lam * n_bit)


def zc_sequence(n_seg, u, s=0):
    """Zadoff-Chu sequence ``exp(-j*pi*u*(m+s)*(m+s+delta)/n_seg)``, ``delta = n_seg % 2``."""
    if math.gcd(u, n_seg) != 1:
        raise ConfigError(["zc_root_not_coprime"])
    if not 0 <= s < max(n_seg, 1):
        raise ConfigError(["zc_shift_out_of_range"])
    delta = n_seg % 2
    m = np.arange(n_seg) + s
    # reduce the integer phase numerator before scaling to keep full precision
    num = (u * m * (m + delta)) % (2 * n_seg)
    return np.exp(-1j * np.pi * num / n_seg)


def _nonzero_span(r0):
    nz = np.flatnonzero(np.abs(r0) > 0)
    if nz.size == 0:
        raise ValueError("sequence has no nonzero entries")
    lo, hi = nz[0], nz[-1]
    if np.any(np.abs(r0[lo : hi + 1]) == 0):
        raise ValueError("zero entry inside the non-guard span")
    return lo, hi


def zc_phase_increments(r0):
    """``angle(r0[m] / r0[m-1])`` over the non-guard span, wrapped to ``(-pi, pi]``."""
    r0 = np.asarray(r0, dtype=complex)
    lo, hi = _nonzero_span(r0)
    core = r0[lo : hi + 1]
    return np.angle(core[1:] / core[:-1])


def zc_phase_increments_closed(n_seg, u, s=0):
    """Closed form ``-pi*u*(2m + 2s - 1 + delta)/n_seg`` for ``m = 1..n_seg-1``."""
    delta = n_seg % 2
    m = np.arange(1, n_seg)
    num = (u * (2 * m + 2 * s - 1 + delta)) % (2 * n_seg)
    return _wrap_pi(-np.pi * num / n_seg)


def random_overlaid(n_seg, seed):
    """Unit-modulus sequence with i.i.d. uniform phases.

    Entry ``m`` depends only on ``(seed, m)``: Philox is counter based, so a
    longer sequence with the same seed extends a shorter one.
    """
    gen = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    return np.exp(1j * TWO_PI * gen.random(n_seg))


def apply_guard_pulses(interior, n_lgp, n_rgp):
    """Surround an effective-length sequence with ``n_lgp``/``n_rgp`` zeros."""
    if n_lgp < 0 or n_rgp < 0:
        raise ConfigError(["negative_guard"])
    interior = np.asarray(interior, dtype=complex)
    return np.concatenate([np.zeros(n_lgp, complex), interior, np.zeros(n_rgp, complex)])


def overlaid_sequence(spec, n_seg):
    """Build ``r0`` of length ``n_seg`` for a common-sequence :class:`SpreadingSpec`.

    With guard pulses the family is generated at the reduced length
    ``n_seg - n_lgp - n_rgp`` and zero padded, so e.g. a guarded ZC is a
    genuine shorter ZC rather than a truncated long one.
    """
    if spec.n_lgp + spec.n_rgp >= n_seg:
        raise ConfigError(["guard_overflow"])
    n_eff = n_seg - spec.n_lgp - spec.n_rgp
    if spec.kind in ("all_one", "phase_ramp"):
        core = np.ones(n_eff, dtype=complex)
    elif spec.kind == "zc":
        core = zc_sequence(n_eff, spec.root, spec.shift)
    elif spec.kind == "random":
        core = random_overlaid(n_eff, spec.seed)
    elif spec.kind == "explicit":
        raise ValueError("explicit spreading has no common sequence")
    else:
        raise ConfigError(["unknown_spreading_kind"])
    return apply_guard_pulses(core, spec.n_lgp, spec.n_rgp)


def guard_pulse_dimensioning(tau_err, tau_h, n_symb, f_sc, n_seg=None):
    """Rule of thumb for the left/right guard pulse counts (round half up).

    ``n_lgp ~ tau_err*n_symb*f_sc`` and ``n_rgp ~ (tau_err + tau_h)*n_symb*f_sc``.
    Pass ``n_seg`` to have the result checked against the sequence length.
    """
    if tau_err < 0 or tau_h < 0:
        raise ValueError("delays must be nonnegative")
    n_lgp = math.floor(tau_err * n_symb * f_sc + 0.5)
    n_rgp = math.floor((tau_err + tau_h) * n_symb * f_sc + 0.5)
    if n_seg is not None and n_lgp + n_rgp >= n_seg:
        raise ConfigError(["guard_overflow"])
    return n_lgp, n_rgp
