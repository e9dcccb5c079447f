"""Manchester line coding and closed-form DFTs of bit strings."""

from __future__ import annotations

import numpy as np

__all__ = [
    "bcal_table",
    "bits_from_index",
    "dft_coded_bits",
    "dft_info_bits_manchester",
    "expected_bit_power",
    "manchester_decode",
    "manchester_encode",
    "unit_roots",
]

MAX_TABLE_BITS = 12

_QUARTER = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)


def unit_roots(n):
    """``exp(-2j*pi*q/n)`` for ``q = 0..n-1``, exact at quarter turns."""
    q = np.arange(n)
    roots = np.exp(-2j * np.pi * q / n)
    exact = (4 * q) % n == 0
    roots[exact] = [_QUARTER[(4 * qq // n) % 4] for qq in q[exact]]
    return roots


def as_bits(bits):
    b = np.asarray(bits, dtype=np.int64).ravel()
    if b.size and (b.min() < 0 or b.max() > 1):
        raise ValueError("bits must be 0 or 1")
    return b.astype(np.uint8)


def manchester_encode(info):
    """Map each info bit ``b`` to the pair ``(NOT b, b)``."""
    b = as_bits(info)
    out = np.empty(2 * b.size, dtype=np.uint8)
    out[0::2] = 1 - b
    out[1::2] = b
    return out


def manchester_decode(coded):
    """Inverse of :func:`manchester_encode`; raises on an invalid pair."""
    c = as_bits(coded)
    if c.size % 2:
        raise ValueError("Manchester string must have even length")
    first, second = c[0::2], c[1::2]
    if np.any(first == second):
        raise ValueError("not a valid Manchester string")
    return second.copy()


def bits_from_index(index, n):
    """Big-endian bit string of length ``n`` (bit 0 is the MSB)."""
    return np.array([(index >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def dft_coded_bits(coded):
    """``n_bit``-point DFT of a bit string.

    Only phasor accumulation is needed: each ON bit ``l`` adds the root
    ``exp(-2j*pi*k*l/n_bit)`` to coefficient ``k``.
    """
    b = as_bits(coded)
    n = b.size
    if n == 0:
        return np.zeros(0, dtype=complex)
    roots = unit_roots(n)
    on = np.flatnonzero(b)
    k = np.arange(n)[:, None]
    return roots[(k * on[None, :]) % n].sum(axis=1)


def dft_info_bits_manchester(info):
    """DFT of the Manchester-coded string computed straight from the info bits.

    ``B[k] = sum_n exp(-j*pi*k*(2n + b_o[n])/n_bo)`` for ``k < 2*n_bo``.
    """
    b = as_bits(info)
    n_bo = b.size
    if n_bo == 0:
        return np.zeros(0, dtype=complex)
    n_bit = 2 * n_bo
    roots = unit_roots(n_bit)
    pos = 2 * np.arange(n_bo) + b
    k = np.arange(n_bit)[:, None]
    return roots[(k * pos[None, :]) % n_bit].sum(axis=1)


def bcal_table(n_bo):
    """All Manchester bit-DFTs for ``n_bo`` info bits, one column per string.

    Column ``c`` belongs to the info string whose big-endian integer value is
    ``c``. Shape is ``(2*n_bo, 2**n_bo)``.
    """
    if n_bo < 1:
        raise ValueError("n_bo must be >= 1")
    if n_bo > MAX_TABLE_BITS:
        raise ValueError(f"n_bo={n_bo} exceeds table limit {MAX_TABLE_BITS}")
    cols = [dft_info_bits_manchester(bits_from_index(c, n_bo)) for c in range(2**n_bo)]
    return np.stack(cols, axis=1)


def expected_bit_power(k, n_bit, manchester=True):
    """Mean of ``|B[k]|**2`` over uniform i.i.d. info bits."""
    k = np.asarray(k)
    on_comb = (k % n_bit) == 0
    if manchester:
        comb = n_bit**2 / 4.0
        off = (n_bit / 4.0) * (1.0 - np.cos(2 * np.pi * k / n_bit))
    else:
        comb = n_bit * (n_bit + 1) / 4.0
        off = np.full(k.shape, n_bit / 4.0)
    out = np.where(on_comb, comb, off)
    return float(out) if out.ndim == 0 else out
