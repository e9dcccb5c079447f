"""Waveform parameters and their arithmetic constraints.

Every scalar used by the generation chain lives on :class:`WaveformConfig`.
Shaping and spreading choices live on :class:`FdssSpec` and
:class:`SpreadingSpec`. :func:`validate` checks all of them together and
reports every violated constraint at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

import numpy as np

__all__ = [
    "ConfigError",
    "DerivedQuantities",
    "FdssSpec",
    "SpreadingSpec",
    "WaveformConfig",
    "check",
    "derived_quantities",
    "validate",
]

FDSS_KINDS = ("none", "kaiser", "ls_equivalent", "explicit")
SPREADING_KINDS = ("all_one", "phase_ramp", "zc", "random", "explicit")


class ConfigError(ValueError):
    """Raised when one or more parameter constraints are violated.

    ``errors`` holds one short name per violated constraint.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration: " + ", ".join(self.errors))


@dataclass(frozen=True)
class WaveformConfig:
    """Scalar parameters of one OFDM symbol carrying the wake-up signal.

    Defaults reproduce the 5G evaluation setup: 512-point IFFT, 30 kHz
    spacing, 132 modulated subcarriers with 6 guard subcarriers per side,
    two Manchester-coded info bits per OFDM symbol.

    ``f0`` is the first WUS subcarrier index; it may be negative (indices are
    taken modulo ``n_fft`` when placed). ``None`` centres the allocation on DC.
    """

    n_fft: int = 512
    n_cp: int = 36
    f_sc: float = 30e3
    f0: int | None = None
    n_sc: int = 132
    n_gb: int = 6
    n_symb: int = 132
    n_bit: int = 4
    manchester: bool = True
    l_shift: int = 0
    phi: float = 0.0
    p_s: float = 1.0

    def __post_init__(self):
        if self.f0 is None:
            object.__setattr__(self, "f0", -(self.n_sc // 2))

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown_key:{k}" for k in unknown])
        return cls(**data)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def n_seg(self):
        return self.n_symb // self.n_bit

    @property
    def n_bo(self):
        return self.n_bit // 2 if self.manchester else self.n_bit

    @property
    def sample_rate(self):
        return self.n_fft * self.f_sc

    @property
    def n_alloc(self):
        """Subcarriers counted by the power target (modulated plus guards)."""
        return self.n_sc + 2 * self.n_gb


@dataclass(frozen=True)
class FdssSpec:
    """Frequency-domain spectral shaping window.

    ``kind`` is one of ``none``, ``kaiser`` (uses ``beta``), ``ls_equivalent``
    (the window that turns DFT-s-OFDM into the LS waveform; brings its own
    time shift) or ``explicit`` (``coefficients`` of length ``n_sc``).
    ``t_shift`` is a cyclic time shift in samples applied as a linear phase.
    """

    kind: str = "none"
    beta: float = 0.0
    coefficients: np.ndarray | None = field(default=None, compare=False)
    t_shift: float = 0.0


@dataclass(frozen=True)
class SpreadingSpec:
    """How each coded bit is spread over ``n_seg`` DFT-s-OFDM pulses.

    ``all_one`` and ``phase_ramp`` both use a constant common sequence (the
    ramp itself is ``WaveformConfig.phi``). ``zc`` uses a Zadoff-Chu root
    ``root`` and shift ``shift``; ``random`` draws unit-modulus phases from
    ``seed``; ``explicit`` carries one sequence per coded bit in
    ``sequences`` (shape ``n_bit x n_seg``). ``n_lgp``/``n_rgp`` zero the
    first/last pulses of every ON symbol.
    """

    kind: str = "all_one"
    root: int = 1
    shift: int = 0
    seed: int = 0
    sequences: np.ndarray | None = field(default=None, compare=False)
    n_lgp: int = 0
    n_rgp: int = 0

    @property
    def is_common(self):
        return self.kind != "explicit"


@dataclass(frozen=True)
class DerivedQuantities:
    n_seg: int
    n_bo: int
    pulse_spacing: Fraction
    sample_rate: float


def _is_int(x):
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def check(config, fdss=None, spreading=None):
    """Return the names of every violated constraint (empty when valid)."""
    c = config
    errors = []
    for name in ("n_fft", "n_sc", "n_symb", "n_bit"):
        v = getattr(c, name)
        if not _is_int(v) or v < 1:
            errors.append(f"nonpositive_{name}")
    for name in ("n_cp", "n_gb"):
        v = getattr(c, name)
        if not _is_int(v) or v < 0:
            errors.append(f"negative_{name}")
    if not _is_int(c.l_shift):
        errors.append("non_integer_l_shift")
    if not (c.f_sc > 0):
        errors.append("nonpositive_f_sc")
    if not (c.p_s > 0):
        errors.append("nonpositive_p_s")
    if not math.isfinite(float(c.phi)):
        errors.append("non_finite_phi")
    if errors:
        # later checks divide by these
        return errors

    if c.n_symb % c.n_bit:
        errors.append("non_integer_n_seg")
    if c.n_symb > c.n_sc:
        errors.append("n_symb_exceeds_n_sc")
    if c.n_sc > c.n_fft - 2 * c.n_gb:
        errors.append("band_overflow")
    elif not _is_int(c.f0) or c.f0 + c.n_sc > c.n_fft or c.f0 < -c.n_fft:
        errors.append("band_overflow")
    if c.manchester and c.n_bit % 2:
        errors.append("manchester_odd_n_bit")
    if c.n_fft < c.n_symb:
        errors.append("pulse_spacing_below_one")

    if fdss is not None:
        if fdss.kind not in FDSS_KINDS:
            errors.append("unknown_fdss_kind")
        elif fdss.kind == "kaiser" and not fdss.beta >= 0:
            errors.append("negative_kaiser_beta")
        elif fdss.kind == "explicit" and (
            fdss.coefficients is None or len(fdss.coefficients) != c.n_sc
        ):
            errors.append("fdss_length_mismatch")

    if spreading is not None and "non_integer_n_seg" not in errors:
        s = spreading
        n_seg = c.n_symb // c.n_bit
        if s.kind not in SPREADING_KINDS:
            errors.append("unknown_spreading_kind")
        if s.n_lgp < 0 or s.n_rgp < 0:
            errors.append("negative_guard")
        elif s.n_lgp + s.n_rgp >= n_seg:
            errors.append("guard_overflow")
        else:
            n_eff = n_seg - s.n_lgp - s.n_rgp
            if s.kind == "zc":
                if s.root < 1 or math.gcd(s.root, n_eff) != 1:
                    errors.append("zc_root_not_coprime")
                if not 0 <= s.shift < n_eff:
                    errors.append("zc_shift_out_of_range")
        if s.kind == "explicit":
            seqs = s.sequences
            if seqs is None or np.shape(seqs) != (c.n_bit, n_seg):
                errors.append("explicit_sequence_shape")
    return errors


def validate(config, fdss=None, spreading=None):
    """Return ``config`` unchanged, or raise :class:`ConfigError`."""
    errors = check(config, fdss, spreading)
    if errors:
        raise ConfigError(errors)
    return config


def derived_quantities(config):
    validate(config)
    return DerivedQuantities(
        n_seg=config.n_symb // config.n_bit,
        n_bo=config.n_bo,
        pulse_spacing=Fraction(config.n_fft, config.n_symb),
        sample_rate=config.n_fft * config.f_sc,
    )
