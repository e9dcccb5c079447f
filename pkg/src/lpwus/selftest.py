"""Fast analytical invariant suite with golden vectors.

Each check reports its measured value against a tolerance; golden files
live in ``lpwus/golden`` and can be redirected (tests corrupt a copy to
prove failures are reported by name).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .bits import bcal_table, bits_from_index, dft_coded_bits, dft_info_bits_manchester, manchester_encode
from .config import FdssSpec, SpreadingSpec, WaveformConfig
from .exports import read_bcal_csv, read_frame_csv
from .fastpath import fast_coefficients, interpolate_r0
from .ls import LsProfile, ls_closed_form, ls_direct, ls_equivalent_fdss
from .metrics import comb_power_fraction
from .precoder import (
    dft_precode,
    dirichlet_kernel,
    fdss_window,
    fd_postprocess,
    generate_wus_symbol,
    modulation_symbols,
    pulse_kernel,
)
from .spreading import zero_dc_phase

__all__ = ["Check", "GOLDEN_FILES", "golden_frame_case", "run_selftest"]

GOLDEN_FILES = ("table1_nbo1.csv", "table1_nbo2.csv", "frame_zc_u1.csv")


@dataclass
class Check:
    name: str
    tolerance: float
    measured: float
    passed: bool
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: measured={self.measured:.3e} tolerance={self.tolerance:.1e}"
        return text + (f" ({self.detail})" if self.detail else "")


def _check(name, measured, tol, detail=""):
    measured = float(measured)
    return Check(name, tol, measured, bool(measured <= tol), detail)


def golden_frame_case():
    """The configuration behind ``frame_zc_u1.csv``."""
    cfg = WaveformConfig(n_sc=48, n_symb=48, n_bit=4, n_gb=0, phi=0.0)
    return cfg, FdssSpec(), SpreadingSpec(kind="zc", root=1), [1, 0]


def _golden_dir(golden_dir):
    if golden_dir is not None:
        return Path(golden_dir)
    return Path(str(resources.files("lpwus") / "golden"))


def _table_checks(root):
    out = []
    for n_bo in (1, 2):
        name = f"table1_nbo{n_bo}"
        path = root / f"{name}.csv"
        try:
            labels, table = read_bcal_csv(path)
        except (OSError, ValueError) as exc:
            out.append(Check(name, 0.0, float("inf"), False, f"unreadable golden: {exc}"))
            continue
        want = ["".join(map(str, bits_from_index(c, n_bo))) for c in range(2**n_bo)]
        got = bcal_table(n_bo)
        if labels != want or table.shape != got.shape:
            out.append(Check(name, 0.0, float("inf"), False, "golden layout mismatch"))
            continue
        out.append(_check(name, np.abs(table - got).max(), 0.0))
    return out


def _golden_frame(root):
    name = "golden_frame_zc_u1"
    try:
        want = read_frame_csv(root / "frame_zc_u1.csv")
    except (OSError, ValueError) as exc:
        return Check(name, 1e-12, float("inf"), False, f"unreadable golden: {exc}")
    cfg, fd, sp, info = golden_frame_case()
    got = generate_wus_symbol(info, cfg, fd, sp).values
    if want.shape != got.shape:
        return Check(name, 1e-12, float("inf"), False, "length mismatch")
    return _check(name, np.abs(want - got).max(), 1e-12)


def _lemma2():
    err = 0.0
    for n_bo in range(1, 7):
        for i in range(2**n_bo):
            b = bits_from_index(i, n_bo)
            err = max(err, np.abs(dft_info_bits_manchester(b) - dft_coded_bits(manchester_encode(b))).max())
    return _check("manchester_bit_dft", err, 1e-12)


def _fastpath():
    err = 0.0
    cases = [
        (WaveformConfig(n_sc=48, n_symb=48, n_bit=4, n_gb=0, phi=np.pi), SpreadingSpec()),
        (WaveformConfig(n_sc=132, n_symb=44, n_bit=4, phi=0.7), SpreadingSpec(kind="random", seed=3)),
        (WaveformConfig(n_sc=132, n_symb=132, n_bit=4), SpreadingSpec(kind="zc", root=17)),
    ]
    for cfg, sp in cases:
        for i in range(2**cfg.n_bo):
            info = bits_from_index(i, cfg.n_bo)
            fd = FdssSpec(kind="kaiser", beta=4.0, t_shift=cfg.n_fft / (2 * cfg.n_symb))
            a = fast_coefficients(info, cfg, fd, sp).values
            b = generate_wus_symbol(info, cfg, fd, sp).values
            err = max(err, np.abs(a - b).max())
    return _check("fast_path_equivalence", err, 1e-10)


def _ls():
    err = 0.0
    for n_sc in (47, 48, 132):
        for n_symb in (4, n_sc - n_sc % 4):
            fd, phi, _ = ls_equivalent_fdss(n_symb, n_sc, 512)
            cfg = WaveformConfig(n_sc=n_sc, n_symb=n_symb, n_bit=4, n_gb=0, phi=phi)
            prof = LsProfile.for_config(cfg)
            for i in range(4):
                info = bits_from_index(i, 2)
                coded = manchester_encode(info)
                d = modulation_symbols(info, cfg, SpreadingSpec())
                main = fd_postprocess(dft_precode(d, n_symb), fdss_window(fd, cfg), 0, n_sc).values
                direct = ls_direct(coded, prof).values
                closed = ls_closed_form(coded, prof).values
                err = max(err, np.abs(direct - closed).max(), np.abs(direct - main).max())
    return _check("ls_triple_equivalence", err, 1e-9)


def _comb():
    worst = 0.0
    for n_seg in (12, 36):
        cfg = WaveformConfig(n_sc=4 * n_seg, n_symb=4 * n_seg, n_bit=4, n_gb=0)
        for i in range(4):
            d = modulation_symbols(bits_from_index(i, 2), cfg, SpreadingSpec(kind="zc", root=1))
            worst = max(worst, abs(comb_power_fraction(dft_precode(d), 4) - 0.5))
    return _check("comb_half_power", worst, 1e-12)


def _interp():
    rng = np.random.default_rng(11)
    err = 0.0
    for _ in range(20):
        n_seg, n_bit = int(rng.integers(1, 65)), int(rng.integers(1, 17))
        n_symb = n_seg * n_bit
        r0 = rng.standard_normal(n_seg) + 1j * rng.standard_normal(n_seg)
        direct = np.fft.fft(np.concatenate([r0, np.zeros(n_symb - n_seg)]))
        got = interpolate_r0(np.fft.fft(r0), np.arange(n_symb), n_bit, n_symb)
        err = max(err, np.abs(got - direct).max())
    return _check("r0_interpolation", err, 1e-10)


def _zero_dc():
    worst = 0.0
    for sign in (1, -1):
        cfg = WaveformConfig(n_sc=48, n_symb=48, n_bit=8, n_gb=0,
                             phi=sign * zero_dc_phase(24, 1, 8, 48))
        for i in range(16):
            x = generate_wus_symbol(bits_from_index(i, 4), cfg, FdssSpec(), SpreadingSpec()).values
            worst = max(worst, abs(x[24]) / np.abs(x).max())
    return _check("zero_dc_null", worst, 1e-9)


def _dirichlet():
    n = np.arange(512)
    h = pulse_kernel(np.ones(12), 512)
    return _check("dirichlet_kernel", np.abs(h - dirichlet_kernel(n, 12, 512)).max(), 1e-10)


def run_selftest(golden_dir=None):
    """Run every check; returns a list of :class:`Check` (timed in ``detail`` when slow)."""
    root = _golden_dir(golden_dir)
    checks = []
    checks += _table_checks(root)
    for fn in (lambda: _golden_frame(root), _lemma2, _fastpath, _ls, _comb, _interp, _zero_dc,
               _dirichlet):
        t0 = time.perf_counter()
        c = fn()
        dt = time.perf_counter() - t0
        if dt > 1.0:
            c.detail = (c.detail + "; " if c.detail else "") + f"{dt:.1f}s"
        checks.append(c)
    return checks
