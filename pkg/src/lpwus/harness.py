"""Monte Carlo BER engine.

Every trial transmits three consecutive OFDM symbols (previous, target,
next), each carrying a WUS plus QPSK data on the remaining active
subcarriers, through one block-fading channel realization; only the target
symbol is decoded. Trial ``i`` draws all of its randomness from
``Philox(key=[master_seed, i])`` in a fixed order (info bits, taps, timing
offset, data, unit-variance noise), so results do not depend on batching or
on how trials are split across workers. The noise is scaled per SNR, so all
SNR points and all scenarios sharing a seed see common random numbers.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.stats import binomtest

from . import kernels
from .bits import bits_from_index
from .channel import awgn_for_snr, draw_taps, tdlc_profile
from .fastpath import UnsupportedSpreading, build_profile, fast_coefficients
from .ofdm import BandPlan
from .precoder import effective_t_shift, generate_wus_symbol
from .receiver import butterworth, decision_offset

__all__ = [
    "BerPoint",
    "BerReport",
    "concentration_modes",
    "guard_sweep",
    "run_ber",
    "trial_generator",
    "write_report_csv",
    "write_report_json",
]

log = logging.getLogger(__name__)

N_SYMBOLS = 3
TARGET = 1


@dataclass
class BerPoint:
    snr_db: float
    trials: int
    bits: int
    errors: int
    ber: float
    ci_lo: float
    ci_hi: float


@dataclass
class BerReport:
    scenario: str
    fingerprint: str
    master_seed: int
    trials: int
    points: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def point(self, snr_db):
        for p in self.points:
            if p.snr_db == snr_db:
                return p
        raise KeyError(snr_db)


def binomial_interval(errors, n, level=0.95):
    """Wilson score interval for ``errors`` out of ``n``."""
    ci = binomtest(int(errors), int(n)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def trial_generator(master_seed, index):
    return np.random.Generator(np.random.Philox(key=[int(master_seed), int(index)]))


class _Link:
    """Per-scenario tables shared by all trials (immutable after construction)."""

    def __init__(self, scenario):
        scenario.validate()
        self.scn = scenario
        c = scenario.config
        if not c.manchester:
            raise ValueError("the BER harness decodes Manchester-coded WUS only")
        self.cfg = c
        self.n_fft, self.n_cp = c.n_fft, c.n_cp
        self.sym_len = c.n_fft + c.n_cp
        self.n_bo = c.n_bo
        rx = scenario.receiver
        self.ds = rx.downsample
        self.n_body_adc = c.n_fft // self.ds
        lead = decision_offset(rx, c, effective_t_shift(scenario.fdss, c))
        self.nominal_start = int(np.rint((TARGET * self.sym_len + self.n_cp + lead) / self.ds))
        self.max_off = int(np.ceil(rx.tau_err * c.sample_rate / self.ds)) + 1

        plan = BandPlan.for_config(c, scenario.band.n_active)
        self.data_idx = np.mod(plan.data_indices, c.n_fft) if scenario.band.data else np.zeros(0, int)
        self.n_data = self.data_idx.size

        # WUS bodies for every info string, for +phi and (optionally) -phi
        signs = [1, -1] if scenario.harness.alternate_phi_sign else [1]
        self.wus_X = []
        for sgn in signs:
            cs = c.with_(phi=sgn * c.phi)
            table = np.zeros((2**self.n_bo, c.n_fft), dtype=complex)
            try:
                prof = build_profile(cs, scenario.fdss, scenario.spreading)
            except UnsupportedSpreading:
                prof = None
            for idx in range(2**self.n_bo):
                info = bits_from_index(idx, self.n_bo)
                if prof is not None:
                    frame = fast_coefficients(info, cs, scenario.fdss, scenario.spreading, prof)
                else:
                    frame = generate_wus_symbol(info, cs, scenario.fdss, scenario.spreading)
                table[idx, (np.arange(c.n_sc) + c.f0) % c.n_fft] = frame.values
            self.wus_X.append(table)

        ch = scenario.channel
        if ch.model == "tdlc":
            self.delays, self.energies = tdlc_profile(ch.delay_scaling, c.sample_rate)
        else:
            self.delays, self.energies = np.zeros(1, int), np.ones(1)
        self.e_h = float(self.energies.sum())
        self.frame_len = N_SYMBOLS * self.sym_len + int(self.delays.max())
        need = (self.nominal_start + self.max_off + self.n_body_adc) * self.ds
        if need > self.frame_len:
            raise ValueError("frame too short for the timing error range")

        fb, fl = rx.cutoffs(c)
        self.filters = (*butterworth(fb, c.sample_rate, rx.filter_order),
                        *butterworth(fl, c.sample_rate, rx.filter_order))
        self.adc_rate = c.sample_rate / self.ds

    def noise_std(self, snr_db):
        c = self.cfg
        p_w = c.p_s * c.n_alloc
        spec = awgn_for_snr(10 ** (snr_db / 10), p_w, c.n_alloc, self.e_h)
        var = spec.n0 * (c.n_fft if self.scn.channel.noise_reference == "band" else 1)
        return np.sqrt(var)

    def draw(self, master_seed, indices):
        """Randomness for a block of trials, trial by trial in the fixed order."""
        T = len(indices)
        info = np.empty((T, N_SYMBOLS), dtype=np.int64)
        taps = np.empty((T, len(self.delays)), dtype=complex)
        offs = np.empty(T, dtype=np.int64)
        data = np.empty((T, N_SYMBOLS, self.n_data), dtype=complex)
        noise = np.empty((T, self.frame_len), dtype=complex)
        tau = self.scn.receiver.tau_err
        for j, i in enumerate(indices):
            g = trial_generator(master_seed, i)
            info[j] = g.integers(0, 2**self.n_bo, size=N_SYMBOLS)
            # always consume the same draws so streams stay aligned across scenarios
            h = draw_taps(self.energies, g)
            taps[j] = h if self.scn.channel.model == "tdlc" else 1.0
            offs[j] = int(np.rint(g.uniform(-1.0, 1.0) * tau * self.adc_rate))
            qb = g.integers(0, 2, size=(2, N_SYMBOLS, self.n_data))
            data[j] = np.sqrt(self.cfg.p_s / 2) * ((1 - 2 * qb[0]) + 1j * (1 - 2 * qb[1]))
            noise[j] = (g.standard_normal(self.frame_len)
                        + 1j * g.standard_normal(self.frame_len)) / np.sqrt(2)
        return info, taps, offs, data, noise

    def transmit(self, info, data):
        """Noiseless transmitted samples ``(T, 3*(n_fft+n_cp))``."""
        T = info.shape[0]
        X = np.empty((T, N_SYMBOLS, self.n_fft), dtype=complex)
        for s in range(N_SYMBOLS):
            table = self.wus_X[s % len(self.wus_X)]
            X[:, s] = table[info[:, s]]
        if self.n_data:
            X[:, :, self.data_idx] = data
        body = np.fft.ifft(X, axis=-1) * self.n_fft
        sym = np.concatenate([body[..., self.n_fft - self.n_cp:], body], axis=-1)
        return sym.reshape(T, -1)

    def channel(self, x, taps):
        T, N = x.shape
        y = np.zeros((T, self.frame_len), dtype=complex)
        for p, d in enumerate(self.delays):
            y[:, d:d + N] += taps[:, p:p + 1] * x
        return y

    def errors(self, master_seed, indices, snr_db_list, y_hook=None):
        """Bit errors per SNR for a block of trials."""
        info, taps, offs, data, noise = self.draw(master_seed, indices)
        clean = self.channel(self.transmit(info, data), taps)
        starts = self.nominal_start + offs
        truth = np.stack([bits_from_index(int(v), self.n_bo) for v in info[:, TARGET]])
        rx = self.scn.receiver
        out = []
        for snr_db in snr_db_list:
            y = clean if snr_db is None else clean + self.noise_std(snr_db) * noise
            if y_hook is not None:
                y = y_hook(y)
            sums = kernels.window_sums(
                np.ascontiguousarray(y), *self.filters, self.ds, starts.astype(np.int64),
                self.n_body_adc, self.cfg.n_bit, rx.trim[0], rx.trim[1], rx.adc_bits)
            decided = (sums[:, 1::2] > sums[:, 0::2]).astype(np.uint8)
            out.append(int(np.count_nonzero(decided != truth)))
        return np.array(out, dtype=np.int64)


def _chunk_errors(args):
    scenario, master_seed, start, stop, batch, snr_db_list = args
    link = _Link(scenario)
    total = np.zeros(len(snr_db_list), dtype=np.int64)
    for b0 in range(start, stop, batch):
        total += link.errors(master_seed, range(b0, min(b0 + batch, stop)), snr_db_list)
    return total


def _default_workers():
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


def run_ber(scenario, snr_db_list=None, trials=None, master_seed=None, workers=1,
            progress=None):
    """BER of ``scenario`` at each SNR (dB).

    ``snr_db_list``, ``trials`` and ``master_seed`` default to the scenario's
    harness section. ``snr_db=None`` in the list means noiseless. Work is
    split into whole batches so any worker count gives identical counts.
    """
    scenario.validate()
    h = scenario.harness
    snr_db_list = list(h.snr_db if snr_db_list is None else snr_db_list)
    trials = h.trials if trials is None else int(trials)
    master_seed = h.seed if master_seed is None else int(master_seed)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers is None or workers < 1:
        workers = _default_workers()
    batch = h.batch
    n_batches = -(-trials // batch)
    workers = min(workers, n_batches)
    # contiguous runs of whole batches per task
    per_task = -(-n_batches // (workers * 4 if workers > 1 else 1))
    tasks = []
    for b in range(0, n_batches, per_task):
        start = b * batch
        stop = min((b + per_task) * batch, trials)
        tasks.append((scenario, master_seed, start, stop, batch, snr_db_list))

    errors = np.zeros(len(snr_db_list), dtype=np.int64)
    if workers == 1:
        for k, t in enumerate(tasks):
            errors += _chunk_errors(t)
            if progress:
                progress(k + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for k, res in enumerate(pool.map(_chunk_errors, tasks)):
                errors += res
                if progress:
                    progress(k + 1, len(tasks))

    n_bits = trials * scenario.config.n_bo
    points = []
    for snr_db, e in zip(snr_db_list, errors):
        lo, hi = binomial_interval(e, n_bits)
        points.append(BerPoint(
            snr_db=None if snr_db is None else float(snr_db), trials=trials, bits=n_bits,
            errors=int(e), ber=float(e) / n_bits, ci_lo=lo, ci_hi=hi))
    return BerReport(scenario.name, scenario.fingerprint(), master_seed, trials, points)


def guard_sweep(base, lgp_range, rgp_range, snr_db, trials, seed, workers=1):
    """BER over every valid ``(n_lgp, n_rgp)`` pair; invalid cells are NaN.

    Returns ``{"n_lgp", "n_rgp", "ber", "errors", "ci_lo", "ci_hi", "bits"}``
    with matrices indexed ``[i_lgp, i_rgp]``.
    """
    lgp, rgp = list(lgp_range), list(rgp_range)
    shape = (len(lgp), len(rgp))
    ber = np.full(shape, np.nan)
    errs = np.full(shape, -1, dtype=np.int64)
    lo = np.full(shape, np.nan)
    hi = np.full(shape, np.nan)
    n_bits = 0
    for i, a in enumerate(lgp):
        for j, b in enumerate(rgp):
            sp = replace(base.spreading, n_lgp=a, n_rgp=b)
            scn = replace(base, spreading=sp, name=f"{base.name}_g{a}_{b}")
            if scn.check():
                continue
            p = run_ber(scn, [snr_db], trials, seed, workers).points[0]
            ber[i, j], errs[i, j], lo[i, j], hi[i, j] = p.ber, p.errors, p.ci_lo, p.ci_hi
            n_bits = p.bits
    return {"n_lgp": lgp, "n_rgp": rgp, "ber": ber, "errors": errs, "ci_lo": lo,
            "ci_hi": hi, "bits": n_bits}


def concentration_modes(base, amounts, snr_db, trials, seed, workers=1,
                        modes=("tx_only", "rx_only", "joint")):
    """BER versus concentration amount ``c`` for each mode.

    ``tx_only``: ``c`` guard pulses on each side, full detection windows.
    ``rx_only``: no guard pulses; each window loses the ADC samples spanned
    by ``c`` pulses on each side. ``joint``: both.
    """
    c0 = base.config
    out = {}
    for mode in modes:
        series = []
        for c in amounts:
            trim = int(round(c * c0.n_fft / c0.n_symb / base.receiver.downsample))
            sp, rx = base.spreading, base.receiver
            if mode in ("tx_only", "joint"):
                sp = replace(sp, n_lgp=c, n_rgp=c)
            if mode in ("rx_only", "joint"):
                rx = replace(rx, trim=(trim, trim))
            elif mode != "tx_only":
                raise ValueError(f"unknown mode {mode!r}")
            scn = replace(base, spreading=sp, receiver=rx, name=f"{base.name}_{mode}_{c}")
            if scn.check():
                series.append(None)
                continue
            series.append(run_ber(scn, [snr_db], trials, seed, workers).points[0])
        out[mode] = series
    return out


def write_report_json(path, report):
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)


def write_report_csv(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["snr_db", "ber", "ci_lo", "ci_hi", "scenario_id"])
        for p in report.points:
            w.writerow([p.snr_db, repr(p.ber), repr(p.ci_lo), repr(p.ci_hi), report.scenario])
