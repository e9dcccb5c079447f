"""Command-line interface.

Commands: ``generate``, ``ber``, ``sweep-guards``, ``concentration-modes``,
``spectrum`` and ``selftest``. Outputs are data files only (CSV/JSON).
Exit codes: 0 success, 1 runtime failure, 2 validation error (an error
JSON object is written to stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .bits import as_bits, manchester_decode
from .config import ConfigError
from .exports import write_frame_csv, write_profile_csv, write_sequence_csv, write_waveform_csv
from .fastpath import UnsupportedSpreading, build_profile
from .harness import (
    concentration_modes,
    guard_sweep,
    run_ber,
    write_report_csv,
    write_report_json,
)
from .metrics import average_spectrum, coded_for, oversampled_signal, waveform_metrics, write_spectrum_csv
from .ofdm import ofdm_modulate
from .precoder import effective_t_shift as _t_shift
from .precoder import generate_wus_symbol
from .scenario import list_presets, load_preset_data, load_scenario_data, parse_scenario
from .selftest import run_selftest
from .spreading import overlaid_sequence

log = logging.getLogger("lpwus")

EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2


class ValidationError(Exception):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


# -- argument parsing ---------------------------------------------------------

def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--scenario", default=d, help="scenario JSON file")
    p.add_argument("--preset", default=d, help="named preset (see --list-presets)")
    p.add_argument("--seed", type=int, default=d, help="master seed")
    p.add_argument("--out-dir", default=argparse.SUPPRESS if suppress else ".",
                   help="output directory (created if missing)")
    p.add_argument("--workers", type=int, default=d,
                   help="worker processes (default: available CPUs)")
    p.add_argument("--set", dest="overrides", action="append",
                   default=argparse.SUPPRESS if suppress else [], metavar="[SECTION.]KEY=VALUE",
                   help="override a scenario value (section defaults to config); value is JSON")


def build_parser():
    parser = argparse.ArgumentParser(prog="lpwus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list-presets", action="store_true", help="print preset names and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command")

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    g = add("generate", "write frame, waveform, envelope and metrics for one bit string")
    g.add_argument("--bits", help="coded (length n_bit) or info (length n_bo) bits, e.g. 1010")
    g.add_argument("--oversample", type=int, default=8, help="envelope oversampling factor")
    g.add_argument("--binary", action="store_true", help="also write the compact binary waveform")

    b = add("ber", "Monte Carlo BER over an SNR list")
    b.add_argument("--snr", type=float, nargs="+", help="SNR points in dB")
    b.add_argument("--trials", type=int, help="trials per SNR point")

    s = add("sweep-guards", "BER over a grid of guard pulse counts")
    s.add_argument("--lgp", required=True, help="range start:stop[:step] (stop inclusive)")
    s.add_argument("--rgp", required=True, help="range start:stop[:step] (stop inclusive)")
    s.add_argument("--snr", type=float, required=True)
    s.add_argument("--trials", type=int, required=True)

    c = add("concentration-modes", "Tx-only, Rx-only and joint concentration")
    c.add_argument("--amounts", type=int, nargs="+", required=True, help="pulses per side")
    c.add_argument("--snr", type=float, required=True)
    c.add_argument("--trials", type=int, required=True)

    sp = add("spectrum", "mean subcarrier power over the bit ensemble")
    sp.add_argument("--draws", type=int, help="random draws instead of full enumeration")
    sp.add_argument("--stage", choices=("final", "preprocessed"), default="final")
    sp.add_argument("--alternate-sign", action="store_true",
                    help="average over +phi and -phi symbols")

    st = add("selftest", "fast analytical invariant suite")
    st.add_argument("--golden-dir", help="directory holding the golden vectors")
    return parser


# -- helpers --------------------------------------------------------------------

def _apply_overrides(data, overrides):
    data = json.loads(json.dumps(data))
    for item in overrides or []:
        if "=" not in item:
            raise ValidationError([f"bad_override:{item}"])
        key, raw = item.split("=", 1)
        section, _, field = key.rpartition(".")
        section = section or "config"
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        target = data.setdefault(section, {})
        if not isinstance(target, dict):
            raise ValidationError([f"bad_override:{item}"])
        target[field] = value
    return data


def load_from_args(args):
    """Scenario selected by ``--scenario``/``--preset`` with ``--set`` and ``--seed`` applied."""
    if bool(args.scenario) == bool(args.preset):
        raise ValidationError(["exactly_one_of_scenario_or_preset"])
    if args.preset:
        data, name = load_preset_data(args.preset), args.preset
    else:
        data = load_scenario_data(args.scenario)
        name = data.get("name") if isinstance(data, dict) else None
        name = name or os.path.splitext(os.path.basename(args.scenario))[0]
    data = _apply_overrides(data, args.overrides)
    if args.seed is not None:
        data.setdefault("harness", {})["seed"] = args.seed
    return parse_scenario(data, name=name)


def parse_bits(text, config, default=None):
    """Info bits from a coded (length ``n_bit``) or info (length ``n_bo``) string."""
    text = text if text is not None else default
    if text is None:
        return (np.arange(config.n_bo) % 2 == 0).astype(np.uint8)
    try:
        b = as_bits([int(ch) for ch in str(text).strip()])
    except ValueError:
        raise ValidationError([f"bad_bits:{text}"]) from None
    if b.size == config.n_bit and config.manchester:
        try:
            return manchester_decode(b)
        except ValueError:
            raise ValidationError([f"not_manchester:{text}"]) from None
    if b.size == config.n_bo:
        return b
    raise ValidationError([f"bits_length:{b.size} (n_bit={config.n_bit}, n_bo={config.n_bo})"])


def parse_range(text):
    parts = [int(x) for x in text.split(":")]
    if len(parts) == 1:
        return [parts[0]]
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] <= 0):
        raise ValidationError([f"bad_range:{text}"])
    step = parts[2] if len(parts) == 3 else 1
    return list(range(parts[0], parts[1] + 1, step))


def effective_t_shift(scn):
    return _t_shift(scn.fdss, scn.config)


def _out(args, name):
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _check_trials(trials):
    if trials is not None and trials < 1:
        raise ValidationError(["nonpositive_trials"])


def _progress(done, total):
    print(f"progress {done}/{total}", file=sys.stderr, flush=True)


def _workers(args):
    return args.workers if args.workers is not None else None


# -- commands ------------------------------------------------------------------

def cmd_generate(args):
    scn = load_from_args(args)
    c = scn.config
    info = parse_bits(args.bits, c, scn.harness.bits)
    frame = generate_wus_symbol(info, c, scn.fdss, scn.spreading)
    written = []

    def path(name):
        written.append(name)
        return _out(args, name)

    write_frame_csv(path("frame.csv"), frame)
    X = np.zeros(c.n_fft, dtype=complex)
    X[(np.arange(c.n_sc) + c.f0) % c.n_fft] = frame.values
    symbol = ofdm_modulate(X, c.n_fft, c.n_cp)
    write_waveform_csv(path("waveform.csv"), symbol)
    if args.binary:
        from .ofdm import write_binary

        write_binary(path("waveform.bin"), symbol, c.n_fft, c.n_cp, c.sample_rate)
    body = oversampled_signal(frame, c, args.oversample)
    write_waveform_csv(path("envelope.csv"), body, t=np.arange(body.size) / args.oversample)
    power = np.abs(frame.values) ** 2
    np.savetxt(path("power.csv"), np.column_stack([np.arange(power.size), power]),
               delimiter=",", header="k,power", comments="", fmt=["%d", "%.17g"])
    if scn.spreading.is_common:
        write_sequence_csv(path("sequence.csv"), overlaid_sequence(scn.spreading, c.n_seg))
        try:
            write_profile_csv(path("profile.csv"), build_profile(c, scn.fdss, scn.spreading))
        except UnsupportedSpreading:
            pass
    coded = coded_for(info, c)
    report = {
        "scenario": scn.name,
        "fingerprint": scn.fingerprint(),
        "info_bits": "".join(map(str, info)),
        "coded_bits": "".join(map(str, coded)),
        "eta": frame.eta,
        "silent": frame.silent,
    }
    if not frame.silent:
        m = waveform_metrics(frame, c, coded, effective_t_shift(scn), args.oversample)
        report.update(m.to_dict())
    with open(path("metrics.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    print(json.dumps({"written": written, "out_dir": args.out_dir}))
    return EXIT_OK


def cmd_ber(args):
    scn = load_from_args(args)
    _check_trials(args.trials)
    report = run_ber(scn, args.snr, args.trials, None, _workers(args), progress=_progress)
    write_report_json(_out(args, "ber.json"), report)
    write_report_csv(_out(args, "ber.csv"), report)
    for p in report.points:
        print(f"snr_db={p.snr_db} ber={p.ber:.6g} ci=[{p.ci_lo:.6g}, {p.ci_hi:.6g}] "
              f"errors={p.errors}/{p.bits}")
    return EXIT_OK


def cmd_sweep_guards(args):
    scn = load_from_args(args)
    _check_trials(args.trials)
    res = guard_sweep(scn, parse_range(args.lgp), parse_range(args.rgp), args.snr, args.trials,
                      scn.harness.seed, _workers(args))
    with open(_out(args, "guards.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_lgp", "n_rgp", "ber", "ci_lo", "ci_hi", "errors", "bits"])
        for i, a in enumerate(res["n_lgp"]):
            for j, b in enumerate(res["n_rgp"]):
                if np.isnan(res["ber"][i, j]):
                    continue
                w.writerow([a, b, repr(res["ber"][i, j]), repr(res["ci_lo"][i, j]),
                            repr(res["ci_hi"][i, j]), int(res["errors"][i, j]), res["bits"]])
    ber = res["ber"]
    i, j = np.unravel_index(np.nanargmin(ber), ber.shape)
    summary = {"min_ber": float(ber[i, j]), "n_lgp": res["n_lgp"][i], "n_rgp": res["n_rgp"][j]}
    with open(_out(args, "guards.json"), "w") as fh:
        json.dump({**summary, "snr_db": args.snr, "trials": args.trials,
                   "seed": scn.harness.seed}, fh, indent=2, sort_keys=True)
    print(json.dumps(summary))
    return EXIT_OK


def cmd_concentration_modes(args):
    scn = load_from_args(args)
    _check_trials(args.trials)
    res = concentration_modes(scn, args.amounts, args.snr, args.trials, scn.harness.seed,
                              _workers(args))
    with open(_out(args, "modes.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mode", "amount", "ber", "ci_lo", "ci_hi"])
        for mode, series in res.items():
            for amount, p in zip(args.amounts, series):
                if p is not None:
                    w.writerow([mode, amount, repr(p.ber), repr(p.ci_lo), repr(p.ci_hi)])
    print(json.dumps({m: [None if p is None else p.ber for p in s] for m, s in res.items()}))
    return EXIT_OK


def cmd_spectrum(args):
    scn = load_from_args(args)
    if args.draws is not None and args.draws < 1:
        raise ValidationError(["nonpositive_draws"])
    alt = args.alternate_sign or scn.harness.alternate_phi_sign
    power = average_spectrum(scn.config, scn.fdss, scn.spreading, args.draws, scn.harness.seed,
                             alt, args.stage)
    write_spectrum_csv(_out(args, "spectrum.csv"), power)
    print(json.dumps({"written": ["spectrum.csv"], "n": int(power.size)}))
    return EXIT_OK


def cmd_selftest(args):
    checks = run_selftest(args.golden_dir)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} passed")
    return EXIT_RUNTIME if failed else EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "ber": cmd_ber,
    "sweep-guards": cmd_sweep_guards,
    "concentration-modes": cmd_concentration_modes,
    "spectrum": cmd_spectrum,
    "selftest": cmd_selftest,
}


def _error_json(kind, errors):
    print(json.dumps({"error": kind, "errors": errors}), file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.list_presets:
        print("\n".join(list_presets()))
        return EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        _error_json("validation", exc.errors)
        return EXIT_VALIDATION
    except ConfigError as exc:
        _error_json("validation", list(exc.errors))
        return EXIT_VALIDATION
    except (TypeError, ValueError) as exc:
        # constructor and range errors from user-supplied values
        _error_json("validation", [str(exc)])
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - report any failure as exit 1
        log.debug("runtime failure", exc_info=True)
        _error_json("runtime", [f"{type(exc).__name__}: {exc}"])
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
