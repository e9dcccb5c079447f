import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from lpwus.cli import main, parse_bits, parse_range
from lpwus.config import WaveformConfig
from lpwus.selftest import GOLDEN_FILES, _golden_dir


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_fig5(tmp_path, capsys):
    code, out, _ = run(["generate", "--preset", "fig5", "--bits", "10011010",
                        "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    written = json.loads(out)["written"]
    for name in ("frame.csv", "waveform.csv", "envelope.csv", "metrics.json", "power.csv"):
        assert name in written and (tmp_path / name).is_file()
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["info_bits"] == "0100" and m["coded_bits"] == "10011010"
    assert m["on_ripple"] < 1.5 and m["off_leakage"] < 0.05
    env = np.loadtxt(tmp_path / "envelope.csv", delimiter=",", skiprows=1)
    assert env.shape == (512 * 8, 4)
    assert np.allclose(env[:, 3], np.hypot(env[:, 1], env[:, 2]))
    wf = np.loadtxt(tmp_path / "waveform.csv", delimiter=",", skiprows=1)
    assert wf.shape[0] == 512 + 36
    assert np.allclose(wf[:36, 1:3], wf[-36:, 1:3])


def test_generate_fig9a_and_spectrum(tmp_path, capsys):
    assert run(["generate", "--preset", "fig9a", "--out-dir", str(tmp_path), "--binary"],
               capsys)[0] == 0
    assert (tmp_path / "sequence.csv").is_file() and (tmp_path / "waveform.bin").is_file()
    seq = np.loadtxt(tmp_path / "sequence.csv", delimiter=",", skiprows=1)
    assert seq.shape[0] == 36
    assert np.allclose(np.hypot(seq[:, 1], seq[:, 2]), 1.0)
    code, out, _ = run(["spectrum", "--preset", "fig9a", "--stage", "preprocessed",
                        "--out-dir", str(tmp_path)], capsys)
    assert code == 0 and json.loads(out)["n"] == 144
    p = np.loadtxt(tmp_path / "spectrum.csv", delimiter=",", skiprows=1)[:, 1]
    assert np.allclose(p[::4], p[0])


def test_invalid_scenario_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"config": {"n_sc": 48, "wrong": 1}}))
    code, _, err = run(["generate", "--scenario", str(bad), "--out-dir", str(tmp_path)], capsys)
    assert code == 2
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["error"] == "validation" and "unknown_key:config.wrong" in payload["errors"]
    code, _, err = run(["generate", "--preset", "fig5", "--bits", "111", "--out-dir",
                        str(tmp_path)], capsys)
    assert code == 2
    code, _, _ = run(["generate", "--preset", "nope", "--out-dir", str(tmp_path)], capsys)
    assert code == 2


def test_ber_trials_zero_is_error(tmp_path, capsys):
    code, _, err = run(["ber", "--preset", "fig10_zc_u17", "--trials", "0", "--snr", "0",
                        "--out-dir", str(tmp_path)], capsys)
    assert code == 2 and "nonpositive_trials" in err


def test_ber_same_seed_identical_files(tmp_path, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / f"r{k}"
        code, _, err = run(["ber", "--preset", "fig10_zc_u17", "--snr", "0", "4",
                            "--trials", "200", "--seed", "8", "--out-dir", str(d)], capsys)
        assert code == 0 and "progress" in err
        outs.append(((d / "ber.json").read_bytes(), (d / "ber.csv").read_bytes()))
    assert outs[0] == outs[1]
    rows = outs[0][1].decode().splitlines()
    assert rows[0] == "snr_db,ber,ci_lo,ci_hi,scenario_id" and len(rows) == 3


def test_overrides_and_flag_positions(tmp_path, capsys):
    code, _, _ = run(["--preset", "fig5", "--set", "n_bit=8", "--set", "harness.bits=\"1100\"",
                      "generate", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    assert json.loads((tmp_path / "metrics.json").read_text())["info_bits"] == "1100"
    code, _, _ = run(["generate", "--preset", "fig5", "--set", "nonsense", "--out-dir",
                      str(tmp_path)], capsys)
    assert code == 2


def test_sweep_and_modes(tmp_path, capsys):
    code, out, _ = run(["sweep-guards", "--preset", "fig11_normal", "--lgp", "0:4:4",
                        "--rgp", "0:8:8", "--snr", "2", "--trials", "64",
                        "--out-dir", str(tmp_path)], capsys)
    assert code == 0 and set(json.loads(out)) == {"min_ber", "n_lgp", "n_rgp"}
    rows = (tmp_path / "guards.csv").read_text().splitlines()
    assert len(rows) == 1 + 4
    code, out, _ = run(["concentration-modes", "--preset", "fig11_normal", "--amounts", "0", "4",
                        "--snr", "2", "--trials", "64", "--out-dir", str(tmp_path)], capsys)
    res = json.loads(out)
    assert code == 0 and res["tx_only"][0] == res["rx_only"][0] == res["joint"][0]


def test_selftest_passes(capsys):
    code, out, _ = run(["selftest"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])
    assert all("measured=" in line and "tolerance=" in line for line in lines[:-1])
    assert lines[-1] == f"{len(lines) - 1}/{len(lines) - 1} passed"


def test_selftest_corrupted_golden(tmp_path, capsys):
    for name in GOLDEN_FILES:
        shutil.copy(_golden_dir(None) / name, tmp_path / name)
    frame = np.loadtxt(tmp_path / "frame_zc_u1.csv", delimiter=",", skiprows=1)
    frame[3, 1] += 1e-6
    np.savetxt(tmp_path / "frame_zc_u1.csv", frame, delimiter=",", header="k,re,im",
               comments="", fmt=["%d", "%.17g", "%.17g"])
    code, out, _ = run(["selftest", "--golden-dir", str(tmp_path)], capsys)
    assert code == 1
    failed = [line for line in out.splitlines() if line.startswith("FAIL")]
    assert len(failed) == 1 and failed[0].startswith("FAIL golden_frame_zc_u1")


def test_list_presets_and_no_command(capsys):
    code, out, _ = run(["--list-presets"], capsys)
    assert code == 0 and "fig10_zc_u17" in out.split()
    assert run([], capsys)[0] == 2


def test_helpers():
    c = WaveformConfig(n_bit=4)
    assert parse_bits("1001", c, None).tolist() == [0, 1]
    assert parse_bits("01", c, None).tolist() == [0, 1]
    assert parse_range("2:8:3") == [2, 5, 8]
    assert parse_range("4") == [4]
    with pytest.raises(Exception):
        parse_bits("1111", c, None)
    with pytest.raises(Exception):
        parse_range("1:2:0")


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "lpwus.cli", "--version"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "lpwus" in r.stdout
