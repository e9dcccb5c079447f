import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpwus.bits import bits_from_index, manchester_encode
from lpwus.config import ConfigError, FdssSpec, SpreadingSpec, WaveformConfig
from lpwus.ls import LsProfile, ls_closed_form, ls_direct, ls_equivalent_fdss, ls_phase
from lpwus.precoder import generate_wus_symbol, normalize

from test_precoder import _preset_metrics


def _oracle_ls(coded, n_fft, n_sc, n_bit):
    """Full n_fft-point FFT of the held bits, then pick the baseband outputs."""
    held = np.repeat(coded, n_fft // n_bit).astype(float)
    D = np.fft.fft(held)
    k_c = n_sc // 2
    return D[(np.arange(n_sc) - k_c) % n_fft]


def test_all_on_bits_give_single_coefficient():
    p = LsProfile(512, 48, 4)
    x = ls_direct([1, 1, 1, 1], p).values
    assert x[24] == pytest.approx(512)
    assert np.abs(np.delete(x, 24)).max() <= 1e-9


@pytest.mark.parametrize("n_sc", [47, 48, 132])
def test_direct_matches_fft_oracle(n_sc):
    for i in range(4):
        coded = manchester_encode(bits_from_index(i, 2))
        assert np.abs(ls_direct(coded, LsProfile(512, n_sc, 4)).values
                      - _oracle_ls(coded, 512, n_sc, 4)).max() <= 1e-9


def test_first_outputs_are_a_different_waveform():
    p = LsProfile(512, 48, 4)
    coded = [0, 1, 1, 0]
    wrong = ls_direct(coded, p, outputs=np.arange(48)).values
    assert np.abs(wrong - ls_direct(coded, p).values).max() > 1.0


@pytest.mark.parametrize("n_sc", [47, 48])
def test_closed_form_matches_direct(n_sc):
    p = LsProfile(512, n_sc, 4)
    for i in range(4):
        coded = manchester_encode(bits_from_index(i, 2))
        assert np.abs(ls_closed_form(coded, p).values - ls_direct(coded, p).values).max() <= 1e-9


def test_middle_coefficient_and_parity():
    p = LsProfile(512, 48, 4)
    for i in range(4):
        x = ls_closed_form(manchester_encode(bits_from_index(i, 2)), p).values
        assert abs(x[p.k_c]) == pytest.approx(512 / 4 * 2)
        assert int(np.argmax(np.abs(x))) == p.k_c
    x = ls_closed_form(manchester_encode([0, 0]), p).values
    odd = (np.arange(48) - p.k_c) % 2 == 1
    assert np.abs(x[odd]).max() <= 1e-12 and np.all(np.abs(x[~odd]) > 0)


def test_equivalent_phase_examples():
    assert ls_equivalent_fdss(48, 48, 512)[1] == pytest.approx(np.pi)
    fd, phi, t = ls_equivalent_fdss(48, 48, 512)
    assert t == pytest.approx((512 - 48) / 96)
    assert fd.coefficients[24] == pytest.approx(512 / 48 * np.exp(1j * np.pi * 24 * (1 / 48 - 1 / 512)))


@given(st.sampled_from([47, 48, 132]), st.sampled_from(["min", "max"]), st.integers(0, 3),
       st.integers(0, 40))
def test_main_path_reproduces_ls(n_sc, which, idx, l_shift):
    n_symb = 4 if which == "min" else n_sc - n_sc % 4
    fd, phi, _ = ls_equivalent_fdss(n_symb, n_sc, 512, l_shift)
    c = WaveformConfig(n_sc=n_sc, n_symb=n_symb, n_bit=4, n_gb=0, phi=phi, l_shift=l_shift)
    info = bits_from_index(idx, 2)
    main = generate_wus_symbol(info, c, fd, SpreadingSpec()).values
    ls = normalize(ls_direct(manchester_encode(info), LsProfile.for_config(c)), c).values
    if l_shift:
        # a nonzero L changes the ramp with it, so compare against the L=0 waveform
        fd0, phi0, _ = ls_equivalent_fdss(n_symb, n_sc, 512, 0)
        ref = generate_wus_symbol(info, c.with_(phi=phi0, l_shift=0), fd0, SpreadingSpec()).values
        assert np.abs(np.abs(main) - np.abs(ref)).max() <= 1e-9
    else:
        assert np.abs(main - ls).max() <= 1e-9


def test_ls_equivalent_kind_resolves():
    fd, phi, _ = ls_equivalent_fdss(48, 48, 512)
    c = WaveformConfig(n_sc=48, n_symb=48, n_bit=4, n_gb=0, phi=phi)
    a = generate_wus_symbol([1, 0], c, FdssSpec(kind="ls_equivalent"), SpreadingSpec()).values
    b = generate_wus_symbol([1, 0], c, fd, SpreadingSpec()).values
    assert np.abs(a - b).max() <= 1e-12


def test_dropping_window_changes_little():
    ls, plain = _preset_metrics("fig7"), _preset_metrics("fig7_nofdss")
    assert abs(plain.on_ripple - ls.on_ripple) <= 0.1 * ls.on_ripple
    assert abs(plain.off_leakage - ls.off_leakage) <= 0.1 * ls.off_leakage


def test_profile_validation_and_centre():
    with pytest.raises(ConfigError):
        LsProfile(510, 48, 4)
    assert LsProfile(512, 47, 4).k_c == 23
    assert LsProfile(512, 47, 4, center="ceil").k_c == 24
    assert ls_phase(47, 47, center="ceil") == pytest.approx(2 * np.pi * 24 / 47)
