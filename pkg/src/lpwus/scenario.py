"""Scenario files: one JSON object with named sections.

Sections are ``config``, ``fdss``, ``spreading``, ``band``, ``channel``,
``receiver`` and ``harness``; unknown keys anywhere are rejected. Named
presets are JSON files shipped in ``lpwus/presets``.

Symbolic values accepted in the file:

* ``config.phi``: a number, ``"<x>pi"`` (e.g. ``"0.25pi"``, ``"-2/3pi"``),
  ``"flatten"`` (flattening ramp over ``n_sc``), ``"flatten_narrow"`` (same
  rule over the ``n_symb`` narrow band, for frequency repetition), ``"ls"``
  (the LS-equivalent ramp) or ``{"zero_dc": {"k_null": k, "lambda": l}}``.
* ``fdss.t_shift``: a number or ``"half_pulse"`` (``n_fft/(2*n_symb)``).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from importlib import resources

import numpy as np

from .config import ConfigError, FdssSpec, SpreadingSpec, WaveformConfig, check
from .ls import ls_phase
from .receiver import ReceiverConfig
from .spreading import flatten_phase, zero_dc_phase

__all__ = [
    "BandSpec",
    "ChannelSpec",
    "HarnessSpec",
    "Scenario",
    "list_presets",
    "load_preset",
    "load_preset_data",
    "load_scenario",
    "load_scenario_data",
    "parse_scenario",
]

SECTIONS = ("name", "description", "config", "fdss", "spreading", "band", "channel",
            "receiver", "harness")


@dataclass(frozen=True)
class BandSpec:
    """Full-band allocation: ``n_active`` centred subcarriers, QPSK outside the WUS block."""

    n_active: int = 288
    data: bool = True


@dataclass(frozen=True)
class ChannelSpec:
    """``model`` is ``"tdlc"`` (block Rayleigh fading) or ``"flat"``.

    ``noise_reference`` selects how the SNR maps to the per-sample noise
    variance: ``"band"`` (SNR measured per subcarrier, i.e. within the WUS
    allocation: variance ``n_fft * N0``) or ``"sample"`` (variance ``N0``).
    """

    model: str = "tdlc"
    delay_scaling: float = 300e-9
    noise_reference: str = "band"


@dataclass(frozen=True)
class HarnessSpec:
    snr_db: tuple = (0.0, 2.0, 4.0, 6.0, 8.0)
    trials: int = 2000
    seed: int = 1
    alternate_phi_sign: bool = False
    bits: str | None = None
    batch: int = 512


@dataclass(frozen=True)
class Scenario:
    name: str
    config: WaveformConfig
    fdss: FdssSpec
    spreading: SpreadingSpec
    band: BandSpec = BandSpec()
    channel: ChannelSpec = ChannelSpec()
    receiver: ReceiverConfig = ReceiverConfig()
    harness: HarnessSpec = HarnessSpec()
    description: str = ""
    source: dict = field(default_factory=dict, compare=False)

    def check(self):
        errors = check(self.config, self.fdss, self.spreading)
        if not errors:
            errors += self.receiver.check(self.config)
        if self.channel.model not in ("tdlc", "flat"):
            errors.append("unknown_channel_model")
        if self.channel.noise_reference not in ("band", "sample"):
            errors.append("unknown_noise_reference")
        if self.channel.model == "tdlc" and not self.channel.delay_scaling > 0:
            errors.append("nonpositive_delay_scaling")
        if self.harness.trials < 1:
            errors.append("nonpositive_trials")
        if self.harness.batch < 1:
            errors.append("nonpositive_batch")
        return errors

    def validate(self):
        errors = self.check()
        if errors:
            raise ConfigError(errors)
        return self

    def with_(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)

    def resolved(self):
        """Plain-data view with every symbolic value resolved (used for fingerprints)."""
        fd = asdict(self.fdss)
        if self.fdss.coefficients is not None:
            c = np.asarray(self.fdss.coefficients, complex)
            fd["coefficients"] = [c.real.tolist(), c.imag.tolist()]
        sp = asdict(self.spreading)
        if self.spreading.sequences is not None:
            s = np.asarray(self.spreading.sequences, complex)
            sp["sequences"] = [s.real.tolist(), s.imag.tolist()]
        return {
            "name": self.name,
            "config": self.config.to_dict(),
            "fdss": fd,
            "spreading": sp,
            "band": asdict(self.band),
            "channel": asdict(self.channel),
            "receiver": asdict(self.receiver),
            "harness": {k: v for k, v in asdict(self.harness).items() if k != "bits"},
        }

    def fingerprint(self):
        blob = json.dumps(self.resolved(), sort_keys=True, default=_json_default).encode()
        return hashlib.sha256(blob).hexdigest()


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(type(x))


_PI_RE = re.compile(r"^\s*([+-]?[0-9.]*(?:/[0-9.]+)?)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def _parse_pi(text):
    m = _PI_RE.match(text)
    if not m:
        raise ConfigError([f"bad_phi:{text}"])
    coef = m.group(1)
    if coef in ("", "+"):
        value = 1.0
    elif coef == "-":
        value = -1.0
    else:
        try:
            value = float(Fraction(coef))
        except (ValueError, ZeroDivisionError):
            raise ConfigError([f"bad_phi:{text}"]) from None
    if m.group(2):
        try:
            value /= float(m.group(2))
        except ZeroDivisionError:
            raise ConfigError([f"bad_phi:{text}"]) from None
    return value * np.pi


def _resolve_phi(raw, cfg):
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    if isinstance(raw, dict):
        if set(raw) != {"zero_dc"} or not isinstance(raw["zero_dc"], dict):
            raise ConfigError(["bad_phi"])
        z = dict(raw["zero_dc"])
        unknown = set(z) - {"k_null", "lambda"}
        if unknown:
            raise ConfigError([f"unknown_key:phi.zero_dc.{k}" for k in sorted(unknown)])
        k_null = z.get("k_null", cfg["n_sc"] // 2)
        return zero_dc_phase(k_null, z.get("lambda", 1), cfg["n_bit"], cfg["n_symb"])
    if isinstance(raw, str):
        if raw == "flatten":
            return flatten_phase(cfg["n_sc"], cfg["n_symb"], cfg["l_shift"])
        if raw == "flatten_narrow":
            return flatten_phase(cfg["n_symb"], cfg["n_symb"], cfg["l_shift"])
        if raw == "ls":
            return ls_phase(cfg["n_symb"], cfg["n_sc"], cfg["l_shift"])
        return _parse_pi(raw)
    raise ConfigError(["bad_phi"])


def _strict(data, cls, name):
    if not isinstance(data, dict):
        raise ConfigError([f"bad_section:{name}"])
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError([f"unknown_key:{name}.{k}" for k in unknown])
    return dict(data)


def parse_scenario(data, name=None):
    """Build a validated :class:`Scenario` from parsed JSON."""
    if not isinstance(data, dict):
        raise ConfigError(["scenario_not_an_object"])
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigError([f"unknown_section:{k}" for k in unknown])

    raw_cfg = _strict(data.get("config", {}), WaveformConfig, "config")
    defaults = WaveformConfig().to_dict()
    defaults["f0"] = None
    merged = {**defaults, **raw_cfg}
    phi_raw = merged.pop("phi")
    try:
        merged["phi"] = _resolve_phi(phi_raw, merged)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(["bad_phi"]) from None
    config = WaveformConfig(**merged)

    raw_fd = _strict(data.get("fdss", {}), FdssSpec, "fdss")
    if raw_fd.get("t_shift") == "half_pulse":
        raw_fd["t_shift"] = config.n_fft / (2 * config.n_symb)
    elif isinstance(raw_fd.get("t_shift"), str):
        raise ConfigError(["bad_t_shift"])
    if raw_fd.get("coefficients") is not None:
        raw_fd["coefficients"] = _complex_array(raw_fd["coefficients"])
    fdss = FdssSpec(**raw_fd)

    raw_sp = _strict(data.get("spreading", {}), SpreadingSpec, "spreading")
    if raw_sp.get("sequences") is not None:
        raw_sp["sequences"] = _complex_array(raw_sp["sequences"])
    spreading = SpreadingSpec(**raw_sp)

    band = BandSpec(**_strict(data.get("band", {}), BandSpec, "band"))
    channel = ChannelSpec(**_strict(data.get("channel", {}), ChannelSpec, "channel"))
    receiver = ReceiverConfig.from_dict(
        _strict(data.get("receiver", {}), ReceiverConfig, "receiver"))
    raw_h = _strict(data.get("harness", {}), HarnessSpec, "harness")
    if "snr_db" in raw_h:
        raw_h["snr_db"] = tuple(float(x) for x in raw_h["snr_db"])
    harness = HarnessSpec(**raw_h)

    scn = Scenario(
        name=name or data.get("name", "scenario"),
        config=config,
        fdss=fdss,
        spreading=spreading,
        band=band,
        channel=channel,
        receiver=receiver,
        harness=harness,
        description=data.get("description", ""),
        source=data,
    )
    return scn.validate()


def _complex_array(raw):
    """``[re, im]`` pair of equally shaped lists, or a real list."""
    arr = np.asarray(raw, dtype=float)
    if arr.ndim >= 2 and arr.shape[0] == 2:
        return arr[0] + 1j * arr[1]
    return arr.astype(complex)


def load_scenario_data(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"invalid_json:{exc.msg}"]) from None


def load_scenario(path):
    return parse_scenario(load_scenario_data(path))


def list_presets():
    root = resources.files("lpwus") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset_data(name):
    """Raw JSON object of a preset (before parsing)."""
    path = resources.files("lpwus") / "presets" / f"{name}.json"
    if not path.is_file():
        raise ConfigError([f"unknown_preset:{name}"])
    return json.loads(path.read_text())


def load_preset(name):
    return parse_scenario(load_preset_data(name), name=name)
